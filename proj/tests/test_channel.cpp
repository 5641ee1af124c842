// Channel-model oracles: steering geometry, path-loss arithmetic, fading
// moments, and the per-trial substream contract.

#include <cmath>
#include <complex>
#include <string>

#include "doctest.h"

#include "radcom/channel.hpp"
#include "radcom/types.hpp"

using namespace radcom;

TEST_CASE("steering vectors have unit-modulus entries and exact geometry") {
  const CVector broadside = steering_vector(0.0, 6);
  for (int i = 0; i < 6; ++i) CHECK(broadside(i) == Complex(1.0, 0.0));

  const CVector endfire = steering_vector(90.0, 4);
  for (int i = 0; i < 4; ++i) {
    // sin(90 deg) = 1, so entry i is exp(j pi i) = (-1)^i up to roundoff.
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    CHECK(std::abs(endfire(i) - Complex(sign, 0.0)) < 1e-12);
  }

  const CVector a = steering_vector(37.0, 8);
  CHECK(a.squaredNorm() == doctest::Approx(8.0).epsilon(1e-12));
  for (int i = 0; i < 8; ++i) {
    CHECK(std::abs(a(i)) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const CVector mirrored = steering_vector(-37.0, 8);
  CHECK((mirrored - a.conjugate()).norm() < 1e-12);

  CHECK_THROWS_AS(steering_vector(91.0, 4), ContractError);
  CHECK_THROWS_AS(steering_vector(0.0, 0), ContractError);
}

TEST_CASE("path loss follows L0 + 10 alpha log10(d)") {
  CHECK(path_loss_db(PathLossModel::kLineOfSight, 1.0) == doctest::Approx(40.0));
  CHECK(path_loss_db(PathLossModel::kLineOfSight, 1000.0) ==
        doctest::Approx(100.0));
  CHECK(path_loss_db(PathLossModel::kNonLineOfSight, 100.0) ==
        doctest::Approx(100.0));
  CHECK(path_loss_db(PathLossModel::kNonLineOfSight, 10.0, 50.0) ==
        doctest::Approx(80.0));
  CHECK_THROWS_AS(path_loss_db(PathLossModel::kLineOfSight, 0.5),
                  ContractError);
}

TEST_CASE("line-of-sight channels are scaled steering vectors") {
  Scenario sc;
  sc.n_antennas = 8;
  sc.k_pairs = 3;
  sc.radar_angles_deg = {-60.0, 0.0, 60.0};
  const ChannelSet ch = generate_channels(sc, 5);
  REQUIRE(ch.h_r.size() == 3);
  REQUIRE(ch.h_c.size() == 3);
  CHECK(ch.p_max_linear == doctest::Approx(sc.p_max_linear()));

  const double g_r = db_to_linear(
      -path_loss_db(PathLossModel::kLineOfSight, sc.d_r_m, sc.l0_db));
  for (int k = 0; k < 3; ++k) {
    const CVector expected =
        std::sqrt(g_r) * steering_vector(sc.radar_angles_deg[k], 8);
    CHECK((ch.h_r[k] - expected).norm() < 1e-15 * expected.norm());
  }
}

TEST_CASE("fading channels have the configured second moment") {
  Scenario sc;  // N = 4 defaults
  const double g_c = db_to_linear(
      -path_loss_db(PathLossModel::kNonLineOfSight, sc.d_c_m, sc.l0_db));
  const int trials = 4000;
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    sum += generate_channels(sc, t).h_c[0].squaredNorm();
  }
  const double mean_entry = sum / (trials * sc.n_antennas);
  // |h_i|^2 / g_c is Exp(1); the mean over 16000 draws has sd 1/sqrt(16000).
  CHECK(std::abs(mean_entry / g_c - 1.0) <
        5.0 / std::sqrt(trials * 4.0));
}

TEST_CASE("channel draws are pure functions of (seed, trial)") {
  Scenario sc;
  sc.k_pairs = 2;
  sc.radar_angles_deg = {-30.0, 30.0};
  const ChannelSet a = generate_channels(sc, 7);
  const ChannelSet b = generate_channels(sc, 7);
  CHECK((a.h_c[0] - b.h_c[0]).norm() == 0.0);
  CHECK((a.h_c[1] - b.h_c[1]).norm() == 0.0);

  const ChannelSet other_trial = generate_channels(sc, 8);
  CHECK((a.h_c[0] - other_trial.h_c[0]).norm() > 0.0);

  Scenario reseeded = sc;
  reseeded.seed = 2;
  const ChannelSet other_seed = generate_channels(reseeded, 7);
  CHECK((a.h_c[0] - other_seed.h_c[0]).norm() > 0.0);

  // Pairs draw from disjoint substreams.
  CHECK((a.h_c[0] - a.h_c[1]).norm() > 0.0);
}

TEST_CASE("scenario validation names the offending field") {
  Scenario sc;
  sc.n_antennas = 0;
  CHECK_THROWS_WITH_AS(sc.validate(),
                       doctest::Contains("n_antennas"), ContractError);

  Scenario mismatch;
  mismatch.k_pairs = 2;  // still only one radar angle listed
  CHECK_THROWS_WITH_AS(mismatch.validate(),
                       doctest::Contains("radar_angles_deg"), ContractError);

  Scenario width;
  width.beam_width_deg = 0.0;
  CHECK_THROWS_WITH_AS(width.validate(),
                       doctest::Contains("beam_width_deg"), ContractError);

  Scenario rate;
  rate.rbar_m_bits = -0.1;
  CHECK_THROWS_WITH_AS(rate.validate(),
                       doctest::Contains("rbar_m_bits"), ContractError);
}

TEST_CASE("built-in radar angle sets cover one to six pairs") {
  for (int k = 1; k <= 6; ++k) {
    const std::vector<double> angles = default_radar_angles(k);
    CHECK(angles.size() == static_cast<size_t>(k));
    // Symmetric about broadside.
    for (int i = 0; i < k; ++i) {
      CHECK(angles[i] == doctest::Approx(-angles[k - 1 - i]));
    }
  }
  CHECK_THROWS_AS(default_radar_angles(0), ContractError);
  CHECK_THROWS_AS(default_radar_angles(7), ContractError);
}
