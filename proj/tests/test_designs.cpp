// Design-level checks at desk scale: independent rate recomputation from the
// returned beamformers, dominance/monotonicity relations between schemes, and
// contract enforcement.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"

#include "radcom/baselines.hpp"
#include "radcom/bb_noma.hpp"
#include "radcom/cb_noma.hpp"
#include "radcom/channel.hpp"
#include "radcom/penalty.hpp"
#include "radcom/rng.hpp"
#include "radcom/types.hpp"

using namespace radcom;

namespace {

double log2_1p(double x) { return std::log1p(x) / std::log(2.0); }

double gain(const CVector& h, const CVector& w) {
  return std::norm(h.dot(w));  // |h^H w|^2; Eigen dot conjugates its caller
}

PenaltyConfig fast_config() {
  PenaltyConfig cfg;
  return cfg;
}

RadarContext context_for(const Scenario& sc) {
  return make_radar_context(sc, 61);
}

// Independent recomputation of the headline (beamformer-level) rates of each
// single-pair scheme; mirrors the decoding order documented in the headers.
struct PairRatesOracle {
  double multicast = 0.0;
  double unicast = 0.0;
};

PairRatesOracle oracle_bb(const ChannelSet& ch, const SchemeResult& res) {
  const CVector& wm = res.beamformers.at(0);
  const CVector& wu = res.beamformers.at(1);
  const double m_r = log2_1p(gain(ch.h_r[0], wm) / (gain(ch.h_r[0], wu) + 1.0));
  const double m_c = log2_1p(gain(ch.h_c[0], wm) / (gain(ch.h_c[0], wu) + 1.0));
  return {std::min(m_r, m_c), log2_1p(gain(ch.h_c[0], wu))};
}

PairRatesOracle oracle_cbf(const ChannelSet& ch, const SchemeResult& res) {
  const CVector& wm = res.beamformers.at(0);
  const CVector& wu = res.beamformers.at(1);
  const double m_r = log2_1p(gain(ch.h_r[0], wm) / (gain(ch.h_r[0], wu) + 1.0));
  const double m_c = log2_1p(gain(ch.h_c[0], wm) / (gain(ch.h_c[0], wu) + 1.0));
  const double u =
      log2_1p(gain(ch.h_c[0], wu) / (gain(ch.h_c[0], wm) + 1.0));
  return {std::min(m_r, m_c), u};
}

PairRatesOracle oracle_tdma(const ChannelSet& ch, const SchemeResult& res) {
  const CVector& w = res.beamformers.at(0);
  const double m =
      0.5 * std::min(log2_1p(gain(ch.h_r[0], w)), log2_1p(gain(ch.h_c[0], w)));
  return {m, 0.5 * log2_1p(gain(ch.h_c[0], w))};
}

void check_certificates(const Scenario& sc, const RadarContext& ctx,
                        const SchemeResult& res, const PairRatesOracle& oracle) {
  REQUIRE(res.status == DesignStatus::kConverged);
  CHECK(res.multicast_min_bits == doctest::Approx(oracle.multicast).epsilon(1e-9));
  CHECK(res.unicast_sum_bits == doctest::Approx(oracle.unicast).epsilon(1e-9));
  CHECK(oracle.multicast >= sc.rbar_m_bits - 1e-6);
  CHECK(res.total_cov.trace() ==
        doctest::Approx(sc.p_max_linear()).epsilon(1e-6));
  CHECK(res.mismatch <= sc.gamma_bar_b() + 1e-6);
  CHECK(res.mismatch ==
        doctest::Approx(mismatch_ratio(res.total_cov, ctx.ideal, ctx.grid))
            .epsilon(1e-9));
  CHECK(res.rank_one_residual <= 1e-5);
}

}  // namespace

TEST_CASE("single-pair designs are certified by direct rate recomputation") {
  const Scenario sc;  // N = 4 defaults
  const RadarContext ctx = context_for(sc);
  const ChannelSet ch = generate_channels(sc, 0);
  const PenaltyConfig cfg = fast_config();

  const SchemeResult bb = solve_bb(ch, sc, ctx, cfg);
  check_certificates(sc, ctx, bb, oracle_bb(ch, bb));

  const SchemeResult tdma = solve_tdma_single(ch, sc, ctx, cfg);
  check_certificates(sc, ctx, tdma, oracle_tdma(ch, tdma));

  const SchemeResult cbf = solve_cbf_no_sic(ch, sc, ctx, cfg);
  check_certificates(sc, ctx, cbf, oracle_cbf(ch, cbf));

  // Relaxation-level and extracted rates agree once the blocks are rank one.
  CHECK(bb.unicast_sum_bits ==
        doctest::Approx(bb.unicast_sum_matrix_bits).epsilon(1e-4));
  CHECK(bb.multicast_min_bits ==
        doctest::Approx(bb.multicast_min_matrix_bits).epsilon(1e-4));

  // Per-pair vectors collapse to the headline numbers for one pair.
  REQUIRE(bb.pair_unicast_bits.size() == 1);
  CHECK(bb.pair_unicast_bits(0) == doctest::Approx(bb.unicast_sum_bits));
}

TEST_CASE("cluster rate helper matches a direct formula evaluation") {
  const int n = 4, k = 3;
  const Philox gen(99);
  std::vector<CVector> hr(k), hc(k), w(k);
  uint64_t c = 0;
  auto draw = [&](double scale) {
    CVector v(n);
    for (int i = 0; i < n; ++i) {
      const Philox::NormalPair z = gen.normal_pair(2, c++);
      v(i) = scale * Complex(z.z0, z.z1);
    }
    return v;
  };
  for (int i = 0; i < k; ++i) {
    hr[i] = draw(1.0);
    hc[i] = draw(0.7);
    w[i] = draw(2.0);
  }
  RVector am(k), au(k);
  am << 0.3, 0.5, 0.9;
  au = RVector::Ones(k) - am;

  const PairRates rates = rates_cb(hr, hc, w, am, au);
  double sum_u = 0.0;
  for (int i = 0; i < k; ++i) {
    double t_r = gain(hr[i], w[i]), t_c = gain(hc[i], w[i]);
    double i_r = 0.0, i_c = 0.0;
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      i_r += gain(hr[i], w[j]);
      i_c += gain(hc[i], w[j]);
    }
    const double m_r = log2_1p(am(i) * t_r / (au(i) * t_r + i_r + 1.0));
    const double m_c = log2_1p(am(i) * t_c / (au(i) * t_c + i_c + 1.0));
    const double u = log2_1p(au(i) * t_c / (i_c + 1.0));
    CHECK(rates.multicast_to_r_bits(i) == doctest::Approx(m_r).epsilon(1e-12));
    CHECK(rates.multicast_to_c_bits(i) == doctest::Approx(m_c).epsilon(1e-12));
    CHECK(rates.multicast_bits(i) ==
          doctest::Approx(std::min(m_r, m_c)).epsilon(1e-12));
    CHECK(rates.unicast_bits(i) == doctest::Approx(u).epsilon(1e-12));
    sum_u += u;
  }
  CHECK(rates.sum_unicast_bits == doctest::Approx(sum_u).epsilon(1e-12));
  CHECK(rates.min_multicast_bits ==
        doctest::Approx(rates.multicast_bits.minCoeff()).epsilon(1e-12));

  RVector bad = am;
  bad(0) = 0.6;  // splits no longer sum to one
  CHECK_THROWS_AS(rates_cb(hr, hc, w, bad, au), ContractError);
}

TEST_CASE("one-pair cluster design cannot beat the two-beam design") {
  const Scenario sc;
  const RadarContext ctx = context_for(sc);
  const ChannelSet ch = generate_channels(sc, 0);
  const SchemeResult bb = solve_bb(ch, sc, ctx, fast_config());
  const SchemeResult cb = solve_cb(ch, sc, ctx, fast_config());
  REQUIRE(bb.usable());
  REQUIRE(cb.usable());
  // Any (w, alpha) cluster solution maps to the pair (sqrt(alpha_m) w,
  // sqrt(alpha_u) w), so the two-beam optimum dominates up to SCA noise.
  CHECK(cb.unicast_sum_bits <= bb.unicast_sum_bits + 1e-3);
}

TEST_CASE("tighter multicast targets cannot raise the unicast optimum") {
  Scenario relaxed;
  relaxed.rbar_m_bits = 0.5;
  Scenario tight = relaxed;
  tight.rbar_m_bits = 1.5;
  const RadarContext ctx = context_for(relaxed);  // power/pattern identical
  const ChannelSet ch = generate_channels(relaxed, 0);

  const SchemeResult easy = solve_tdma_single(ch, relaxed, ctx, fast_config());
  const SchemeResult hard = solve_tdma_single(ch, tight, ctx, fast_config());
  REQUIRE(easy.status == DesignStatus::kConverged);
  REQUIRE(hard.status == DesignStatus::kConverged);
  CHECK(hard.unicast_sum_bits <= easy.unicast_sum_bits + 1e-6);
  CHECK(hard.multicast_min_bits >= tight.rbar_m_bits - 1e-6);
}

TEST_CASE("impossible targets are reported infeasible, not failed") {
  Scenario sc;
  sc.rbar_m_bits = 20.0;  // far beyond the single-user capacity
  const RadarContext ctx = context_for(sc);
  const ChannelSet ch = generate_channels(sc, 0);

  const SchemeResult bb = solve_bb(ch, sc, ctx, fast_config());
  CHECK(bb.status == DesignStatus::kInfeasible);
  CHECK_FALSE(bb.usable());

  const SchemeResult tdma = solve_tdma_single(ch, sc, ctx, fast_config());
  CHECK(tdma.status == DesignStatus::kInfeasible);
}

TEST_CASE("pair-count contracts are enforced") {
  Scenario two;
  two.k_pairs = 2;
  two.radar_angles_deg = default_radar_angles(2);
  const ChannelSet ch2 = generate_channels(two, 0);
  const RadarContext ctx2 = context_for(two);
  CHECK_THROWS_AS(solve_bb(ch2, two, ctx2), ContractError);
  CHECK_THROWS_AS(solve_tdma_single(ch2, two, ctx2), ContractError);
  CHECK_THROWS_AS(solve_cbf_no_sic(ch2, two, ctx2), ContractError);

  Scenario one;
  const ChannelSet ch1 = generate_channels(one, 0);
  const RadarContext ctx1 = context_for(one);
  CHECK_THROWS_AS(solve_tdma_multi(ch1, one, ctx1), ContractError);

  // Channels from a different scenario shape are rejected up front.
  CHECK_THROWS_AS(solve_bb(ch2, one, ctx1), ContractError);
}
