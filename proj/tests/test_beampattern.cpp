// Grid/template construction, a direct-summation oracle for the quadratic-form
// pattern evaluation, and invariants of the reference pattern solve.

#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"

#include "radcom/beampattern.hpp"
#include "radcom/channel.hpp"
#include "radcom/rng.hpp"
#include "radcom/types.hpp"

using namespace radcom;

namespace {

// Independent O(n^2) evaluation of a(theta)^H R a(theta).
double direct_gain(const CMatrix& r, double theta_deg) {
  const int n = static_cast<int>(r.rows());
  const double s = std::sin(theta_deg * kPi / 180.0);
  Complex acc(0.0, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      acc += std::exp(Complex(0.0, kPi * (j - i) * s)) * r(i, j);
    }
  }
  return acc.real();
}

HermitianMatrix random_psd(int n, uint64_t key) {
  const Philox gen(key);
  CMatrix a(n, n);
  uint64_t c = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Philox::NormalPair z = gen.normal_pair(0, c++);
      a(i, j) = Complex(z.z0, z.z1);
    }
  }
  return HermitianMatrix((a * a.adjoint()).eval());
}

}  // namespace

TEST_CASE("angular grid spans [-90, 90] with zero on the odd grid") {
  const AngularGrid g(61);
  CHECK(g.size() == 61);
  CHECK(g.theta_deg()(0) == doctest::Approx(-90.0));
  CHECK(g.theta_deg()(60) == doctest::Approx(90.0));
  CHECK(g.theta_deg()(30) == doctest::Approx(0.0));
  CHECK(g.spacing_deg() == doctest::Approx(3.0));

  CHECK_THROWS_AS(AngularGrid(60), ContractError);  // even
  CHECK_THROWS_AS(AngularGrid(1), ContractError);   // too small
}

TEST_CASE("desired template is one inside each requested band") {
  const AngularGrid g(181);
  const RVector d = desired_pattern(g, {-60.0, 60.0}, 10.0);
  REQUIRE(d.size() == 181);
  auto value_at = [&](double angle) {
    for (int i = 0; i < g.size(); ++i) {
      if (std::abs(g.theta_deg()(i) - angle) < 1e-12) return d(i);
    }
    FAIL("angle not on grid");
    return 0.0;
  };
  CHECK(value_at(-60.0) == 1.0);
  CHECK(value_at(60.0) == 1.0);
  CHECK(value_at(-56.0) == 1.0);  // inside the 10-degree band
  CHECK(value_at(0.0) == 0.0);
  CHECK(value_at(-50.0) == 0.0);
  CHECK(value_at(90.0) == 0.0);

  CHECK_THROWS_AS(desired_pattern(g, {}, 10.0), ContractError);
  CHECK_THROWS_AS(desired_pattern(g, {0.0}, 0.0), ContractError);
}

TEST_CASE("pattern evaluation matches direct summation") {
  const AngularGrid g(41);
  const HermitianMatrix cov = random_psd(5, 2024);
  const RVector pattern = evaluate_pattern(cov, g);
  REQUIRE(pattern.size() == 41);
  for (int i = 0; i < g.size(); ++i) {
    const double ref = direct_gain(cov.mat(), g.theta_deg()(i));
    CHECK(pattern(i) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("optimal delta minimizes the matching error") {
  const AngularGrid g(61);
  const RVector d = desired_pattern(g, {0.0}, 20.0);
  const RVector p = evaluate_pattern(random_psd(4, 7), g);

  const double best = optimal_delta(d, p);
  CHECK(best >= 0.0);
  const double err = pattern_error(d, p, best);
  CHECK(err <= pattern_error(d, p, best + 1e-3));
  CHECK(err <= pattern_error(d, p, std::max(0.0, best - 1e-3)));
  // Closed form: delta* = <d, p> / <d, d> for the unconstrained fit.
  CHECK(best == doctest::Approx(d.dot(p) / d.dot(d)).epsilon(1e-12));

  // Anti-correlated pattern pushes the unconstrained fit negative; the
  // constrained optimum clamps at zero.
  const RVector flipped = -p;
  CHECK(optimal_delta(d, flipped) == 0.0);
}

TEST_CASE("reference solve satisfies its own invariants at two antennas") {
  const AngularGrid g(41);
  const RVector d = desired_pattern(g, {0.0}, 10.0);
  const IdealPattern ideal = solve_ideal_pattern(2, 10.0, g, d);

  CHECK(ideal.cov.trace() == doctest::Approx(10.0).epsilon(1e-7));
  CHECK(min_eigenvalue(ideal.cov) >= -1e-7);
  CHECK(ideal.delta_star >= 0.0);
  CHECK(ideal.error_star ==
        doctest::Approx(pattern_error(d, ideal.pattern, ideal.delta_star))
            .epsilon(1e-8));
  // By definition the reference covariance itself has zero fractional excess.
  CHECK(mismatch_ratio(ideal.cov, ideal, g) ==
        doctest::Approx(0.0).epsilon(1e-7));
}
