// Conic solver against problems with closed-form optima, an infeasibility
// certificate, the real/complex embedding cross-check, and the independent
// solution validator.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"

#include "radcom/conic_solver.hpp"
#include "radcom/hermitian.hpp"
#include "radcom/rng.hpp"
#include "radcom/types.hpp"

using namespace radcom;

namespace {

// Optimal status must come with residuals at the requested tolerance, and the
// point must satisfy the original constraints by the independent validator.
void check_certified(const ConeProgram& prog, const SolverSolution& sol,
                     double tol = 1e-8) {
  REQUIRE(sol.status == SolverStatus::kOptimal);
  CHECK(sol.primal_residual <= tol);
  CHECK(sol.dual_residual <= tol);
  CHECK(sol.relative_gap <= tol);
  CHECK(validate_solution(prog, sol.x).ok(1e-6));
}

CMatrix random_hermitian(int n, uint64_t key) {
  const Philox gen(key);
  CMatrix a(n, n);
  uint64_t c = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Philox::NormalPair z = gen.normal_pair(0, c++);
      a(i, j) = Complex(z.z0, z.z1);
    }
  }
  return 0.5 * (a + a.adjoint()).eval();
}

}  // namespace

TEST_CASE("bounded lp attains its closed-form optimum") {
  ConeProgram prog;
  const int x = prog.add_scalar(-kInf, 3.0);
  prog.minimize(-AffineExpr::variable(x));
  const SolverSolution sol = solve(prog);
  check_certified(prog, sol);
  CHECK(sol.objective == doctest::Approx(-3.0).epsilon(1e-7));
  CHECK(prog.scalar_value(x, sol.x) == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("equalities and inequalities pin the lp solution") {
  // min x + y  s.t.  x + y >= 1,  x - y = 0.2  ->  (0.6, 0.4), value 1.
  ConeProgram prog;
  const int x = prog.add_scalar();
  const int y = prog.add_scalar();
  prog.add_ge(AffineExpr::variable(x) + AffineExpr::variable(y), 1.0);
  prog.add_eq(AffineExpr::variable(x) - AffineExpr::variable(y), 0.2);
  prog.minimize(AffineExpr::variable(x) + AffineExpr::variable(y));
  const SolverSolution sol = solve(prog);
  check_certified(prog, sol);
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(prog.scalar_value(x, sol.x) == doctest::Approx(0.6).epsilon(1e-6));
  CHECK(prog.scalar_value(y, sol.x) == doctest::Approx(0.4).epsilon(1e-6));
}

TEST_CASE("second-order cone yields the euclidean distance") {
  // min t  s.t.  ||(x - 3, 4)|| <= t  ->  x = 3, t = 4.
  ConeProgram prog;
  const int x = prog.add_scalar();
  const int t = prog.add_scalar();
  std::vector<AffineExpr> v;
  v.push_back(AffineExpr::variable(x) - 3.0);
  v.push_back(AffineExpr(4.0));
  prog.add_soc(AffineExpr::variable(t), std::move(v));
  prog.minimize(AffineExpr::variable(t));
  const SolverSolution sol = solve(prog);
  check_certified(prog, sol);
  CHECK(sol.objective == doctest::Approx(4.0).epsilon(1e-7));
  CHECK(prog.scalar_value(x, sol.x) == doctest::Approx(3.0).epsilon(1e-5));
}

TEST_CASE("rotated cone models a quadratic over a linear term") {
  // min u  s.t.  u * 1 >= x^2,  x = 2  ->  u = 4.
  ConeProgram prog;
  const int u = prog.add_scalar(0.0);
  const int x = prog.add_scalar();
  prog.add_eq(AffineExpr::variable(x), 2.0);
  prog.add_rsoc(AffineExpr::variable(u), AffineExpr(1.0),
                {AffineExpr::variable(x)});
  prog.minimize(AffineExpr::variable(u));
  const SolverSolution sol = solve(prog);
  check_certified(prog, sol);
  CHECK(sol.objective == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("symmetric psd block recovers the smallest eigenvalue") {
  // min <C, X>  s.t.  tr X = 1, X >= 0  ->  lambda_min(C).
  const int n = 4;
  RMatrix c(n, n);
  const Philox gen(31);
  uint64_t ctr = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) c(i, j) = gen.normal_pair(0, ctr++).z0;
  }
  c = (0.5 * (c + c.transpose())).eval();

  ConeProgram prog;
  const int blk = prog.add_sym_block(n);
  prog.add_eq(prog.trace_expr(blk), 1.0);
  prog.minimize(prog.inner_expr(blk, c));
  const SolverSolution sol = solve(prog);
  check_certified(prog, sol);

  Eigen::SelfAdjointEigenSolver<RMatrix> es(c);
  REQUIRE(es.info() == Eigen::Success);
  CHECK(sol.objective == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-6));

  const RMatrix x = prog.sym_value(blk, sol.x);
  CHECK(x.trace() == doctest::Approx(1.0).epsilon(1e-7));
  Eigen::SelfAdjointEigenSolver<RMatrix> ex(x);
  CHECK(ex.eigenvalues()(0) >= -1e-7);
}

TEST_CASE("hermitian psd block agrees with its real embedding") {
  const int n = 3;
  const CMatrix c = random_hermitian(n, 47);
  const HermitianMatrix ch(c);

  ConeProgram herm;
  const int hb = herm.add_herm_block(n);
  herm.add_eq(herm.trace_expr(hb), 1.0);
  herm.minimize(herm.inner_expr(hb, ch));
  const SolverSolution hs = solve(herm);
  check_certified(herm, hs);

  // Embedded version: eigenvalues double up, so the minimum over trace-one
  // PSD matrices is the same lambda_min(C).
  ConeProgram real;
  const int rb = real.add_sym_block(2 * n);
  real.add_eq(real.trace_expr(rb), 1.0);
  real.minimize(real.inner_expr(rb, real_embed(ch)));
  const SolverSolution rs = solve(real);
  check_certified(real, rs);

  Eigen::SelfAdjointEigenSolver<CMatrix> es(c);
  REQUIRE(es.info() == Eigen::Success);
  CHECK(hs.objective == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-6));
  CHECK(rs.objective == doctest::Approx(hs.objective).epsilon(1e-6));

  const HermitianMatrix x = herm.herm_value(hb, hs.x);
  CHECK(x.trace() == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(min_eigenvalue(x) >= -1e-7);
}

TEST_CASE("conflicting constraints produce an infeasibility certificate") {
  ConeProgram prog;
  const int x = prog.add_scalar();
  prog.add_ge(AffineExpr::variable(x), 2.0);
  prog.add_le(AffineExpr::variable(x), 1.0);
  prog.minimize(AffineExpr::variable(x));
  const SolverSolution sol = solve(prog);
  CHECK(sol.status == SolverStatus::kInfeasible);
  CHECK_FALSE(sol.usable());
}

TEST_CASE("solver options are validated") {
  ConeProgram prog;
  const int x = prog.add_scalar(0.0, 1.0);
  prog.minimize(AffineExpr::variable(x));
  SolverOptions bad;
  bad.tol = 1e-2;  // outside the accepted [1e-10, 1e-4] band
  CHECK_THROWS_AS(solve(prog, bad), ContractError);
  SolverOptions bad_iters;
  bad_iters.max_iters = 0;
  CHECK_THROWS_AS(solve(prog, bad_iters), ContractError);
}

TEST_CASE("the validator flags violated points and passes solutions") {
  ConeProgram prog;
  const int x = prog.add_scalar(0.0);
  prog.add_eq(AffineExpr::variable(x), 1.0);
  prog.minimize(AffineExpr::variable(x));
  const SolverSolution sol = solve(prog);
  check_certified(prog, sol);

  RVector off = sol.x;
  off(0) = 3.0;  // breaks the equality by 2
  const ValidationReport report = validate_solution(prog, off);
  CHECK(report.eq > 0.1);
  CHECK_FALSE(report.ok(1e-6));
}
