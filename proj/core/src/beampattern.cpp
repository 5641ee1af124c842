#include "radcom/beampattern.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "radcom/channel.hpp"

namespace radcom {

AngularGrid::AngularGrid(int points) {
  if (points < 3 || points % 2 == 0) {
    throw ContractError("angular grid needs an odd point count >= 3");
  }
  theta_deg_ = RVector::LinSpaced(points, -90.0, 90.0);
}

double AngularGrid::spacing_deg() const {
  return 180.0 / static_cast<double>(size() - 1);
}

RVector desired_pattern(const AngularGrid& grid,
                        const std::vector<double>& center_angles_deg,
                        double beam_width_deg) {
  if (center_angles_deg.empty()) {
    throw ContractError("desired pattern needs at least one beam center");
  }
  if (!(beam_width_deg > 0.0)) {
    throw ContractError("beam width must be positive");
  }
  RVector d = RVector::Zero(grid.size());
  const double half = 0.5 * beam_width_deg;
  for (int i = 0; i < grid.size(); ++i) {
    const double theta = grid.theta_deg()(i);
    for (const double c : center_angles_deg) {
      if (theta >= c - half && theta <= c + half) {
        d(i) = 1.0;
        break;
      }
    }
  }
  return d;
}

RVector evaluate_pattern(const HermitianMatrix& cov, const AngularGrid& grid) {
  const int n = cov.dim();
  RVector p(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const CVector a = steering_vector(grid.theta_deg()(i), n);
    p(i) = std::real(a.dot(cov.mat() * a));  // Eigen dot conjugates its caller
  }
  return p;
}

double pattern_error(const RVector& desired, const RVector& pattern,
                     double delta) {
  if (desired.size() != pattern.size()) {
    throw ContractError("pattern/template grid size mismatch");
  }
  return (delta * desired - pattern).squaredNorm();
}

double optimal_delta(const RVector& desired, const RVector& pattern) {
  const double dd = desired.squaredNorm();
  if (dd <= 0.0) {
    throw ContractError("template is identically zero");
  }
  return std::max(0.0, desired.dot(pattern) / dd);
}

IdealPattern solve_ideal_pattern(int n_antennas, double p_max,
                                 const AngularGrid& grid,
                                 const RVector& desired,
                                 const SolverOptions& options) {
  if (n_antennas < 1) throw ContractError("antenna count must be positive");
  if (!(p_max > 0.0)) throw ContractError("transmit power must be positive");
  if (desired.size() != grid.size()) {
    throw ContractError("template length must match the grid");
  }
  if (desired.maxCoeff() <= 0.0) {
    throw ContractError("template is identically zero");
  }

  // Work at unit transmit power: with Rbar = R/p and dbar = delta/p the
  // residual scales by p, so the minimizer is invariant and errors scale by
  // p^2. The covariance must live on a native Hermitian block: a general real
  // 2n x 2n PSD block would be a loose relaxation, because the rank-one
  // residual data a_r a_r^T is not invariant under the complex structure, and
  // projecting the optimum back to Hermitian form would lose optimality.
  const int n = n_antennas;
  ConeProgram prog;
  const int blk = prog.add_herm_block(n);
  const int dbar = prog.add_scalar(0.0);
  const int t = prog.add_scalar(0.0);

  prog.add_eq(prog.trace_expr(blk), 1.0);
  std::vector<AffineExpr> resid;
  resid.reserve(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const CVector a = steering_vector(grid.theta_deg()(i), n);
    // a^H R a = <a a^H, R>.
    AffineExpr e = AffineExpr::variable(dbar, desired(i)) -
                   prog.inner_expr(blk, HermitianMatrix::outer(a));
    resid.push_back(std::move(e));
  }
  prog.add_soc(AffineExpr::variable(t), std::move(resid));
  prog.minimize(AffineExpr::variable(t));

  const SolverSolution sol = solve(prog, options);
  if (!sol.usable()) {
    std::ostringstream os;
    os << "reference beampattern solve failed: " << to_string(sol.status)
       << " (" << sol.message << ")";
    throw SolveError(os.str(), sol.status);
  }

  HermitianMatrix rbar = prog.herm_value(blk, sol.x);
  // Snap to the PSD cone and the exact trace before reporting.
  rbar = clip_psd(rbar);
  const double tr = rbar.trace();
  if (!(tr > 0.0)) throw SolveError("degenerate covariance", sol.status);

  IdealPattern out;
  out.cov = herm_scale(rbar, p_max / tr);
  out.pattern = evaluate_pattern(out.cov, grid);
  out.desired = desired;
  // Re-optimize the template scale against the reported covariance so that
  // delta_star and error_star are exactly consistent with it.
  out.delta_star = optimal_delta(desired, out.pattern);
  out.error_star = pattern_error(desired, out.pattern, out.delta_star);
  return out;
}

double mismatch_ratio(const HermitianMatrix& cov, const IdealPattern& ideal,
                      const AngularGrid& grid) {
  if (ideal.desired.size() != grid.size()) {
    throw ContractError("ideal pattern was computed on a different grid");
  }
  const RVector p = evaluate_pattern(cov, grid);
  const double err = pattern_error(ideal.desired, p, ideal.delta_star);
  if (ideal.error_star <= 0.0) {
    return err <= 0.0 ? 0.0 : kInf;
  }
  return (err - ideal.error_star) / ideal.error_star;
}

}  // namespace radcom
