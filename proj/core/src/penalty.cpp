#include "radcom/penalty.hpp"

#include <sstream>

namespace radcom {

void PenaltyConfig::validate() const {
  std::ostringstream os;
  if (!(eta0 > 0.0)) {
    os << "penalty.eta0 must be > 0 (got " << eta0 << ")";
  } else if (!(eta_scale > 0.0 && eta_scale < 1.0)) {
    os << "penalty.eta_scale must be in (0, 1) (got " << eta_scale << ")";
  } else if (!(eta_floor > 0.0 && eta_floor <= eta0)) {
    os << "penalty.eta_floor must be in (0, eta0] (got " << eta_floor << ")";
  } else if (!(eps_inner > 0.0)) {
    os << "penalty.eps_inner must be > 0 (got " << eps_inner << ")";
  } else if (!(eps_outer > 0.0)) {
    os << "penalty.eps_outer must be > 0 (got " << eps_outer << ")";
  } else if (max_inner < 1) {
    os << "penalty.max_inner must be >= 1 (got " << max_inner << ")";
  } else if (max_outer < 1) {
    os << "penalty.max_outer must be >= 1 (got " << max_outer << ")";
  } else if (!(solver.tol >= 1e-10 && solver.tol <= 1e-4)) {
    os << "penalty.solver.tol must be in [1e-10, 1e-4] (got " << solver.tol
       << ")";
  } else if (solver.max_iters < 1) {
    os << "penalty.solver.max_iters must be >= 1 (got " << solver.max_iters
       << ")";
  }
  const std::string msg = os.str();
  if (!msg.empty()) throw ContractError(msg);
}

const char* to_string(DesignStatus status) {
  switch (status) {
    case DesignStatus::kConverged:
      return "converged";
    case DesignStatus::kMaxOuterReached:
      return "max_outer";
    case DesignStatus::kInfeasible:
      return "infeasible";
    case DesignStatus::kSolverFailure:
      return "solver_failure";
  }
  return "unknown";
}

RadarContext make_radar_context(const Scenario& scenario, int grid_points,
                                const SolverOptions& options) {
  scenario.validate();
  RadarContext ctx;
  ctx.grid = AngularGrid(grid_points);
  const RVector desired =
      desired_pattern(ctx.grid, scenario.radar_angles_deg,
                      scenario.beam_width_deg);
  ctx.ideal = solve_ideal_pattern(scenario.n_antennas,
                                  scenario.p_max_linear(), ctx.grid, desired,
                                  options);
  ctx.gamma_bar_b = scenario.gamma_bar_b();
  ctx.p_max = scenario.p_max_linear();
  return ctx;
}

}  // namespace radcom
