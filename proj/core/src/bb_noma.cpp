#include "radcom/bb_noma.hpp"

#include <algorithm>
#include <cmath>

#include "radcom/cone_program.hpp"
#include "radcom/conic_solver.hpp"
#include "sca_common.hpp"

namespace radcom {

namespace {

using detail::log2_1p;
using detail::quad_form;

// Exact penalised objective at the current normalised iterate:
// -unicast quadratic form + (1/eta) * sum of rank-one residuals.
double exact_objective(const CVector& hbar_c,
                       const std::vector<HermitianMatrix>& w, double inv_eta) {
  return -quad_form(hbar_c, w[1]) +
         inv_eta * (rank_one_residual(clip_psd(w[0])) +
                    rank_one_residual(clip_psd(w[1])));
}

}  // namespace

SchemeResult solve_bb(const ChannelSet& channels, const Scenario& scenario,
                      const RadarContext& ctx, const PenaltyConfig& config) {
  detail::check_instance(channels, scenario, ctx, "solve_bb");
  config.validate();
  if (scenario.k_pairs != 1) {
    throw ContractError("solve_bb designs a single pair (got k_pairs = " +
                        std::to_string(scenario.k_pairs) + ")");
  }

  const int n = scenario.n_antennas;
  const double p = ctx.p_max;
  const double sqrt_p = std::sqrt(p);
  const CVector hbar_r = sqrt_p * channels.h_r[0];
  const CVector hbar_c = sqrt_p * channels.h_c[0];
  const HermitianMatrix big_r = HermitianMatrix::outer(hbar_r);
  const HermitianMatrix big_c = HermitianMatrix::outer(hbar_c);
  const double gamma_m = scenario.gamma_bar_m();

  // Normalised iterate {W_m, W_u} (sum of traces = 1).
  std::vector<HermitianMatrix> w(
      2, herm_scale(HermitianMatrix::identity(n), 0.5 / n));

  SchemeResult out;
  out.total_cov = HermitianMatrix::zero(n);
  DesignStatus status = DesignStatus::kMaxOuterReached;
  std::string message;
  double eta = config.eta0;
  bool solved_once = false;

  for (int outer = 0; outer < config.max_outer; ++outer) {
    ++out.outer_iterations;
    const double inv_eta = 1.0 / eta;
    out.inner_objectives.emplace_back();
    double f_prev = exact_objective(hbar_c, w, inv_eta);
    bool broke_down = false;

    for (int inner = 0; inner < config.max_inner; ++inner) {
      ConeProgram prog;
      const int wm = prog.add_herm_block(n);
      const int wu = prog.add_herm_block(n);
      prog.add_eq(prog.trace_expr(wm) + prog.trace_expr(wu), 1.0);
      for (const HermitianMatrix* h : {&big_r, &big_c}) {
        prog.add_ge(prog.inner_expr(wm, *h) - gamma_m * prog.inner_expr(wu, *h),
                    gamma_m);
      }
      detail::add_mismatch_budget(prog, {wm, wu}, ctx);
      AffineExpr obj = -prog.inner_expr(wu, big_c);
      obj += detail::penalty_term(prog, wm, w[0], inv_eta);
      obj += detail::penalty_term(prog, wu, w[1], inv_eta);
      prog.minimize(std::move(obj));

      const SolverSolution sol = solve(prog, config.solver);
      if (sol.status == SolverStatus::kInfeasible && !solved_once) {
        out.status = DesignStatus::kInfeasible;
        out.message =
            "QoS + power + pattern budget admit no covariance: " + sol.message;
        return out;
      }
      if (!sol.usable()) {
        status = DesignStatus::kSolverFailure;
        message = "subproblem solve failed: " + sol.message;
        broke_down = true;
        break;
      }
      solved_once = true;
      std::vector<HermitianMatrix> cand = {prog.herm_value(wm, sol.x),
                                           prog.herm_value(wu, sol.x)};
      const double f = exact_objective(hbar_c, cand, inv_eta);
      // The subproblem majorises the exact objective and touches it at the
      // expansion point, so an increase can only be solver noise: keep the
      // previous iterate and stop this round.
      if (f > f_prev) break;
      w = std::move(cand);
      ++out.inner_iterations;
      out.inner_objectives.back().push_back(f);
      const bool stalled =
          std::abs(f_prev - f) <= config.eps_inner * std::max(1.0, std::abs(f_prev));
      f_prev = f;
      if (stalled) break;
    }
    if (broke_down) break;

    if (detail::max_rank_one_residual(w) <= config.eps_outer) {
      status = DesignStatus::kConverged;
      break;
    }
    eta *= config.eta_scale;
    if (eta < config.eta_floor) break;
  }

  out.status = status;
  out.message = message;
  out.rank_one_residual = detail::max_rank_one_residual(w);
  out.total_cov = herm_scale(herm_add(w[0], w[1]), p);
  out.mismatch = mismatch_ratio(out.total_cov, ctx.ideal, ctx.grid);
  out.beamformers = {detail::extract_physical(w[0], p),
                     detail::extract_physical(w[1], p)};

  // Covariance-level rates (normalised quadratic forms equal physical ones).
  const double tm_r = quad_form(hbar_r, w[0]);
  const double tm_c = quad_form(hbar_c, w[0]);
  const double tu_r = quad_form(hbar_r, w[1]);
  const double tu_c = quad_form(hbar_c, w[1]);
  out.multicast_min_matrix_bits = std::min(log2_1p(tm_r / (tu_r + 1.0)),
                                           log2_1p(tm_c / (tu_c + 1.0)));
  out.unicast_sum_matrix_bits = log2_1p(tu_c);

  // Rank-one beamformer rates (what the transmitter can actually radiate).
  const CVector& v_m = out.beamformers[0];
  const CVector& v_u = out.beamformers[1];
  const auto gain = [](const CVector& h, const CVector& v) {
    return std::norm(h.dot(v));
  };
  const CVector& h_r = channels.h_r[0];
  const CVector& h_c = channels.h_c[0];
  out.multicast_min_bits =
      std::min(log2_1p(gain(h_r, v_m) / (gain(h_r, v_u) + 1.0)),
               log2_1p(gain(h_c, v_m) / (gain(h_c, v_u) + 1.0)));
  out.unicast_sum_bits = log2_1p(gain(h_c, v_u));
  out.pair_unicast_bits = RVector::Constant(1, out.unicast_sum_bits);
  out.pair_multicast_bits = RVector::Constant(1, out.multicast_min_bits);
  return out;
}

}  // namespace radcom
