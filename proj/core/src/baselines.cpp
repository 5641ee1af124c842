#include "radcom/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "radcom/cone_program.hpp"
#include "radcom/conic_solver.hpp"
#include "sca_common.hpp"

namespace radcom {

namespace {

using detail::kAuxFloor;
using detail::log2_1p;
using detail::quad_form;

}  // namespace

SchemeResult solve_tdma_single(const ChannelSet& channels,
                               const Scenario& scenario,
                               const RadarContext& ctx,
                               const PenaltyConfig& config) {
  detail::check_instance(channels, scenario, ctx, "solve_tdma_single");
  config.validate();
  if (scenario.k_pairs != 1) {
    throw ContractError("solve_tdma_single designs a single pair (got "
                        "k_pairs = " +
                        std::to_string(scenario.k_pairs) + ")");
  }

  const int n = scenario.n_antennas;
  const double p = ctx.p_max;
  const double sqrt_p = std::sqrt(p);
  const CVector hbar_r = sqrt_p * channels.h_r[0];
  const CVector hbar_c = sqrt_p * channels.h_c[0];
  const HermitianMatrix big_r = HermitianMatrix::outer(hbar_r);
  const HermitianMatrix big_c = HermitianMatrix::outer(hbar_c);
  // Half-rate slots fold into a doubled rate exponent on the threshold.
  const double gamma_slot = std::exp2(2.0 * scenario.rbar_m_bits) - 1.0;

  std::vector<HermitianMatrix> w = {
      herm_scale(HermitianMatrix::identity(n), 1.0 / n)};

  SchemeResult out;
  out.total_cov = HermitianMatrix::zero(n);
  DesignStatus status = DesignStatus::kMaxOuterReached;
  std::string message;
  double eta = config.eta0;
  bool solved_once = false;

  const auto exact_objective = [&](double inv_eta) {
    return -quad_form(hbar_c, w[0]) +
           inv_eta * rank_one_residual(clip_psd(w[0]));
  };

  for (int outer = 0; outer < config.max_outer; ++outer) {
    ++out.outer_iterations;
    const double inv_eta = 1.0 / eta;
    out.inner_objectives.emplace_back();
    double f_prev = exact_objective(inv_eta);
    bool broke_down = false;

    for (int inner = 0; inner < config.max_inner; ++inner) {
      ConeProgram prog;
      const int blk = prog.add_herm_block(n);
      prog.add_eq(prog.trace_expr(blk), 1.0);
      prog.add_ge(prog.inner_expr(blk, big_r), gamma_slot);
      prog.add_ge(prog.inner_expr(blk, big_c), gamma_slot);
      detail::add_mismatch_budget(prog, {blk}, ctx);
      AffineExpr obj = -prog.inner_expr(blk, big_c);
      obj += detail::penalty_term(prog, blk, w[0], inv_eta);
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
      HermitianMatrix prev = w[0];
      w[0] = prog.herm_value(blk, sol.x);
      const double f = exact_objective(inv_eta);
      // The subproblem majorises the exact objective and touches it at the
      // expansion point, so an increase can only be solver noise: keep the
      // previous iterate and stop this round.
      if (f > f_prev) {
        w[0] = std::move(prev);
        break;
      }
      ++out.inner_iterations;
      out.inner_objectives.back().push_back(f);
      const bool stalled = std::abs(f_prev - f) <=
                           config.eps_inner * std::max(1.0, std::abs(f_prev));
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
  out.total_cov = herm_scale(w[0], p);
  out.mismatch = mismatch_ratio(out.total_cov, ctx.ideal, ctx.grid);
  out.beamformers = {detail::extract_physical(w[0], p)};

  const double t_r = quad_form(hbar_r, w[0]);
  const double t_c = quad_form(hbar_c, w[0]);
  out.multicast_min_matrix_bits =
      0.5 * std::min(log2_1p(t_r), log2_1p(t_c));
  out.unicast_sum_matrix_bits = 0.5 * log2_1p(t_c);

  const CVector& v = out.beamformers[0];
  const double g_r = std::norm(channels.h_r[0].dot(v));
  const double g_c = std::norm(channels.h_c[0].dot(v));
  out.multicast_min_bits = 0.5 * std::min(log2_1p(g_r), log2_1p(g_c));
  out.unicast_sum_bits = 0.5 * log2_1p(g_c);
  out.pair_unicast_bits = RVector::Constant(1, out.unicast_sum_bits);
  out.pair_multicast_bits = RVector::Constant(1, out.multicast_min_bits);
  return out;
}

SchemeResult solve_cbf_no_sic(const ChannelSet& channels,
                              const Scenario& scenario,
                              const RadarContext& ctx,
                              const PenaltyConfig& config) {
  detail::check_instance(channels, scenario, ctx, "solve_cbf_no_sic");
  config.validate();
  if (scenario.k_pairs != 1) {
    throw ContractError("solve_cbf_no_sic designs a single pair (got "
                        "k_pairs = " +
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

  SchemeResult out;
  out.total_cov = HermitianMatrix::zero(n);

  // Multicast QoS rows shared by every program below.
  const auto add_qos = [&](ConeProgram& prog, int wm, int wu,
                           const AffineExpr* slack) {
    for (const HermitianMatrix* h : {&big_r, &big_c}) {
      AffineExpr e =
          prog.inner_expr(wm, *h) - gamma_m * prog.inner_expr(wu, *h);
      if (slack != nullptr) e -= *slack;
      prog.add_ge(std::move(e), gamma_m);
    }
  };

  // ---- initialisation -----------------------------------------------------
  // Phase 1 decides feasibility (maximise the worst QoS slack); phase 2 packs
  // as much power as the QoS rows allow into the unicast block so the SINR
  // linearisation starts from a live expansion point.
  std::vector<HermitianMatrix> w(2, HermitianMatrix::zero(n));
  {
    ConeProgram prog;
    const int wm = prog.add_herm_block(n);
    const int wu = prog.add_herm_block(n);
    const int slack = prog.add_scalar();
    prog.add_eq(prog.trace_expr(wm) + prog.trace_expr(wu), 1.0);
    detail::add_mismatch_budget(prog, {wm, wu}, ctx);
    const AffineExpr slack_expr = AffineExpr::variable(slack);
    add_qos(prog, wm, wu, &slack_expr);
    prog.minimize(-AffineExpr::variable(slack));
    const SolverSolution sol = solve(prog, config.solver);
    if (!sol.usable()) {
      out.status = DesignStatus::kSolverFailure;
      out.message = "initialisation solve failed: " + sol.message;
      return out;
    }
    if (prog.scalar_value(slack, sol.x) < -1e-9) {
      out.status = DesignStatus::kInfeasible;
      out.message = "multicast target unattainable within the power and "
                    "pattern budgets";
      return out;
    }
  }
  {
    ConeProgram prog;
    const int wm = prog.add_herm_block(n);
    const int wu = prog.add_herm_block(n);
    prog.add_eq(prog.trace_expr(wm) + prog.trace_expr(wu), 1.0);
    detail::add_mismatch_budget(prog, {wm, wu}, ctx);
    add_qos(prog, wm, wu, nullptr);
    prog.minimize(-prog.inner_expr(wu, big_c));
    const SolverSolution sol = solve(prog, config.solver);
    if (!sol.usable()) {
      out.status = DesignStatus::kSolverFailure;
      out.message = "initialisation solve failed: " + sol.message;
      return out;
    }
    w[0] = prog.herm_value(wm, sol.x);
    w[1] = prog.herm_value(wu, sol.x);
  }

  const auto exact_objective = [&](double inv_eta) {
    const double sinr =
        quad_form(hbar_c, w[1]) / (quad_form(hbar_c, w[0]) + 1.0);
    return -log2_1p(sinr) + inv_eta * (rank_one_residual(clip_psd(w[0])) +
                                       rank_one_residual(clip_psd(w[1])));
  };

  // ---- double-layer penalty loop ------------------------------------------
  DesignStatus status = DesignStatus::kMaxOuterReached;
  std::string message;
  double eta = config.eta0;

  for (int outer = 0; outer < config.max_outer; ++outer) {
    ++out.outer_iterations;
    const double inv_eta = 1.0 / eta;
    out.inner_objectives.emplace_back();
    double f_prev = exact_objective(inv_eta);
    bool broke_down = false;

    for (int inner = 0; inner < config.max_inner; ++inner) {
      const double t_u = quad_form(hbar_c, w[1]);
      const double denom = quad_form(hbar_c, w[0]) + 1.0;
      const double bn = std::max(std::sqrt(t_u), kAuxFloor);
      const double varpin = std::max(t_u / denom, kAuxFloor);

      ConeProgram prog;
      const int wm = prog.add_herm_block(n);
      const int wu = prog.add_herm_block(n);
      const int v_varpi = prog.add_scalar(0.0);
      const int v_b = prog.add_scalar(0.0);
      prog.add_eq(prog.trace_expr(wm) + prog.trace_expr(wu), 1.0);
      detail::add_mismatch_budget(prog, {wm, wu}, ctx);
      add_qos(prog, wm, wu, nullptr);
      // B^2 <= tr(H_c W_u), then varpi <= B^2 / (tr(H_c W_m) + 1).
      prog.add_rsoc(prog.inner_expr(wu, big_c), AffineExpr(1.0),
                    {AffineExpr::variable(v_b)});
      AffineExpr ratio = detail::ratio_bound(v_b, v_varpi, bn, varpin);
      ratio -= prog.inner_expr(wm, big_c);
      prog.add_ge(std::move(ratio), 1.0);

      AffineExpr obj = -detail::rate_tangent(v_varpi, varpin);
      obj += detail::penalty_term(prog, wm, w[0], inv_eta);
      obj += detail::penalty_term(prog, wu, w[1], inv_eta);
      prog.minimize(std::move(obj));

      const SolverSolution sol = solve(prog, config.solver);
      if (!sol.usable()) {
        status = DesignStatus::kSolverFailure;
        message = "subproblem solve failed: " + sol.message;
        broke_down = true;
        break;
      }
      std::vector<HermitianMatrix> prev = w;
      w[0] = prog.herm_value(wm, sol.x);
      w[1] = prog.herm_value(wu, sol.x);
      const double f = exact_objective(inv_eta);
      // Keep the previous iterate when solver noise produces an ascent step
      // (the surrogate majorises the exact objective at the expansion point).
      if (f > f_prev) {
        w = std::move(prev);
        break;
      }
      ++out.inner_iterations;
      out.inner_objectives.back().push_back(f);
      const bool stalled = std::abs(f_prev - f) <=
                           config.eps_inner * std::max(1.0, std::abs(f_prev));
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

  const double tm_r = quad_form(hbar_r, w[0]);
  const double tm_c = quad_form(hbar_c, w[0]);
  const double tu_r = quad_form(hbar_r, w[1]);
  const double tu_c = quad_form(hbar_c, w[1]);
  out.multicast_min_matrix_bits = std::min(log2_1p(tm_r / (tu_r + 1.0)),
                                           log2_1p(tm_c / (tu_c + 1.0)));
  out.unicast_sum_matrix_bits = log2_1p(tu_c / (tm_c + 1.0));

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
  out.unicast_sum_bits = log2_1p(gain(h_c, v_u) / (gain(h_c, v_m) + 1.0));
  out.pair_unicast_bits = RVector::Constant(1, out.unicast_sum_bits);
  out.pair_multicast_bits = RVector::Constant(1, out.multicast_min_bits);
  return out;
}

SchemeResult solve_tdma_multi(const ChannelSet& channels,
                              const Scenario& scenario,
                              const RadarContext& ctx,
                              const PenaltyConfig& config,
                              const std::vector<double>& rbar_bits_per_pair) {
  detail::check_instance(channels, scenario, ctx, "solve_tdma_multi");
  config.validate();
  const int k = scenario.k_pairs;
  if (k < 2) {
    throw ContractError("solve_tdma_multi requires k_pairs >= 2 (use "
                        "solve_tdma_single for one pair)");
  }

  const int n = scenario.n_antennas;
  std::vector<double> gamma_slot(k,
                                 std::exp2(2.0 * scenario.rbar_m_bits) - 1.0);
  if (!rbar_bits_per_pair.empty()) {
    if (static_cast<int>(rbar_bits_per_pair.size()) != k) {
      throw ContractError("solve_tdma_multi: rbar_bits_per_pair must list one "
                          "target per pair");
    }
    for (int i = 0; i < k; ++i) {
      if (!(rbar_bits_per_pair[i] >= 0.0) ||
          !std::isfinite(rbar_bits_per_pair[i])) {
        throw ContractError("solve_tdma_multi: per-pair multicast targets "
                            "must be finite and >= 0");
      }
      gamma_slot[i] = std::exp2(2.0 * rbar_bits_per_pair[i]) - 1.0;
    }
  }

  const double p = ctx.p_max;
  const double sqrt_p = std::sqrt(p);
  std::vector<CVector> hbar_r(k), hbar_c(k);
  std::vector<HermitianMatrix> big_r, big_c;
  big_r.reserve(k);
  big_c.reserve(k);
  for (int i = 0; i < k; ++i) {
    hbar_r[i] = sqrt_p * channels.h_r[i];
    hbar_c[i] = sqrt_p * channels.h_c[i];
    big_r.push_back(HermitianMatrix::outer(hbar_r[i]));
    big_c.push_back(HermitianMatrix::outer(hbar_c[i]));
  }

  SchemeResult out;
  out.total_cov = HermitianMatrix::zero(n);

  const auto gains_of = [&](const std::vector<HermitianMatrix>& ws,
                            const std::vector<CVector>& hs, int user) {
    return detail::cross_gains(hs[user], ws);
  };

  // ---- initialisation: max-min slot-SINR slack ----------------------------
  std::vector<HermitianMatrix> w(k, HermitianMatrix::zero(n));
  {
    ConeProgram prog;
    std::vector<int> blocks(k);
    for (int i = 0; i < k; ++i) blocks[i] = prog.add_herm_block(n);
    const int slack = prog.add_scalar();
    AffineExpr power;
    for (int i = 0; i < k; ++i) power += prog.trace_expr(blocks[i]);
    prog.add_eq(std::move(power), 1.0);
    detail::add_mismatch_budget(prog, blocks, ctx);
    for (int i = 0; i < k; ++i) {
      for (const auto* big : {&big_r, &big_c}) {
        AffineExpr e = prog.inner_expr(blocks[i], (*big)[i]);
        for (int j = 0; j < k; ++j) {
          if (j != i) {
            e -= gamma_slot[i] * prog.inner_expr(blocks[j], (*big)[i]);
          }
        }
        e.add(slack, -1.0);
        prog.add_ge(std::move(e), gamma_slot[i]);
      }
    }
    prog.minimize(-AffineExpr::variable(slack));
    const SolverSolution sol = solve(prog, config.solver);
    if (!sol.usable()) {
      out.status = DesignStatus::kSolverFailure;
      out.message = "initialisation solve failed: " + sol.message;
      return out;
    }
    if (prog.scalar_value(slack, sol.x) < -1e-9) {
      out.status = DesignStatus::kInfeasible;
      out.message = "multicast targets unattainable within the power and "
                    "pattern budgets";
      return out;
    }
    for (int i = 0; i < k; ++i) w[i] = prog.herm_value(blocks[i], sol.x);
  }

  const auto exact_objective = [&](double inv_eta) {
    double f = 0.0;
    for (int i = 0; i < k; ++i) {
      const RVector g = gains_of(w, hbar_c, i);
      const double sinr = g(i) / (g.sum() - g(i) + 1.0);
      f -= log2_1p(sinr);
      f += inv_eta * rank_one_residual(clip_psd(w[i]));
    }
    return f;
  };

  // ---- double-layer penalty loop ------------------------------------------
  DesignStatus status = DesignStatus::kMaxOuterReached;
  std::string message;
  double eta = config.eta0;

  for (int outer = 0; outer < config.max_outer; ++outer) {
    ++out.outer_iterations;
    const double inv_eta = 1.0 / eta;
    out.inner_objectives.emplace_back();
    double f_prev = exact_objective(inv_eta);
    bool broke_down = false;

    for (int inner = 0; inner < config.max_inner; ++inner) {
      ConeProgram prog;
      std::vector<int> blocks(k);
      for (int i = 0; i < k; ++i) blocks[i] = prog.add_herm_block(n);
      std::vector<int> v_varpi(k), v_ar(k), v_ac(k), v_b(k);
      for (int i = 0; i < k; ++i) {
        v_varpi[i] = prog.add_scalar(0.0);
        v_ar[i] = prog.add_scalar(0.0);
        v_ac[i] = prog.add_scalar(0.0);
        v_b[i] = prog.add_scalar(0.0);
      }
      AffineExpr power;
      for (int i = 0; i < k; ++i) power += prog.trace_expr(blocks[i]);
      prog.add_eq(std::move(power), 1.0);
      detail::add_mismatch_budget(prog, blocks, ctx);

      AffineExpr objective;
      for (int i = 0; i < k; ++i) {
        const RVector gr = gains_of(w, hbar_r, i);
        const RVector gc = gains_of(w, hbar_c, i);
        const double in_r = gr.sum() - gr(i) + 1.0;
        const double in_c = gc.sum() - gc(i) + 1.0;
        const double an_r = std::max(std::sqrt(in_r), kAuxFloor);
        const double an_c = std::max(std::sqrt(in_c), kAuxFloor);
        const double bn = std::max(std::sqrt(gc(i)), kAuxFloor);
        const double varpin = std::max(gc(i) / in_c, kAuxFloor);

        // Slot QoS for both users: tr(H W_k) >= gamma A^2, A^2 >= I + 1.
        for (const bool at_r : {true, false}) {
          const auto& big = at_r ? big_r[i] : big_c[i];
          const int a_var = at_r ? v_ar[i] : v_ac[i];
          prog.add_rsoc(prog.inner_expr(blocks[i], big), AffineExpr(1.0),
                        {std::sqrt(gamma_slot[i]) *
                         AffineExpr::variable(a_var)});
          AffineExpr ups = detail::square_bound(a_var, at_r ? an_r : an_c);
          for (int j = 0; j < k; ++j) {
            if (j != i) ups -= prog.inner_expr(blocks[j], big);
          }
          prog.add_ge(std::move(ups), 1.0);
        }

        // Unicast slot SINR machinery.
        prog.add_rsoc(prog.inner_expr(blocks[i], big_c[i]), AffineExpr(1.0),
                      {AffineExpr::variable(v_b[i])});
        AffineExpr ratio =
            detail::ratio_bound(v_b[i], v_varpi[i], bn, varpin);
        for (int j = 0; j < k; ++j) {
          if (j != i) ratio -= prog.inner_expr(blocks[j], big_c[i]);
        }
        prog.add_ge(std::move(ratio), 1.0);

        objective -= detail::rate_tangent(v_varpi[i], varpin);
        objective += detail::penalty_term(prog, blocks[i], w[i], inv_eta);
      }
      prog.minimize(std::move(objective));

      const SolverSolution sol = solve(prog, config.solver);
      if (!sol.usable()) {
        status = DesignStatus::kSolverFailure;
        message = "subproblem solve failed: " + sol.message;
        broke_down = true;
        break;
      }
      std::vector<HermitianMatrix> prev = w;
      for (int i = 0; i < k; ++i) w[i] = prog.herm_value(blocks[i], sol.x);
      const double f = exact_objective(inv_eta);
      // Keep the previous iterate when solver noise produces an ascent step
      // (the surrogate majorises the exact objective at the expansion point).
      if (f > f_prev) {
        w = std::move(prev);
        break;
      }
      ++out.inner_iterations;
      out.inner_objectives.back().push_back(f);
      const bool stalled = std::abs(f_prev - f) <=
                           config.eps_inner * std::max(1.0, std::abs(f_prev));
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

  // ---- reporting ----------------------------------------------------------
  out.status = status;
  out.message = message;
  out.rank_one_residual = detail::max_rank_one_residual(w);
  HermitianMatrix total = HermitianMatrix::zero(n);
  for (const auto& wk : w) total = herm_add(total, wk);
  out.total_cov = herm_scale(total, p);
  out.mismatch = mismatch_ratio(out.total_cov, ctx.ideal, ctx.grid);
  out.beamformers.reserve(k);
  for (int i = 0; i < k; ++i) {
    out.beamformers.push_back(detail::extract_physical(w[i], p));
  }

  double min_mc = kInf;
  double sum_u = 0.0;
  for (int i = 0; i < k; ++i) {
    const RVector gr = gains_of(w, hbar_r, i);
    const RVector gc = gains_of(w, hbar_c, i);
    const double in_r = gr.sum() - gr(i) + 1.0;
    const double in_c = gc.sum() - gc(i) + 1.0;
    min_mc = std::min(min_mc, 0.5 * std::min(log2_1p(gr(i) / in_r),
                                             log2_1p(gc(i) / in_c)));
    sum_u += 0.5 * log2_1p(gc(i) / in_c);
  }
  out.multicast_min_matrix_bits = min_mc;
  out.unicast_sum_matrix_bits = sum_u;

  out.pair_unicast_bits.resize(k);
  out.pair_multicast_bits.resize(k);
  for (int i = 0; i < k; ++i) {
    double tr = 0.0, tc = 0.0, ir = 0.0, ic = 0.0;
    for (int j = 0; j < k; ++j) {
      const double a = std::norm(channels.h_r[i].dot(out.beamformers[j]));
      const double b = std::norm(channels.h_c[i].dot(out.beamformers[j]));
      if (j == i) {
        tr = a;
        tc = b;
      } else {
        ir += a;
        ic += b;
      }
    }
    out.pair_multicast_bits(i) = 0.5 * std::min(log2_1p(tr / (ir + 1.0)),
                                                log2_1p(tc / (ic + 1.0)));
    out.pair_unicast_bits(i) = 0.5 * log2_1p(tc / (ic + 1.0));
  }
  out.multicast_min_bits = out.pair_multicast_bits.minCoeff();
  out.unicast_sum_bits = out.pair_unicast_bits.sum();
  return out;
}

}  // namespace radcom
