#include "radcom/cb_noma.hpp"

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

// Cross-gain tables of the normalised state: g(k, j) = hbar_k^H Wbar_j hbar_k.
struct StateGains {
  RMatrix r, c;
};

StateGains compute_gains(const std::vector<CVector>& hbar_r,
                         const std::vector<CVector>& hbar_c,
                         const std::vector<HermitianMatrix>& w) {
  const int k = static_cast<int>(w.size());
  StateGains g{RMatrix(k, k), RMatrix(k, k)};
  for (int i = 0; i < k; ++i) {
    g.r.row(i) = detail::cross_gains(hbar_r[i], w).transpose();
    g.c.row(i) = detail::cross_gains(hbar_c[i], w).transpose();
  }
  return g;
}

double interference(const RMatrix& g, int k) {
  return g.row(k).sum() - g(k, k);
}

// Expansion points for the auxiliary variables, one entry per pair, computed
// from the latest primal state and clamped below so the first-order bound
// coefficients stay finite.
struct Aux {
  RVector varpi, b, a_r, a_c;
};

Aux aux_from_state(const StateGains& g, const RVector& alpha_u) {
  const int k = static_cast<int>(alpha_u.size());
  Aux aux{RVector(k), RVector(k), RVector(k), RVector(k)};
  for (int i = 0; i < k; ++i) {
    const double own = alpha_u(i) * g.c(i, i);
    const double denom_c = interference(g.c, i) + 1.0;
    aux.b(i) = std::max(std::sqrt(own), kAuxFloor);
    aux.varpi(i) = std::max(own / denom_c, kAuxFloor);
    aux.a_r(i) = std::max(std::sqrt(interference(g.r, i) + 1.0), kAuxFloor);
    aux.a_c(i) = std::max(std::sqrt(denom_c), kAuxFloor);
  }
  return aux;
}

double exact_objective(const StateGains& g, const RVector& alpha_u,
                       const std::vector<HermitianMatrix>& w, double inv_eta) {
  double f = 0.0;
  for (int i = 0; i < static_cast<int>(w.size()); ++i) {
    const double sinr =
        alpha_u(i) * g.c(i, i) / (interference(g.c, i) + 1.0);
    f -= log2_1p(sinr);
    f += inv_eta * rank_one_residual(clip_psd(w[i]));
  }
  return f;
}

}  // namespace

PairRates rates_cb(const std::vector<CVector>& channels_r,
                   const std::vector<CVector>& channels_c,
                   const std::vector<CVector>& beamformers,
                   const RVector& alpha_m, const RVector& alpha_u) {
  const int k = static_cast<int>(beamformers.size());
  if (k < 1 || channels_r.size() != beamformers.size() ||
      channels_c.size() != beamformers.size() ||
      alpha_m.size() != k || alpha_u.size() != k) {
    throw ContractError("rates_cb: channel/beamformer/split counts disagree");
  }
  for (int i = 0; i < k; ++i) {
    if (channels_r[i].size() != beamformers[i].size() ||
        channels_c[i].size() != beamformers[i].size()) {
      throw ContractError("rates_cb: vector dimensions disagree");
    }
    if (alpha_m(i) < -1e-9 || alpha_u(i) < -1e-9 ||
        std::abs(alpha_m(i) + alpha_u(i) - 1.0) > 1e-6) {
      throw ContractError(
          "rates_cb: power splits must be nonnegative and sum to 1");
    }
  }

  RMatrix gain_r(k, k), gain_c(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      gain_r(i, j) = std::norm(channels_r[i].dot(beamformers[j]));
      gain_c(i, j) = std::norm(channels_c[i].dot(beamformers[j]));
    }
  }

  PairRates out;
  out.multicast_to_r_bits.resize(k);
  out.multicast_to_c_bits.resize(k);
  out.multicast_bits.resize(k);
  out.unicast_bits.resize(k);
  for (int i = 0; i < k; ++i) {
    const double ir = gain_r.row(i).sum() - gain_r(i, i);
    const double ic = gain_c.row(i).sum() - gain_c(i, i);
    const double tr = gain_r(i, i);
    const double tc = gain_c(i, i);
    out.multicast_to_r_bits(i) =
        log2_1p(alpha_m(i) * tr / (alpha_u(i) * tr + ir + 1.0));
    out.multicast_to_c_bits(i) =
        log2_1p(alpha_m(i) * tc / (alpha_u(i) * tc + ic + 1.0));
    out.multicast_bits(i) =
        std::min(out.multicast_to_r_bits(i), out.multicast_to_c_bits(i));
    out.unicast_bits(i) = log2_1p(alpha_u(i) * tc / (ic + 1.0));
  }
  out.sum_unicast_bits = out.unicast_bits.sum();
  out.min_multicast_bits = out.multicast_bits.minCoeff();
  return out;
}

SchemeResult solve_cb(const ChannelSet& channels, const Scenario& scenario,
                      const RadarContext& ctx, const PenaltyConfig& config,
                      const std::vector<double>& rbar_bits_per_pair) {
  detail::check_instance(channels, scenario, ctx, "solve_cb");
  config.validate();
  const int k = scenario.k_pairs;
  const int n = scenario.n_antennas;

  std::vector<double> gamma(k, scenario.gamma_bar_m());
  if (!rbar_bits_per_pair.empty()) {
    if (static_cast<int>(rbar_bits_per_pair.size()) != k) {
      throw ContractError("solve_cb: rbar_bits_per_pair must list one target "
                          "per pair");
    }
    for (int i = 0; i < k; ++i) {
      if (!(rbar_bits_per_pair[i] >= 0.0) ||
          !std::isfinite(rbar_bits_per_pair[i])) {
        throw ContractError("solve_cb: per-pair multicast targets must be "
                            "finite and >= 0");
      }
      gamma[i] = std::exp2(rbar_bits_per_pair[i]) - 1.0;
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

  // ---- initialisation: fixed 0.5/0.5 split, max-min multicast slack -------
  std::vector<HermitianMatrix> w(k, HermitianMatrix::zero(n));
  RVector alpha_m = RVector::Constant(k, 0.5);
  RVector alpha_u = RVector::Constant(k, 0.5);
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
        // (alpha_m - gamma alpha_u) T - gamma (I + 1) >= slack at 0.5/0.5.
        AffineExpr e =
            0.5 * (1.0 - gamma[i]) * prog.inner_expr(blocks[i], (*big)[i]);
        for (int j = 0; j < k; ++j) {
          if (j != i) e -= gamma[i] * prog.inner_expr(blocks[j], (*big)[i]);
        }
        e.add(slack, -1.0);
        prog.add_ge(std::move(e), gamma[i]);
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
      out.message = "multicast targets unattainable at the 0.5/0.5 split "
                    "within the power and pattern budgets";
      return out;
    }
    for (int i = 0; i < k; ++i) w[i] = prog.herm_value(blocks[i], sol.x);
  }

  // ---- double-layer penalty loop ------------------------------------------
  DesignStatus status = DesignStatus::kMaxOuterReached;
  std::string message;
  double eta = config.eta0;

  for (int outer = 0; outer < config.max_outer; ++outer) {
    ++out.outer_iterations;
    const double inv_eta = 1.0 / eta;
    out.inner_objectives.emplace_back();
    StateGains gains = compute_gains(hbar_r, hbar_c, w);
    double f_prev = exact_objective(gains, alpha_u, w, inv_eta);
    bool broke_down = false;

    for (int inner = 0; inner < config.max_inner; ++inner) {
      const Aux aux = aux_from_state(gains, alpha_u);

      ConeProgram prog;
      std::vector<int> blocks(k);
      for (int i = 0; i < k; ++i) blocks[i] = prog.add_herm_block(n);
      std::vector<int> v_am(k), v_au(k), v_varpi(k), v_ar(k), v_ac(k), v_b(k);
      for (int i = 0; i < k; ++i) {
        v_am[i] = prog.add_scalar(0.0);
        v_au[i] = prog.add_scalar(0.0);
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
        AffineExpr simplex = AffineExpr::variable(v_am[i]);
        simplex.add(v_au[i], 1.0);
        prog.add_eq(std::move(simplex), 1.0);

        // Multicast QoS, both users: gamma A^2 <= (alpha_m - gamma alpha_u) T.
        for (const bool at_r : {true, false}) {
          const auto& big = at_r ? big_r[i] : big_c[i];
          const int a_var = at_r ? v_ar[i] : v_ac[i];
          AffineExpr mix = AffineExpr::variable(v_am[i]);
          mix.add(v_au[i], -gamma[i]);
          prog.add_rsoc(std::move(mix), prog.inner_expr(blocks[i], big),
                        {std::sqrt(gamma[i]) *
                         AffineExpr::variable(a_var)});
          // Interference-plus-noise lower bound: A^2 >= I + 1 via the
          // first-order bound, exact at the expansion point.
          AffineExpr ups = detail::square_bound(
              a_var, at_r ? aux.a_r(i) : aux.a_c(i));
          for (int j = 0; j < k; ++j) {
            if (j != i) ups -= prog.inner_expr(blocks[j], big);
          }
          prog.add_ge(std::move(ups), 1.0);
        }

        // Unicast power term: B^2 <= alpha_u T.
        prog.add_rsoc(AffineExpr::variable(v_au[i]),
                      prog.inner_expr(blocks[i], big_c[i]),
                      {AffineExpr::variable(v_b[i])});
        // Unicast SINR: varpi <= B^2 / (I + 1) via the ratio bound.
        AffineExpr ratio = detail::ratio_bound(v_b[i], v_varpi[i], aux.b(i),
                                               aux.varpi(i));
        for (int j = 0; j < k; ++j) {
          if (j != i) ratio -= prog.inner_expr(blocks[j], big_c[i]);
        }
        prog.add_ge(std::move(ratio), 1.0);

        objective -= detail::rate_tangent(v_varpi[i], aux.varpi(i));
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
      std::vector<HermitianMatrix> cand_w(k, HermitianMatrix::zero(n));
      RVector cand_am(k), cand_au(k);
      for (int i = 0; i < k; ++i) {
        cand_w[i] = prog.herm_value(blocks[i], sol.x);
        cand_am(i) = prog.scalar_value(v_am[i], sol.x);
        cand_au(i) = prog.scalar_value(v_au[i], sol.x);
      }
      StateGains cand_gains = compute_gains(hbar_r, hbar_c, cand_w);
      const double f = exact_objective(cand_gains, cand_au, cand_w, inv_eta);
      // The subproblem under-approximates the rate and majorises the penalty,
      // both exactly at the expansion point, so an increase can only be solver
      // noise: keep the previous iterate and stop this round.
      if (f > f_prev) break;
      w = std::move(cand_w);
      alpha_m = std::move(cand_am);
      alpha_u = std::move(cand_au);
      gains = std::move(cand_gains);
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
  out.power_split_m = alpha_m;
  out.power_split_u = alpha_u;
  out.beamformers.reserve(k);
  for (int i = 0; i < k; ++i) {
    out.beamformers.push_back(detail::extract_physical(w[i], p));
  }

  const StateGains gains = compute_gains(hbar_r, hbar_c, w);
  double min_mc = kInf;
  double sum_u = 0.0;
  for (int i = 0; i < k; ++i) {
    const double ir = interference(gains.r, i);
    const double ic = interference(gains.c, i);
    const double tr = gains.r(i, i);
    const double tc = gains.c(i, i);
    min_mc = std::min(
        min_mc,
        std::min(log2_1p(alpha_m(i) * tr / (alpha_u(i) * tr + ir + 1.0)),
                 log2_1p(alpha_m(i) * tc / (alpha_u(i) * tc + ic + 1.0))));
    sum_u += log2_1p(alpha_u(i) * tc / (ic + 1.0));
  }
  out.multicast_min_matrix_bits = min_mc;
  out.unicast_sum_matrix_bits = sum_u;

  const PairRates vec_rates =
      rates_cb(channels.h_r, channels.h_c, out.beamformers, alpha_m, alpha_u);
  out.unicast_sum_bits = vec_rates.sum_unicast_bits;
  out.multicast_min_bits = vec_rates.min_multicast_bits;
  out.pair_unicast_bits = vec_rates.unicast_bits;
  out.pair_multicast_bits = vec_rates.multicast_bits;
  return out;
}

}  // namespace radcom
