#pragma once

// Internal helpers shared by the double-layer penalty designs (not installed).
//
// Conventions used throughout the design modules:
//   * normalised scale: blocks W-bar = W / p with sum of traces <= 1, channels
//     h-bar = sqrt(p) h, so every SINR quadratic form h^H W h equals
//     h-bar^H W-bar h-bar and is scale-free;
//   * the exact rank-one penalty tr W - lambda_max(W) is linearised through
//     its dominant eigenvector: <I - vhat vhat^H, W> (constants dropped);
//   * auxiliary SINR variables varpi with bounds built from the bilinear
//     splits  varpi <= B^2 / (interference + 1),  B^2 <= power quadratic form,
//     convexified via the bound  B^2/varpi >= (2Bn/varpin) B - (Bn/varpin)^2
//     varpi  (exact at the expansion point).

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>
#include <vector>

#include "radcom/channel.hpp"
#include "radcom/cone_program.hpp"
#include "radcom/hermitian.hpp"
#include "radcom/penalty.hpp"
#include "radcom/types.hpp"

namespace radcom::detail {

// Cross-checks one design instance: channel dimensions against the scenario,
// and the radar context against the scenario's power budget and array size.
inline void check_instance(const ChannelSet& channels, const Scenario& sc,
                           const RadarContext& ctx, const char* where) {
  sc.validate();
  const std::string who(where);
  const int n = sc.n_antennas;
  const size_t k = static_cast<size_t>(sc.k_pairs);
  if (channels.h_r.size() != k || channels.h_c.size() != k) {
    throw ContractError(who + ": channel set lists " +
                        std::to_string(channels.h_r.size()) + "/" +
                        std::to_string(channels.h_c.size()) +
                        " pairs, scenario expects " + std::to_string(k));
  }
  for (size_t i = 0; i < k; ++i) {
    if (channels.h_r[i].size() != n || channels.h_c[i].size() != n) {
      throw ContractError(who + ": channel vectors must have " +
                          std::to_string(n) + " entries");
    }
  }
  if (ctx.ideal.cov.dim() != n) {
    throw ContractError(who + ": radar context was built for " +
                        std::to_string(ctx.ideal.cov.dim()) +
                        " antennas, scenario has " + std::to_string(n));
  }
  const double p = sc.p_max_linear();
  if (!(std::abs(ctx.p_max - p) <= 1e-9 * p) ||
      !(std::abs(channels.p_max_linear - p) <= 1e-9 * p)) {
    throw ContractError(who +
                        ": power budgets of scenario, channels and radar "
                        "context disagree");
  }
  if (ctx.ideal.desired.size() != ctx.grid.size()) {
    throw ContractError(who + ": radar context grid/template size mismatch");
  }
}

inline constexpr double kLn2 = 0.69314718055994530942;

// Floor applied to auxiliary expansion points so bound coefficients stay
// finite when an iterate has a (near) dead link.
inline constexpr double kAuxFloor = 1e-8;

inline double log2_1p(double x) { return std::log1p(x) / kLn2; }

// real(h^H W h); Eigen's dot conjugates its first argument.
inline double quad_form(const CVector& h, const HermitianMatrix& w) {
  return std::real(h.dot(w.mat() * h));
}

// g(j) = h^H W_j h for every block: own-signal and interference gains.
inline RVector cross_gains(const CVector& h,
                           const std::vector<HermitianMatrix>& ws) {
  RVector g(ws.size());
  for (size_t j = 0; j < ws.size(); ++j) {
    g(static_cast<int>(j)) = quad_form(h, ws[j]);
  }
  return g;
}

// (1/eta) <I - vhat vhat^H, W>: the spectral linearisation of the rank-one
// penalty at `current`, as an objective contribution for the next subproblem.
inline AffineExpr penalty_term(const ConeProgram& prog, int block,
                               const HermitianMatrix& current,
                               double inv_eta) {
  const EigenPair top = eigen_max(current);
  CMatrix c = CMatrix::Identity(current.dim(), current.dim());
  c.noalias() -= top.vector * top.vector.adjoint();
  return inv_eta * prog.inner_expr(block, HermitianMatrix(c));
}

inline double max_rank_one_residual(
    std::initializer_list<const HermitianMatrix*> ws) {
  double r = 0.0;
  for (const HermitianMatrix* w : ws) {
    r = std::max(r, rank_one_residual(clip_psd(*w)));
  }
  return r;
}

inline double max_rank_one_residual(const std::vector<HermitianMatrix>& ws) {
  double r = 0.0;
  for (const HermitianMatrix& w : ws) {
    r = std::max(r, rank_one_residual(clip_psd(w)));
  }
  return r;
}

// Template-matching budget over the *sum* of the listed normalised blocks:
//   sum_i (delta* d_i - a_i^H (p sum_b W_b) a_i)^2 <= (1 + gamma_bar_b) err*,
// emitted as one second-order cone with every residual divided by p.
inline void add_mismatch_budget(ConeProgram& prog,
                                const std::vector<int>& blocks,
                                const RadarContext& ctx) {
  const int m = ctx.grid.size();
  const int n = ctx.ideal.cov.dim();
  const double p = ctx.p_max;
  const double bound =
      std::sqrt((1.0 + ctx.gamma_bar_b) * ctx.ideal.error_star) / p;
  const double delta_bar = ctx.ideal.delta_star / p;
  std::vector<AffineExpr> rows;
  rows.reserve(m);
  for (int i = 0; i < m; ++i) {
    const CVector a = steering_vector(ctx.grid.theta_deg()(i), n);
    const HermitianMatrix aa = HermitianMatrix::outer(a);
    AffineExpr r(delta_bar * ctx.ideal.desired(i));
    for (int b : blocks) r -= prog.inner_expr(b, aa);
    rows.push_back(std::move(r));
  }
  prog.add_soc(AffineExpr(bound), std::move(rows));
}

// sqrt(p) * dominant rank-one factor of a normalised block. Clipping first
// keeps solver-level negative dust out of the extraction contract.
inline CVector extract_physical(const HermitianMatrix& norm_w, double p) {
  const HermitianMatrix clipped = clip_psd(norm_w);
  const double bound = rank_one_residual(clipped) + 1e-12;
  return std::sqrt(p) * extract_rank_one(clipped, bound);
}

// B^2/varpi >= (2 Bn/varpin) B - (Bn/varpin)^2 varpi, exact at (Bn, varpin);
// requiring the right side >= interference + 1 restricts
// varpi <= B^2 / (interference + 1).
inline AffineExpr ratio_bound(int b_var, int varpi_var, double bn,
                              double varpin) {
  const double ratio = bn / varpin;
  AffineExpr e = AffineExpr::variable(b_var, 2.0 * ratio);
  e.add(varpi_var, -ratio * ratio);
  return e;
}

// A^2 >= 2 An A - An^2, exact at An: requiring the right side >=
// interference + 1 forces A^2 >= interference + 1.
inline AffineExpr square_bound(int a_var, double an) {
  AffineExpr e(-an * an);
  e.add(a_var, 2.0 * an);
  return e;
}

// First-order expansion of log2(1 + varpi) at varpin, the linear surrogate
// maximised by the rate subproblems (exact at the expansion point).
inline AffineExpr rate_tangent(int varpi_var, double varpin) {
  const double slope = 1.0 / ((1.0 + varpin) * kLn2);
  AffineExpr e(log2_1p(varpin) - varpin * slope);
  e.add(varpi_var, slope);
  return e;
}

}  // namespace radcom::detail
