#pragma once

// Dense primal-dual interior-point solver for the cone programs assembled via
// ConeProgram. Infeasible-start path following with Nesterov-Todd scaling and
// Mehrotra predictor-corrector steps over the symmetric-cone product
//
//   K = R+^l  x  SOC(q_1) x ... x SOC(q_s)  x  PSD(d_1) x ... x PSD(d_t),
//
// where PSD blocks may be real symmetric or complex Hermitian (rotated cones
// are folded into plain second-order cones during canonicalization). The KKT
// system is reduced by eliminating the scaled cone block, leaving a
// positive-definite system in the primal step plus a small Schur complement
// for the equality multipliers; one round of iterative refinement on the full
// KKT residual keeps late iterations accurate. Problem data are equilibrated
// (Ruiz scaling with cone-blocked row groups) before solving.

#include <algorithm>
#include <string>

#include "radcom/cone_program.hpp"

namespace radcom {

enum class SolverStatus {
  kOptimal,
  kInfeasible,      // primal infeasibility certificate found
  kMaxIterations,   // iteration cap hit before reaching tolerance
  kNumericalFailure
};

const char* to_string(SolverStatus status);

struct SolverOptions {
  // Relative tolerance on feasibility residuals and duality gap.
  // Accepted range: [1e-10, 1e-4].
  double tol = 1e-8;
  int max_iters = 200;
};

// A stopped solve whose best iterate still meets this accuracy is usable():
// interior-point step sizes can collapse at the numerical floor of the KKT
// system a little above the requested tolerance, and callers that certify
// results independently should not discard such iterates.
inline constexpr double kUsableResidual = 1e-5;

struct SolverSolution {
  SolverStatus status = SolverStatus::kNumericalFailure;
  RVector x;               // all variable coordinates (original scaling)
  double objective = 0.0;  // c^T x + constant
  double primal_residual = kInf;
  double dual_residual = kInf;
  double duality_gap = kInf;      // s^T z
  double relative_gap = kInf;
  int iterations = 0;
  std::string message;

  bool usable() const {
    if (status == SolverStatus::kOptimal) return true;
    return status == SolverStatus::kMaxIterations &&
           std::max({primal_residual, dual_residual, relative_gap}) <=
               kUsableResidual;
  }
};

SolverSolution solve(const ConeProgram& program, const SolverOptions& options = {});

}  // namespace radcom
