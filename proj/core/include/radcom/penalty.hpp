#pragma once

// Shared scaffolding for the double-layer beamformer designs.
//
// Every design in this library solves a semidefinite relaxation whose blocks
// must come out (near) rank one. The relaxations are tightened with an exact
// penalty on the difference tr W - lambda_max(W) (zero iff rank one), whose
// concave part is linearised at the current iterate:
//
//   inner layer: successive convex approximation at fixed penalty weight
//                1/eta until the penalised objective stalls,
//   outer layer: shrink eta geometrically until every block's residual
//                tr W - lambda_max(W) falls below a threshold (on the
//                power-normalised scale tr(sum W) = 1).
//
// All designs also share the radar side constraint: the transmit covariance
// R = sum of the blocks must keep its template matching error within a
// fractional budget gamma_bar_b of the reference optimum (see beampattern.hpp).

#include <string>
#include <vector>

#include "radcom/beampattern.hpp"
#include "radcom/channel.hpp"
#include "radcom/conic_solver.hpp"
#include "radcom/hermitian.hpp"
#include "radcom/types.hpp"

namespace radcom {

struct PenaltyConfig {
  double eta0 = 1e4;        // initial penalty weight is 1/eta0 (relaxation)
  double eta_scale = 0.5;   // geometric shrink factor per outer round
  double eta_floor = 1e-12; // stop shrinking once eta would drop below this
  double eps_inner = 1e-2;  // stall threshold: |df| <= eps_inner*max(1,|f|)
  double eps_outer = 1e-5;  // rank-one residual target (normalised scale)
  int max_inner = 50;
  int max_outer = 40;
  SolverOptions solver{};   // subproblem interior-point settings

  void validate() const;  // throws ContractError naming the offending field
};

enum class DesignStatus {
  kConverged,       // every block reached the rank-one residual target
  kMaxOuterReached, // iteration budget exhausted; fields are best effort
  kInfeasible,      // QoS + power + pattern budget admit no design
  kSolverFailure,   // a subproblem solve broke down; fields are best effort
};

const char* to_string(DesignStatus status);

// Radar-side data shared by every design for one scenario: the evaluation
// grid, the reference pattern optimum at the scenario's transmit power, and
// the fractional matching-error budget.
struct RadarContext {
  AngularGrid grid{181};
  IdealPattern ideal;
  double gamma_bar_b = 0.0;
  double p_max = 0.0;
};

// Builds the grid/template from the scenario's radar angles and beam width and
// solves the reference pattern program at the scenario's power budget.
RadarContext make_radar_context(const Scenario& scenario,
                                int grid_points = 181,
                                const SolverOptions& options = {});

// Common result shape for every design. Rates are reported at two levels:
//  - *_matrix_bits evaluate the SINRs on the relaxation covariances, which is
//    what the solved program certifies (QoS rows hold to solver tolerance);
//  - the headline unicast_sum_bits / multicast_min_bits evaluate the rank-one
//    beamformers extracted from those covariances, i.e. what a transmitter
//    could actually radiate. The two agree up to the rank-one residual.
struct SchemeResult {
  DesignStatus status = DesignStatus::kSolverFailure;
  std::string message;

  double unicast_sum_bits = 0.0;
  double multicast_min_bits = 0.0;
  double unicast_sum_matrix_bits = 0.0;
  double multicast_min_matrix_bits = 0.0;
  RVector pair_unicast_bits;    // headline per-pair unicast rates
  RVector pair_multicast_bits;  // headline per-pair multicast rates

  double mismatch = 0.0;           // fractional excess matching error of total_cov
  double rank_one_residual = 0.0;  // max tr W - lambda_max(W), normalised scale
  int inner_iterations = 0;        // subproblem solves across all outer rounds
  int outer_iterations = 0;

  HermitianMatrix total_cov = HermitianMatrix::zero(1);  // physical scale
  std::vector<CVector> beamformers;  // physical scale; order is per design
  RVector power_split_m, power_split_u;  // cluster designs only, per pair

  // Exact penalised objective after every inner solve, one sequence per outer
  // round. Within a round the sequence is non-increasing (the iterate stays
  // feasible and the surrogate touches the exact objective there).
  std::vector<std::vector<double>> inner_objectives;

  bool usable() const {
    return status == DesignStatus::kConverged ||
           status == DesignStatus::kMaxOuterReached;
  }
};

}  // namespace radcom
