#pragma once

// Cluster-level design for K user pairs: one shared beamformer per pair plus a
// per-pair power split between the multicast and unicast streams.
//
// Pair k transmits w_k (sqrt(alpha_m) s_m + sqrt(alpha_u) s_u) with
// alpha_m + alpha_u = 1. Each user first decodes its multicast stream treating
// its own unicast stream and every other pair as noise; the fading user then
// cancels the multicast stream and decodes its unicast stream against the
// other pairs only. With T_{l,k} = |h_{l,k}^H w_k|^2 and
// I_{l,k} = sum_{j != k} |h_{l,k}^H w_j|^2:
//
//   maximize    sum_k log2(1 + alpha_u T_{c,k} / (I_{c,k} + 1))
//   subject to  alpha_m T_{l,k} / (alpha_u T_{l,k} + I_{l,k} + 1) >= gamma_k,
//               sum_k tr(W_k) = p_max,  alpha_m + alpha_u = 1 per pair,
//               template matching error within budget, W_k rank one.
//
// The lifted subproblems convexify the bilinear splits with auxiliary
// variables (varpi for the unicast SINR, A for interference-plus-noise, B for
// the unicast power term) and first-order bounds that are exact at the
// current iterate, wrapped in the double-layer penalty loop of penalty.hpp.
// Initialisation fixes the split at 0.5/0.5 and solves a max-min multicast
// slack program; a negative optimal slack is reported as infeasible.

#include <vector>

#include "radcom/channel.hpp"
#include "radcom/penalty.hpp"

namespace radcom {

// Achievable rates of the cluster scheme for explicit beamformers and power
// splits (unit noise). Entry k of each vector belongs to pair k.
struct PairRates {
  RVector multicast_to_r_bits;  // multicast stream decoded at the R-user
  RVector multicast_to_c_bits;  // multicast stream decoded at the C-user
  RVector multicast_bits;       // min of the two (the stream must reach both)
  RVector unicast_bits;         // after cancelling the pair's multicast stream
  double sum_unicast_bits = 0.0;
  double min_multicast_bits = 0.0;
};

// channels_*[k] and beamformers[k] are physical scale; alpha_m + alpha_u = 1
// per pair (validated).
PairRates rates_cb(const std::vector<CVector>& channels_r,
                   const std::vector<CVector>& channels_c,
                   const std::vector<CVector>& beamformers,
                   const RVector& alpha_m, const RVector& alpha_u);

// Joint beamforming + power-split design for scenario.k_pairs pairs.
// rbar_bits_per_pair overrides the scenario's common multicast target when
// non-empty (must then list one value per pair). Result beamformers:
// {w_1, ..., w_K}; power_split_m/u filled per pair.
SchemeResult solve_cb(const ChannelSet& channels, const Scenario& scenario,
                      const RadarContext& ctx,
                      const PenaltyConfig& config = {},
                      const std::vector<double>& rbar_bits_per_pair = {});

}  // namespace radcom
