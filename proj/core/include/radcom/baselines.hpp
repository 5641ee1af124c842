#pragma once

// Benchmark designs the main schemes are compared against.
//
// Time-division single pair: one beamformer W serves both messages in two
// equal slots (the transmit covariance, and hence the radar pattern, is the
// same in both). Each slot sees no intra-pair interference, so with unit
// noise the design is
//
//   maximize    tr(H_c W)
//   subject to  tr(H_l W) >= 2^(2 rbar) - 1,  l in {r, c},
//               tr(W) = p_max, pattern budget, W rank one,
//
// and rates carry a 1/2 slot factor: R_u = 1/2 log2(1 + tr(H_c W)).
//
// Combined beamforming without interference cancellation: W_m and W_u as in
// the superposition design, but the fading user decodes its unicast stream
// with the multicast stream still present. The unicast SINR
// tr(H_c W_u) / (tr(H_c W_m) + 1) is maximised through the same auxiliary
// machinery as the cluster design (power term B, SINR variable varpi).
//
// Time-division for K >= 2 pairs: per-pair beamformers W_k, both slots again
// sharing the covariance sum W_k; inter-pair interference remains in each
// slot, thresholds use 2^(2 rbar) - 1, and all rates carry the 1/2 factor.

#include <vector>

#include "radcom/channel.hpp"
#include "radcom/penalty.hpp"

namespace radcom {

// Requires scenario.k_pairs == 1. Result beamformers: {w}.
SchemeResult solve_tdma_single(const ChannelSet& channels,
                               const Scenario& scenario,
                               const RadarContext& ctx,
                               const PenaltyConfig& config = {});

// Requires scenario.k_pairs == 1. Result beamformers: {w_m, w_u}.
SchemeResult solve_cbf_no_sic(const ChannelSet& channels,
                              const Scenario& scenario,
                              const RadarContext& ctx,
                              const PenaltyConfig& config = {});

// Requires scenario.k_pairs >= 2 (the single-pair variant handles K = 1).
// rbar_bits_per_pair as in solve_cb. Result beamformers: {w_1, ..., w_K}.
SchemeResult solve_tdma_multi(const ChannelSet& channels,
                              const Scenario& scenario,
                              const RadarContext& ctx,
                              const PenaltyConfig& config = {},
                              const std::vector<double>& rbar_bits_per_pair = {});

}  // namespace radcom
