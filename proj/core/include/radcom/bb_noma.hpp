#pragma once

// Beamformer-level design for one user pair with superposition coding and
// successive interference cancellation.
//
// Two covariance blocks share the power budget: W_m carries the multicast
// stream decoded by both users (each treating the unicast stream as noise),
// W_u carries the unicast stream which the fading user decodes after
// cancelling the multicast stream. With unit noise and channels h_r, h_c:
//
//   maximize    log2(1 + h_c^H W_u h_c)
//   subject to  h_l^H W_m h_l >= gamma_bar_m (h_l^H W_u h_l + 1),  l in {r, c},
//               tr(W_m + W_u) = p_max,
//               template matching error within (1 + gamma_bar_b) of optimum,
//               W_m, W_u PSD and rank one,
//
// where gamma_bar_m = 2^rbar - 1. Everything except the rank constraint is
// convex after lifting; the rank constraint is handled by the double-layer
// penalty loop of penalty.hpp. Subproblems are convex for any linearisation
// point, so the loop starts from scaled identities without a feasibility
// phase.

#include "radcom/channel.hpp"
#include "radcom/penalty.hpp"

namespace radcom {

// Requires scenario.k_pairs == 1. Result beamformers: {w_m, w_u}.
SchemeResult solve_bb(const ChannelSet& channels, const Scenario& scenario,
                      const RadarContext& ctx,
                      const PenaltyConfig& config = {});

}  // namespace radcom
