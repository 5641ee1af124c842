#pragma once

// Scenario description and channel generation for a dual-function transmitter
// that serves K "pairs" of receivers with one uniform linear array (ULA):
//
//   * pair k's R-user sits on a known line-of-sight path at angle theta_k,
//     1000 m away by default: h_r = sqrt(g_R) a(theta_k) with zero random
//     phase (the transmitter tracks this user, so its channel is
//     deterministic),
//   * pair k's C-user is a nearer user without line of sight:
//     h_c ~ CN(0, g_C I) (i.i.d. Rayleigh entries).
//
// Path gains follow  L(d) = L0 + 10 alpha log10(d)  in dB with alpha = 2 for
// line-of-sight and alpha = 3 otherwise, and g = 10^(-L/10).
//
// Normalization: receiver noise is scaled to 1 and the power budget is
// expressed as the transmit SNR  p_max = 10^(gamma_p/10) = P_max / sigma^2.
// Channel entries keep their physical amplitude sqrt(g), so every
// signal-to-noise expression p * |h^H w|^2 / 1 matches the physical
// P |h^H w|^2 / sigma^2 exactly; with the defaults below the full-power
// single-user SNR is 10 dB at both users (10 dBm - 100 dB + 100 dBm).
//
// ULA steering (half-wavelength spacing):  a(theta)_i = exp(j pi i sin theta).

#include <cstdint>
#include <vector>

#include "radcom/rng.hpp"
#include "radcom/types.hpp"

namespace radcom {

enum class PathLossModel { kLineOfSight, kNonLineOfSight };

// L(d) in dB; distances below 1 m are outside the far-field model.
double path_loss_db(PathLossModel model, double distance_m, double l0_db = 40.0);

CVector steering_vector(double theta_deg, int n_antennas);

struct Scenario {
  int n_antennas = 4;
  int k_pairs = 1;
  std::vector<double> radar_angles_deg = {0.0};  // one angle per pair
  double d_r_m = 1000.0;   // R-user distance (line of sight)
  double d_c_m = 100.0;    // C-user distance (no line of sight)
  double l0_db = 40.0;     // reference loss at 1 m
  double gamma_p_db = 110.0;  // transmit SNR P_max / sigma^2
  double rbar_m_bits = 0.5;   // multicast rate requirement per pair
  double gamma_b_db = -10.0;  // beampattern mismatch budget
  double beam_width_deg = 10.0;  // width of each desired mainlobe
  uint64_t seed = 1;

  double p_max_linear() const { return db_to_linear(gamma_p_db); }
  double gamma_bar_b() const { return db_to_linear(gamma_b_db); }
  // Multicast SINR threshold 2^rbar - 1 (full-rate schemes).
  double gamma_bar_m() const { return std::exp2(rbar_m_bits) - 1.0; }

  void validate() const;  // throws ContractError naming the offending field
};

struct ChannelSet {
  std::vector<CVector> h_r;  // per pair, deterministic line-of-sight
  std::vector<CVector> h_c;  // per pair, Rayleigh
  double p_max_linear = 0.0;
};

// Deterministic function of (scenario.seed, trial): each C-user entry draws
// from its own Philox substream keyed by (trial, pair, element), so trials can
// be generated independently and in parallel with identical results.
ChannelSet generate_channels(const Scenario& scenario, uint64_t trial = 0);

// Radar angle sets used when sweeping the number of pairs (K = 2..6).
std::vector<double> default_radar_angles(int k_pairs);

}  // namespace radcom
