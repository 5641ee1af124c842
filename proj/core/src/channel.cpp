#include "radcom/channel.hpp"

#include <cmath>
#include <sstream>

namespace radcom {

double path_loss_db(PathLossModel model, double distance_m, double l0_db) {
  if (!(distance_m >= 1.0)) {
    std::ostringstream os;
    os << "path_loss_db: distance " << distance_m << " m is below 1 m";
    throw ContractError(os.str());
  }
  const double exponent = model == PathLossModel::kLineOfSight ? 20.0 : 30.0;
  return l0_db + exponent * std::log10(distance_m);
}

CVector steering_vector(double theta_deg, int n_antennas) {
  if (n_antennas < 1) {
    throw ContractError("steering_vector: need at least one antenna");
  }
  if (!(theta_deg >= -90.0 && theta_deg <= 90.0)) {
    std::ostringstream os;
    os << "steering_vector: angle " << theta_deg << " outside [-90, 90]";
    throw ContractError(os.str());
  }
  const double s = std::sin(deg_to_rad(theta_deg));
  CVector a(n_antennas);
  for (int i = 0; i < n_antennas; ++i) {
    a(i) = std::exp(Complex(0.0, kPi * i * s));
  }
  return a;
}

void Scenario::validate() const {
  std::ostringstream os;
  if (n_antennas < 1) {
    os << "scenario.n_antennas must be >= 1 (got " << n_antennas << ")";
  } else if (k_pairs < 1) {
    os << "scenario.k_pairs must be >= 1 (got " << k_pairs << ")";
  } else if (radar_angles_deg.size() != static_cast<size_t>(k_pairs)) {
    os << "scenario.radar_angles_deg must list one angle per pair (got "
       << radar_angles_deg.size() << " for k_pairs = " << k_pairs << ")";
  } else if (!(d_r_m >= 1.0)) {
    os << "scenario.d_r_m must be >= 1 m (got " << d_r_m << ")";
  } else if (!(d_c_m >= 1.0)) {
    os << "scenario.d_c_m must be >= 1 m (got " << d_c_m << ")";
  } else if (!(rbar_m_bits >= 0.0)) {
    os << "scenario.rbar_m_bits must be >= 0 (got " << rbar_m_bits << ")";
  } else if (!std::isfinite(gamma_p_db) || !std::isfinite(gamma_b_db) ||
             !std::isfinite(l0_db)) {
    os << "scenario dB fields must be finite";
  } else if (!(beam_width_deg > 0.0 && beam_width_deg <= 180.0)) {
    os << "scenario.beam_width_deg must be in (0, 180] (got " << beam_width_deg
       << ")";
  } else {
    for (double ang : radar_angles_deg) {
      if (!(ang >= -90.0 && ang <= 90.0)) {
        os << "scenario.radar_angles_deg entry " << ang
           << " outside [-90, 90]";
        break;
      }
    }
  }
  const std::string msg = os.str();
  if (!msg.empty()) throw ContractError(msg);
}

ChannelSet generate_channels(const Scenario& scenario, uint64_t trial) {
  scenario.validate();
  const int n = scenario.n_antennas;
  const double g_r = db_to_linear(
      -path_loss_db(PathLossModel::kLineOfSight, scenario.d_r_m, scenario.l0_db));
  const double g_c = db_to_linear(-path_loss_db(
      PathLossModel::kNonLineOfSight, scenario.d_c_m, scenario.l0_db));

  ChannelSet set;
  set.p_max_linear = scenario.p_max_linear();
  set.h_r.resize(scenario.k_pairs);
  set.h_c.resize(scenario.k_pairs);

  Philox rng(scenario.seed);
  const double amp_c = std::sqrt(g_c / 2.0);  // per real dimension
  for (int k = 0; k < scenario.k_pairs; ++k) {
    set.h_r[k] =
        std::sqrt(g_r) * steering_vector(scenario.radar_angles_deg[k], n);
    CVector h(n);
    // Substream: counter = (trial, pair k, element i). One Philox block
    // yields the (re, im) normal pair of one complex entry.
    const uint64_t hi = (trial << 16) | static_cast<uint64_t>(k);
    for (int i = 0; i < n; ++i) {
      const Philox::NormalPair z = rng.normal_pair(hi, static_cast<uint64_t>(i));
      h(i) = amp_c * Complex(z.z0, z.z1);
    }
    set.h_c[k] = h;
  }
  return set;
}

std::vector<double> default_radar_angles(int k_pairs) {
  switch (k_pairs) {
    case 1: return {0.0};
    case 2: return {-60.0, 60.0};
    case 3: return {-60.0, 0.0, 60.0};
    case 4: return {-60.0, -30.0, 30.0, 60.0};
    case 5: return {-60.0, -30.0, 0.0, 30.0, 60.0};
    case 6: return {-60.0, -40.0, -20.0, 20.0, 40.0, 60.0};
    default:
      throw ContractError(
          "default_radar_angles: built-in angle sets cover K = 1..6");
  }
}

}  // namespace radcom
