#pragma once

// Config-driven experiment harness: single solves, one-axis parameter sweeps,
// and Monte Carlo averaging over seeded channel draws, emitted as CSV tables.
//
// Pairing and determinism contract: trial t of any scheme at any sweep value
// draws its channels from substream t of the scenario master seed, so schemes
// are compared on identical channels (paired statistics), and the full record
// table is a pure function of the config regardless of thread count.

#include <cstdint>
#include <string>
#include <vector>

#include "radcom/channel.hpp"
#include "radcom/penalty.hpp"

namespace radcom {

// Scenario field a sweep varies; kNone runs the scenario as-is (one cell).
enum class SweepAxis { kNone, kGammaBDb, kRbarM, kGammaPDb, kKPairs };

const char* to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

// Known scheme tags in canonical emission order:
// bb_noma, cb_noma, tdma, cbf_no_sic, tdma_multi.
const std::vector<std::string>& scheme_names();

// Whether a scheme is defined for a given number of pairs (the beamformer
// and single-pair baselines need k = 1, the multi-pair baseline k >= 2).
bool scheme_supports(const std::string& scheme, int k_pairs);

struct ExperimentConfig {
  Scenario scenario;
  std::vector<std::string> schemes = {"bb_noma"};
  SweepAxis axis = SweepAxis::kNone;
  std::vector<double> sweep_values;  // ignored when axis == kNone
  int trials = 200;
  int grid_points = 181;
  PenaltyConfig penalty;
  std::string rates_csv_path;    // optional output destination
  std::string pattern_csv_path;  // optional output destination

  void validate() const;  // throws ContractError naming the offending field
};

// JSON round trip. Keys carry units in their names (gamma_p_db, d_r_m, ...);
// unknown keys are rejected so typos cannot silently fall back to defaults.
// parse_config reports the malformed field (or the parser's byte position)
// in the ContractError message.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string render_config(const ExperimentConfig& config);  // canonical JSON

// Copy of the scenario with one sweep value applied. A k_pairs value also
// refreshes radar_angles_deg to the evenly spread default set.
Scenario scenario_at(const Scenario& base, SweepAxis axis, double value);

// One scheme solve on prepared inputs; throws ContractError for an unknown
// scheme tag or a scheme/k_pairs mismatch.
SchemeResult solve_scheme(const std::string& scheme, const ChannelSet& channels,
                          const Scenario& scenario, const RadarContext& ctx,
                          const PenaltyConfig& config);

struct TrialRecord {
  std::string sweep_param;  // axis name; "none" for single-cell runs
  double sweep_value = 0.0;
  std::string scheme;
  std::uint64_t seed = 0;  // per-trial substream index under the master seed
  std::string status;      // ok | infeasible | maxiter | solver_failure
  double r_u_sum = 0.0;    // meaningful iff status == ok
  double r_m_min = 0.0;    // meaningful iff status == ok
  double mismatch = 0.0;   // meaningful iff status == ok
  RVector pair_unicast_bits;    // per-pair rates, empty unless ok
  RVector pair_multicast_bits;  // per-pair rates, empty unless ok
  int inner_iters = 0;
  int outer_iters = 0;
  double wall_ms = 0.0;  // stays 0 unless timing was requested
};

// Full sweep: schemes x sweep values x trials, in deterministic
// (value, trial, scheme) order. threads <= 1 runs serially; more threads
// split trials across workers without changing any record.
// timing fills wall_ms from the process clock (and thereby gives up
// byte-identical CSVs between runs).
std::vector<TrialRecord> run_sweep(const ExperimentConfig& config,
                                   int threads = 1, bool timing = false);

// Conditional-on-feasible means plus feasibility bookkeeping for one
// (scheme, sweep value) cell; means are over ok trials only.
struct CellSummary {
  std::string scheme;
  double sweep_value = 0.0;
  int n_ok = 0;
  int n_total = 0;
  double mean_r_u_sum = 0.0;
  double mean_r_m_min = 0.0;
};
std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records);

// Rate table CSV. Header:
//   sweep_param,sweep_value,scheme,seed,status,r_u_sum,r_m_min,
//   mismatch_ratio,inner_iters,outer_iters,wall_ms
// Numeric cells carry 12 significant digits, LF endings; the rate and
// mismatch cells are empty on non-ok rows.
std::string render_csv(const std::vector<TrialRecord>& records);
void emit_csv(const std::vector<TrialRecord>& records, const std::string& path);

// Beam pattern CSV for a solved design's physical-scale covariance:
// header theta_deg,gain and one row per grid point.
std::string render_pattern_csv(const HermitianMatrix& cov,
                               const AngularGrid& grid);
void emit_pattern_csv(const HermitianMatrix& cov, const AngularGrid& grid,
                      const std::string& path);

}  // namespace radcom
