#include "radcom/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "json.hpp"

#include "radcom/baselines.hpp"
#include "radcom/bb_noma.hpp"
#include "radcom/cb_noma.hpp"

namespace radcom {

namespace {

using nlohmann::ordered_json;

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

bool is_integer_value(double v) {
  return std::isfinite(v) && v == std::floor(v);
}

// ---------------------------------------------------------------------------
// JSON field plumbing
// ---------------------------------------------------------------------------

[[noreturn]] void field_error(const std::string& where, const std::string& key,
                              const std::string& what) {
  throw ContractError("config: field '" + where + "." + key + "': " + what);
}

void check_keys(const ordered_json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    throw ContractError("config: '" + where + "' must be a JSON object");
  }
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end()) {
      throw ContractError("config: unknown key '" + key + "' in '" + where +
                          "'");
    }
  }
}

template <typename T>
void read_field(const ordered_json& obj, const std::string& where,
                const char* key, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    field_error(where, key, e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Names and dispatch
// ---------------------------------------------------------------------------

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNone:
      return "none";
    case SweepAxis::kGammaBDb:
      return "gamma_b_db";
    case SweepAxis::kRbarM:
      return "rbar_m";
    case SweepAxis::kGammaPDb:
      return "gamma_p_db";
    case SweepAxis::kKPairs:
      return "k_pairs";
  }
  return "none";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  for (SweepAxis axis :
       {SweepAxis::kNone, SweepAxis::kGammaBDb, SweepAxis::kRbarM,
        SweepAxis::kGammaPDb, SweepAxis::kKPairs}) {
    if (name == to_string(axis)) return axis;
  }
  throw ContractError(
      "unknown sweep axis '" + name +
      "' (expected none, gamma_b_db, rbar_m, gamma_p_db, or k_pairs)");
}

const std::vector<std::string>& scheme_names() {
  static const std::vector<std::string> names = {
      "bb_noma", "cb_noma", "tdma", "cbf_no_sic", "tdma_multi"};
  return names;
}

bool scheme_supports(const std::string& scheme, int k_pairs) {
  if (scheme == "cb_noma") return k_pairs >= 1;
  if (scheme == "tdma_multi") return k_pairs >= 2;
  if (scheme == "bb_noma" || scheme == "tdma" || scheme == "cbf_no_sic") {
    return k_pairs == 1;
  }
  return false;
}

SchemeResult solve_scheme(const std::string& scheme, const ChannelSet& channels,
                          const Scenario& scenario, const RadarContext& ctx,
                          const PenaltyConfig& config) {
  if (scheme == "bb_noma") return solve_bb(channels, scenario, ctx, config);
  if (scheme == "cb_noma") return solve_cb(channels, scenario, ctx, config);
  if (scheme == "tdma") return solve_tdma_single(channels, scenario, ctx, config);
  if (scheme == "cbf_no_sic") {
    return solve_cbf_no_sic(channels, scenario, ctx, config);
  }
  if (scheme == "tdma_multi") {
    return solve_tdma_multi(channels, scenario, ctx, config);
  }
  throw ContractError("unknown scheme '" + scheme + "'");
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  scenario.validate();
  penalty.validate();

  if (schemes.empty()) {
    throw ContractError("config: field 'schemes' must list at least one scheme");
  }
  for (const std::string& s : schemes) {
    if (std::find(scheme_names().begin(), scheme_names().end(), s) ==
        scheme_names().end()) {
      throw ContractError("config: unknown scheme '" + s + "' in 'schemes'");
    }
    if (std::count(schemes.begin(), schemes.end(), s) > 1) {
      throw ContractError("config: scheme '" + s + "' listed twice");
    }
  }
  if (trials < 1) {
    throw ContractError("config: field 'trials' must be >= 1 (got " +
                        std::to_string(trials) + ")");
  }
  if (grid_points < 3 || grid_points % 2 == 0) {
    throw ContractError(
        "config: field 'grid_points' must be odd and >= 3 (got " +
        std::to_string(grid_points) + ")");
  }

  if (axis == SweepAxis::kNone) {
    if (!sweep_values.empty()) {
      throw ContractError(
          "config: field 'sweep.values' requires a sweep axis");
    }
  } else {
    if (sweep_values.empty()) {
      throw ContractError("config: field 'sweep.values' must be nonempty");
    }
    for (double v : sweep_values) {
      if (!std::isfinite(v)) {
        throw ContractError("config: field 'sweep.values' must be finite");
      }
      if (axis == SweepAxis::kRbarM && v < 0.0) {
        throw ContractError("config: sweep over rbar_m needs values >= 0");
      }
      if (axis == SweepAxis::kKPairs &&
          (!is_integer_value(v) || v < 1.0 || v > 6.0)) {
        throw ContractError(
            "config: sweep over k_pairs needs integer values in 1..6 (got " +
            fmt_g(v) + ")");
      }
    }
  }

  // Every scheme must be defined at every pair count the run will visit.
  const auto check_scheme_k = [&](int k) {
    for (const std::string& s : schemes) {
      if (!scheme_supports(s, k)) {
        throw ContractError("config: scheme '" + s +
                            "' is not defined for k_pairs = " +
                            std::to_string(k));
      }
    }
  };
  if (axis == SweepAxis::kKPairs) {
    for (double v : sweep_values) check_scheme_k(static_cast<int>(v));
  } else {
    check_scheme_k(scenario.k_pairs);
  }
}

Scenario scenario_at(const Scenario& base, SweepAxis axis, double value) {
  Scenario s = base;
  switch (axis) {
    case SweepAxis::kNone:
      break;
    case SweepAxis::kGammaBDb:
      s.gamma_b_db = value;
      break;
    case SweepAxis::kRbarM:
      s.rbar_m_bits = value;
      break;
    case SweepAxis::kGammaPDb:
      s.gamma_p_db = value;
      break;
    case SweepAxis::kKPairs:
      if (!is_integer_value(value)) {
        throw ContractError("scenario_at: k_pairs sweep value must be an "
                            "integer");
      }
      s.k_pairs = static_cast<int>(value);
      s.radar_angles_deg = default_radar_angles(s.k_pairs);
      break;
  }
  s.validate();
  return s;
}

ExperimentConfig parse_config(const std::string& json_text) {
  ordered_json root;
  try {
    root = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ContractError(std::string("config: ") + e.what());
  }
  check_keys(root, "config",
             {"scenario", "schemes", "sweep", "trials", "grid_points",
              "penalty", "output"});

  ExperimentConfig cfg;
  if (root.contains("scenario")) {
    const ordered_json& s = root["scenario"];
    check_keys(s, "scenario",
               {"n_antennas", "k_pairs", "radar_angles_deg", "d_r_m", "d_c_m",
                "l0_db", "gamma_p_db", "rbar_m_bits", "gamma_b_db",
                "beam_width_deg", "seed"});
    read_field(s, "scenario", "n_antennas", cfg.scenario.n_antennas);
    read_field(s, "scenario", "k_pairs", cfg.scenario.k_pairs);
    read_field(s, "scenario", "radar_angles_deg",
               cfg.scenario.radar_angles_deg);
    read_field(s, "scenario", "d_r_m", cfg.scenario.d_r_m);
    read_field(s, "scenario", "d_c_m", cfg.scenario.d_c_m);
    read_field(s, "scenario", "l0_db", cfg.scenario.l0_db);
    read_field(s, "scenario", "gamma_p_db", cfg.scenario.gamma_p_db);
    read_field(s, "scenario", "rbar_m_bits", cfg.scenario.rbar_m_bits);
    read_field(s, "scenario", "gamma_b_db", cfg.scenario.gamma_b_db);
    read_field(s, "scenario", "beam_width_deg", cfg.scenario.beam_width_deg);
    read_field(s, "scenario", "seed", cfg.scenario.seed);
    // A k_pairs override without an explicit angle list gets the default set.
    if (s.contains("k_pairs") && !s.contains("radar_angles_deg") &&
        cfg.scenario.k_pairs >= 1 && cfg.scenario.k_pairs <= 6) {
      cfg.scenario.radar_angles_deg =
          default_radar_angles(cfg.scenario.k_pairs);
    }
  }
  if (root.contains("schemes")) {
    read_field(root, "config", "schemes", cfg.schemes);
  }
  if (root.contains("sweep")) {
    const ordered_json& sw = root["sweep"];
    check_keys(sw, "sweep", {"axis", "values"});
    std::string axis_name = "none";
    read_field(sw, "sweep", "axis", axis_name);
    cfg.axis = sweep_axis_from_string(axis_name);
    read_field(sw, "sweep", "values", cfg.sweep_values);
  }
  read_field(root, "config", "trials", cfg.trials);
  read_field(root, "config", "grid_points", cfg.grid_points);
  if (root.contains("penalty")) {
    const ordered_json& p = root["penalty"];
    check_keys(p, "penalty",
               {"eta0", "eta_scale", "eta_floor", "eps_inner", "eps_outer",
                "max_inner", "max_outer", "solver_tol", "solver_max_iters"});
    read_field(p, "penalty", "eta0", cfg.penalty.eta0);
    read_field(p, "penalty", "eta_scale", cfg.penalty.eta_scale);
    read_field(p, "penalty", "eta_floor", cfg.penalty.eta_floor);
    read_field(p, "penalty", "eps_inner", cfg.penalty.eps_inner);
    read_field(p, "penalty", "eps_outer", cfg.penalty.eps_outer);
    read_field(p, "penalty", "max_inner", cfg.penalty.max_inner);
    read_field(p, "penalty", "max_outer", cfg.penalty.max_outer);
    read_field(p, "penalty", "solver_tol", cfg.penalty.solver.tol);
    read_field(p, "penalty", "solver_max_iters", cfg.penalty.solver.max_iters);
  }
  if (root.contains("output")) {
    const ordered_json& o = root["output"];
    check_keys(o, "output", {"rates_csv", "pattern_csv"});
    read_field(o, "output", "rates_csv", cfg.rates_csv_path);
    read_field(o, "output", "pattern_csv", cfg.pattern_csv_path);
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ContractError("config: cannot open '" + path + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ContractError& e) {
    throw ContractError(std::string(e.what()) + " [" + path + "]");
  }
}

std::string render_config(const ExperimentConfig& config) {
  ordered_json root;
  ordered_json s;
  s["n_antennas"] = config.scenario.n_antennas;
  s["k_pairs"] = config.scenario.k_pairs;
  s["radar_angles_deg"] = config.scenario.radar_angles_deg;
  s["d_r_m"] = config.scenario.d_r_m;
  s["d_c_m"] = config.scenario.d_c_m;
  s["l0_db"] = config.scenario.l0_db;
  s["gamma_p_db"] = config.scenario.gamma_p_db;
  s["rbar_m_bits"] = config.scenario.rbar_m_bits;
  s["gamma_b_db"] = config.scenario.gamma_b_db;
  s["beam_width_deg"] = config.scenario.beam_width_deg;
  s["seed"] = config.scenario.seed;
  root["scenario"] = std::move(s);
  root["schemes"] = config.schemes;
  if (config.axis != SweepAxis::kNone) {
    ordered_json sw;
    sw["axis"] = to_string(config.axis);
    sw["values"] = config.sweep_values;
    root["sweep"] = std::move(sw);
  }
  root["trials"] = config.trials;
  root["grid_points"] = config.grid_points;
  ordered_json p;
  p["eta0"] = config.penalty.eta0;
  p["eta_scale"] = config.penalty.eta_scale;
  p["eta_floor"] = config.penalty.eta_floor;
  p["eps_inner"] = config.penalty.eps_inner;
  p["eps_outer"] = config.penalty.eps_outer;
  p["max_inner"] = config.penalty.max_inner;
  p["max_outer"] = config.penalty.max_outer;
  p["solver_tol"] = config.penalty.solver.tol;
  p["solver_max_iters"] = config.penalty.solver.max_iters;
  root["penalty"] = std::move(p);
  if (!config.rates_csv_path.empty() || !config.pattern_csv_path.empty()) {
    ordered_json o;
    if (!config.rates_csv_path.empty()) o["rates_csv"] = config.rates_csv_path;
    if (!config.pattern_csv_path.empty()) {
      o["pattern_csv"] = config.pattern_csv_path;
    }
    root["output"] = std::move(o);
  }
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

namespace {

const char* record_status(DesignStatus status) {
  switch (status) {
    case DesignStatus::kConverged:
      return "ok";
    case DesignStatus::kInfeasible:
      return "infeasible";
    case DesignStatus::kMaxOuterReached:
      return "maxiter";
    case DesignStatus::kSolverFailure:
      return "solver_failure";
  }
  return "solver_failure";
}

}  // namespace

std::vector<TrialRecord> run_sweep(const ExperimentConfig& config, int threads,
                                   bool timing) {
  config.validate();

  const std::vector<double> values = config.axis == SweepAxis::kNone
                                         ? std::vector<double>{0.0}
                                         : config.sweep_values;
  const std::string param = to_string(config.axis);
  const int n_values = static_cast<int>(values.size());
  const int n_schemes = static_cast<int>(config.schemes.size());

  // One radar context per sweep value, shared by all trials and schemes.
  std::vector<Scenario> scenarios;
  std::vector<RadarContext> contexts;
  scenarios.reserve(n_values);
  contexts.reserve(n_values);
  for (double v : values) {
    scenarios.push_back(scenario_at(config.scenario, config.axis, v));
    contexts.push_back(make_radar_context(scenarios.back(), config.grid_points,
                                          config.penalty.solver));
  }

  const int n_tasks = n_values * config.trials;
  std::vector<TrialRecord> records(
      static_cast<size_t>(n_tasks) * n_schemes);

  const auto run_task = [&](int task) {
    const int iv = task / config.trials;
    const int trial = task % config.trials;
    const ChannelSet channels =
        generate_channels(scenarios[iv], static_cast<uint64_t>(trial));
    for (int is = 0; is < n_schemes; ++is) {
      TrialRecord& rec =
          records[static_cast<size_t>(task) * n_schemes + is];
      rec.sweep_param = param;
      rec.sweep_value = values[iv];
      rec.scheme = config.schemes[is];
      rec.seed = static_cast<uint64_t>(trial);

      const auto t0 = std::chrono::steady_clock::now();
      const SchemeResult result = solve_scheme(
          rec.scheme, channels, scenarios[iv], contexts[iv], config.penalty);
      if (timing) {
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
      }

      rec.status = record_status(result.status);
      rec.inner_iters = result.inner_iterations;
      rec.outer_iters = result.outer_iterations;
      if (result.status == DesignStatus::kConverged) {
        rec.r_u_sum = result.unicast_sum_bits;
        rec.r_m_min = result.multicast_min_bits;
        rec.mismatch = result.mismatch;
        rec.pair_unicast_bits = result.pair_unicast_bits;
        rec.pair_multicast_bits = result.pair_multicast_bits;
      }
    }
  };

  const int workers = std::max(1, threads);
  if (workers == 1) {
    for (int task = 0; task < n_tasks; ++task) run_task(task);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (int task = next.fetch_add(1); task < n_tasks;
             task = next.fetch_add(1)) {
          run_task(task);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  return records;
}

std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records) {
  // Keyed by (scheme, value); preserves first-appearance order.
  std::vector<CellSummary> cells;
  const auto find_cell = [&](const TrialRecord& rec) -> CellSummary& {
    for (CellSummary& c : cells) {
      if (c.scheme == rec.scheme && c.sweep_value == rec.sweep_value) return c;
    }
    cells.push_back({rec.scheme, rec.sweep_value, 0, 0, 0.0, 0.0});
    return cells.back();
  };
  for (const TrialRecord& rec : records) {
    CellSummary& c = find_cell(rec);
    ++c.n_total;
    if (rec.status == "ok") {
      ++c.n_ok;
      c.mean_r_u_sum += rec.r_u_sum;
      c.mean_r_m_min += rec.r_m_min;
    }
  }
  for (CellSummary& c : cells) {
    if (c.n_ok > 0) {
      c.mean_r_u_sum /= c.n_ok;
      c.mean_r_m_min /= c.n_ok;
    }
  }
  return cells;
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

std::string render_csv(const std::vector<TrialRecord>& records) {
  std::string out =
      "sweep_param,sweep_value,scheme,seed,status,r_u_sum,r_m_min,"
      "mismatch_ratio,inner_iters,outer_iters,wall_ms\n";
  for (const TrialRecord& rec : records) {
    const bool ok = rec.status == "ok";
    out += rec.sweep_param;
    out += ',';
    out += fmt_g(rec.sweep_value);
    out += ',';
    out += rec.scheme;
    out += ',';
    out += std::to_string(rec.seed);
    out += ',';
    out += rec.status;
    out += ',';
    if (ok) out += fmt_g(rec.r_u_sum);
    out += ',';
    if (ok) out += fmt_g(rec.r_m_min);
    out += ',';
    if (ok) out += fmt_g(rec.mismatch);
    out += ',';
    out += std::to_string(rec.inner_iters);
    out += ',';
    out += std::to_string(rec.outer_iters);
    out += ',';
    out += fmt_g(rec.wall_ms);
    out += '\n';
  }
  return out;
}

namespace {

void write_file(const std::string& path, const std::string& body,
                const char* what) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error(std::string(what) + ": cannot open '" + path +
                             "' for writing");
  }
  out << body;
  out.flush();
  if (!out) {
    throw std::runtime_error(std::string(what) + ": write to '" + path +
                             "' failed");
  }
}

}  // namespace

void emit_csv(const std::vector<TrialRecord>& records,
              const std::string& path) {
  if (records.empty()) {
    throw ContractError("emit_csv: record table is empty");
  }
  write_file(path, render_csv(records), "emit_csv");
}

std::string render_pattern_csv(const HermitianMatrix& cov,
                               const AngularGrid& grid) {
  const RVector gains = evaluate_pattern(cov, grid);
  std::string out = "theta_deg,gain\n";
  for (int m = 0; m < gains.size(); ++m) {
    out += fmt_g(grid.theta_deg()(m));
    out += ',';
    out += fmt_g(gains(m));
    out += '\n';
  }
  return out;
}

void emit_pattern_csv(const HermitianMatrix& cov, const AngularGrid& grid,
                      const std::string& path) {
  write_file(path, render_pattern_csv(cov, grid), "emit_pattern_csv");
}

}  // namespace radcom
