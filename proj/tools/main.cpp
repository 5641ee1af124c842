// radcom command line.
//
//   radcom ideal            solve the reference radar pattern, write its CSV
//   radcom solve --scheme   run one beamformer design on one channel draw
//   radcom sweep            Monte Carlo sweep over a config's axis, write CSV
//   radcom validate-config  parse and validate a JSON config
//
// Exit codes: 0 success, 2 usage or config error, 3 infeasible design,
// 4 numerical failure. --threads falls back to the RADCOM_THREADS variable,
// then to 1. Without --timing the wall_ms CSV column stays 0 so identical
// configs produce byte-identical CSVs at any thread count.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "radcom/experiments.hpp"

namespace {

using namespace radcom;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> threads;
  bool timing = false;
};

int resolve_threads(const std::optional<int>& cli_value) {
  if (cli_value) return std::max(1, *cli_value);
  if (const char* env = std::getenv("RADCOM_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed >= 1) return parsed;
  }
  return 1;
}

ExperimentConfig load_or_default(const CommonOpts& opts) {
  ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = load_config(opts.config_path);
  if (opts.seed) cfg.scenario.seed = *opts.seed;
  if (opts.trials) cfg.trials = *opts.trials;
  cfg.validate();
  return cfg;
}

std::string out_path(const CommonOpts& opts, const std::string& configured,
                     const char* fallback) {
  std::filesystem::path leaf = configured.empty()
                                   ? std::filesystem::path(fallback)
                                   : std::filesystem::path(configured);
  if (leaf.is_absolute()) return leaf.string();
  return (std::filesystem::path(opts.out_dir) / leaf).string();
}

int run_ideal(const ExperimentConfig& cfg, const CommonOpts& opts) {
  const RadarContext ctx =
      make_radar_context(cfg.scenario, cfg.grid_points, cfg.penalty.solver);
  const std::string path =
      out_path(opts, cfg.pattern_csv_path, "ideal_pattern.csv");
  emit_pattern_csv(ctx.ideal.cov, ctx.grid, path);
  std::printf("reference pattern: %d antennas, %d grid points\n",
              cfg.scenario.n_antennas, cfg.grid_points);
  std::printf("  template scale delta* = %.6g\n", ctx.ideal.delta_star);
  std::printf("  matching error        = %.6g\n", ctx.ideal.error_star);
  std::printf("  pattern written to %s\n", path.c_str());
  return 0;
}

int run_solve(const ExperimentConfig& cfg, const std::string& scheme,
              const CommonOpts& opts) {
  if (!scheme_supports(scheme, cfg.scenario.k_pairs)) {
    std::fprintf(stderr, "error: scheme '%s' is not defined for k_pairs = %d\n",
                 scheme.c_str(), cfg.scenario.k_pairs);
    return 2;
  }
  const RadarContext ctx =
      make_radar_context(cfg.scenario, cfg.grid_points, cfg.penalty.solver);
  const ChannelSet channels = generate_channels(cfg.scenario, 0);
  const SchemeResult result =
      solve_scheme(scheme, channels, cfg.scenario, ctx, cfg.penalty);

  std::printf("%s: %s\n", scheme.c_str(), to_string(result.status));
  if (!result.message.empty()) {
    std::printf("  %s\n", result.message.c_str());
  }
  if (result.usable()) {
    std::printf("  sum unicast rate      = %.6f bits/s/Hz\n",
                result.unicast_sum_bits);
    std::printf("  min multicast rate    = %.6f bits/s/Hz\n",
                result.multicast_min_bits);
    std::printf("  pattern mismatch      = %.6g (budget %.6g)\n",
                result.mismatch, ctx.gamma_bar_b);
    std::printf("  rank-one residual     = %.3g\n", result.rank_one_residual);
    std::printf("  iterations            = %d inner / %d outer\n",
                result.inner_iterations, result.outer_iterations);
    const std::string path =
        out_path(opts, cfg.pattern_csv_path, "pattern.csv");
    emit_pattern_csv(result.total_cov, ctx.grid, path);
    std::printf("  pattern written to %s\n", path.c_str());
  }
  switch (result.status) {
    case DesignStatus::kConverged:
    case DesignStatus::kMaxOuterReached:
      return 0;
    case DesignStatus::kInfeasible:
      return 3;
    case DesignStatus::kSolverFailure:
      return 4;
  }
  return 4;
}

int run_sweep_cmd(const ExperimentConfig& cfg, const CommonOpts& opts) {
  const int threads = resolve_threads(opts.threads);
  const std::vector<TrialRecord> records =
      run_sweep(cfg, threads, opts.timing);
  const std::string path = out_path(opts, cfg.rates_csv_path, "rates.csv");
  emit_csv(records, path);

  std::printf("%-12s %12s %8s %12s %12s\n", "scheme", to_string(cfg.axis),
              "ok", "mean R_u", "mean R_m");
  for (const CellSummary& c : summarize(records)) {
    std::printf("%-12s %12g %4d/%-4d %12.4f %12.4f\n", c.scheme.c_str(),
                c.sweep_value, c.n_ok, c.n_total, c.mean_r_u_sum,
                c.mean_r_m_min);
  }
  std::printf("%zu records written to %s\n", records.size(), path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Joint radar + multicast/unicast beamformer designs: reference "
      "pattern, single solves, and seeded Monte Carlo sweeps."};
  app.require_subcommand(1);

  CommonOpts opts;
  app.add_option("--config", opts.config_path, "JSON experiment config");
  app.add_option("--out", opts.out_dir, "output directory (default .)");
  app.add_option("--seed", opts.seed, "override the scenario master seed");
  app.add_option("--trials", opts.trials, "override the trial count")
      ->check(CLI::PositiveNumber);
  app.add_option("--threads", opts.threads,
                 "worker threads (default: RADCOM_THREADS, then 1)");
  app.add_flag("--timing", opts.timing,
               "record wall-clock per solve (breaks CSV byte-identity)");

  CLI::App* ideal = app.add_subcommand(
      "ideal", "solve the reference radar pattern and write its CSV");
  CLI::App* solve = app.add_subcommand(
      "solve", "run one design at the configured scenario, channel draw 0");
  std::string scheme = "bb_noma";
  solve->add_option("--scheme", scheme, "design to run")
      ->check(CLI::IsMember(radcom::scheme_names()));
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Monte Carlo sweep over the config's axis, write the rate CSV");
  CLI::App* validate =
      app.add_subcommand("validate-config", "parse and validate --config");
  for (CLI::App* sub : {ideal, solve, sweep, validate}) {
    sub->fallthrough();  // accept the global options after the subcommand too
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (validate->parsed()) {
      if (opts.config_path.empty()) {
        std::fprintf(stderr, "error: validate-config requires --config\n");
        return 2;
      }
      const radcom::ExperimentConfig cfg = load_or_default(opts);
      std::printf("%s: ok (%zu scheme%s, %zu sweep value%s, %d trials)\n",
                  opts.config_path.c_str(), cfg.schemes.size(),
                  cfg.schemes.size() == 1 ? "" : "s",
                  cfg.sweep_values.size(),
                  cfg.sweep_values.size() == 1 ? "" : "s", cfg.trials);
      return 0;
    }

    const radcom::ExperimentConfig cfg = load_or_default(opts);
    std::filesystem::create_directories(opts.out_dir);
    if (ideal->parsed()) return run_ideal(cfg, opts);
    if (solve->parsed()) return run_solve(cfg, scheme, opts);
    if (sweep->parsed()) return run_sweep_cmd(cfg, opts);
    return 2;
  } catch (const radcom::ContractError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}
