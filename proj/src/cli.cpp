#include "oro/cli.hpp"

#include <iostream>

#include <CLI11.hpp>

#include "oro/harness.hpp"

namespace oro {

namespace {

void add_common_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->set_config("--config")->description("flat key=value config file; flags override");
  cmd->add_option("--algo", cfg.algo,
                  "algorithm: robuni|vroom|uniform-det|uniform-known|uniform-cv|uniform-lcb|ftl");
  cmd->add_option("--env", cfg.env, "environment spec, e.g. det:wedge, sto:wedge, lure");
  cmd->add_option("--n", cfg.n, "evaluation budget");
  cmd->add_option("--k", cfg.branching, "partition branching factor K");
  cmd->add_option("--b", cfg.b, "noise range / adversary range (default: derived)");
  cmd->add_option("--fmax", cfg.f_max, "value bound f_max (default: derived)");
  cmd->add_option("--delta", cfg.delta, "confidence delta (default: 4b/(f_max sqrt(n)), clamped)");
  cmd->add_option("--reps", cfg.reps, "independent repetitions");
  cmd->add_option("--seed", cfg.seed, "base seed; repetition r uses seed xor mix(r)");
  cmd->add_option("--grid", cfg.grid_points, "total grid budget for the sup oracle");
  cmd->add_option("--mc-draws", cfg.mc_draws, "Monte Carlo draws for E over the recommendation");
  cmd->add_option("--out", cfg.out, "output path (default: stdout)");
  cmd->add_option("--format", cfg.format, "output format: csv|json");
  cmd->add_option("--noise", cfg.noise, "stochastic noise law: uniform|rademacher");
  cmd->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
}

std::vector<std::int64_t> parse_n_list(const std::string& s) {
  std::vector<std::int64_t> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) {
        try {
          out.push_back(std::stoll(cur));
        } catch (const std::exception&) {
          throw ConfigError("n-list: bad integer '" + cur + "'");
        }
        cur.clear();
      }
    } else {
      cur.push_back(c);
    }
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"order-robust derivative-free optimisation experiments"};
  app.require_subcommand(1);

  RunConfig run_cfg;
  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
  add_common_options(run_cmd, run_cfg);

  RunConfig sweep_cfg;
  std::string n_list = "256,1024,4096,16384";
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run one experiment per budget in --n-list");
  add_common_options(sweep_cmd, sweep_cfg);
  sweep_cmd->add_option("--n-list", n_list, "comma-separated ascending budgets");

  RunConfig diag_cfg;
  CLI::App* diag_cmd =
      app.add_subcommand("diag", "run with diagnostics traces; --out is the CSV path prefix");
  add_common_options(diag_cmd, diag_cfg);

  // CLI11 wants argv in reverse order.
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) {
      const RunRecord rec = run_experiment(run_cfg);
      write_output(rec, run_cfg.out, run_cfg.format);
      std::cerr << "mean regret " << rec.mean_regret << " +- " << rec.ci95_half << " (95% CI, "
                << run_cfg.reps << " reps)\n";
    } else if (sweep_cmd->parsed()) {
      const SweepResult sw = sweep(sweep_cfg, parse_n_list(n_list));
      write_output(sw, sweep_cfg.out, sweep_cfg.format);
      if (sw.loglog_slope)
        std::cerr << "log-log slope " << *sw.loglog_slope << "\n";
      else
        std::cerr << "log-log slope undefined (need >= 2 budgets with positive mean regret)\n";
    } else if (diag_cmd->parsed()) {
      const std::string prefix = diag_cfg.out.empty() ? "diag" : diag_cfg.out;
      diag_cfg.out.clear();
      const RunRecord rec = run_experiment(diag_cfg, /*collect_diagnostics=*/true);
      emit_diagnostics(rec, prefix);
      std::cerr << "diagnostics written to " << prefix << "_*.csv\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const InternalError& e) {
    std::cerr << "internal invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace oro
