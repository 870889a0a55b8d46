#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oro/common.hpp"
#include "oro/environments.hpp"
#include "oro/learners.hpp"

namespace oro {

struct RunConfig {
  std::string algo = "vroom";
  std::string env = "det:wedge";  // see parse_environment for the grammar
  std::int64_t n = 1024;
  int branching = 2;
  double b = -1.0;      // < 0: derived from the environment
  double f_max = -1.0;  // < 0: derived from the environment
  double delta = -1.0;  // < 0: default formula
  int reps = 1;
  std::uint64_t seed = 1;
  int grid_points = 10001;  // sup-oracle grid resolution per dimension
  int mc_draws = 256;       // Monte Carlo draws estimating E over the recommendation
  std::string out;          // output path ("" = stdout)
  std::string format = "csv";  // csv | json
  std::string noise = "uniform";  // uniform | rademacher (stochastic envs)
  int threads = 0;  // 0: hardware concurrency

  void validate() const;  // throws ConfigError naming the offending key
};

// Environment grammar (names are bundled test functions):
//   [det:]<fn>                      deterministic
//   sto:<fn>                        iid noise, range --b (default 0.5)
//   switch:<fnA>:<fnB>              adversarial switch at ceil(n/2)
//   drift:<fn>:<mod>                adversarial drift, amplitude --b (default 0.25)
//   perm:<fnA>:<fnB>:alternate      adversarial ABAB... interleaving
//   perm:<fnA>:<fnB>:shuffle        adversarial, seed-shuffled assignment
//   lure                            shorthand for switch:lure-a:lure-b
RewardProcess parse_environment(const RunConfig& cfg);

struct RepResult {
  int rep = 0;
  std::uint64_t seed = 0;
  CellId cell;
  Point point;
  bool point_mass = false;
  double regret = 0.0;
  double regret_se = 0.0;
};

struct DiagnosticsTraces {
  bool has_optimum = false;
  // indexed [rep][t-1][h-1]: rank of the optimal cell at depth h going into
  // round t (learners without ranks leave ranks empty), and the pulls the
  // optimal cell has received before round t.
  std::vector<std::vector<std::vector<std::int64_t>>> opt_rank;
  std::vector<std::vector<std::vector<std::int64_t>>> opt_pulls;
  // indexed [rep][h]: number of rounds whose selected cell sat at depth h.
  std::vector<std::vector<std::int64_t>> depth_histogram;
};

struct RunRecord {
  RunConfig config;           // with derived b / f_max / delta filled in
  double sup_value = 0.0;     // brute-force oracle for sup of the average
  Point sup_point;
  std::vector<RepResult> reps;
  double mean_regret = 0.0;
  double ci95_half = 0.0;
  std::optional<DiagnosticsTraces> diagnostics;
};

RunRecord run_experiment(const RunConfig& cfg, bool collect_diagnostics = false);

struct SweepResult {
  RunConfig config;
  std::vector<std::int64_t> n_values;
  std::vector<RunRecord> records;          // one per n
  std::optional<double> loglog_slope;      // absent for fewer than 2 usable points
};

SweepResult sweep(const RunConfig& cfg, const std::vector<std::int64_t>& n_values);

// Writers. CSV is long format, one row per repetition, fixed headers:
//   run:   algorithm,env,n,K,rep,seed,rec_depth,rec_index,rec_point,regret,regret_se
//   sweep: algorithm,env,n,rep,regret
// rec_index is reported 1-based. rec_point joins coordinates with ';'.
void write_run_csv(const RunRecord& rec, std::ostream& os);
void write_run_json(const RunRecord& rec, std::ostream& os);
void write_sweep_csv(const SweepResult& sw, std::ostream& os);
void write_sweep_json(const SweepResult& sw, std::ostream& os);
void write_output(const RunRecord& rec, const std::string& path, const std::string& format);
void write_output(const SweepResult& sw, const std::string& path, const std::string& format);

// CSV traces next to `path_prefix`: <prefix>_rank_trace.csv (rep,t,depth,
// opt_rank,opt_pulls) and <prefix>_depth_hist.csv (rep,depth,count).
// Returns false (with a stderr warning) when the environment declares no
// optimum, in which case only the histogram is written.
bool emit_diagnostics(const RunRecord& rec, const std::string& path_prefix);

}  // namespace oro
