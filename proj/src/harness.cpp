#include "oro/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace oro {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_point(const Point& p) {
  std::string out;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j) out.push_back(';');
    out += fmt_double(p[j]);
  }
  return out;
}

int sup_grid_per_dim(int total_budget, int dim) {
  if (dim <= 1) return std::max(2, total_budget);
  const int per = static_cast<int>(std::floor(std::pow(static_cast<double>(total_budget),
                                                       1.0 / static_cast<double>(dim))));
  return std::max(2, per);
}

struct BuiltEnvironment {
  RewardProcess process;
  std::optional<Point> optimum;  // declared by the underlying test function
  int dim = 1;
};

NoiseKind parse_noise(const std::string& s) {
  if (s == "uniform") return NoiseKind::uniform;
  if (s == "rademacher") return NoiseKind::rademacher;
  throw ConfigError("noise: expected uniform|rademacher, got '" + s + "'");
}

BuiltEnvironment build_environment(const RunConfig& cfg) {
  std::string spec = cfg.env;
  if (spec == "lure") spec = "switch:lure-a:lure-b";
  const auto parts = split(spec, ':');
  const std::string& head = parts[0];

  const auto one_fn = [&](std::size_t i) {
    if (parts.size() <= i) throw ConfigError("env: missing function name in '" + cfg.env + "'");
    return make_test_function(parts[i]);
  };

  BuiltEnvironment out;
  if (parts.size() == 1 && head != "lure") {
    TestFunction f = one_fn(0);
    out.dim = f.dim;
    out.optimum = f.optimum;
    out.process = make_deterministic(std::move(f), cfg.n);
  } else if (head == "det") {
    TestFunction f = one_fn(1);
    out.dim = f.dim;
    out.optimum = f.optimum;
    out.process = make_deterministic(std::move(f), cfg.n);
  } else if (head == "sto") {
    TestFunction f = one_fn(1);
    out.dim = f.dim;
    out.optimum = f.optimum;
    const double b = cfg.b >= 0 ? cfg.b : 0.5;
    out.process = make_stochastic(std::move(f), b, cfg.n, cfg.seed, parse_noise(cfg.noise));
  } else if (head == "switch") {
    TestFunction fa = one_fn(1);
    TestFunction fb = one_fn(2);
    out.dim = fa.dim;
    out.process = make_switch(std::move(fa), std::move(fb), cfg.n, cfg.b);
  } else if (head == "drift") {
    TestFunction f = one_fn(1);
    if (parts.size() < 3) throw ConfigError("env: drift needs a modulation, e.g. drift:wedge:sine");
    TestFunction mod = make_modulation(parts[2]);
    out.dim = f.dim;
    const double amplitude = cfg.b >= 0 ? cfg.b : 0.25;
    out.process = make_drift(std::move(f), std::move(mod), amplitude, cfg.n);
  } else if (head == "perm") {
    TestFunction fa = one_fn(1);
    TestFunction fb = one_fn(2);
    if (parts.size() < 4)
      throw ConfigError("env: perm needs a pattern, e.g. perm:wedge25:wedge75:alternate");
    out.dim = fa.dim;
    std::vector<int> assignment(static_cast<std::size_t>(cfg.n));
    if (parts[3] == "alternate") {
      for (std::int64_t t = 0; t < cfg.n; ++t) assignment[static_cast<std::size_t>(t)] = t % 2;
    } else if (parts[3] == "shuffle") {
      for (std::int64_t t = 0; t < cfg.n; ++t) assignment[static_cast<std::size_t>(t)] = t % 2;
      Rng g = make_rng(cfg.seed ^ 0x9e1bULL);
      std::shuffle(assignment.begin(), assignment.end(), g);
    } else {
      throw ConfigError("env: unknown perm pattern '" + parts[3] + "'");
    }
    std::vector<TestFunction> pool;
    pool.push_back(std::move(fa));
    pool.push_back(std::move(fb));
    out.process = make_permutation(std::move(pool), std::move(assignment), cfg.n, cfg.b);
  } else {
    throw ConfigError("env: unknown environment kind '" + head + "' in '" + cfg.env + "'");
  }
  return out;
}

struct RepOutcome {
  RepResult result;
  std::vector<std::vector<std::int64_t>> opt_rank;   // [t][h-1]
  std::vector<std::vector<std::int64_t>> opt_pulls;  // [t][h-1]
  std::vector<std::int64_t> depth_histogram;
};

RepOutcome run_one_rep(const RunConfig& cfg, const RewardProcess& process, const Domain& domain,
                       const PartitionScheme& scheme, const LearnerParams& lp, double sup_value,
                       int rep, bool diagnostics, const std::optional<Point>& optimum) {
  RepOutcome out;
  const std::uint64_t rep_seed = cfg.seed ^ splitmix64(static_cast<std::uint64_t>(rep));
  Rng rng = make_rep_rng(cfg.seed, static_cast<std::uint64_t>(rep));
  auto learner = make_learner(cfg.algo, domain, scheme, lp);

  const int H = learner->max_depth();
  std::vector<CellId> optimal_cells;
  if (diagnostics && optimum) {
    for (int h = 1; h <= H; ++h) optimal_cells.push_back(locate(*optimum, h, domain, scheme));
    out.opt_rank.resize(static_cast<std::size_t>(cfg.n));
    out.opt_pulls.resize(static_cast<std::size_t>(cfg.n));
  }
  if (diagnostics) out.depth_histogram.assign(static_cast<std::size_t>(H) + 1, 0);

  std::int64_t evaluations = 0;
  for (std::int64_t t = 1; t <= cfg.n; ++t) {
    if (diagnostics && optimum) {
      auto& ranks = out.opt_rank[static_cast<std::size_t>(t - 1)];
      auto& pulls = out.opt_pulls[static_cast<std::size_t>(t - 1)];
      ranks.resize(static_cast<std::size_t>(H), 0);
      pulls.resize(static_cast<std::size_t>(H), 0);
      for (int h = 1; h <= H; ++h) {
        const CellId c = optimal_cells[static_cast<std::size_t>(h - 1)];
        if (auto r = learner->rank_of(c)) ranks[static_cast<std::size_t>(h - 1)] = *r;
        if (const StatsTree* st = learner->stats())
          pulls[static_cast<std::size_t>(h - 1)] = st->pulls(c);
      }
    }
    const SelectResult sel = learner->select(t, rng);
    if (diagnostics) out.depth_histogram[static_cast<std::size_t>(sel.cell.depth)] += 1;
    const double y = process.evaluate(t, sel.point);
    ++evaluations;
    learner->observe(t, y);
  }
  if (evaluations != cfg.n)
    throw InternalError("run: evaluation counter mismatch: " + std::to_string(evaluations));

  const Recommendation rec = learner->recommend(rng);
  RepResult& r = out.result;
  r.rep = rep;
  r.seed = rep_seed;
  r.cell = rec.cell;
  r.point = rec.point;
  r.point_mass = rec.point_mass;
  if (rec.point_mass) {
    r.regret = sup_value - process.average(rec.point);
    r.regret_se = 0.0;
  } else {
    // x(n) ~ U_P(cell); estimate E[f(x(n))] with mc_draws fresh draws.
    std::vector<double> vals(static_cast<std::size_t>(cfg.mc_draws));
    for (int m = 0; m < cfg.mc_draws; ++m) {
      const Point x = sample_descend(rec.cell, rec.cell.depth, domain, scheme, rng);
      vals[static_cast<std::size_t>(m)] = process.average(x);
    }
    const MeanSd ms = mean_sd(vals);
    r.regret = sup_value - ms.mean;
    r.regret_se = ms.sd / std::sqrt(static_cast<double>(cfg.mc_draws));
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (branching < 2) throw ConfigError("k: branching factor must be >= 2");
  if (n < branching) throw ConfigError("n: budget must satisfy n >= K");
  if (reps < 1) throw ConfigError("reps: must be >= 1");
  if (mc_draws < 1) throw ConfigError("mc-draws: must be >= 1");
  if (grid_points < 2) throw ConfigError("grid: must be >= 2");
  if (format != "csv" && format != "json") throw ConfigError("format: expected csv|json");
  const auto names = learner_names();
  if (std::find(names.begin(), names.end(), algo) == names.end())
    throw ConfigError("algo: unknown algorithm '" + algo + "'");
}

RewardProcess parse_environment(const RunConfig& cfg) { return build_environment(cfg).process; }

RunRecord run_experiment(const RunConfig& cfg, bool collect_diagnostics) {
  cfg.validate();
  BuiltEnvironment env = build_environment(cfg);
  const Domain domain = Domain::unit_cube(env.dim);
  const PartitionScheme scheme(cfg.branching);

  RunRecord record;
  record.config = cfg;
  record.config.b = cfg.b >= 0 ? cfg.b : env.process.range();
  double f_max = cfg.f_max >= 0 ? cfg.f_max : env.process.value_bound();
  if (!(f_max > 0)) f_max = 1.0;
  record.config.f_max = f_max;

  LearnerParams lp;
  lp.n = cfg.n;
  lp.b = env.process.range();
  lp.f_max = f_max;
  lp.delta = cfg.delta;
  record.config.delta = lp.confidence().delta;
  if (cfg.algo == "uniform-known") {
    // Smoothness from the underlying function; bundled funcs declare it.
    const auto parts = split(cfg.env == "lure" ? "switch:lure-a:lure-b" : cfg.env, ':');
    const std::string fn_name = parts.size() == 1 ? parts[0] : parts[1];
    const TestFunction f = make_test_function(fn_name);
    if (!f.nu || !f.rho)
      throw ConfigError("algo: uniform-known needs declared smoothness for env '" + cfg.env + "'");
    lp.nu = f.nu;
    lp.rho = f.rho;
  }

  // Brute-force sup of the average, refined by deep cell centers and any
  // declared optima.
  std::vector<Point> candidates;
  if (env.optimum) candidates.push_back(*env.optimum);
  int refine = max_tracked_depth(cfg.branching, cfg.n);
  while (ipow(cfg.branching, refine) > (1 << 18)) --refine;
  const SupResult sup =
      sup_oracle(env.process.average_oracle(), domain, scheme,
                 sup_grid_per_dim(cfg.grid_points, env.dim), refine, candidates);
  record.sup_value = sup.value;
  record.sup_point = sup.x;

  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(cfg.reps));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  const int workers = std::max(1, std::min<int>(cfg.reps, cfg.threads > 0
                                                              ? cfg.threads
                                                              : static_cast<int>(
                                                                    std::thread::hardware_concurrency())));
  auto work = [&] {
    for (;;) {
      const int rep = next.fetch_add(1);
      if (rep >= cfg.reps) return;
      try {
        outcomes[static_cast<std::size_t>(rep)] =
            run_one_rep(cfg, env.process, domain, scheme, lp, record.sup_value, rep,
                        collect_diagnostics, env.optimum);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> regrets;
  regrets.reserve(static_cast<std::size_t>(cfg.reps));
  for (auto& oc : outcomes) {
    record.reps.push_back(oc.result);
    regrets.push_back(oc.result.regret);
  }
  const MeanSd ms = mean_sd(regrets);
  record.mean_regret = ms.mean;
  record.ci95_half = cfg.reps > 1 ? 1.96 * ms.sd / std::sqrt(static_cast<double>(cfg.reps)) : 0.0;

  if (collect_diagnostics) {
    DiagnosticsTraces d;
    d.has_optimum = env.optimum.has_value();
    for (auto& oc : outcomes) {
      d.opt_rank.push_back(std::move(oc.opt_rank));
      d.opt_pulls.push_back(std::move(oc.opt_pulls));
      d.depth_histogram.push_back(std::move(oc.depth_histogram));
    }
    record.diagnostics = std::move(d);
  }
  return record;
}

SweepResult sweep(const RunConfig& cfg, const std::vector<std::int64_t>& n_values) {
  if (n_values.empty()) throw ConfigError("n-list: at least one budget required");
  for (std::size_t i = 1; i < n_values.size(); ++i) {
    if (n_values[i] <= n_values[i - 1]) throw ConfigError("n-list: budgets must be ascending");
  }
  SweepResult out;
  out.config = cfg;
  out.n_values = n_values;
  for (std::int64_t n : n_values) {
    RunConfig c = cfg;
    c.n = n;
    out.records.push_back(run_experiment(c));
  }
  // Least-squares slope of log(mean regret) against log(n), over budgets with
  // positive mean regret.
  std::vector<double> xs, ys;
  for (const RunRecord& r : out.records) {
    if (r.mean_regret > 0) {
      xs.push_back(std::log(static_cast<double>(r.config.n)));
      ys.push_back(std::log(r.mean_regret));
    }
  }
  if (xs.size() >= 2) {
    const double mx = mean_sd(xs).mean, my = mean_sd(ys).mean;
    double num = 0, den = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      num += (xs[i] - mx) * (ys[i] - my);
      den += (xs[i] - mx) * (xs[i] - mx);
    }
    if (den > 0) out.loglog_slope = num / den;
  }
  return out;
}

// --- output -------------------------------------------------------------------

void write_run_csv(const RunRecord& rec, std::ostream& os) {
  os << "algorithm,env,n,K,rep,seed,rec_depth,rec_index,rec_point,regret,regret_se\n";
  for (const RepResult& r : rec.reps) {
    os << rec.config.algo << ',' << rec.config.env << ',' << rec.config.n << ','
       << rec.config.branching << ',' << r.rep << ',' << r.seed << ',' << r.cell.depth << ','
       << (r.cell.index + 1) << ',' << fmt_point(r.point) << ',' << fmt_double(r.regret) << ','
       << fmt_double(r.regret_se) << '\n';
  }
}

namespace {

json run_to_json(const RunRecord& rec) {
  json j;
  j["type"] = "run";
  j["algorithm"] = rec.config.algo;
  j["env"] = rec.config.env;
  j["n"] = rec.config.n;
  j["k"] = rec.config.branching;
  j["b"] = rec.config.b;
  j["f_max"] = rec.config.f_max;
  j["delta"] = rec.config.delta;
  j["reps"] = rec.config.reps;
  j["seed"] = rec.config.seed;
  j["mc_draws"] = rec.config.mc_draws;
  j["grid_points"] = rec.config.grid_points;
  j["sup_value"] = rec.sup_value;
  j["sup_point"] = rec.sup_point;
  j["repetitions"] = json::array();
  for (const RepResult& r : rec.reps) {
    json e;
    e["rep"] = r.rep;
    e["seed"] = r.seed;
    e["cell"] = {{"depth", r.cell.depth}, {"index", r.cell.index + 1}};
    e["point"] = r.point;
    e["point_mass"] = r.point_mass;
    e["regret"] = r.regret;
    e["regret_se"] = r.regret_se;
    j["repetitions"].push_back(e);
  }
  j["mean_regret"] = rec.mean_regret;
  j["ci95_half"] = rec.ci95_half;
  return j;
}

}  // namespace

void write_run_json(const RunRecord& rec, std::ostream& os) {
  os << run_to_json(rec).dump(2) << '\n';
}

void write_sweep_csv(const SweepResult& sw, std::ostream& os) {
  os << "algorithm,env,n,rep,regret\n";
  for (const RunRecord& rec : sw.records) {
    for (const RepResult& r : rec.reps) {
      os << rec.config.algo << ',' << rec.config.env << ',' << rec.config.n << ',' << r.rep << ','
         << fmt_double(r.regret) << '\n';
    }
  }
}

void write_sweep_json(const SweepResult& sw, std::ostream& os) {
  json j;
  j["type"] = "sweep";
  j["algorithm"] = sw.config.algo;
  j["env"] = sw.config.env;
  j["n_values"] = sw.n_values;
  j["rows"] = json::array();
  for (const RunRecord& rec : sw.records) {
    for (const RepResult& r : rec.reps) {
      j["rows"].push_back(
          {{"n", rec.config.n}, {"rep", r.rep}, {"regret", r.regret}});
    }
  }
  j["mean_regret_by_n"] = json::array();
  for (const RunRecord& rec : sw.records)
    j["mean_regret_by_n"].push_back({{"n", rec.config.n}, {"mean_regret", rec.mean_regret}});
  if (sw.loglog_slope) j["loglog_slope"] = *sw.loglog_slope;
  else j["loglog_slope"] = nullptr;
  os << j.dump(2) << '\n';
}

namespace {

template <class Record, class CsvFn, class JsonFn>
void write_any(const Record& rec, const std::string& path, const std::string& format, CsvFn csv,
               JsonFn jsonfn) {
  const auto emit = [&](std::ostream& os) {
    if (format == "csv") csv(rec, os);
    else if (format == "json") jsonfn(rec, os);
    else throw ConfigError("format: expected csv|json");
  };
  if (path.empty()) {
    emit(std::cout);
    return;
  }
  std::ofstream os(path, std::ios::binary);  // binary: byte-stable across runs
  if (!os) throw ConfigError("out: cannot open '" + path + "' for writing");
  emit(os);
}

}  // namespace

void write_output(const RunRecord& rec, const std::string& path, const std::string& format) {
  write_any(rec, path, format, write_run_csv, write_run_json);
}

void write_output(const SweepResult& sw, const std::string& path, const std::string& format) {
  write_any(sw, path, format, write_sweep_csv, write_sweep_json);
}

bool emit_diagnostics(const RunRecord& rec, const std::string& path_prefix) {
  if (!rec.diagnostics)
    throw ConfigError("diag: run_experiment was executed without diagnostics collection");
  const DiagnosticsTraces& d = *rec.diagnostics;

  {
    std::ofstream os(path_prefix + "_depth_hist.csv", std::ios::binary);
    if (!os) throw ConfigError("out: cannot open '" + path_prefix + "_depth_hist.csv'");
    os << "rep,depth,count\n";
    for (std::size_t rep = 0; rep < d.depth_histogram.size(); ++rep) {
      for (std::size_t h = 0; h < d.depth_histogram[rep].size(); ++h)
        os << rep << ',' << h << ',' << d.depth_histogram[rep][h] << '\n';
    }
  }

  if (!d.has_optimum) {
    std::cerr << "warning: environment declares no optimum x*; rank/pull traces skipped\n";
    return false;
  }
  std::ofstream os(path_prefix + "_rank_trace.csv", std::ios::binary);
  if (!os) throw ConfigError("out: cannot open '" + path_prefix + "_rank_trace.csv'");
  os << "rep,t,depth,opt_rank,opt_pulls\n";
  for (std::size_t rep = 0; rep < d.opt_rank.size(); ++rep) {
    for (std::size_t t = 0; t < d.opt_rank[rep].size(); ++t) {
      const auto& ranks = d.opt_rank[rep][t];
      const auto& pulls = d.opt_pulls[rep][t];
      for (std::size_t h = 0; h < ranks.size(); ++h) {
        os << rep << ',' << (t + 1) << ',' << (h + 1) << ',' << ranks[h] << ',' << pulls[h]
           << '\n';
      }
    }
  }
  return true;
}

}  // namespace oro
