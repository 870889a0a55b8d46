#include "oro/environments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oro {

double RewardProcess::evaluate(std::int64_t t, std::span<const double> x) const {
  if (t < 1 || t > n_)
    throw std::invalid_argument("evaluate: round index " + std::to_string(t) +
                                " outside [1, " + std::to_string(n_) + "]");
  return per_round_(t, x);
}

namespace {

// Enumerate a regular closed grid over the domain and report the sup of g.
// points_per_dim applies per coordinate.
template <class Fn>
SupResult grid_sup(Fn&& g, const Domain& domain, std::int64_t points_per_dim) {
  const int dim = domain.dim();
  std::int64_t total = 1;
  for (int j = 0; j < dim; ++j) total *= points_per_dim;
  SupResult best;
  best.value = -std::numeric_limits<double>::infinity();
  Point x(dim);
  for (std::int64_t it = 0; it < total; ++it) {
    std::int64_t rest = it;
    for (int j = 0; j < dim; ++j) {
      const std::int64_t idx = rest % points_per_dim;
      rest /= points_per_dim;
      x[j] = domain.lows[j] +
             (domain.highs[j] - domain.lows[j]) *
                 (static_cast<double>(idx) / static_cast<double>(points_per_dim - 1));
    }
    const double v = g(std::span<const double>(x));
    if (v > best.value) {
      best.value = v;
      best.x = x;
    }
  }
  return best;
}

double audit_pair_range(const TestFunction& fa, const TestFunction& fb, const Domain& domain) {
  const auto diff = [&](std::span<const double> x) { return std::abs(fa(x) - fb(x)); };
  return grid_sup(diff, domain, 10001).value;
}

}  // namespace

RewardProcess make_deterministic(TestFunction f, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("make_deterministic: n >= 1 required");
  RewardProcess p;
  p.kind_ = FeedbackKind::deterministic;
  p.n_ = n;
  p.b_ = 0.0;
  p.value_bound_ = f.value_bound;
  p.description_ = "det:" + f.name;
  auto fn = std::make_shared<TestFunction>(std::move(f));
  p.per_round_ = [fn](std::int64_t, std::span<const double> x) { return (*fn)(x); };
  p.avg_ = [fn](std::span<const double> x) { return (*fn)(x); };
  return p;
}

RewardProcess make_stochastic(TestFunction f, double b, std::int64_t n, std::uint64_t seed,
                              NoiseKind noise) {
  if (n < 1) throw std::invalid_argument("make_stochastic: n >= 1 required");
  if (b < 0) throw std::invalid_argument("make_stochastic: noise range b >= 0 required");
  RewardProcess p;
  p.kind_ = FeedbackKind::stochastic_iid;
  p.n_ = n;
  p.b_ = b;
  p.value_bound_ = f.value_bound + b;
  p.description_ = "sto:" + f.name;
  auto fn = std::make_shared<TestFunction>(std::move(f));
  p.per_round_ = [fn, b, seed, noise](std::int64_t t, std::span<const double> x) {
    // One draw per round: f_t = f + eps_t, the same offset at every x.
    double eps = 0.0;
    if (b > 0.0) {
      Rng g(splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(t)));
      if (noise == NoiseKind::uniform) {
        eps = std::uniform_real_distribution<double>(-b, b)(g);
      } else {
        eps = (g() & 1ULL) ? b : -b;
      }
    }
    return (*fn)(x) + eps;
  };
  p.avg_ = [fn](std::span<const double> x) { return (*fn)(x); };
  return p;
}

RewardProcess make_switch(TestFunction fa, TestFunction fb, std::int64_t n, double b) {
  if (n < 1) throw std::invalid_argument("make_switch: n >= 1 required");
  if (fa.dim != fb.dim) throw std::invalid_argument("make_switch: dimension mismatch");
  const Domain domain = fa.domain();
  const double audited = audit_pair_range(fa, fb, domain);
  if (b < 0) {
    b = audited + 1e-9;
  } else if (audited > b + 1e-9) {
    throw std::invalid_argument("make_switch: sup|f_A - f_B| = " + std::to_string(audited) +
                                " exceeds declared range b = " + std::to_string(b));
  }
  RewardProcess p;
  p.kind_ = FeedbackKind::adversarial;
  p.n_ = n;
  p.b_ = b;
  p.value_bound_ = std::max(fa.value_bound, fb.value_bound);
  p.description_ = "switch:" + fa.name + ":" + fb.name;
  const std::int64_t first_half = (n + 1) / 2;  // f_A on t <= ceil(n/2)
  auto a = std::make_shared<TestFunction>(std::move(fa));
  auto bb = std::make_shared<TestFunction>(std::move(fb));
  p.per_round_ = [a, bb, first_half](std::int64_t t, std::span<const double> x) {
    return t <= first_half ? (*a)(x) : (*bb)(x);
  };
  const double wa = static_cast<double>(first_half) / static_cast<double>(n);
  const double wb = static_cast<double>(n - first_half) / static_cast<double>(n);
  p.avg_ = [a, bb, wa, wb](std::span<const double> x) { return wa * (*a)(x) + wb * (*bb)(x); };
  return p;
}

RewardProcess make_drift(TestFunction base, TestFunction modulation, double amplitude,
                         std::int64_t n) {
  if (n < 1) throw std::invalid_argument("make_drift: n >= 1 required");
  if (amplitude < 0) throw std::invalid_argument("make_drift: amplitude >= 0 required");
  const Domain domain = base.domain();
  const auto abs_mod = [&](std::span<const double> x) { return std::abs(modulation(x)); };
  const double mod_sup = grid_sup(abs_mod, domain, 10001).value;
  if (mod_sup > 1.0 + 1e-9)
    throw std::invalid_argument("make_drift: |modulation| <= 1 violated, sup = " +
                                std::to_string(mod_sup));
  RewardProcess p;
  p.kind_ = FeedbackKind::adversarial;
  p.n_ = n;
  p.b_ = 2.0 * amplitude;  // two rounds can sit on opposite sine extremes
  p.value_bound_ = base.value_bound + amplitude;
  p.description_ = "drift:" + base.name + ":" + modulation.name;
  // The exact average modulation weight, summed the same way evaluate sums.
  double sine_sum = 0.0;
  for (std::int64_t t = 1; t <= n; ++t)
    sine_sum += std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n));
  const double avg_weight = amplitude * sine_sum / static_cast<double>(n);
  auto fn = std::make_shared<TestFunction>(std::move(base));
  auto mod = std::make_shared<TestFunction>(std::move(modulation));
  p.per_round_ = [fn, mod, amplitude, n](std::int64_t t, std::span<const double> x) {
    const double w = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n));
    return (*fn)(x) + amplitude * w * (*mod)(x);
  };
  p.avg_ = [fn, mod, avg_weight](std::span<const double> x) {
    return (*fn)(x) + avg_weight * (*mod)(x);
  };
  return p;
}

RewardProcess make_permutation(std::vector<TestFunction> pool, std::vector<int> assignment,
                               std::int64_t n, double b) {
  if (n < 1) throw std::invalid_argument("make_permutation: n >= 1 required");
  if (pool.empty()) throw std::invalid_argument("make_permutation: empty pool");
  if (static_cast<std::int64_t>(assignment.size()) != n)
    throw std::invalid_argument("make_permutation: assignment must have length n");
  for (int a : assignment) {
    if (a < 0 || a >= static_cast<int>(pool.size()))
      throw std::invalid_argument("make_permutation: assignment entry out of pool range");
  }
  const Domain domain = pool.front().domain();
  double audited = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j)
      audited = std::max(audited, audit_pair_range(pool[i], pool[j], domain));
  if (b < 0) {
    b = audited + 1e-9;
  } else if (audited > b + 1e-9) {
    throw std::invalid_argument("make_permutation: pool pair range " + std::to_string(audited) +
                                " exceeds declared b = " + std::to_string(b));
  }
  RewardProcess p;
  p.kind_ = FeedbackKind::adversarial;
  p.n_ = n;
  p.b_ = b;
  p.value_bound_ = 0.0;
  for (const auto& f : pool) p.value_bound_ = std::max(p.value_bound_, f.value_bound);
  p.description_ = "perm[" + std::to_string(pool.size()) + "]";
  std::vector<double> weight(pool.size(), 0.0);
  for (int a : assignment) weight[static_cast<std::size_t>(a)] += 1.0 / static_cast<double>(n);
  auto pl = std::make_shared<std::vector<TestFunction>>(std::move(pool));
  auto asg = std::make_shared<std::vector<int>>(std::move(assignment));
  p.per_round_ = [pl, asg](std::int64_t t, std::span<const double> x) {
    return (*pl)[static_cast<std::size_t>((*asg)[static_cast<std::size_t>(t - 1)])](x);
  };
  p.avg_ = [pl, weight](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < pl->size(); ++i) s += weight[i] * (*pl)[i](x);
    return s;
  };
  return p;
}

SupResult sup_oracle(const AverageOracle& avg, const Domain& domain,
                     const PartitionScheme& scheme, int grid_points_per_dim, int refine_depth,
                     std::span<const Point> extra_candidates) {
  if (grid_points_per_dim < 2)
    throw std::invalid_argument("sup_oracle: grid_points_per_dim >= 2 required");
  SupResult best = grid_sup(avg, domain, grid_points_per_dim);
  if (refine_depth > 0) {
    const std::int64_t cells = ipow(scheme.branching, refine_depth);
    for (std::int64_t i = 0; i < cells; ++i) {
      const Point c =
          cell_center(CellId{refine_depth, static_cast<std::uint64_t>(i)}, domain, scheme);
      const double v = avg(c);
      if (v > best.value) best = SupResult{c, v};
    }
  }
  for (const Point& c : extra_candidates) {
    if (!domain.contains(c)) continue;
    const double v = avg(c);
    if (v > best.value) best = SupResult{c, v};
  }
  return best;
}

MeanEstimate cell_mean_oracle(const AverageOracle& avg, CellId cell, const Domain& domain,
                              const PartitionScheme& scheme, std::int64_t samples, Rng& rng) {
  if (samples < 1) throw std::invalid_argument("cell_mean_oracle: samples >= 1 required");
  // U_P(cell) equals a Lebesgue-uniform draw inside the cell for any descent
  // depth under the equal-measure split, so descending to cell.depth suffices.
  double sum = 0.0, sumsq = 0.0;
  for (std::int64_t s = 0; s < samples; ++s) {
    const Point x = sample_descend(cell, cell.depth, domain, scheme, rng);
    const double v = avg(x);
    sum += v;
    sumsq += v * v;
  }
  MeanEstimate out;
  out.mean = sum / static_cast<double>(samples);
  if (samples > 1) {
    const double var =
        std::max(0.0, (sumsq - sum * sum / static_cast<double>(samples)) /
                          static_cast<double>(samples - 1));
    out.std_error = std::sqrt(var / static_cast<double>(samples));
  }
  return out;
}

std::int64_t count_near_optimal_cells(const TestFunction& fn, int depth, double epsilon,
                                      const PartitionScheme& scheme, int grid_points_per_dim) {
  if (depth < 0 || depth > 12)
    throw std::invalid_argument("count_near_optimal_cells: depth in [0, 12] required");
  const Domain domain = fn.domain();
  double fstar;
  if (fn.optimum_value) {
    fstar = *fn.optimum_value;
  } else {
    fstar = sup_oracle(fn.eval, domain, scheme, 10001, std::min(depth + 8, 12)).value;
  }
  const double threshold = fstar - epsilon - 1e-9;
  const std::int64_t cells = ipow(scheme.branching, depth);
  std::int64_t count = 0;
  for (std::int64_t i = 0; i < cells; ++i) {
    const Domain b = cell_bounds(CellId{depth, static_cast<std::uint64_t>(i)}, domain, scheme);
    // Closed in-cell grid: the sup of a continuous f over the half-open cell
    // equals the max over the closure.
    if (grid_sup(fn.eval, b, grid_points_per_dim).value >= threshold) ++count;
  }
  return count;
}

}  // namespace oro
