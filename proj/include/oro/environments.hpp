#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oro/common.hpp"
#include "oro/partition.hpp"
#include "oro/test_functions.hpp"

namespace oro {

enum class FeedbackKind { deterministic, stochastic_iid, adversarial };

enum class NoiseKind { uniform, rademacher };

// Exact handle for the round-averaged objective: f = (1/n) sum_t f_t for
// deterministic/adversarial processes, the noise-free mean for stochastic
// ones (where the regret reduces to the mean function).
using AverageOracle = std::function<double(std::span<const double>)>;

// A reward-generating process f_1..f_n. Immutable after construction;
// evaluation is pure given (t, x, seed) and safe to call concurrently.
class RewardProcess {
 public:
  // Reward y_t = f_t(x). t must lie in [1, n].
  double evaluate(std::int64_t t, std::span<const double> x) const;

  double average(std::span<const double> x) const { return avg_(x); }
  const AverageOracle& average_oracle() const { return avg_; }

  FeedbackKind kind() const { return kind_; }
  std::int64_t horizon() const { return n_; }
  // Range certified under the process's feedback law: |eps_t| <= b for
  // stochastic feedback, |f_t'(x) - f_t(x)| <= b for adversarial.
  double range() const { return b_; }
  // sup over t and x of |f_t(x)|.
  double value_bound() const { return value_bound_; }
  const std::string& description() const { return description_; }

 private:
  friend RewardProcess make_deterministic(TestFunction, std::int64_t);
  friend RewardProcess make_stochastic(TestFunction, double, std::int64_t, std::uint64_t,
                                       NoiseKind);
  friend RewardProcess make_switch(TestFunction, TestFunction, std::int64_t, double);
  friend RewardProcess make_drift(TestFunction, TestFunction, double, std::int64_t);
  friend RewardProcess make_permutation(std::vector<TestFunction>, std::vector<int>,
                                        std::int64_t, double);
  RewardProcess() = default;

  FeedbackKind kind_ = FeedbackKind::deterministic;
  std::int64_t n_ = 0;
  double b_ = 0.0;
  double value_bound_ = 0.0;
  std::string description_;
  std::function<double(std::int64_t, std::span<const double>)> per_round_;
  AverageOracle avg_;
};

// f_t = f for every round.
RewardProcess make_deterministic(TestFunction f, std::int64_t n);

// f_t = f + eps_t with eps_t mean-zero, |eps_t| <= b, drawn from a stream
// keyed by (seed, t) so repeated queries at the same round reproduce.
RewardProcess make_stochastic(TestFunction f, double b, std::int64_t n, std::uint64_t seed,
                              NoiseKind noise = NoiseKind::uniform);

// f_t = fa for t <= ceil(n/2), fb afterwards. The pairwise range
// sup_x |fa - fb| is audited on a dense grid (>= 10^4 points per
// dimension-slice); if b >= 0 is given the audit must certify it, otherwise
// the audited value is adopted. Violations throw std::invalid_argument.
RewardProcess make_switch(TestFunction fa, TestFunction fb, std::int64_t n, double b = -1.0);

// f_t = base + amplitude * sin(2 pi t / n) * m(x) with |m| <= 1 (grid
// audited). The certified range is 2*amplitude since two rounds can sit on
// opposite extremes of the sine.
RewardProcess make_drift(TestFunction base, TestFunction modulation, double amplitude,
                         std::int64_t n);

// f_t = pool[assignment[t-1]]. All pool pairs are audited against the range.
RewardProcess make_permutation(std::vector<TestFunction> pool, std::vector<int> assignment,
                               std::int64_t n, double b = -1.0);

// --- brute-force value oracles -------------------------------------------

struct SupResult {
  Point x;
  double value = 0.0;
};

// Maximizer over a regular grid plus depth-`refine_depth` cell centers plus
// any extra candidate points. An approximation: error is bounded by the
// local Lipschitz constant times the grid spacing for the bundled functions.
SupResult sup_oracle(const AverageOracle& avg, const Domain& domain,
                     const PartitionScheme& scheme, int grid_points_per_dim,
                     int refine_depth = 0, std::span<const Point> extra_candidates = {});

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Monte Carlo estimate of f_{h,i} = E_{x ~ U_P(cell)}[avg(x)].
MeanEstimate cell_mean_oracle(const AverageOracle& avg, CellId cell, const Domain& domain,
                              const PartitionScheme& scheme, std::int64_t samples, Rng& rng);

// N_h(eps): number of depth-h cells whose sup (estimated on a dense closed
// in-cell grid) reaches fn's optimum value minus eps. Diagnostic scale only.
std::int64_t count_near_optimal_cells(const TestFunction& fn, int depth, double epsilon,
                                      const PartitionScheme& scheme,
                                      int grid_points_per_dim = 64);

}  // namespace oro
