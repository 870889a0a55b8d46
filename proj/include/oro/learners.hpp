#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "oro/common.hpp"
#include "oro/estimators.hpp"
#include "oro/partition.hpp"
#include "oro/rank_table.hpp"

namespace oro {

struct LearnerParams {
  std::int64_t n = 0;
  double b = 0.0;
  double f_max = 1.0;
  double delta = -1.0;  // < 0: use default_delta(b, f_max, n)
  // Smoothness, required by uniform-known only.
  std::optional<double> nu;
  std::optional<double> rho;

  ConfidenceParams confidence() const;
};

struct SelectResult {
  CellId cell;  // the selected cell (h_t, i_t)
  Point point;  // x_t ~ U_P(cell)
};

struct Recommendation {
  CellId cell;
  Point point;
  // true: the recommendation is exactly `point`; false: the recommendation
  // distribution is U_P(cell) and `point` is one draw from it.
  bool point_mass = false;
};

// Round-synchronous learner: exactly n select/observe pairs, then one
// recommend. Implementations throw InternalError on protocol violations.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual SelectResult select(std::int64_t t, Rng& rng) = 0;
  virtual void observe(std::int64_t t, double y) = 0;
  virtual Recommendation recommend(Rng& rng) = 0;

  virtual const StatsTree* stats() const { return nullptr; }
  // 1-based rank of a cell at its depth, when the learner maintains ranks.
  virtual std::optional<std::int64_t> rank_of(CellId cell) const { return std::nullopt; }
  virtual int max_depth() const = 0;
};

// Uniform root sampling with an importance-weighted LCB recommendation over
// depths [0, H_max].
class RobuniLearner final : public Learner {
 public:
  RobuniLearner(Domain domain, PartitionScheme scheme, LearnerParams params);
  SelectResult select(std::int64_t t, Rng& rng) override;
  void observe(std::int64_t t, double y) override;
  Recommendation recommend(Rng& rng) override;
  const StatsTree* stats() const override { return &stats_; }
  int max_depth() const override { return stats_.max_depth(); }

 private:
  LearnerParams params_;
  ConfidenceParams conf_;
  StatsTree stats_;
  std::vector<std::uint64_t> pending_path_;
  std::int64_t round_ = 0;
  bool awaiting_observe_ = false;
};

// Zipf sampling over LCB-ranked cells with an importance-weighted
// recommendation over depths [1, H_max].
class VroomLearner final : public Learner {
 public:
  VroomLearner(Domain domain, PartitionScheme scheme, LearnerParams params);
  SelectResult select(std::int64_t t, Rng& rng) override;
  void observe(std::int64_t t, double y) override;
  Recommendation recommend(Rng& rng) override;
  const StatsTree* stats() const override { return &stats_; }
  std::optional<std::int64_t> rank_of(CellId cell) const override;
  int max_depth() const override { return stats_.max_depth(); }

  const ZipfGrid& grid() const { return grid_; }
  const RankTable& table(int depth) const { return tables_[static_cast<std::size_t>(depth - 1)]; }

 private:
  LearnerParams params_;
  ConfidenceParams conf_;
  ZipfGrid grid_;
  StatsTree stats_;
  std::vector<RankTable> tables_;  // depths 1..H_max
  int pending_depth_ = 0;
  std::vector<std::uint64_t> pending_path_;
  std::int64_t round_ = 0;
  bool awaiting_observe_ = false;
};

// One evaluation per depth-H cell at the cell center (deterministic
// feedback); recommends the best observed point.
class UniformDetLearner final : public Learner {
 public:
  UniformDetLearner(Domain domain, PartitionScheme scheme, LearnerParams params);
  SelectResult select(std::int64_t t, Rng& rng) override;
  void observe(std::int64_t t, double y) override;
  Recommendation recommend(Rng& rng) override;
  int max_depth() const override { return depth_; }

 private:
  Domain domain_;
  PartitionScheme scheme_;
  LearnerParams params_;
  int depth_;
  std::int64_t cells_;
  CellId pending_cell_;
  Point pending_point_;
  double best_value_ = -std::numeric_limits<double>::infinity();
  Recommendation best_;
  std::int64_t round_ = 0;
  bool awaiting_observe_ = false;
};

// Explores all K^H cells floor(n/K^H) times each at depth
// H = floor(log_{K/rho^2} n), one fixed evaluation point per cell;
// recommends the point with the best empirical mean.
class UniformStoKnownLearner final : public Learner {
 public:
  UniformStoKnownLearner(Domain domain, PartitionScheme scheme, LearnerParams params);
  SelectResult select(std::int64_t t, Rng& rng) override;
  void observe(std::int64_t t, double y) override;
  Recommendation recommend(Rng& rng) override;
  int max_depth() const override { return depth_; }
  int exploration_depth() const { return depth_; }
  std::int64_t pulls_per_cell() const { return reps_; }

 private:
  Domain domain_;
  PartitionScheme scheme_;
  LearnerParams params_;
  int depth_;
  std::int64_t cells_;
  std::int64_t reps_;
  std::vector<Point> point_of_cell_;
  std::vector<double> sum_;
  std::vector<std::int64_t> count_;
  std::int64_t pending_cell_ = -1;
  std::int64_t round_ = 0;
  bool awaiting_observe_ = false;
};

// Per-depth uniform exploration. Shared by the cross-validation and LCB
// recommenders below.
struct DepthAllocation {
  // pull i goes to (depth[i], cell[i]).
  std::vector<int> depth;
  std::vector<std::int64_t> cell;
};

// Budget `total` spread over depths 0..max_depth, floor(total / max_depth)
// per depth in order, capped by the remaining budget, leftovers to the root.
// Within a depth: evenly over cells, extras (or, when K^h exceeds the
// quota, the only pulls) to the lowest indices first.
DepthAllocation uniform_depth_allocation(std::int64_t total, int max_depth, int branching);

class UniformCvLearner final : public Learner {
 public:
  UniformCvLearner(Domain domain, PartitionScheme scheme, LearnerParams params);
  SelectResult select(std::int64_t t, Rng& rng) override;
  void observe(std::int64_t t, double y) override;
  Recommendation recommend(Rng& rng) override;
  int max_depth() const override { return depth_; }

 private:
  struct CellAgg {
    Point point;
    double sum = 0.0;
    std::int64_t count = 0;
  };
  Domain domain_;
  PartitionScheme scheme_;
  LearnerParams params_;
  int depth_;
  std::int64_t phase1_;
  DepthAllocation alloc_;
  std::vector<std::unordered_map<std::uint64_t, CellAgg>> phase1_stats_;  // per depth
  // phase 2
  bool phase2_ready_ = false;
  std::vector<std::pair<CellId, Point>> candidates_;
  std::vector<std::int64_t> candidate_budget_;
  std::vector<double> validated_sum_;
  std::vector<std::int64_t> validated_count_;
  std::vector<std::int64_t> phase2_schedule_;  // round - phase1_ - 1 -> candidate
  std::int64_t pending_candidate_ = -1;
  std::pair<int, std::uint64_t> pending_cell_;
  std::int64_t round_ = 0;
  bool awaiting_observe_ = false;

  void finish_phase1();
};

class UniformLcbLearner final : public Learner {
 public:
  UniformLcbLearner(Domain domain, PartitionScheme scheme, LearnerParams params);
  SelectResult select(std::int64_t t, Rng& rng) override;
  void observe(std::int64_t t, double y) override;
  Recommendation recommend(Rng& rng) override;
  int max_depth() const override { return depth_; }

 private:
  struct CellAgg {
    Point point;
    double sum = 0.0;
    std::int64_t count = 0;
  };
  Domain domain_;
  PartitionScheme scheme_;
  LearnerParams params_;
  ConfidenceParams conf_;
  int depth_;
  DepthAllocation alloc_;
  std::vector<std::unordered_map<std::uint64_t, CellAgg>> agg_;  // per depth
  std::pair<int, std::uint64_t> pending_cell_;
  std::int64_t round_ = 0;
  bool awaiting_observe_ = false;
};

// Deliberately fragile greedy baseline: visits each deepest cell once in
// index order, then always re-samples the cell with the highest empirical
// mean. Stationary rewards make it converge; an adversary that front-loads
// a decoy optimum locks it onto the decoy.
class FtlLearner final : public Learner {
 public:
  FtlLearner(Domain domain, PartitionScheme scheme, LearnerParams params);
  SelectResult select(std::int64_t t, Rng& rng) override;
  void observe(std::int64_t t, double y) override;
  Recommendation recommend(Rng& rng) override;
  int max_depth() const override { return depth_; }

 private:
  std::int64_t greedy_cell() const;

  Domain domain_;
  PartitionScheme scheme_;
  LearnerParams params_;
  int depth_;
  std::int64_t cells_;
  std::vector<double> sum_;
  std::vector<std::int64_t> count_;
  // (mean desc, index asc) over visited cells.
  std::set<std::pair<double, std::int64_t>> by_mean_;
  std::int64_t next_unvisited_ = 0;
  std::int64_t pending_cell_ = -1;
  std::int64_t round_ = 0;
  bool awaiting_observe_ = false;
};

// Factory keyed by the CLI names: robuni, vroom, uniform-det, uniform-known,
// uniform-cv, uniform-lcb, ftl. Throws ConfigError for unknown names.
std::unique_ptr<Learner> make_learner(const std::string& name, const Domain& domain,
                                      const PartitionScheme& scheme, const LearnerParams& params);

std::vector<std::string> learner_names();

}  // namespace oro
