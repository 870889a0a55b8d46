#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oro/common.hpp"
#include "oro/partition.hpp"

namespace oro {

struct ConfidenceParams {
  double delta = 0.05;
  double b = 0.0;
  double f_max = 1.0;
  std::int64_t n = 1;
};

// delta = 4b / (f_max sqrt(n)), clamped into [1/n^2, 1/2] so the log terms
// stay finite when b = 0 and sane for tiny n.
double default_delta(double b, double f_max, std::int64_t n);

// Exact double sum over depths h in [1, floor(log_K n)] and i in [1, K^h]
// of 1/(h i). Requires n >= K.
double log_bar(int branching, std::int64_t n);

// floor(log_K n): the deepest tracked depth for budget n.
int max_tracked_depth(int branching, std::int64_t n);

// The fixed (depth, rank) selection distribution: p(h, j) = 1/(h j logbar)
// for h in [1, H_max], j in [1, K^h]. Probabilities sum to exactly 1 by
// construction of the normalizer. Sampling is exact inverse-CDF over the
// flattened grid.
class ZipfGrid {
 public:
  ZipfGrid(int branching, std::int64_t n);

  double prob(int depth, std::int64_t rank) const;
  // Draws (depth, rank), rank 1-based.
  std::pair<int, std::int64_t> sample(Rng& rng) const;

  int branching() const { return k_; }
  int max_depth() const { return max_depth_; }
  double log_bar() const { return log_bar_; }
  double total_mass() const;  // recomputed sum, == 1 up to fp error

 private:
  int k_;
  int max_depth_;
  double log_bar_;
  std::vector<double> cumulative_;       // flattened over (h, j), depth-major
  std::vector<std::int64_t> depth_offset_;  // start position of each depth in cumulative_
};

// P(x_t lands in `cell` and the selected depth h_t <= cell.depth) under the
// Zipf grid, given the current ranks: sum over ancestor depths h' of
// p(h', rank(ancestor at h')) * K^-(cell.depth - h'). `rank_of(CellId)` must
// return the 1-based rank of a cell at its depth.
template <class RankOf>
double observation_probability(CellId cell, const ZipfGrid& grid, const PartitionScheme& scheme,
                               RankOf&& rank_of) {
  if (cell.depth < 1 || cell.depth > grid.max_depth())
    throw std::invalid_argument("observation_probability: depth outside [1, H_max]");
  // Horner over the ancestor chain: after depth h the running value equals
  // sum_{h' <= h} p(h') K^-(h - h').
  double p = 0.0;
  for (int h = 1; h <= cell.depth; ++h) {
    const CellId anc = ancestor(cell, h, scheme);
    p = p / grid.branching() + grid.prob(h, rank_of(anc));
  }
  if (!(p > 0.0))
    throw InternalError("observation_probability: nonpositive probability");
  return p;
}

// Root-only sampling (Robuni): every depth-h cell is observed with K^-h.
double robuni_observation_probability(CellId cell, int branching);

// --- per-cell statistics ---------------------------------------------------

// Running statistics for every cell down to max_depth. Each recorded sample
// is attributed to the full root-to-max_depth path (pull counts and reward
// sums, defining the possibly biased empirical mean), while the
// importance-weighted sum only accumulates at depths >= the selected depth.
class StatsTree {
 public:
  StatsTree(Domain domain, PartitionScheme scheme, int max_depth);

  // Indices of the cells containing x at depths 0..max_depth.
  std::vector<std::uint64_t> path(std::span<const double> x) const;

  // obs_probs[i] = P(x in path cell at depth selected_depth+i and h_t <= that
  // depth), for i = 0 .. max_depth - selected_depth.
  void record(const std::vector<std::uint64_t>& path_indices, double y, int selected_depth,
              std::span<const double> obs_probs);

  std::int64_t pulls(CellId cell) const { return at(cell).pulls; }
  double reward_sum(CellId cell) const { return at(cell).reward_sum; }
  double iw_sum(CellId cell) const { return at(cell).iw_sum; }  // F~
  // Empirical mean f-hat; 0 pulls yields NaN, callers guard via pulls().
  double mean(CellId cell) const;

  int max_depth() const { return max_depth_; }
  std::int64_t rounds() const { return rounds_; }
  std::int64_t cells_at(int depth) const {
    return static_cast<std::int64_t>(depths_[static_cast<std::size_t>(depth)].size());
  }
  const Domain& domain() const { return domain_; }
  const PartitionScheme& scheme() const { return scheme_; }

  // T(parent) == sum of T(children) at every depth < max_depth.
  bool tree_consistent() const;

 private:
  struct Cell {
    std::int64_t pulls = 0;
    double reward_sum = 0.0;
    double iw_sum = 0.0;
  };
  const Cell& at(CellId cell) const;
  Cell& at(CellId cell);

  Domain domain_;
  PartitionScheme scheme_;
  int max_depth_;
  std::int64_t rounds_ = 0;
  std::vector<std::vector<Cell>> depths_;
};

// --- confidence bounds ------------------------------------------------------

// sqrt(log(4 n^3 / delta) / (2T)); the radius around f-hat used for ranking.
double iid_radius(std::int64_t pulls, const ConfidenceParams& p);

// f-hat minus the iid radius; -inf when the cell has no pulls.
double lcb_score(double reward_sum, std::int64_t pulls, const ConfidenceParams& p);

// B_adv_h(n) = sqrt(2 n f_max^2 K^h log(n^2/delta)) + (f_max^2/3) K^h log(n^2/delta).
double adv_bound(int depth, int branching, const ConfidenceParams& p);

// B_{h,i}(t) = f_max sqrt(2 h logbar log(2n^2/delta) rank_sum)
//            + f_max logbar log(2n^2/delta) / 3.
double vroom_bound(int depth, double rank_sum, double log_bar_n, const ConfidenceParams& p);

}  // namespace oro
