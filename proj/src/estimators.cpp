#include "oro/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace oro {

double default_delta(double b, double f_max, std::int64_t n) {
  if (!(f_max > 0.0)) throw std::invalid_argument("default_delta: f_max > 0 required");
  if (n < 1) throw std::invalid_argument("default_delta: n >= 1 required");
  const double raw = 4.0 * b / (f_max * std::sqrt(static_cast<double>(n)));
  const double lower = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  return std::min(0.5, std::max(lower, raw));
}

int max_tracked_depth(int branching, std::int64_t n) { return floor_log(n, branching); }

double log_bar(int branching, std::int64_t n) {
  if (branching < 2) throw std::invalid_argument("log_bar: K >= 2 required");
  if (n < branching) throw std::invalid_argument("log_bar: n >= K required");
  const int max_depth = max_tracked_depth(branching, n);
  double total = 0.0;
  double harmonic = 0.0;
  std::int64_t covered = 0;
  for (int h = 1; h <= max_depth; ++h) {
    const std::int64_t cells = ipow(branching, h);
    for (std::int64_t i = covered + 1; i <= cells; ++i) harmonic += 1.0 / static_cast<double>(i);
    covered = cells;
    total += harmonic / static_cast<double>(h);
  }
  return total;
}

ZipfGrid::ZipfGrid(int branching, std::int64_t n) : k_(branching) {
  max_depth_ = max_tracked_depth(branching, n);
  log_bar_ = oro::log_bar(branching, n);
  std::int64_t entries = 0;
  depth_offset_.assign(static_cast<std::size_t>(max_depth_) + 2, 0);
  for (int h = 1; h <= max_depth_; ++h) {
    depth_offset_[static_cast<std::size_t>(h)] = entries;
    entries += ipow(branching, h);
  }
  depth_offset_[static_cast<std::size_t>(max_depth_) + 1] = entries;
  cumulative_.resize(static_cast<std::size_t>(entries));
  double acc = 0.0;
  std::size_t pos = 0;
  for (int h = 1; h <= max_depth_; ++h) {
    const std::int64_t cells = ipow(branching, h);
    for (std::int64_t j = 1; j <= cells; ++j) {
      acc += 1.0 / (static_cast<double>(h) * static_cast<double>(j) * log_bar_);
      cumulative_[pos++] = acc;
    }
  }
}

double ZipfGrid::prob(int depth, std::int64_t rank) const {
  if (depth < 1 || depth > max_depth_)
    throw std::invalid_argument("ZipfGrid::prob: depth outside [1, H_max]");
  if (rank < 1 || rank > ipow(k_, depth))
    throw std::invalid_argument("ZipfGrid::prob: rank outside [1, K^h]");
  return 1.0 / (static_cast<double>(depth) * static_cast<double>(rank) * log_bar_);
}

std::pair<int, std::int64_t> ZipfGrid::sample(Rng& rng) const {
  const double total = cumulative_.back();
  std::uniform_real_distribution<double> u(0.0, total);
  const double r = u(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
  std::int64_t flat = std::distance(cumulative_.begin(), it);
  if (flat >= static_cast<std::int64_t>(cumulative_.size()))
    flat = static_cast<std::int64_t>(cumulative_.size()) - 1;
  // Map the flat position back to (depth, rank).
  int h = max_depth_;
  for (int d = 1; d <= max_depth_; ++d) {
    if (flat < depth_offset_[static_cast<std::size_t>(d) + 1]) {
      h = d;
      break;
    }
  }
  const std::int64_t rank = flat - depth_offset_[static_cast<std::size_t>(h)] + 1;
  return {h, rank};
}

double ZipfGrid::total_mass() const {
  double s = 0.0;
  for (int h = 1; h <= max_depth_; ++h) {
    const std::int64_t cells = ipow(k_, h);
    for (std::int64_t j = 1; j <= cells; ++j) s += prob(h, j);
  }
  return s;
}

double robuni_observation_probability(CellId cell, int branching) {
  return 1.0 / static_cast<double>(ipow(branching, cell.depth));
}

StatsTree::StatsTree(Domain domain, PartitionScheme scheme, int max_depth)
    : domain_(std::move(domain)), scheme_(scheme), max_depth_(max_depth) {
  if (max_depth < 0) throw std::invalid_argument("StatsTree: max_depth >= 0 required");
  depths_.resize(static_cast<std::size_t>(max_depth_) + 1);
  for (int h = 0; h <= max_depth_; ++h)
    depths_[static_cast<std::size_t>(h)].resize(static_cast<std::size_t>(ipow(scheme_.branching, h)));
}

std::vector<std::uint64_t> StatsTree::path(std::span<const double> x) const {
  std::vector<std::uint64_t> out(static_cast<std::size_t>(max_depth_) + 1);
  const CellId leaf = locate(x, max_depth_, domain_, scheme_);
  std::uint64_t idx = leaf.index;
  for (int h = max_depth_; h >= 0; --h) {
    out[static_cast<std::size_t>(h)] = idx;
    idx /= static_cast<std::uint64_t>(scheme_.branching);
  }
  return out;
}

void StatsTree::record(const std::vector<std::uint64_t>& path_indices, double y,
                       int selected_depth, std::span<const double> obs_probs) {
  if (static_cast<int>(path_indices.size()) != max_depth_ + 1)
    throw InternalError("StatsTree::record: path length mismatch");
  if (selected_depth < 0 || selected_depth > max_depth_)
    throw InternalError("StatsTree::record: selected depth out of range");
  if (static_cast<int>(obs_probs.size()) != max_depth_ - selected_depth + 1)
    throw InternalError("StatsTree::record: observation probability span mismatch");
  for (int h = 0; h <= max_depth_; ++h) {
    Cell& c = depths_[static_cast<std::size_t>(h)][path_indices[static_cast<std::size_t>(h)]];
    c.pulls += 1;
    c.reward_sum += y;
    if (h >= selected_depth) {
      const double p = obs_probs[static_cast<std::size_t>(h - selected_depth)];
      if (!(p > 0.0)) throw InternalError("StatsTree::record: nonpositive observation probability");
      c.iw_sum += y / p;
    }
  }
  ++rounds_;
}

double StatsTree::mean(CellId cell) const {
  const Cell& c = at(cell);
  return c.reward_sum / static_cast<double>(c.pulls);
}

const StatsTree::Cell& StatsTree::at(CellId cell) const {
  return depths_[static_cast<std::size_t>(cell.depth)][cell.index];
}

StatsTree::Cell& StatsTree::at(CellId cell) {
  return depths_[static_cast<std::size_t>(cell.depth)][cell.index];
}

bool StatsTree::tree_consistent() const {
  const int k = scheme_.branching;
  for (int h = 0; h < max_depth_; ++h) {
    const auto& parents = depths_[static_cast<std::size_t>(h)];
    const auto& kids = depths_[static_cast<std::size_t>(h) + 1];
    for (std::size_t i = 0; i < parents.size(); ++i) {
      std::int64_t sum = 0;
      for (int j = 0; j < k; ++j) sum += kids[i * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)].pulls;
      if (sum != parents[i].pulls) return false;
    }
  }
  return true;
}

double iid_radius(std::int64_t pulls, const ConfidenceParams& p) {
  const double num = std::log(4.0 * std::pow(static_cast<double>(p.n), 3) / p.delta);
  return std::sqrt(num / (2.0 * static_cast<double>(pulls)));
}

double lcb_score(double reward_sum, std::int64_t pulls, const ConfidenceParams& p) {
  if (pulls == 0) return -std::numeric_limits<double>::infinity();
  return reward_sum / static_cast<double>(pulls) - iid_radius(pulls, p);
}

double adv_bound(int depth, int branching, const ConfidenceParams& p) {
  const double kh = static_cast<double>(ipow(branching, depth));
  const double lg = std::log(static_cast<double>(p.n) * static_cast<double>(p.n) / p.delta);
  const double f2 = p.f_max * p.f_max;
  return std::sqrt(2.0 * static_cast<double>(p.n) * f2 * kh * lg) + f2 / 3.0 * kh * lg;
}

double vroom_bound(int depth, double rank_sum, double log_bar_n, const ConfidenceParams& p) {
  const double lg = std::log(2.0 * static_cast<double>(p.n) * static_cast<double>(p.n) / p.delta);
  return p.f_max * std::sqrt(2.0 * static_cast<double>(depth) * log_bar_n * lg * rank_sum) +
         p.f_max * log_bar_n * lg / 3.0;
}

}  // namespace oro
