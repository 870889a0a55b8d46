#include "oro/learners.hpp"

#include <algorithm>
#include <cmath>

namespace oro {

namespace {

void check_round(std::int64_t t, std::int64_t expected, std::int64_t n, bool awaiting,
                 bool for_select) {
  if (for_select) {
    if (awaiting) throw InternalError("learner: select called before observe");
    if (t != expected + 1) throw InternalError("learner: out-of-order round " + std::to_string(t));
    if (t > n) throw InternalError("learner: budget n exceeded");
  } else {
    if (!awaiting) throw InternalError("learner: observe without a matching select");
    if (t != expected) throw InternalError("learner: observe round mismatch");
  }
}

void check_done(std::int64_t round, std::int64_t n, bool awaiting) {
  if (awaiting) throw InternalError("learner: recommend called mid-round");
  if (round != n)
    throw InternalError("learner: recommend requires exactly n rounds, saw " +
                        std::to_string(round));
}

}  // namespace

ConfidenceParams LearnerParams::confidence() const {
  ConfidenceParams c;
  c.b = b;
  c.f_max = f_max;
  c.n = n;
  c.delta = delta > 0 ? delta : default_delta(b, f_max, n);
  return c;
}

// --- Robuni -----------------------------------------------------------------

RobuniLearner::RobuniLearner(Domain domain, PartitionScheme scheme, LearnerParams params)
    : params_(params),
      conf_(params.confidence()),
      stats_(std::move(domain), scheme, max_tracked_depth(scheme.branching, params.n)) {
  if (params_.n < scheme.branching) throw ConfigError("robuni: budget n >= K required");
}

SelectResult RobuniLearner::select(std::int64_t t, Rng& rng) {
  check_round(t, round_, params_.n, awaiting_observe_, true);
  const CellId root{0, 0};
  Point x = sample_descend(root, stats_.max_depth(), stats_.domain(), stats_.scheme(), rng);
  pending_path_ = stats_.path(x);
  awaiting_observe_ = true;
  round_ = t;
  return {root, std::move(x)};
}

void RobuniLearner::observe(std::int64_t t, double y) {
  check_round(t, round_, params_.n, awaiting_observe_, false);
  const int k = stats_.scheme().branching;
  std::vector<double> probs(static_cast<std::size_t>(stats_.max_depth()) + 1);
  double p = 1.0;
  for (int h = 0; h <= stats_.max_depth(); ++h) {
    probs[static_cast<std::size_t>(h)] = p;
    p /= k;
  }
  stats_.record(pending_path_, y, 0, probs);
  awaiting_observe_ = false;
}

Recommendation RobuniLearner::recommend(Rng& rng) {
  check_done(round_, params_.n, awaiting_observe_);
  CellId best{0, 0};
  double best_score = -std::numeric_limits<double>::infinity();
  for (int h = 0; h <= stats_.max_depth(); ++h) {
    const double bound = adv_bound(h, stats_.scheme().branching, conf_);
    const std::int64_t cells = stats_.cells_at(h);
    for (std::int64_t i = 0; i < cells; ++i) {
      const CellId cell{h, static_cast<std::uint64_t>(i)};
      const double score = stats_.iw_sum(cell) - bound;
      if (score > best_score) {
        best_score = score;
        best = cell;
      }
    }
  }
  Point x = sample_descend(best, stats_.max_depth(), stats_.domain(), stats_.scheme(), rng);
  return {best, std::move(x), false};
}

// --- VROOM ------------------------------------------------------------------

VroomLearner::VroomLearner(Domain domain, PartitionScheme scheme, LearnerParams params)
    : params_(params),
      conf_(params.confidence()),
      grid_(scheme.branching, params.n),
      stats_(std::move(domain), scheme, max_tracked_depth(scheme.branching, params.n)) {
  if (params_.n < scheme.branching) throw ConfigError("vroom: budget n >= K required");
  tables_.reserve(static_cast<std::size_t>(stats_.max_depth()));
  for (int h = 1; h <= stats_.max_depth(); ++h)
    tables_.emplace_back(ipow(scheme.branching, h));
}

SelectResult VroomLearner::select(std::int64_t t, Rng& rng) {
  check_round(t, round_, params_.n, awaiting_observe_, true);
  const auto [h, rank] = grid_.sample(rng);
  const std::int64_t idx = tables_[static_cast<std::size_t>(h - 1)].cell_at_rank(rank);
  const CellId cell{h, static_cast<std::uint64_t>(idx)};
  Point x = sample_descend(cell, stats_.max_depth(), stats_.domain(), stats_.scheme(), rng);
  pending_depth_ = h;
  pending_path_ = stats_.path(x);
  awaiting_observe_ = true;
  round_ = t;
  return {cell, std::move(x)};
}

void VroomLearner::observe(std::int64_t t, double y) {
  check_round(t, round_, params_.n, awaiting_observe_, false);
  const int k = stats_.scheme().branching;
  const int H = stats_.max_depth();

  // Observation probabilities along the path using the ranks the selection
  // actually sampled from, before any update below.
  std::vector<double> probs;
  probs.reserve(static_cast<std::size_t>(H - pending_depth_) + 1);
  double p = 0.0;
  for (int h = 1; h <= H; ++h) {
    const std::int64_t idx = static_cast<std::int64_t>(pending_path_[static_cast<std::size_t>(h)]);
    const std::int64_t rank = tables_[static_cast<std::size_t>(h - 1)].rank_of(idx);
    p = p / k + grid_.prob(h, rank);
    if (h >= pending_depth_) probs.push_back(p);
  }
  stats_.record(pending_path_, y, pending_depth_, probs);

  // Re-score the path cells; the new ranking is in effect from round t + 1.
  for (int h = 1; h <= H; ++h) {
    const std::int64_t idx = static_cast<std::int64_t>(pending_path_[static_cast<std::size_t>(h)]);
    const CellId cell{h, static_cast<std::uint64_t>(idx)};
    const double score = lcb_score(stats_.reward_sum(cell), stats_.pulls(cell), conf_);
    tables_[static_cast<std::size_t>(h - 1)].update_score(idx, score, t + 1);
  }
  awaiting_observe_ = false;
}

Recommendation VroomLearner::recommend(Rng& rng) {
  check_done(round_, params_.n, awaiting_observe_);
  CellId best{1, 0};
  double best_score = -std::numeric_limits<double>::infinity();
  for (int h = 1; h <= stats_.max_depth(); ++h) {
    const RankTable& table = tables_[static_cast<std::size_t>(h - 1)];
    const std::int64_t cells = stats_.cells_at(h);
    for (std::int64_t i = 0; i < cells; ++i) {
      const CellId cell{h, static_cast<std::uint64_t>(i)};
      const double rank_sum = static_cast<double>(table.rank_sum_through(i, params_.n));
      const double score = stats_.iw_sum(cell) - vroom_bound(h, rank_sum, grid_.log_bar(), conf_);
      if (score > best_score) {
        best_score = score;
        best = cell;
      }
    }
  }
  Point x = sample_descend(best, stats_.max_depth(), stats_.domain(), stats_.scheme(), rng);
  return {best, std::move(x), false};
}

std::optional<std::int64_t> VroomLearner::rank_of(CellId cell) const {
  if (cell.depth < 1 || cell.depth > stats_.max_depth()) return std::nullopt;
  return tables_[static_cast<std::size_t>(cell.depth - 1)].rank_of(
      static_cast<std::int64_t>(cell.index));
}

// --- uniform, deterministic feedback -----------------------------------------

UniformDetLearner::UniformDetLearner(Domain domain, PartitionScheme scheme, LearnerParams params)
    : domain_(std::move(domain)),
      scheme_(scheme),
      params_(params),
      depth_(max_tracked_depth(scheme.branching, params.n)),
      cells_(ipow(scheme.branching, depth_)) {
  if (params_.n < scheme.branching) throw ConfigError("uniform-det: budget n >= K required");
}

SelectResult UniformDetLearner::select(std::int64_t t, Rng& rng) {
  check_round(t, round_, params_.n, awaiting_observe_, true);
  (void)rng;
  const std::int64_t idx = (t - 1) % cells_;  // extra rounds revisit low indices
  pending_cell_ = CellId{depth_, static_cast<std::uint64_t>(idx)};
  pending_point_ = cell_center(pending_cell_, domain_, scheme_);
  awaiting_observe_ = true;
  round_ = t;
  return {pending_cell_, pending_point_};
}

void UniformDetLearner::observe(std::int64_t t, double y) {
  check_round(t, round_, params_.n, awaiting_observe_, false);
  if (y > best_value_) {
    best_value_ = y;
    best_ = Recommendation{pending_cell_, pending_point_, true};
  }
  awaiting_observe_ = false;
}

Recommendation UniformDetLearner::recommend(Rng& rng) {
  check_done(round_, params_.n, awaiting_observe_);
  (void)rng;
  return best_;
}

// --- uniform, stochastic feedback with known smoothness ----------------------

UniformStoKnownLearner::UniformStoKnownLearner(Domain domain, PartitionScheme scheme,
                                               LearnerParams params)
    : domain_(std::move(domain)), scheme_(scheme), params_(params) {
  if (params_.n < scheme.branching) throw ConfigError("uniform-known: budget n >= K required");
  if (!params_.nu || !params_.rho)
    throw ConfigError("uniform-known: smoothness (nu, rho) required");
  const double rho = *params_.rho;
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("uniform-known: rho in (0,1) required");
  // H = floor(log_{K/rho^2} n) by exact accumulation.
  const double base = static_cast<double>(scheme.branching) / (rho * rho);
  int h = 0;
  double power = 1.0;
  while (power * base <= static_cast<double>(params_.n) * (1.0 + 1e-12)) {
    power *= base;
    ++h;
  }
  depth_ = h;
  cells_ = ipow(scheme.branching, depth_);
  reps_ = params_.n / cells_;
  if (reps_ < 1) throw ConfigError("uniform-known: budget too small for depth H");
  point_of_cell_.resize(static_cast<std::size_t>(cells_));
  sum_.assign(static_cast<std::size_t>(cells_), 0.0);
  count_.assign(static_cast<std::size_t>(cells_), 0);
}

SelectResult UniformStoKnownLearner::select(std::int64_t t, Rng& rng) {
  check_round(t, round_, params_.n, awaiting_observe_, true);
  std::int64_t idx;
  if (t <= cells_ * reps_) {
    idx = (t - 1) / reps_;  // cell-major: each cell keeps its reps together
  } else {
    idx = (t - cells_ * reps_ - 1) % cells_;  // leftovers, lowest index first
  }
  auto& pt = point_of_cell_[static_cast<std::size_t>(idx)];
  if (pt.empty())
    pt = sample_descend(CellId{depth_, static_cast<std::uint64_t>(idx)},
                        max_tracked_depth(scheme_.branching, params_.n), domain_, scheme_, rng);
  pending_cell_ = idx;
  awaiting_observe_ = true;
  round_ = t;
  return {CellId{depth_, static_cast<std::uint64_t>(idx)}, pt};
}

void UniformStoKnownLearner::observe(std::int64_t t, double y) {
  check_round(t, round_, params_.n, awaiting_observe_, false);
  sum_[static_cast<std::size_t>(pending_cell_)] += y;
  count_[static_cast<std::size_t>(pending_cell_)] += 1;
  awaiting_observe_ = false;
}

Recommendation UniformStoKnownLearner::recommend(Rng& rng) {
  check_done(round_, params_.n, awaiting_observe_);
  (void)rng;
  std::int64_t best = 0;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < cells_; ++i) {
    if (count_[static_cast<std::size_t>(i)] == 0) continue;
    const double m = sum_[static_cast<std::size_t>(i)] /
                     static_cast<double>(count_[static_cast<std::size_t>(i)]);
    if (m > best_mean) {
      best_mean = m;
      best = i;
    }
  }
  return {CellId{depth_, static_cast<std::uint64_t>(best)},
          point_of_cell_[static_cast<std::size_t>(best)], true};
}

// --- shared per-depth allocation ---------------------------------------------

DepthAllocation uniform_depth_allocation(std::int64_t total, int max_depth, int branching) {
  DepthAllocation out;
  out.depth.reserve(static_cast<std::size_t>(total));
  out.cell.reserve(static_cast<std::size_t>(total));
  const std::int64_t per_depth = max_depth > 0 ? total / max_depth : total;
  std::int64_t remaining = total;
  for (int h = 0; h <= max_depth && remaining > 0; ++h) {
    const std::int64_t quota = std::min(per_depth, remaining);
    const std::int64_t cells = ipow(branching, h);
    if (quota >= cells) {
      const std::int64_t per_cell = quota / cells;
      const std::int64_t extras = quota % cells;
      for (std::int64_t c = 0; c < cells; ++c) {
        const std::int64_t pulls = per_cell + (c < extras ? 1 : 0);
        for (std::int64_t r = 0; r < pulls; ++r) {
          out.depth.push_back(h);
          out.cell.push_back(c);
        }
      }
    } else {
      for (std::int64_t c = 0; c < quota; ++c) {
        out.depth.push_back(h);
        out.cell.push_back(c);
      }
    }
    remaining -= quota;
  }
  // Any leftover budget goes to the root.
  for (; remaining > 0; --remaining) {
    out.depth.push_back(0);
    out.cell.push_back(0);
  }
  return out;
}

// --- uniform + cross-validation ----------------------------------------------

UniformCvLearner::UniformCvLearner(Domain domain, PartitionScheme scheme, LearnerParams params)
    : domain_(std::move(domain)),
      scheme_(scheme),
      params_(params),
      depth_(max_tracked_depth(scheme.branching, params.n)) {
  if (params_.n < scheme.branching) throw ConfigError("uniform-cv: budget n >= K required");
  if (params_.n < 4 * static_cast<std::int64_t>(depth_))
    throw ConfigError("uniform-cv: budget n >= 4*floor(log_K n) required");
  phase1_ = params_.n / 2;
  alloc_ = uniform_depth_allocation(phase1_, depth_, scheme.branching);
  phase1_stats_.resize(static_cast<std::size_t>(depth_) + 1);
}

SelectResult UniformCvLearner::select(std::int64_t t, Rng& rng) {
  check_round(t, round_, params_.n, awaiting_observe_, true);
  awaiting_observe_ = true;
  round_ = t;
  if (t <= phase1_) {
    const int h = alloc_.depth[static_cast<std::size_t>(t - 1)];
    const std::uint64_t idx = static_cast<std::uint64_t>(alloc_.cell[static_cast<std::size_t>(t - 1)]);
    auto& agg = phase1_stats_[static_cast<std::size_t>(h)][idx];
    if (agg.point.empty())
      agg.point = sample_descend(CellId{h, idx}, depth_, domain_, scheme_, rng);
    pending_candidate_ = -1;
    pending_cell_ = {h, idx};
    return {CellId{h, idx}, agg.point};
  }
  if (!phase2_ready_) finish_phase1();
  const std::int64_t k = phase2_schedule_[static_cast<std::size_t>(t - phase1_ - 1)];
  pending_candidate_ = k;
  const auto& [cell, point] = candidates_[static_cast<std::size_t>(k)];
  return {cell, point};
}

void UniformCvLearner::finish_phase1() {
  for (int h = 0; h <= depth_; ++h) {
    const auto& cells = phase1_stats_[static_cast<std::size_t>(h)];
    if (cells.empty()) continue;
    bool have = false;
    std::uint64_t best_idx = 0;
    double best_mean = -std::numeric_limits<double>::infinity();
    for (const auto& [idx, agg] : cells) {
      const double m = agg.sum / static_cast<double>(agg.count);
      if (!have || m > best_mean || (m == best_mean && idx < best_idx)) {
        have = true;
        best_mean = m;
        best_idx = idx;
      }
    }
    candidates_.push_back({CellId{h, best_idx}, cells.at(best_idx).point});
  }
  const std::int64_t phase2 = params_.n - phase1_;
  const std::int64_t c = static_cast<std::int64_t>(candidates_.size());
  if (c == 0) throw InternalError("uniform-cv: no candidates after phase 1");
  candidate_budget_.assign(static_cast<std::size_t>(c), phase2 / c);
  for (std::int64_t i = 0; i < phase2 % c; ++i) candidate_budget_[static_cast<std::size_t>(i)] += 1;
  for (std::int64_t k = 0; k < c; ++k)
    for (std::int64_t r = 0; r < candidate_budget_[static_cast<std::size_t>(k)]; ++r)
      phase2_schedule_.push_back(k);
  validated_sum_.assign(static_cast<std::size_t>(c), 0.0);
  validated_count_.assign(static_cast<std::size_t>(c), 0);
  phase2_ready_ = true;
}

void UniformCvLearner::observe(std::int64_t t, double y) {
  check_round(t, round_, params_.n, awaiting_observe_, false);
  if (pending_candidate_ < 0) {
    auto& agg = phase1_stats_[static_cast<std::size_t>(pending_cell_.first)][pending_cell_.second];
    agg.sum += y;
    agg.count += 1;
  } else {
    validated_sum_[static_cast<std::size_t>(pending_candidate_)] += y;
    validated_count_[static_cast<std::size_t>(pending_candidate_)] += 1;
  }
  awaiting_observe_ = false;
}

Recommendation UniformCvLearner::recommend(Rng& rng) {
  check_done(round_, params_.n, awaiting_observe_);
  (void)rng;
  if (!phase2_ready_) throw InternalError("uniform-cv: phase 2 never ran");
  std::int64_t best = -1;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates_.size(); ++k) {
    if (validated_count_[k] == 0) continue;
    const double m = validated_sum_[k] / static_cast<double>(validated_count_[k]);
    if (m > best_mean) {
      best_mean = m;
      best = static_cast<std::int64_t>(k);
    }
  }
  if (best < 0) throw InternalError("uniform-cv: no validated candidate");
  const auto& [cell, point] = candidates_[static_cast<std::size_t>(best)];
  return {cell, point, true};
}

// --- uniform + LCB recommendation --------------------------------------------

UniformLcbLearner::UniformLcbLearner(Domain domain, PartitionScheme scheme, LearnerParams params)
    : domain_(std::move(domain)),
      scheme_(scheme),
      params_(params),
      conf_(params.confidence()),
      depth_(max_tracked_depth(scheme.branching, params.n)) {
  if (params_.n < scheme.branching) throw ConfigError("uniform-lcb: budget n >= K required");
  if (params_.n < 4 * static_cast<std::int64_t>(depth_))
    throw ConfigError("uniform-lcb: budget n >= 4*floor(log_K n) required");
  alloc_ = uniform_depth_allocation(params_.n, depth_, scheme.branching);
  agg_.resize(static_cast<std::size_t>(depth_) + 1);
}

SelectResult UniformLcbLearner::select(std::int64_t t, Rng& rng) {
  check_round(t, round_, params_.n, awaiting_observe_, true);
  const int h = alloc_.depth[static_cast<std::size_t>(t - 1)];
  const std::uint64_t idx = static_cast<std::uint64_t>(alloc_.cell[static_cast<std::size_t>(t - 1)]);
  auto& agg = agg_[static_cast<std::size_t>(h)][idx];
  if (agg.point.empty()) agg.point = sample_descend(CellId{h, idx}, depth_, domain_, scheme_, rng);
  pending_cell_ = {h, idx};
  awaiting_observe_ = true;
  round_ = t;
  return {CellId{h, idx}, agg.point};
}

void UniformLcbLearner::observe(std::int64_t t, double y) {
  check_round(t, round_, params_.n, awaiting_observe_, false);
  auto& agg = agg_[static_cast<std::size_t>(pending_cell_.first)][pending_cell_.second];
  agg.sum += y;
  agg.count += 1;
  awaiting_observe_ = false;
}

Recommendation UniformLcbLearner::recommend(Rng& rng) {
  check_done(round_, params_.n, awaiting_observe_);
  (void)rng;
  const double lg = std::log(static_cast<double>(params_.n) * static_cast<double>(params_.n) /
                             conf_.delta);
  bool have = false;
  Recommendation best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int h = 0; h <= depth_; ++h) {
    // unordered_map iteration order is not deterministic; scan sorted.
    std::vector<std::uint64_t> keys;
    keys.reserve(agg_[static_cast<std::size_t>(h)].size());
    for (const auto& [idx, _] : agg_[static_cast<std::size_t>(h)]) keys.push_back(idx);
    std::sort(keys.begin(), keys.end());
    for (std::uint64_t idx : keys) {
      const auto& agg = agg_[static_cast<std::size_t>(h)].at(idx);
      const double mean = agg.sum / static_cast<double>(agg.count);
      const double score = mean - params_.b * std::sqrt(lg / static_cast<double>(agg.count));
      if (!have || score > best_score) {
        have = true;
        best_score = score;
        best = Recommendation{CellId{h, idx}, agg.point, true};
      }
    }
  }
  if (!have) throw InternalError("uniform-lcb: nothing pulled");
  return best;
}

// --- follow-the-leader strawman ------------------------------------------------

FtlLearner::FtlLearner(Domain domain, PartitionScheme scheme, LearnerParams params)
    : domain_(std::move(domain)),
      scheme_(scheme),
      params_(params),
      depth_(max_tracked_depth(scheme.branching, params.n)),
      cells_(ipow(scheme.branching, depth_)) {
  if (params_.n < 1) throw ConfigError("ftl: budget n >= 1 required");
  sum_.assign(static_cast<std::size_t>(cells_), 0.0);
  count_.assign(static_cast<std::size_t>(cells_), 0);
}

std::int64_t FtlLearner::greedy_cell() const {
  // by_mean_ keys are (-mean, index): begin() is the highest mean, lowest index.
  return by_mean_.begin()->second;
}

SelectResult FtlLearner::select(std::int64_t t, Rng& rng) {
  check_round(t, round_, params_.n, awaiting_observe_, true);
  const std::int64_t idx = next_unvisited_ < cells_ ? next_unvisited_ : greedy_cell();
  pending_cell_ = idx;
  awaiting_observe_ = true;
  round_ = t;
  const CellId cell{depth_, static_cast<std::uint64_t>(idx)};
  return {cell, sample_descend(cell, depth_, domain_, scheme_, rng)};
}

void FtlLearner::observe(std::int64_t t, double y) {
  check_round(t, round_, params_.n, awaiting_observe_, false);
  const auto c = static_cast<std::size_t>(pending_cell_);
  if (count_[c] > 0) by_mean_.erase({-sum_[c] / static_cast<double>(count_[c]), pending_cell_});
  sum_[c] += y;
  count_[c] += 1;
  by_mean_.insert({-sum_[c] / static_cast<double>(count_[c]), pending_cell_});
  if (pending_cell_ == next_unvisited_) ++next_unvisited_;
  awaiting_observe_ = false;
}

Recommendation FtlLearner::recommend(Rng& rng) {
  check_done(round_, params_.n, awaiting_observe_);
  const CellId cell{depth_, static_cast<std::uint64_t>(greedy_cell())};
  return {cell, sample_descend(cell, depth_, domain_, scheme_, rng), false};
}

// --- factory -------------------------------------------------------------------

std::unique_ptr<Learner> make_learner(const std::string& name, const Domain& domain,
                                      const PartitionScheme& scheme,
                                      const LearnerParams& params) {
  if (name == "robuni") return std::make_unique<RobuniLearner>(domain, scheme, params);
  if (name == "vroom") return std::make_unique<VroomLearner>(domain, scheme, params);
  if (name == "uniform-det") return std::make_unique<UniformDetLearner>(domain, scheme, params);
  if (name == "uniform-known")
    return std::make_unique<UniformStoKnownLearner>(domain, scheme, params);
  if (name == "uniform-cv") return std::make_unique<UniformCvLearner>(domain, scheme, params);
  if (name == "uniform-lcb") return std::make_unique<UniformLcbLearner>(domain, scheme, params);
  if (name == "ftl") return std::make_unique<FtlLearner>(domain, scheme, params);
  throw ConfigError("unknown algorithm: " + name);
}

std::vector<std::string> learner_names() {
  return {"robuni", "vroom", "uniform-det", "uniform-known", "uniform-cv", "uniform-lcb", "ftl"};
}

}  // namespace oro
