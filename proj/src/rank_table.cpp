#include "oro/rank_table.hpp"

#include <algorithm>
#include <cmath>

namespace oro {

RankTable::RankTable(std::int64_t num_cells) : num_cells_(num_cells) {
  if (num_cells < 1) throw std::invalid_argument("RankTable: num_cells >= 1 required");
  const auto n = static_cast<std::size_t>(num_cells);
  pos_.assign(n, -1);
  score_.assign(n, -std::numeric_limits<double>::infinity());
  pulled_.assign(n, 0);
  run_start_.assign(n, 1);
  cur_rank_.assign(n, 0);
  accum_.assign(n, 0);
  fen_cnt_.assign(n + 1, 0);
  fen_eff_.assign(n + 1, 0);
}

bool RankTable::before(std::int64_t cell, double key_score, std::int64_t key_cell) const {
  const double s = score_[static_cast<std::size_t>(cell)];
  if (s != key_score) return s > key_score;
  return cell < key_cell;
}

void RankTable::fenwick_add(std::int64_t idx, std::int64_t cnt, std::int64_t eff) {
  for (std::int64_t i = idx + 1; i <= num_cells_; i += i & -i) {
    fen_cnt_[static_cast<std::size_t>(i)] += cnt;
    fen_eff_[static_cast<std::size_t>(i)] += eff;
  }
}

std::pair<std::int64_t, std::int64_t> RankTable::fenwick_prefix(std::int64_t idx) const {
  std::int64_t cnt = 0, eff = 0;
  for (std::int64_t i = idx; i > 0; i -= i & -i) {
    cnt += fen_cnt_[static_cast<std::size_t>(i)];
    eff += fen_eff_[static_cast<std::size_t>(i)];
  }
  return {cnt, eff};
}

std::int64_t RankTable::fenwick_select_unpulled(std::int64_t k) const {
  // Smallest idx with (#unpulled indices <= idx) == k, via binary descent on
  // the count tree (unpulled prefix = positions - pulled prefix).
  std::int64_t pos = 0;
  std::int64_t pulled_acc = 0;
  std::int64_t bit = 1;
  while ((bit << 1) <= num_cells_) bit <<= 1;
  for (; bit > 0; bit >>= 1) {
    const std::int64_t next = pos + bit;
    if (next > num_cells_) continue;
    const std::int64_t pulled_here = fen_cnt_[static_cast<std::size_t>(next)];
    const std::int64_t unpulled_upto = next - (pulled_acc + pulled_here);
    if (unpulled_upto < k) {
      pos = next;
      pulled_acc += pulled_here;
    }
  }
  // pos = number of leading indices containing k-1 unpulled cells; the k-th
  // unpulled index is pos itself (0-based).
  return pos;
}

std::int64_t RankTable::rank_of(std::int64_t cell) const {
  const auto c = static_cast<std::size_t>(cell);
  if (pulled_[c]) return pos_[c] + 1;
  const auto [below, _] = fenwick_prefix(cell);
  return pulled_count() + (cell - below) + 1;
}

std::int64_t RankTable::cell_at_rank(std::int64_t rank) const {
  if (rank < 1 || rank > num_cells_)
    throw std::invalid_argument("RankTable::cell_at_rank: rank out of range");
  if (rank <= pulled_count()) return order_[static_cast<std::size_t>(rank - 1)];
  return fenwick_select_unpulled(rank - pulled_count());
}

void RankTable::advance_to(std::int64_t effective_round) {
  if (effective_round < effective_)
    throw InternalError("RankTable: effective round moved backwards");
  pulled_rounds_sum_ += pulled_count() * (effective_round - effective_);
  effective_ = effective_round;
}

void RankTable::flush_rank(std::int64_t cell, std::int64_t new_rank,
                           std::int64_t effective_round) {
  const auto c = static_cast<std::size_t>(cell);
  accum_[c] += cur_rank_[c] * (effective_round - run_start_[c]);
  run_start_[c] = effective_round;
  cur_rank_[c] = new_rank;
}

void RankTable::update_score(std::int64_t cell, double new_score, std::int64_t effective_round) {
  if (cell < 0 || cell >= num_cells_)
    throw std::invalid_argument("RankTable::update_score: cell out of range");
  if (std::isinf(new_score) && new_score < 0)
    throw std::invalid_argument("RankTable::update_score: score must be finite once pulled");
  advance_to(effective_round);
  const auto c = static_cast<std::size_t>(cell);

  if (!pulled_[c]) {
    // Close out the implicit unpulled run (rounds 1 .. effective_round - 1).
    accum_[c] = unpulled_rank_sum_through(cell, effective_round - 1);
    run_start_[c] = effective_round;
    pulled_[c] = 1;
    score_[c] = new_score;
    fenwick_add(cell, 1, effective_round);

    const auto cmp = [&](std::int64_t a) { return before(a, new_score, cell); };
    std::size_t lo = 0, hi = order_.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cmp(order_[mid])) lo = mid + 1;
      else hi = mid;
    }
    const std::size_t ip = lo;
    order_.insert(order_.begin() + static_cast<std::ptrdiff_t>(ip), cell);
    for (std::size_t q = ip + 1; q < order_.size(); ++q) {
      const std::int64_t moved = order_[q];
      pos_[static_cast<std::size_t>(moved)] = static_cast<std::int64_t>(q);
      flush_rank(moved, static_cast<std::int64_t>(q) + 1, effective_round);
    }
    pos_[c] = static_cast<std::int64_t>(ip);
    cur_rank_[c] = static_cast<std::int64_t>(ip) + 1;
    return;
  }

  const std::int64_t op = pos_[c];
  score_[c] = new_score;
  // First position whose entry does not order before (new_score, cell); the
  // cell's own stale entry participates but cannot produce a wrong spot: it
  // orders before the key iff its old score was strictly higher.
  const auto cmp = [&](std::int64_t a) { return before(a, new_score, cell); };
  std::size_t lo = 0, hi = order_.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (cmp(order_[mid])) lo = mid + 1;
    else hi = mid;
  }
  const std::int64_t ip = static_cast<std::int64_t>(lo);

  if (ip < op) {  // moves up
    std::rotate(order_.begin() + ip, order_.begin() + op, order_.begin() + op + 1);
    for (std::int64_t q = ip; q <= op; ++q) {
      const std::int64_t moved = order_[static_cast<std::size_t>(q)];
      pos_[static_cast<std::size_t>(moved)] = q;
      flush_rank(moved, q + 1, effective_round);
    }
  } else if (ip > op + 1) {  // moves down, lands at ip - 1
    std::rotate(order_.begin() + op, order_.begin() + op + 1, order_.begin() + ip);
    for (std::int64_t q = op; q < ip; ++q) {
      const std::int64_t moved = order_[static_cast<std::size_t>(q)];
      pos_[static_cast<std::size_t>(moved)] = q;
      flush_rank(moved, q + 1, effective_round);
    }
  }
  // ip == op or ip == op + 1: position unchanged, the rank run continues.
}

std::int64_t RankTable::unpulled_rank_sum_through(std::int64_t cell, std::int64_t t) const {
  if (t <= 0) return 0;
  if (t < effective_ - 1)
    throw InternalError("RankTable::rank_sum_through: query earlier than table state");
  // rank in round s = pulled(s) + (cell - pulled_below(s)) + 1.
  const std::int64_t pulled_rounds =
      pulled_rounds_sum_ + pulled_count() * (t - effective_ + 1);
  const auto [cnt_below, eff_below] = fenwick_prefix(cell);
  // Each pulled lower-index cell d contributes its pulled span max(0, t - e_d + 1).
  const std::int64_t below_rounds = cnt_below * (t + 1) - eff_below;
  return pulled_rounds + (cell + 1) * t - below_rounds;
}

std::int64_t RankTable::rank_sum_through(std::int64_t cell, std::int64_t t) const {
  const auto c = static_cast<std::size_t>(cell);
  if (!pulled_[c]) return unpulled_rank_sum_through(cell, t);
  if (t < run_start_[c] - 1)
    throw InternalError("RankTable::rank_sum_through: query earlier than last flush");
  return accum_[c] + cur_rank_[c] * (t - run_start_[c] + 1);
}

bool RankTable::is_permutation() const {
  std::vector<std::int64_t> ranks;
  ranks.reserve(static_cast<std::size_t>(num_cells_));
  for (std::int64_t cell = 0; cell < num_cells_; ++cell) ranks.push_back(rank_of(cell));
  std::sort(ranks.begin(), ranks.end());
  for (std::int64_t r = 0; r < num_cells_; ++r) {
    if (ranks[static_cast<std::size_t>(r)] != r + 1) return false;
  }
  // Pulled block precedes every unpulled cell.
  for (std::int64_t cell = 0; cell < num_cells_; ++cell) {
    if (!pulled_[static_cast<std::size_t>(cell)] && rank_of(cell) <= pulled_count()) return false;
  }
  return true;
}

}  // namespace oro
