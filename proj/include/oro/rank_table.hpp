#pragma once

#include <cstdint>
#include <vector>

#include "oro/common.hpp"

namespace oro {

// Ordering of the cells of one depth by decreasing LCB score, ties and
// unpulled cells by ascending cell index. Unpulled cells always trail every
// pulled cell. Ranks are 1-based.
//
// Besides the current permutation the table maintains, for every cell, the
// exact running sum of the ranks it held over rounds 1..t (the quantity the
// recommendation bound needs). Pulled cells use timestamped lazy runs that
// are flushed whenever their rank shifts. The unpulled tail is kept
// implicit: its members sit in index order behind the pulled block, so a
// tail cell's rank history is a closed form in (a) how many cells were
// pulled and when, and (b) how many pulled cells sit below its index --
// both served by one Fenwick tree. This keeps a round's cost proportional
// to the displacement actually caused, instead of touching every cell.
class RankTable {
 public:
  explicit RankTable(std::int64_t num_cells);

  std::int64_t num_cells() const { return num_cells_; }
  std::int64_t pulled_count() const { return static_cast<std::int64_t>(order_.size()); }

  std::int64_t rank_of(std::int64_t cell) const;
  std::int64_t cell_at_rank(std::int64_t rank) const;

  // Reposition `cell` after its score changed. The new ordering takes effect
  // at round `effective_round` (= current round + 1). effective_round must
  // not decrease across calls.
  void update_score(std::int64_t cell, double new_score, std::int64_t effective_round);

  // Exact sum over s = 1..t of the rank `cell` held in round s. Requires t
  // to be no earlier than one round before the latest effective update.
  std::int64_t rank_sum_through(std::int64_t cell, std::int64_t t) const;

  double score_of(std::int64_t cell) const { return score_[static_cast<std::size_t>(cell)]; }
  bool is_pulled(std::int64_t cell) const { return pulled_[static_cast<std::size_t>(cell)] != 0; }

  // Full permutation check, test use only (O(N log N)).
  bool is_permutation() const;

 private:
  // (score desc, index asc): does (score_a, a) order strictly before key?
  bool before(std::int64_t cell, double key_score, std::int64_t key_cell) const;
  void advance_to(std::int64_t effective_round);
  void flush_rank(std::int64_t cell, std::int64_t new_rank, std::int64_t effective_round);
  std::int64_t unpulled_rank_sum_through(std::int64_t cell, std::int64_t t) const;

  // Fenwick over cell indices; tracks pulled markers and first-pull rounds.
  void fenwick_add(std::int64_t idx, std::int64_t cnt, std::int64_t eff);
  // counts / effective-round sums over indices < idx.
  std::pair<std::int64_t, std::int64_t> fenwick_prefix(std::int64_t idx) const;
  std::int64_t fenwick_select_unpulled(std::int64_t k) const;  // k-th (1-based) unpulled index

  std::int64_t num_cells_;
  std::int64_t effective_ = 1;  // current ranks hold for rounds >= effective_
  std::int64_t pulled_rounds_sum_ = 0;  // sum over s < effective_ of pulled count in round s

  std::vector<std::int64_t> order_;  // position -> cell, pulled block only
  std::vector<std::int64_t> pos_;    // cell -> position, valid while pulled
  std::vector<double> score_;
  std::vector<std::uint8_t> pulled_;

  // Lazy rank-run bookkeeping, valid while pulled.
  std::vector<std::int64_t> run_start_;
  std::vector<std::int64_t> cur_rank_;
  std::vector<std::int64_t> accum_;

  std::vector<std::int64_t> fen_cnt_;
  std::vector<std::int64_t> fen_eff_;
};

}  // namespace oro
