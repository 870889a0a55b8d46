#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "oro/common.hpp"

namespace oro {

// Axis-aligned box domain. lows[j] < highs[j] for every coordinate.
struct Domain {
  std::vector<double> lows;
  std::vector<double> highs;

  Domain(std::vector<double> lo, std::vector<double> hi);
  static Domain unit_cube(int dim);

  int dim() const { return static_cast<int>(lows.size()); }
  double volume() const;
  bool contains(std::span<const double> x) const;
};

// Address of one cell of the partition tree: depth h and 0-based index in
// [0, K^h). The root is (0, 0). Reports convert the index to 1-based.
struct CellId {
  int depth = 0;
  std::uint64_t index = 0;

  friend bool operator==(const CellId&, const CellId&) = default;
  friend auto operator<=>(const CellId&, const CellId&) = default;
};

// Canonical scheme: a cell at depth h splits into `branching` equal-volume
// slabs along coordinate (h mod D). All children of a cell therefore carry
// measure 1/K of their parent, which makes uniform random descent identical
// to Lebesgue-uniform sampling inside any cell.
struct PartitionScheme {
  int branching = 2;

  explicit PartitionScheme(int k = 2);
};

// The K children of `cell`, index order: (depth+1, K*index + j), j = 0..K-1.
std::vector<CellId> children(CellId cell, const PartitionScheme& scheme);

// Ancestor of `cell` at `target_depth` (identity when equal).
// Throws std::invalid_argument if target_depth > cell.depth.
CellId ancestor(CellId cell, int target_depth, const PartitionScheme& scheme);

// Sub-box covered by `cell`. Children tile the parent exactly: shared faces
// are computed with one expression so adjacent bounds are bit-identical.
Domain cell_bounds(CellId cell, const Domain& domain, const PartitionScheme& scheme);

// The unique depth-`depth` cell containing x under the half-open convention:
// boxes are [low, high) except along the domain's upper face.
// Throws std::invalid_argument if x lies outside the domain.
CellId locate(std::span<const double> x, int depth, const Domain& domain,
              const PartitionScheme& scheme);

// Center point of a cell.
Point cell_center(CellId cell, const Domain& domain, const PartitionScheme& scheme);

// Uniform random descent from `cell` to `max_depth` followed by a uniform
// draw inside the reached cell. Realizes x ~ U_P(cell). Requires
// max_depth >= cell.depth.
Point sample_descend(CellId cell, int max_depth, const Domain& domain,
                     const PartitionScheme& scheme, Rng& rng);

// P(descent started in `source` passes through / lands in `target`):
// K^-(target.depth - source.depth) when target is a descendant-or-self of
// source, 1 when target is an ancestor-or-self of source, 0 otherwise.
double conditional_landing_probability(CellId source, CellId target,
                                       const PartitionScheme& scheme);

}  // namespace oro
