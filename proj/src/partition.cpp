#include "oro/partition.hpp"

#include <algorithm>
#include <cmath>

namespace oro {

Domain::Domain(std::vector<double> lo, std::vector<double> hi)
    : lows(std::move(lo)), highs(std::move(hi)) {
  if (lows.empty() || lows.size() != highs.size())
    throw std::invalid_argument("Domain: need 1 <= D and matching bound vectors");
  for (std::size_t j = 0; j < lows.size(); ++j) {
    if (!(lows[j] < highs[j]))
      throw std::invalid_argument("Domain: lows[j] < highs[j] violated at coordinate " +
                                  std::to_string(j));
  }
}

Domain Domain::unit_cube(int dim) {
  return Domain(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0));
}

double Domain::volume() const {
  double v = 1.0;
  for (int j = 0; j < dim(); ++j) v *= highs[j] - lows[j];
  return v;
}

bool Domain::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int j = 0; j < dim(); ++j) {
    if (x[j] < lows[j] || x[j] > highs[j]) return false;
  }
  return true;
}

PartitionScheme::PartitionScheme(int k) : branching(k) {
  if (k < 2) throw std::invalid_argument("PartitionScheme: branching K must be >= 2");
}

std::vector<CellId> children(CellId cell, const PartitionScheme& scheme) {
  const int k = scheme.branching;
  std::vector<CellId> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    out.push_back(CellId{cell.depth + 1,
                         cell.index * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(j)});
  }
  return out;
}

CellId ancestor(CellId cell, int target_depth, const PartitionScheme& scheme) {
  if (target_depth < 0 || target_depth > cell.depth)
    throw std::invalid_argument("ancestor: target_depth must lie in [0, cell.depth]");
  std::uint64_t idx = cell.index;
  for (int d = cell.depth; d > target_depth; --d) idx /= static_cast<std::uint64_t>(scheme.branching);
  return CellId{target_depth, idx};
}

namespace {

// Base-K digit of `index` at level `level` (0 = root-most choice).
inline int digit_at(std::uint64_t index, int depth, int level, int k) {
  std::uint64_t p = 1;
  for (int i = 0; i < depth - 1 - level; ++i) p *= static_cast<std::uint64_t>(k);
  return static_cast<int>((index / p) % static_cast<std::uint64_t>(k));
}

}  // namespace

Domain cell_bounds(CellId cell, const Domain& domain, const PartitionScheme& scheme) {
  const int k = scheme.branching;
  const int dim = domain.dim();
  std::vector<double> lo = domain.lows;
  std::vector<double> hi = domain.highs;
  for (int level = 0; level < cell.depth; ++level) {
    const int c = level % dim;
    const int j = digit_at(cell.index, cell.depth, level, k);
    const double width = (hi[c] - lo[c]) / k;
    const double new_lo = (j == 0) ? lo[c] : lo[c] + j * width;
    const double new_hi = (j == k - 1) ? hi[c] : lo[c] + (j + 1) * width;
    lo[c] = new_lo;
    hi[c] = new_hi;
  }
  return Domain(std::move(lo), std::move(hi));
}

CellId locate(std::span<const double> x, int depth, const Domain& domain,
              const PartitionScheme& scheme) {
  if (!domain.contains(x)) throw std::invalid_argument("locate: point outside domain");
  if (depth < 0) throw std::invalid_argument("locate: negative depth");
  const int k = scheme.branching;
  const int dim = domain.dim();

  // Split counts and slab index per coordinate. Coordinate c is split at
  // levels c, c+D, c+2D, ...; its slab index yields the per-level digits.
  std::vector<int> splits(dim, 0);
  for (int level = 0; level < depth; ++level) ++splits[level % dim];
  std::vector<std::uint64_t> slab(dim, 0);
  for (int c = 0; c < dim; ++c) {
    if (splits[c] == 0) continue;
    const std::uint64_t cells = static_cast<std::uint64_t>(ipow(k, splits[c]));
    const double rel = (x[c] - domain.lows[c]) / (domain.highs[c] - domain.lows[c]);
    double s = std::floor(rel * static_cast<double>(cells));
    if (s < 0) s = 0;
    std::uint64_t si = static_cast<std::uint64_t>(s);
    if (si >= cells) si = cells - 1;  // domain's upper face
    slab[c] = si;
  }

  // Interleave digits in level order (most significant digit first per
  // coordinate).
  std::uint64_t index = 0;
  std::vector<int> used(dim, 0);
  for (int level = 0; level < depth; ++level) {
    const int c = level % dim;
    const int pos = splits[c] - 1 - used[c];  // remaining less-significant digits
    std::uint64_t p = 1;
    for (int i = 0; i < pos; ++i) p *= static_cast<std::uint64_t>(k);
    const int digit = static_cast<int>((slab[c] / p) % static_cast<std::uint64_t>(k));
    index = index * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(digit);
    ++used[c];
  }
  return CellId{depth, index};
}

Point cell_center(CellId cell, const Domain& domain, const PartitionScheme& scheme) {
  const Domain b = cell_bounds(cell, domain, scheme);
  Point x(b.dim());
  for (int j = 0; j < b.dim(); ++j) x[j] = 0.5 * (b.lows[j] + b.highs[j]);
  return x;
}

Point sample_descend(CellId cell, int max_depth, const Domain& domain,
                     const PartitionScheme& scheme, Rng& rng) {
  if (max_depth < cell.depth)
    throw std::invalid_argument("sample_descend: max_depth < cell.depth");
  const int k = scheme.branching;
  // Uniform child choice at each level == uniform choice among all
  // depth-max_depth descendants (equal measure).
  const std::uint64_t leaves = static_cast<std::uint64_t>(ipow(k, max_depth - cell.depth));
  std::uint64_t leaf_offset = 0;
  if (leaves > 1) {
    std::uniform_int_distribution<std::uint64_t> pick(0, leaves - 1);
    leaf_offset = pick(rng);
  }
  const CellId reached{max_depth, cell.index * leaves + leaf_offset};
  const Domain b = cell_bounds(reached, domain, scheme);
  Point x(b.dim());
  for (int j = 0; j < b.dim(); ++j) {
    std::uniform_real_distribution<double> u(b.lows[j], b.highs[j]);
    x[j] = u(rng);
  }
  return x;
}

double conditional_landing_probability(CellId source, CellId target,
                                       const PartitionScheme& scheme) {
  if (target.depth >= source.depth) {
    if (ancestor(target, source.depth, scheme) == source)
      return 1.0 / static_cast<double>(ipow(scheme.branching, target.depth - source.depth));
    return 0.0;
  }
  return ancestor(source, target.depth, scheme) == target ? 1.0 : 0.0;
}

}  // namespace oro
