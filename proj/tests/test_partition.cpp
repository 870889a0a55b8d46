#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oro/partition.hpp"

using namespace oro;

TEST_CASE("children index arithmetic") {
  CHECK(children({0, 0}, PartitionScheme(2)) == std::vector<CellId>{{1, 0}, {1, 1}});
  CHECK(children({2, 3}, PartitionScheme(2)) == std::vector<CellId>{{3, 6}, {3, 7}});
  CHECK(children({1, 2}, PartitionScheme(3)) == std::vector<CellId>{{2, 6}, {2, 7}, {2, 8}});
}

TEST_CASE("ancestor") {
  CHECK(ancestor({3, 5}, 1, PartitionScheme(2)) == CellId{1, 1});
  CHECK(ancestor({4, 11}, 4, PartitionScheme(2)) == CellId{4, 11});
  CHECK(ancestor({4, 80}, 2, PartitionScheme(3)) == CellId{2, 8});
  CHECK_THROWS_AS(ancestor({2, 1}, 3, PartitionScheme(2)), std::invalid_argument);
}

TEST_CASE("ancestor of children is the parent") {
  const PartitionScheme s3(3);
  for (std::uint64_t i = 0; i < 9; ++i) {
    const CellId c{2, i};
    for (const CellId& kid : children(c, s3)) CHECK(ancestor(kid, 2, s3) == c);
  }
}

TEST_CASE("cell_bounds on [0,1]") {
  const Domain d = Domain::unit_cube(1);
  const PartitionScheme s(2);
  const Domain b1 = cell_bounds({1, 1}, d, s);
  CHECK(b1.lows[0] == 0.5);
  CHECK(b1.highs[0] == 1.0);
  const Domain b2 = cell_bounds({2, 2}, d, s);
  CHECK(b2.lows[0] == 0.5);
  CHECK(b2.highs[0] == 0.75);
}

TEST_CASE("cell_bounds splits coordinate 0 first in 2-D") {
  const Domain d = Domain::unit_cube(2);
  const PartitionScheme s(2);
  const Domain b = cell_bounds({1, 0}, d, s);
  CHECK(b.lows[0] == 0.0);
  CHECK(b.highs[0] == 0.5);
  CHECK(b.lows[1] == 0.0);
  CHECK(b.highs[1] == 1.0);
}

TEST_CASE("locate") {
  const Domain d = Domain::unit_cube(1);
  const PartitionScheme s(2);
  const Point x{0.7};
  CHECK(locate(x, 2, d, s) == CellId{2, 2});
  CHECK(locate(x, 0, d, s) == CellId{0, 0});
  const Point half{0.5};
  CHECK(locate(half, 1, d, s) == CellId{1, 1});  // half-open boxes
  const Point top{1.0};
  CHECK(locate(top, 3, d, s) == CellId{3, 7});  // upper face belongs to the last cell
  const Point outside{1.5};
  CHECK_THROWS_AS(locate(outside, 1, d, s), std::invalid_argument);
}

TEST_CASE("partition property: disjoint cells tile the domain") {
  const PartitionScheme schemes[] = {PartitionScheme(2), PartitionScheme(3)};
  for (const auto& s : schemes) {
    for (int dim = 1; dim <= 2; ++dim) {
      const Domain d = Domain::unit_cube(dim);
      const int max_h = s.branching == 2 ? 12 : 7;
      for (int h = 0; h <= max_h; ++h) {
        const std::int64_t cells = ipow(s.branching, h);
        double total = 0.0;
        const double expect_each = d.volume() / static_cast<double>(cells);
        for (std::int64_t i = 0; i < cells; ++i) {
          const Domain b = cell_bounds({h, static_cast<std::uint64_t>(i)}, d, s);
          total += b.volume();
          CHECK(b.volume() == doctest::Approx(expect_each).epsilon(1e-12));
        }
        CHECK(total == doctest::Approx(d.volume()).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("adjacent cells share bit-identical boundaries") {
  const Domain d = Domain::unit_cube(1);
  const PartitionScheme s(3);
  for (int h = 1; h <= 6; ++h) {
    const std::int64_t cells = ipow(3, h);
    for (std::int64_t i = 0; i + 1 < cells; ++i) {
      const Domain a = cell_bounds({h, static_cast<std::uint64_t>(i)}, d, s);
      const Domain b = cell_bounds({h, static_cast<std::uint64_t>(i + 1)}, d, s);
      CHECK(a.highs[0] == b.lows[0]);
    }
  }
}

TEST_CASE("sample_descend stays inside the cell and round-trips through locate") {
  const Domain d = Domain::unit_cube(2);
  const PartitionScheme s(2);
  Rng rng = make_rng(17);
  const CellId start{3, 5};
  for (int it = 0; it < 2000; ++it) {
    const Point x = sample_descend(start, 7, d, s, rng);
    const CellId leaf = locate(x, 7, d, s);
    CHECK(ancestor(leaf, 3, s) == start);
    for (int h = 0; h <= 7; ++h) CHECK(locate(x, h, d, s) == ancestor(leaf, h, s));
  }
}

TEST_CASE("sample_descend containment for (1,1) on [0,1]") {
  const Domain d = Domain::unit_cube(1);
  const PartitionScheme s(2);
  Rng rng = make_rng(3);
  for (int it = 0; it < 1000; ++it) {
    const Point x = sample_descend({1, 1}, 5, d, s, rng);
    CHECK(x[0] >= 0.5);
    CHECK(x[0] <= 1.0);
  }
}

TEST_CASE("sample_descend: depth-3 descendants get binomial mass 1/8") {
  const Domain d = Domain::unit_cube(1);
  const PartitionScheme s(2);
  Rng rng = make_rng(99);
  const int draws = 100000;
  std::vector<int> hits(8, 0);
  for (int it = 0; it < draws; ++it) {
    const Point x = sample_descend({0, 0}, 3, d, s, rng);
    hits[locate(x, 3, d, s).index] += 1;
  }
  const double p = 1.0 / 8.0;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (int i = 0; i < 8; ++i) CHECK(std::abs(hits[i] - draws * p) <= 3 * sigma);
}

TEST_CASE("conditional_landing_probability") {
  const PartitionScheme s(2);
  CHECK(conditional_landing_probability({1, 0}, {3, 2}, s) == 0.25);
  CHECK(conditional_landing_probability({2, 3}, {2, 3}, s) == 1.0);
  CHECK(conditional_landing_probability({1, 0}, {1, 1}, s) == 0.0);
  CHECK(conditional_landing_probability({3, 5}, {1, 1}, s) == 1.0);  // ancestor
  CHECK(conditional_landing_probability({3, 5}, {1, 0}, s) == 0.0);
}

TEST_CASE("landing probabilities over a full depth sum to 1") {
  const PartitionScheme s(3);
  const CellId source{1, 2};
  for (int m = 1; m <= 5; ++m) {
    double sum = 0.0;
    const std::int64_t cells = ipow(3, m);
    for (std::int64_t i = 0; i < cells; ++i)
      sum += conditional_landing_probability(source, {m, static_cast<std::uint64_t>(i)}, s);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("domain validation") {
  CHECK_THROWS_AS(Domain({0.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Domain({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(Domain({0.0, 1.0}, {1.0}), std::invalid_argument);
}
