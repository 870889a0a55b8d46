#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "oro/common.hpp"
#include "oro/partition.hpp"

namespace oro {

// A benchmark objective with whatever ground truth it can certify: a known
// optimum when one exists in closed form (or was frozen from an offline
// grid search), smoothness constants for the canonical K=2 split when known,
// and a bound on |f| over the domain.
struct TestFunction {
  std::string name;
  int dim = 1;
  std::function<double(std::span<const double>)> eval;
  double value_bound = 1.0;  // sup_x |f(x)|
  std::optional<Point> optimum;
  std::optional<double> optimum_value;
  std::optional<double> nu;
  std::optional<double> rho;

  double operator()(std::span<const double> x) const { return eval(x); }
  Domain domain() const { return Domain::unit_cube(dim); }
};

// Bundled functions, all on the unit cube:
//   wedge       0.5 - |x - 0.5|              x* = 0.5,  f* = 0.5, (nu,rho) = (1, 1/2)
//   wedge25     0.5 - |x - 0.25|
//   wedge75     0.5 - |x - 0.75|
//   doublesine  0.5*(sin(13 z) sin(27 z) + 1), z = |2x - 1|; two maximizers
//   constant    f == 0.3
//   pyramid2    0.5 - (|x0 - 0.5| + |x1 - 0.5|)/2 on [0,1]^2
//   lure-a      0.9 * tri(x; 0.25, 0.15)
//   lure-b      -0.9 * tri(x; 0.25, 0.15) + 0.8 * tri(x; 0.75, 0.15)
// where tri(x; c, w) = max(0, 1 - |x - c|/w). lure-a/lure-b are the halves
// of a switching process whose average peaks at 0.75 while the first half
// alone peaks (higher) at 0.25.
TestFunction make_test_function(const std::string& name);

// Modulations for drifting processes, |m| <= 1 on the unit cube:
//   sine  sin(2 pi x0);  lin  2 x0 - 1;  one  1;  zero  0
TestFunction make_modulation(const std::string& name);

}  // namespace oro
