#include "oro/test_functions.hpp"

#include <cmath>
#include <numbers>

namespace oro {

namespace {

double tri(double x, double c, double w) {
  return std::max(0.0, 1.0 - std::abs(x - c) / w);
}

// Frozen from a 2e6-point grid search refined by ternary descent.
constexpr double kDoubleSineZstar = 0.867526207951909;
constexpr double kDoubleSineFstar = 0.975599143811575;

}  // namespace

TestFunction make_test_function(const std::string& name) {
  TestFunction f;
  f.name = name;
  if (name == "wedge") {
    f.eval = [](std::span<const double> x) { return 0.5 - std::abs(x[0] - 0.5); };
    f.value_bound = 0.5;
    f.optimum = Point{0.5};
    f.optimum_value = 0.5;
    f.nu = 1.0;
    f.rho = 0.5;
  } else if (name == "wedge25") {
    f.eval = [](std::span<const double> x) { return 0.5 - std::abs(x[0] - 0.25); };
    f.value_bound = 0.5;
    f.optimum = Point{0.25};
    f.optimum_value = 0.5;
    f.nu = 1.0;
    f.rho = 0.5;
  } else if (name == "wedge75") {
    f.eval = [](std::span<const double> x) { return 0.5 - std::abs(x[0] - 0.75); };
    f.value_bound = 0.5;
    f.optimum = Point{0.75};
    f.optimum_value = 0.5;
    f.nu = 1.0;
    f.rho = 0.5;
  } else if (name == "doublesine") {
    f.eval = [](std::span<const double> x) {
      const double z = std::abs(2.0 * x[0] - 1.0);
      return 0.5 * (std::sin(13.0 * z) * std::sin(27.0 * z) + 1.0);
    };
    f.value_bound = 1.0;
    f.optimum = Point{0.5 * (1.0 + kDoubleSineZstar)};  // the maximizer in (0.5, 1]
    f.optimum_value = kDoubleSineFstar;
  } else if (name == "constant") {
    f.eval = [](std::span<const double>) { return 0.3; };
    f.value_bound = 0.3;
    f.optimum = Point{0.5};
    f.optimum_value = 0.3;
    f.nu = 1.0;
    f.rho = 0.5;
  } else if (name == "pyramid2") {
    f.dim = 2;
    f.eval = [](std::span<const double> x) {
      return 0.5 - 0.5 * (std::abs(x[0] - 0.5) + std::abs(x[1] - 0.5));
    };
    f.value_bound = 0.5;
    f.optimum = Point{0.5, 0.5};
    f.optimum_value = 0.5;
    f.nu = 1.0;
    f.rho = std::sqrt(0.5);  // one coordinate halves per level under K=2
  } else if (name == "lure-a") {
    f.eval = [](std::span<const double> x) { return 0.9 * tri(x[0], 0.25, 0.15); };
    f.value_bound = 0.9;
    f.optimum = Point{0.25};
    f.optimum_value = 0.9;
  } else if (name == "lure-b") {
    f.eval = [](std::span<const double> x) {
      return -0.9 * tri(x[0], 0.25, 0.15) + 0.8 * tri(x[0], 0.75, 0.15);
    };
    f.value_bound = 0.9;
    f.optimum = Point{0.75};
    f.optimum_value = 0.8;
  } else {
    throw ConfigError("unknown test function: " + name);
  }
  return f;
}

TestFunction make_modulation(const std::string& name) {
  TestFunction m;
  m.name = name;
  m.value_bound = 1.0;
  if (name == "sine") {
    m.eval = [](std::span<const double> x) { return std::sin(2.0 * std::numbers::pi * x[0]); };
  } else if (name == "lin") {
    m.eval = [](std::span<const double> x) { return 2.0 * x[0] - 1.0; };
  } else if (name == "one") {
    m.eval = [](std::span<const double>) { return 1.0; };
  } else if (name == "zero") {
    m.eval = [](std::span<const double>) { return 0.0; };
    m.value_bound = 0.0;
  } else {
    throw ConfigError("unknown modulation: " + name);
  }
  return m;
}

}  // namespace oro
