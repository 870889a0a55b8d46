#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace oro {

using Point = std::vector<double>;
using Rng = std::mt19937_64;

// Configuration problems (bad CLI flags, malformed env specs, invalid budgets).
// The CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Broken internal invariants. The CLI maps these to exit code 3.
struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

// Stream for repetition `rep` of an experiment seeded with `base`.
inline Rng make_rep_rng(std::uint64_t base, std::uint64_t rep) {
  return Rng(splitmix64(base ^ splitmix64(rep)));
}

inline std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<std::int64_t>::max() / base)
      throw InternalError("ipow overflow: " + std::to_string(base) + "^" + std::to_string(exp));
    r *= base;
  }
  return r;
}

// Largest h >= 0 with base^h <= n.
inline int floor_log(std::int64_t n, int base) {
  if (n < 1 || base < 2) throw std::invalid_argument("floor_log: need n >= 1, base >= 2");
  int h = 0;
  std::int64_t p = 1;
  while (p <= n / base) {
    p *= base;
    ++h;
  }
  return h;
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
};

inline MeanSd mean_sd(std::span<const double> xs) {
  MeanSd out;
  if (xs.empty()) return out;
  double s = 0.0;
  for (double x : xs) s += x;
  out.mean = s / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double q = 0.0;
    for (double x : xs) q += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(q / static_cast<double>(xs.size() - 1));
  }
  return out;
}

}  // namespace oro
