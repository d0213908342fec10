#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace parea {

// Pairwise (cascade) summation with a fixed split, so results do not depend on
// anything but the input order.
double pairwise_sum(std::span<const double> xs);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

// Gauss-Legendre rule mapped to [0, 1]; weights sum to 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre01(int order);

// Portable generator: mt19937_64 bits mapped by hand, so the stream is the same
// on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  std::uint64_t bits() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace parea
