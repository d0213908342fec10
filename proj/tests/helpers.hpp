#pragma once

#include <cmath>
#include <vector>

#include "parea/measure.hpp"

namespace testing {

inline parea::VectorMeasure cells(int d, std::vector<double> w, std::vector<double> dens,
                                  std::vector<parea::Atom> atoms = {}) {
  return parea::VectorMeasure(d, std::move(w), std::move(dens), std::move(atoms));
}

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Composite Gauss-Legendre (5 points) on [a, b] with m panels, written out
// independently of the library's quadrature.
template <class F>
double gl5(F&& f, double a, double b, int m) {
  static const double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
  static const double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                              0.2369268850561891};
  const double h = (b - a) / m;
  double s = 0.0;
  for (int p = 0; p < m; ++p) {
    const double c = a + (p + 0.5) * h;
    for (int k = 0; k < 5; ++k) s += w[k] * f(c + 0.5 * h * x[k]);
  }
  return 0.5 * h * s;
}

}  // namespace testing
