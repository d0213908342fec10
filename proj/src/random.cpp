#include "parea/random.hpp"

#include <cmath>
#include <numbers>

namespace parea {

namespace {

std::vector<double> uniform_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

}  // namespace

std::pair<VectorMeasure, VectorMeasure> random_measure_pair(Rng& rng, int d, int cells, int atoms) {
  std::vector<double> w(cells);
  for (double& x : w) x = rng.uniform(0.1, 1.0);
  const auto dm = uniform_vec(rng, static_cast<std::size_t>(cells) * d);
  const auto dn = uniform_vec(rng, static_cast<std::size_t>(cells) * d);
  std::vector<Atom> am, an;
  for (int k = 0; k < atoms; ++k) {
    // mu on even sites 0, 2, ...; nu on 0, 1, 2, ...: partial overlap
    am.push_back({2 * k, uniform_vec(rng, d)});
    an.push_back({k, uniform_vec(rng, d)});
  }
  return {VectorMeasure(d, w, dm, am), VectorMeasure(d, w, dn, an)};
}

std::pair<VectorMeasure, VectorMeasure> random_singular_pair(Rng& rng, int d, int cells, int atoms, double eps) {
  auto [mu, nu] = random_measure_pair(rng, d, cells, atoms);
  // dyadic nu entries on cell 0 so that -eps*nu is exact
  std::vector<double> dm = mu.densities(), dn = nu.densities();
  for (int k = 0; k < d; ++k) {
    dn[k] = std::ldexp(static_cast<double>(rng.integer(-64, 64)), -5);
    if (dn[k] == 0.0) dn[k] = 0.5;
    dm[k] = -eps * dn[k];
  }
  std::vector<Atom> am = mu.atoms(), an = nu.atoms();
  if (atoms > 0) {
    for (int k = 0; k < d; ++k) {
      an[0].mass[k] = std::ldexp(static_cast<double>(rng.integer(1, 64)), -5);
      am[0].mass[k] = -eps * an[0].mass[k];
    }
  }
  return {VectorMeasure(d, mu.weights(), dm, am), VectorMeasure(d, nu.weights(), dn, an)};
}

ScalarField random_smooth_field(const GridDomain& dom, Rng& rng, int modes, double amplitude) {
  const double x0 = dom.axes()[0].lo, y0 = dom.axes()[1].lo;
  const double Lx = dom.axes()[0].hi - x0, Ly = dom.axes()[1].hi - y0;
  const double ax = rng.uniform(-1.0, 1.0), ay = rng.uniform(-1.0, 1.0), c0 = rng.uniform(-1.0, 1.0);
  struct Mode {
    int k, l;
    double amp, px, py;
  };
  std::vector<Mode> ms;
  for (int k = 1; k <= modes; ++k)
    for (int l = 1; l <= modes; ++l)
      ms.push_back({k, l, rng.uniform(-1.0, 1.0) / (k * l), rng.uniform(0.0, 2.0 * std::numbers::pi),
                    rng.uniform(0.0, 2.0 * std::numbers::pi)});
  return ScalarField::sample(dom, [&](double x, double y) {
    double s = c0 + ax * (x - x0) + ay * (y - y0);
    for (const Mode& m : ms)
      s += m.amp * std::cos(m.k * std::numbers::pi * (x - x0) / Lx + m.px) *
           std::cos(m.l * std::numbers::pi * (y - y0) / Ly + m.py);
    return amplitude * s;
  });
}

DirectionField random_direction(const GridDomain& dom, Rng& rng, int modes) {
  const double x0 = dom.axes()[0].lo, y0 = dom.axes()[1].lo;
  const double Lx = dom.axes()[0].hi - x0, Ly = dom.axes()[1].hi - y0;
  std::vector<double> amp(static_cast<std::size_t>(modes) * modes);
  for (double& a : amp) a = rng.uniform(-1.0, 1.0);
  ScalarField phi = ScalarField::sample(dom, [&](double x, double y) {
    double s = 0.0;
    for (int k = 1; k <= modes; ++k)
      for (int l = 1; l <= modes; ++l)
        s += amp[(k - 1) * modes + (l - 1)] / (k * l) * std::sin(k * std::numbers::pi * (x - x0) / Lx) *
             std::sin(l * std::numbers::pi * (y - y0) / Ly);
    return s;
  });
  for (int n = 0; n < dom.num_nodes(); ++n)
    if (dom.is_boundary(n)) phi[n] = 0.0;
  return DirectionField(std::move(phi));
}

}  // namespace parea
