#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "helpers.hpp"
#include "parea/functional.hpp"
#include "parea/random.hpp"

using namespace parea;

TEST_SUITE("functional") {

TEST_CASE("grid basics") {
  const GridDomain d = GridDomain::rectangle(-1.0, 3.0, 8, 0.0, 1.0, 4);
  CHECK(d.hx() == 0.5);
  CHECK(d.hy() == 0.25);
  CHECK(d.num_nodes() == 45);
  CHECK(d.area() == 4.0);
  CHECK(d.perimeter() == 10.0);
  int boundary = 0;
  for (int n = 0; n < d.num_nodes(); ++n) boundary += d.is_boundary(n);
  CHECK(boundary == 24);
  double w = 0.0;
  for (int s = 0; s < d.num_samples(); ++s) w += d.sample_weight(s);
  CHECK(w == doctest::Approx(4.0).epsilon(1e-14));
  CHECK_THROWS_AS(GridDomain::square(0.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(GridDomain::square(1.0, 0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(ScalarField(d, std::vector<double>(d.num_nodes(), NAN)), std::invalid_argument);
}

TEST_CASE("gradient examples") {
  const GridDomain d = GridDomain::rectangle(-1.0, 2.0, 6, 0.0, 1.0, 5);
  const VectorField g0 = gradient(ScalarField::sample(d, [](double, double) { return 4.2; }));
  for (double v : g0.values()) CHECK(v == 0.0);
  const VectorField g1 = gradient(ScalarField::sample(d, [](double x, double y) { return 3 * x + 2 * y; }));
  for (int c = 0; c < d.num_cells(); ++c) {
    CHECK(g1.at(c)[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(g1.at(c)[1] == doctest::Approx(2.0).epsilon(1e-14));
  }
  // forward differences by hand: (0.25 - 0) / 0.5 on the cell centred at x = 0.25
  const GridDomain h = GridDomain::square(0.0, 1.0, 2);
  const VectorField g2 = gradient(ScalarField::sample(h, [](double x, double) { return x * x; }));
  CHECK(g2.at(h.cell(0, 0))[0] == 0.5);
}

TEST_CASE("energy examples") {
  const GridDomain unit = GridDomain::square(0.0, 1.0, 8);
  CHECK(energy_FH(ScalarField::zeros(unit), EnergySpec::least_gradient()) == 0.0);
  CHECK(energy_FH(ScalarField::sample(unit, [](double x, double) { return x; }), EnergySpec::least_gradient()) ==
        doctest::Approx(1.0).epsilon(1e-14));
  const EnergySpec withH = EnergySpec::least_gradient().with_H(std::vector<double>(unit.num_cells(), 2.0));
  CHECK(energy_FH(ScalarField::sample(unit, [](double, double) { return 1.0; }), withH) ==
        doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("p-area of the zero graph matches the radial integral") {
  // oracle: nested Gauss-Legendre of sqrt(x^2 + y^2) over [-1,1]^2, frozen below
  const double oracle = testing::gl5(
      [](double x) { return testing::gl5([x](double y) { return std::sqrt(x * x + y * y); }, -1.0, 1.0, 400); }, -1.0,
      1.0, 400);
  const double frozen = 3.0607828658568512;  // (4/3)(sqrt 2 + asinh 1)
  CHECK(oracle == doctest::Approx(frozen).epsilon(1e-7));
  const GridDomain d = GridDomain::square(-1.0, 1.0, 256);
  CHECK(std::abs(energy_FH(ScalarField::zeros(d), EnergySpec::p_area()) - frozen) <= 2e-3);
}

TEST_CASE("singular set examples") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 32);
  const SingularSet xy = singular_set(ScalarField::sample(d, [](double x, double y) { return x * y; }), EnergySpec::p_area());
  REQUIRE(!xy.cells.empty());
  for (int c : xy.cells) CHECK(std::abs(d.cell_x(d.cell_i(c))) <= d.h());
  CHECK(xy.cells.size() == 64);  // the two columns touching x = 0
  CHECK(xy.measure == doctest::Approx(2 * d.h() * 2.0));

  const SingularSet all = singular_set(ScalarField::zeros(d), EnergySpec::least_gradient());
  CHECK(static_cast<int>(all.cells.size()) == d.num_cells());

  const double a = 0.3, b = -0.45;
  const SingularSet pl =
      singular_set(ScalarField::sample(d, [&](double x, double y) { return a * x + b * y + 1.0; }), EnergySpec::p_area());
  REQUIRE(!pl.cells.empty());
  for (int c : pl.cells) CHECK(std::hypot(d.cell_x(d.cell_i(c)) + b, d.cell_y(d.cell_j(c)) - a) <= 2 * d.h());
  CHECK_THROWS_AS(singular_set(ScalarField::zeros(d), EnergySpec::p_area(), -1.0), std::invalid_argument);
}

TEST_CASE("property: singular set shrinks for planes and stays a thin band for xy") {
  for (int n : {16, 32, 64, 128}) {
    const GridDomain d = GridDomain::square(-1.0, 1.0, n);
    const SingularSet pl = singular_set(ScalarField::sample(d, [](double x, double y) { return 0.2 * x - 0.1 * y; }),
                                        EnergySpec::p_area());
    CHECK(pl.measure <= 4 * d.h() * d.diameter());
    const SingularSet xy =
        singular_set(ScalarField::sample(d, [](double x, double y) { return x * y; }), EnergySpec::p_area());
    double width = 0.0;
    for (int c : xy.cells) width = std::max(width, std::abs(d.cell_x(d.cell_i(c))) + 0.5 * d.hx());
    CHECK(width <= 2 * d.h() + 1e-12);
  }
}

TEST_CASE("field to measure examples") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 8);
  const LiftedMeasure z = field_to_measure(ScalarField::zeros(d), EnergySpec::least_gradient());
  CHECK(total_variation(z.mu) == 0.0);
  const ScalarField phi = ScalarField::sample(d, [](double x, double y) { return std::sin(3 * x) * (1 - y * y); });
  const VectorMeasure nu = direction_measure(phi, z.tmpl);
  CHECK(total_variation(decompose(nu, z.mu).nu_s) == doctest::Approx(total_variation(nu)));

  const double a = 0.7, b = -0.2;
  const LiftedMeasure pl =
      field_to_measure(ScalarField::sample(d, [&](double x, double y) { return a * x + b * y; }), EnergySpec::p_area(), 0.0);
  for (int s = 0; s < d.num_samples(); ++s) {
    const auto p = d.sample_point(s);
    CHECK(pl.mu.density(s)[0] == doctest::Approx(a - p[1]).epsilon(1e-13));
    CHECK(pl.mu.density(s)[1] == doctest::Approx(b + p[0]).epsilon(1e-13));
  }

  const LiftedMeasure xy = field_to_measure(ScalarField::sample(d, [](double x, double y) { return x * y; }), EnergySpec::p_area());
  for (int s = 0; s < d.num_samples(); ++s) {
    const auto p = d.sample_point(s);
    const bool band = xy.singular.mask[d.cell_of_sample(s)];
    CHECK(band == (std::abs(p[0]) < d.h()));
    CHECK(xy.mu.density(s)[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(xy.mu.density(s)[1] == doctest::Approx(band ? 0.0 : 2 * p[0]).epsilon(1e-13));
  }
}

TEST_CASE("hypothesis checks") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 16);
  const ScalarField fy = ScalarField::sample(d, [](double, double y) { return y; });
  const ScalarField fmx = ScalarField::sample(d, [](double x, double) { return -x; });
  const HypothesisReport p = hypothesis_checks(d, EnergySpec::p_area(), {fy, fmx});
  CHECK(p.div_F_star_positive);
  CHECK(p.min_div_F_star == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(p.compatibility_residual <= 1e-10);
  // the opposite sign leaves a residual of 2
  const ScalarField fmy = ScalarField::sample(d, [](double, double y) { return -y; });
  const ScalarField fx = ScalarField::sample(d, [](double x, double) { return x; });
  CHECK(hypothesis_checks(d, EnergySpec::p_area(), {fmy, fx}).compatibility_residual == doctest::Approx(2.0));

  const HypothesisReport z = hypothesis_checks(d, EnergySpec::least_gradient(), {ScalarField::zeros(d), ScalarField::zeros(d)});
  CHECK(z.compatibility_residual == 0.0);
  CHECK(z.min_div_F_star == 0.0);
  CHECK(!z.div_F_star_positive);
  CHECK_THROWS_AS(hypothesis_checks(d, EnergySpec::p_area(), {fy}), std::invalid_argument);
}

TEST_CASE("property: energy convexity and lifted energy") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 16);
  Rng rng(21);
  for (int k = 0; k < 20; ++k) {
    const EnergySpec spec = k % 2 ? EnergySpec::p_area() : EnergySpec::least_gradient();
    const ScalarField u = random_smooth_field(d, rng), v = random_smooth_field(d, rng);
    const double t = rng.uniform();
    CHECK(energy_FH(t * u + (1 - t) * v, spec) <= t * energy_FH(u, spec) + (1 - t) * energy_FH(v, spec) + 1e-12);
    const LiftedMeasure lm = field_to_measure(u, spec, 0.0);
    CHECK(std::abs(line_energy(lm.mu, lm.tmpl, 0.0) - energy_FH(u, spec)) <= 1e-12);
  }
}

TEST_CASE("energy of a kink converges at first order") {
  auto err = [](int n) {
    const GridDomain d = GridDomain::square(0.0, 1.0, n);
    const ScalarField u = ScalarField::sample(d, [](double x, double) { return std::abs(x - 1.0 / 3.0); });
    return std::abs(energy_FH(u, EnergySpec::least_gradient()) - 1.0);
  };
  for (int n : {16, 32, 64}) {
    const double r = err(n) / err(2 * n);
    CHECK(r >= 1.7);
    CHECK(r <= 2.3);
  }
}

TEST_CASE("dual lower bound: smooth unit test fields never exceed the energy") {
  // int u div psi <= int |grad u| for |psi| <= 1 vanishing on the boundary
  const GridDomain d = GridDomain::square(0.0, 1.0, 64);
  Rng rng(5);
  const ScalarField u = random_smooth_field(d, rng);
  const double E = energy_FH(u, EnergySpec::least_gradient());
  double best = -INFINITY;
  for (int k = 0; k < 20; ++k) {
    const double th = rng.uniform(0, 2 * std::numbers::pi), m = rng.integer(1, 3);
    std::vector<double> terms;
    for (int s = 0; s < d.num_samples(); ++s) {
      const auto p = d.sample_point(s);
      const double pi = std::numbers::pi;
      // psi = b(x,y) (cos(th + m x), sin(th + m x)), b = sin(pi x) sin(pi y)
      const double b = std::sin(pi * p[0]) * std::sin(pi * p[1]);
      const double bx = pi * std::cos(pi * p[0]) * std::sin(pi * p[1]), by = pi * std::sin(pi * p[0]) * std::cos(pi * p[1]);
      const double c = std::cos(th + m * p[0]), sn = std::sin(th + m * p[0]);
      const double div = bx * c - b * m * sn + by * sn;
      terms.push_back(u.sample_value(s) * div * d.sample_weight(s));
    }
    double pair = 0.0;
    for (double t : terms) pair += t;
    CHECK(pair <= E + 1e-9);
    best = std::max(best, pair);
  }
  CHECK(best > 0.0);
}

}  // TEST_SUITE
