#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "parea/random.hpp"
#include "parea/solver.hpp"
#include "parea/variation.hpp"

using namespace parea;

namespace {

// sum over samples of |grad phi|^p, optionally restricted to a cell mask
double grad_integral(const ScalarField& phi, int p, const std::vector<unsigned char>* mask = nullptr) {
  const GridDomain& d = phi.domain();
  double s = 0.0;
  for (int k = 0; k < d.num_samples(); ++k) {
    if (mask && !(*mask)[d.cell_of_sample(k)]) continue;
    const auto g = phi.sample_gradient(k);
    s += std::pow(std::hypot(g[0], g[1]), p) * d.sample_weight(k);
  }
  return s;
}

DirectionField bump(const GridDomain& d, double cx, double cy, double r) {
  return DirectionField(ScalarField::sample(d, [=](double x, double y) {
    const double t = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (r * r);
    return t < 1.0 ? (1 - t) * (1 - t) : 0.0;
  }));
}

DirectionField sine_dir(const GridDomain& d) {
  DirectionField tmp(ScalarField::zeros(d));
  std::vector<double> v = ScalarField::sample(d, [](double x, double y) {
                            return std::sin(std::numbers::pi * (x + 1) / 2) * std::sin(std::numbers::pi * (y + 1));
                          }).values();
  for (int n = 0; n < d.num_nodes(); ++n)
    if (d.is_boundary(n)) v[n] = 0.0;
  return DirectionField(ScalarField(d, v));
}

}  // namespace

TEST_SUITE("variation") {

TEST_CASE("direction fields must vanish on the boundary") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 8);
  CHECK_THROWS_AS(DirectionField(ScalarField::sample(d, [](double, double) { return 1.0; })), std::invalid_argument);
  CHECK_NOTHROW(DirectionField(ScalarField::zeros(d)));
}

TEST_CASE("first variation at the zero graph with F = 0") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 24);
  const DirectionField dir = sine_dir(d);
  const VariationReport v = minimizer_first_variation(ScalarField::zeros(d), EnergySpec::least_gradient(), dir);
  const double tv = grad_integral(dir.phi(), 1);
  CHECK(v.F_value == 0.0);
  CHECK(v.Fprime_plus == doctest::Approx(tv).epsilon(1e-12));
  CHECK(v.Fprime_minus == doctest::Approx(-tv).epsilon(1e-12));
  CHECK(!v.is_regular);
}

TEST_CASE("first variation of a plane under p-area vanishes up to the singular point") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 32);
  const ScalarField u = ScalarField::sample(d, [](double x, double y) { return 0.3 * x - 0.2 * y; });
  Rng rng(7);
  for (int k = 0; k < 10; ++k) {
    const DirectionField dir = random_direction(d, rng);
    const VariationReport v = minimizer_first_variation(u, EnergySpec::p_area(), dir);
    const SingularSet s = singular_set(u, EnergySpec::p_area());
    const double jump = grad_integral(dir.phi(), 1, &s.mask);
    CHECK(v.Fprime_plus - v.Fprime_minus == doctest::Approx(2 * jump).epsilon(1e-10));
    // the interior term only misses the cells around the singular point
    CHECK(std::abs(v.Fprime_plus + v.Fprime_minus) <= 2 * jump + 1e-12);
    CHECK(v.Fprime_plus >= -1e-12);
    CHECK(std::abs(v.Fprime_plus) <= 2 * jump + 1e-12);
    CHECK(jump <= 20 * d.h() * d.h() * 16);  // |grad phi| <= 16 over a disc of radius ~2h
  }
}

TEST_CASE("first variation of xy picks up the band") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 32);
  const ScalarField u = ScalarField::sample(d, [](double x, double y) { return x * y; });
  const DirectionField dir = bump(d, 0.0, 0.1, 0.5);
  const VariationReport v = minimizer_first_variation(u, EnergySpec::p_area(), dir);
  const SingularSet s = singular_set(u, EnergySpec::p_area());
  const double band = grad_integral(dir.phi(), 1, &s.mask);
  CHECK(band > 0.0);
  CHECK(v.Fprime_plus == doctest::Approx(band).epsilon(1e-10));
  CHECK(v.Fprime_minus == doctest::Approx(-band).epsilon(1e-10));
  CHECK(v.Fprime_plus <= 2 * d.h() * 2 * 4.0);  // |grad phi| <= 4 on a strip of width 2h
}

TEST_CASE("H enters through the pairing") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 16);
  const DirectionField dir = sine_dir(d);
  const EnergySpec spec = EnergySpec::least_gradient().with_H(std::vector<double>(d.num_cells(), 2.0));
  const VariationReport v = minimizer_first_variation(ScalarField::zeros(d), spec, dir);
  const double pair = h_pairing(spec, dir.phi());
  CHECK(pair == doctest::Approx(2.0 * energy_FH(dir.phi(), EnergySpec::least_gradient().with_H(
                                          std::vector<double>(d.num_cells(), 1.0))) -
                                2.0 * grad_integral(dir.phi(), 1)));
  CHECK(v.Fprime_plus == doctest::Approx(grad_integral(dir.phi(), 1) + pair).epsilon(1e-12));
}

TEST_CASE("second variation examples") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 24);
  const DirectionField dir = sine_dir(d);
  CHECK(second_variation_graph(ScalarField::zeros(d), EnergySpec::p_area(), dir, GraphMode::riemannian) ==
        doctest::Approx(grad_integral(dir.phi(), 2)).epsilon(1e-12));

  // grad phi parallel to grad u everywhere
  const ScalarField u = 3.0 * dir.phi();
  CHECK(std::abs(second_variation_graph(u, EnergySpec::least_gradient(), dir)) <= 1e-12);

  const GridDomain g = GridDomain::square(-1.0, 1.0, 64);
  const ScalarField xy = ScalarField::sample(g, [](double x, double y) { return x * y; });
  const DirectionField b = bump(g, 0.5, 0.0, 0.3);
  const double f2 = second_variation_graph(xy, EnergySpec::p_area(), b);
  const double eps = 1e-3;
  const double fd = (energy_FH(xy + eps * b.phi(), EnergySpec::p_area()) - 2 * energy_FH(xy, EnergySpec::p_area()) +
                     energy_FH(xy - eps * b.phi(), EnergySpec::p_area())) /
                    (eps * eps);
  CHECK(f2 > 0.0);
  CHECK(std::abs(fd - f2) <= 1e-2 * f2);
}

TEST_CASE("property: second variation is nonnegative and matches the lifted measures") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 12);
  Rng rng(17);
  for (int k = 0; k < 30; ++k) {
    const ScalarField u = random_smooth_field(d, rng);
    const DirectionField dir = random_direction(d, rng);
    for (GraphMode mode : {GraphMode::horizontal, GraphMode::riemannian}) {
      const double f2 = second_variation_graph(u, EnergySpec::p_area(), dir, mode);
      CHECK(f2 >= 0.0);
      const GraphLift lift = lift_graph(u, EnergySpec::p_area(), dir, mode);
      CHECK(std::abs(f2 - second_variation(lift.mu, lift.nu, 0.0)) <= 1e-12 * (1 + f2));
    }
  }
}

TEST_CASE("finite differences against the closed forms") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 16);
  const DirectionField dir = sine_dir(d);
  const FdReport z = fd_validate(ScalarField::zeros(d), EnergySpec::least_gradient(), dir, {1e-2, 1e-3, 1e-4});
  CHECK(std::abs(z.rows[2].q_plus - grad_integral(dir.phi(), 1)) <= 1e-3);
  CHECK(std::abs(z.rows[2].q_minus + grad_integral(dir.phi(), 1)) <= 1e-3);

  const ScalarField plane = ScalarField::sample(d, [](double x, double y) { return 0.5 * x + 0.4 * y + 0.1; });
  const FdReport p = fd_validate(plane, EnergySpec::p_area(), dir, {1e-2, 1e-3, 1e-4});
  CHECK(std::abs(p.rows[2].q_plus) <= 1e-2);
  CHECK(std::abs(p.rows[2].q_minus) <= 1e-2);
  CHECK(std::abs(p.rows[2].q_plus) < std::abs(p.rows[0].q_plus) + 1e-12);

  const ScalarField quad = ScalarField::sample(d, [](double x, double y) { return 0.5 * x * x - 0.3 * x * y + y * y; });
  const FdReport r = fd_validate(quad, EnergySpec::p_area(), dir, {1e-1, 5e-2, 2.5e-2}, GraphMode::riemannian);
  for (double o : r.order_plus) CHECK(o >= 0.9);
  for (double o : r.order_second) CHECK(o >= 0.9);
  CHECK_THROWS_AS(fd_validate(quad, EnergySpec::p_area(), dir, {0.0}), std::invalid_argument);
}

TEST_CASE("angle condition on xy") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 32);
  const ScalarField u = ScalarField::sample(d, [](double x, double y) { return x * y; });
  const auto curves = angle_condition(u, EnergySpec::p_area());
  REQUIRE(curves.size() == 1);
  const SingularCurve& c = curves[0];
  CHECK(!c.low_confidence);
  CHECK(c.residual <= 1e-12);
  for (const CurveSegment& s : c.segments) {
    CHECK(std::abs(std::abs(s.tau[1]) - 1.0) <= 1e-12);
    CHECK(std::abs(s.e1_plus[0] * s.tau[0] + s.e1_plus[1] * s.tau[1]) <= 1e-12);
    CHECK(s.antipodal_defect <= 1e-12);
    CHECK(std::abs(s.nu_plus[0]) <= 1e-12);
    CHECK(std::abs(std::abs(s.nu_plus[1]) - 1.0) <= 1e-12);
  }
}

TEST_CASE("angle condition on a plane finds no curve") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 32);
  const ScalarField u = ScalarField::sample(d, [](double x, double y) { return 0.2 * x + 0.1 * y; });
  CHECK(angle_condition(u, EnergySpec::p_area()).empty());
}

TEST_CASE("property: angle residual of re-solved perturbations of xy") {
  for (int n : {32, 64}) {
    const GridDomain d = GridDomain::square(-1.0, 1.0, n);
    const ScalarField phi = ScalarField::sample(d, [](double x, double y) { return x * y + 0.05 * std::sin(2 * x + y); });
    const SolveResult r = continuation_minimize(d, EnergySpec::p_area(), phi);
    const auto curves = angle_condition(r.u, EnergySpec::p_area());
    REQUIRE(!curves.empty());
    for (const SingularCurve& c : curves) CHECK(c.residual <= 5 * d.h());
  }
}

}  // TEST_SUITE
