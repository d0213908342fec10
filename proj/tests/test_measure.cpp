#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "parea/io.hpp"
#include "parea/measure.hpp"
#include "parea/random.hpp"

using namespace parea;
using testing::cells;

TEST_SUITE("measure") {

TEST_CASE("total variation of simple measures") {
  CHECK(total_variation(cells(2, {1.0}, {3.0, 4.0})) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(total_variation(cells(2, {1.0, 1.0}, {0.0, 0.0, 0.0, 0.0})) == 0.0);
  CHECK(total_variation(cells(2, {0.25, 0.25}, {1.0, 0.0, 0.0, 1.0})) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(total_variation(cells(2, {1.0}, {0.0, 0.0}, {{7, {3.0, 4.0}}})) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("measure validation") {
  CHECK_THROWS_AS(cells(2, {1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(cells(2, {0.0}, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(cells(2, {-1.0}, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(cells(1, {1.0}, {NAN}), std::invalid_argument);
  CHECK_THROWS_AS(cells(1, {1.0}, {1.0}, {{3, {1.0}}, {3, {2.0}}}), std::invalid_argument);
  CHECK_THROWS_AS(cells(2, {1.0}, {1.0, 0.0}, {{3, {1.0}}}), std::invalid_argument);
  VectorMeasure m = cells(1, {1.0}, {1.0}, {{3, {1.0}}});
  CHECK_THROWS_AS(m.add_atom(3, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(combine(cells(1, {1.0}, {1.0}), 1.0, cells(2, {1.0}, {1.0, 1.0})), std::invalid_argument);
  CHECK_THROWS_AS(combine(cells(1, {1.0}, {1.0}), 1.0, cells(1, {0.5}, {1.0})), std::invalid_argument);
}

TEST_CASE("decompose: proportional, disjoint and direct ratio") {
  const VectorMeasure mu = cells(2, {0.5, 2.0}, {1.0, 2.0, -3.0, 0.5});
  const RNDecomposition rn = decompose(combine(mu, 1.0, mu), mu);  // nu = 2 mu
  for (const auto& s : rn.cells) {
    REQUIRE(s.support);
    CHECK(s.A[0] == doctest::Approx(2.0 * s.N[0]));
    CHECK(s.A[1] == doctest::Approx(2.0 * s.N[1]));
  }
  CHECK(total_variation(rn.nu_s) == 0.0);

  const VectorMeasure m1 = cells(2, {1.0, 1.0}, {1.0, 0.0, 0.0, 0.0});
  const VectorMeasure n2 = cells(2, {1.0, 1.0}, {0.0, 0.0, 0.0, 1.0});
  const RNDecomposition d = decompose(n2, m1);
  CHECK(d.cells[0].support);
  CHECK(d.cells[0].A == std::vector<double>{0.0, 0.0});
  CHECK(!d.cells[1].support);
  CHECK(d.nu_s.densities() == n2.densities());

  const RNDecomposition r = decompose(cells(2, {1.0}, {1.0, 1.0}), cells(2, {1.0}, {1.0, 0.0}));
  CHECK(r.cells[0].N == std::vector<double>{1.0, 0.0});
  CHECK(r.cells[0].A == std::vector<double>{1.0, 1.0});
  CHECK(total_variation(r.nu_s) == 0.0);
}

TEST_CASE("decompose treats tiny densities as zero") {
  const VectorMeasure mu = cells(1, {1.0, 1.0}, {1.0, 1e-16});
  const VectorMeasure nu = cells(1, {1.0, 1.0}, {0.0, 1.0});
  const RNDecomposition rn = decompose(nu, mu);
  CHECK(!rn.cells[1].support);
  CHECK(rn.nu_s.densities()[1] == 1.0);
}

TEST_CASE("line energy examples") {
  const VectorMeasure mu = cells(2, {1.0}, {1.0, 0.0});
  const VectorMeasure nu = cells(2, {1.0}, {0.0, 1.0});
  const VectorMeasure zero = VectorMeasure::zeros_like(mu);
  for (double e : {-2.0, -0.3, 0.0, 0.7, 5.0}) {
    CHECK(line_energy(mu, zero, e) == line_energy(mu, zero, 0.0));
    CHECK(line_energy(zero, cells(2, {1.0}, {1.0, 0.0}), e) == doctest::Approx(std::abs(e)));
    CHECK(line_energy(mu, nu, e) == doctest::Approx(std::sqrt(1.0 + e * e)).epsilon(1e-15));
  }
}

TEST_CASE("first variation examples") {
  const VectorMeasure nu = cells(2, {0.5, 0.5}, {1.0, 2.0, -1.0, 0.0}, {{4, {0.0, 3.0}}});
  const VectorMeasure zero = cells(2, {0.5, 0.5}, {0.0, 0.0, 0.0, 0.0});
  const OneSided lg = first_variation_pm(zero, nu, 0.0);
  CHECK(lg.plus == doctest::Approx(total_variation(nu)));
  CHECK(lg.minus == doctest::Approx(-total_variation(nu)));

  const VectorMeasure mu = cells(2, {0.5, 0.5}, {1.0, 2.0, -1.0, 0.5});
  const OneSided two = first_variation_pm(mu, combine(mu, 1.0, mu), 0.0);
  CHECK(two.plus == doctest::Approx(2.0 * total_variation(mu)));
  CHECK(two.minus == doctest::Approx(2.0 * total_variation(mu)));

  const OneSided orth = first_variation_pm(cells(2, {1.0}, {1.0, 0.0}), cells(2, {1.0}, {0.0, 1.0}), 0.0);
  CHECK(orth.plus == 0.0);
  CHECK(orth.minus == 0.0);
}

TEST_CASE("second variation examples") {
  const VectorMeasure mu = cells(2, {1.0}, {1.0, 0.0}), nu = cells(2, {1.0}, {0.0, 1.0});
  CHECK(second_variation(mu, combine(mu, 2.0, mu), 0.3) == doctest::Approx(0.0));
  CHECK(second_variation(mu, nu, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(second_variation(mu, nu, 1.0) == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-15));
}

TEST_CASE("singular epsilons") {
  CHECK(singular_epsilons(cells(2, {1.0}, {1.0, 0.0}), cells(2, {1.0}, {-1.0, 0.0})) == std::vector<double>{1.0});
  CHECK(singular_epsilons(cells(2, {1.0}, {1.0, 0.0}), cells(2, {1.0}, {0.0, 1.0})).empty());
  CHECK(singular_epsilons(cells(2, {1.0, 1.0}, {2.0, 0.0, 0.0, 3.0}), cells(2, {1.0, 1.0}, {-1.0, 0.0, 0.0, -1.0})) ==
        std::vector<double>{2.0, 3.0});
  // atoms take part too, and repeated values are reported once
  const VectorMeasure mu = cells(1, {1.0}, {2.0}, {{0, {-1.0}}});
  const VectorMeasure nu = cells(1, {1.0}, {-1.0}, {{0, {0.5}}});
  CHECK(singular_epsilons(mu, nu) == std::vector<double>{2.0});
}

TEST_CASE("structural identity examples") {
  CHECK(structural_identity_residual(cells(2, {1.0}, {1.0, 0.0}), cells(2, {1.0}, {0.0, 1.0})) <= 1e-15);
  const VectorMeasure m = cells(3, {0.2, 0.7}, {1.0, -2.0, 0.5, 0.0, 3.0, 1.0});
  CHECK(structural_identity_residual(m, m) == 0.0);
  CHECK(structural_identity_residual(cells(2, {1.0}, {1.0, 0.0}), cells(2, {1.0}, {0.0, 0.0})) <= 1e-15);
}

TEST_CASE("property: reconstruction, unit normal, structural identity") {
  Rng rng(11);
  for (int k = 0; k < 300; ++k) {
    const int d = rng.integer(1, 6);
    const double eps = std::ldexp(static_cast<double>(rng.integer(1, 16)), -3);
    auto [mu, nu] = k % 2 ? random_singular_pair(rng, d, 5, 3, eps) : random_measure_pair(rng, d, 5, 3);
    const RNDecomposition rn = decompose(nu, combine(mu, eps, nu));
    const VectorMeasure back = recombine(rn, nu);
    for (std::size_t i = 0; i < nu.densities().size(); ++i)
      CHECK(std::abs(back.densities()[i] - nu.densities()[i]) <= 1e-14 * std::max(1.0, std::abs(nu.densities()[i])));
    for (const auto& s : rn.cells)
      if (s.support) CHECK(std::abs(norm(s.N) - 1.0) <= 1e-14);
    if (d >= 2) CHECK(structural_identity_residual(mu, nu) <= 1e-12);
    // nu_s lives only where mu_eps vanishes
    const VectorMeasure me = combine(mu, eps, nu);
    for (std::size_t c = 0; c < nu.num_cells(); ++c)
      if (norm(std::span<const double>(rn.nu_s.density(c), d)) > 0.0)
        CHECK(norm(std::span<const double>(me.density(c), d)) == 0.0);
  }
}

TEST_CASE("property: Lipschitz bound, convexity and monotone derivative") {
  Rng rng(12);
  for (int k = 0; k < 100; ++k) {
    auto [mu, nu] = random_measure_pair(rng, rng.integer(1, 4), 6, 2);
    const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3), t = rng.uniform();
    const double Fa = line_energy(mu, nu, a), Fb = line_energy(mu, nu, b);
    CHECK(std::abs(Fb - Fa) <= total_variation(nu) * std::abs(b - a) + 1e-12);
    CHECK(line_energy(mu, nu, t * a + (1 - t) * b) <= t * Fa + (1 - t) * Fb + 1e-12);
    const OneSided pa = first_variation_pm(mu, nu, std::min(a, b)), pb = first_variation_pm(mu, nu, std::max(a, b));
    CHECK(pa.minus <= pa.plus);
    CHECK(pa.plus <= pb.minus + 1e-10);
  }
}

TEST_CASE("property: one-sided quotients converge linearly to the closed form") {
  Rng rng(13);
  for (int k = 0; k < 40; ++k) {
    const double eps = std::ldexp(static_cast<double>(rng.integer(1, 16)), -3);
    auto [mu, nu] = random_singular_pair(rng, rng.integer(1, 4), 6, 2, eps);
    const OneSided f = first_variation_pm(mu, nu, eps);
    const double F0 = line_energy(mu, nu, eps);
    auto err = [&](double h) { return std::abs((line_energy(mu, nu, eps + h) - F0) / h - f.plus); };
    const double C = err(1e-3) / 1e-3;
    CHECK(err(1e-4) <= 2.0 * C * 1e-4 + 1e-10);
    CHECK(err(1e-5) <= 2.0 * C * 1e-5 + 1e-10);
    CHECK(err(1e-5) <= 1e-3 * std::max(std::abs(f.plus), total_variation(nu)));
  }
}

TEST_CASE("singular parts at distinct singular eps sit on disjoint sites") {
  // cell 0 cancels at eps = 1, cell 1 at eps = 2, atom 5 at eps = 3
  const VectorMeasure mu = cells(2, {1.0, 1.0}, {1.0, 0.0, 0.0, 2.0}, {{5, {3.0, 0.0}}});
  const VectorMeasure nu = cells(2, {1.0, 1.0}, {-1.0, 0.0, 0.0, -1.0}, {{5, {-1.0, 0.0}}});
  const auto eps = singular_epsilons(mu, nu);
  REQUIRE(eps == std::vector<double>{1.0, 2.0, 3.0});
  std::vector<std::vector<int>> supports;
  for (double e : eps) {
    const RNDecomposition rn = decompose(nu, combine(mu, e, nu));
    std::vector<int> s;
    for (std::size_t c = 0; c < 2; ++c)
      if (norm(std::span<const double>(rn.nu_s.density(c), 2)) > 0.0) s.push_back(static_cast<int>(c));
    for (const Atom& a : rn.nu_s.atoms()) s.push_back(100 + static_cast<int>(a.site));
    supports.push_back(s);
  }
  CHECK(supports == std::vector<std::vector<int>>{{0}, {1}, {105}});
}

TEST_CASE("variation report") {
  const VectorMeasure mu = cells(2, {1.0}, {1.0, 0.0}), nu = cells(2, {1.0}, {-1.0, 0.0});
  const VariationReport at1 = variation_report(mu, nu, 1.0);
  CHECK(!at1.is_regular);
  CHECK(!at1.Fsecond.has_value());
  CHECK(at1.Fprime_minus == doctest::Approx(-1.0));
  CHECK(at1.Fprime_plus == doctest::Approx(1.0));
  const VariationReport at0 = variation_report(mu, nu, 0.0);
  CHECK(at0.is_regular);
  CHECK(at0.Fprime_minus == at0.Fprime_plus);
  CHECK(*at0.Fsecond == 0.0);
}

TEST_CASE("measure JSON round trip") {
  Rng rng(3);
  auto [mu, nu] = random_measure_pair(rng, 3, 4, 2);
  const Json j = Json::parse(dump_json(measure_to_json(mu)));
  const VectorMeasure back = measure_from_json(j);
  CHECK(back.densities() == mu.densities());
  CHECK(back.weights() == mu.weights());
  REQUIRE(back.atoms().size() == mu.atoms().size());
  for (std::size_t k = 0; k < mu.atoms().size(); ++k) CHECK(back.atoms()[k].mass == mu.atoms()[k].mass);
  CHECK_THROWS_AS(measure_from_json(Json::parse(R"({"d": 2, "cells": [{"id": 0, "weight": 1, "density": [1]}]})")),
                  SchemaError);
  CHECK_THROWS_AS(measure_from_json(Json::parse(R"({"d": 1, "bogus": 1})")), SchemaError);
}

}  // TEST_SUITE
