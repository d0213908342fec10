#include <doctest.h>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <cmath>
#include <stdexcept>

#include "parea/random.hpp"
#include "parea/solver.hpp"

using namespace parea;

namespace {

SolverConfig zero_start() {
  SolverConfig c;
  c.initial_guess = InitialGuess::zero_interior;
  return c;
}

// Kacanov (lagged coefficient) iteration for the regularized energy with F = 0:
// freeze c = 1/sqrt(a^2 + |grad u|^2) per sample, solve the weighted Laplacian
// with CG, repeat. Only the bilinear element and the quadrature points are
// shared with the library.
ScalarField kacanov(const ScalarField& phi, double a, int max_iter = 400) {
  const GridDomain& d = phi.domain();
  const int N = d.num_nodes(), q = d.samples_per_cell();
  const double hx = d.hx(), hy = d.hy();
  std::vector<int> idx(N, -1);
  int m = 0;
  for (int n = 0; n < N; ++n)
    if (!d.is_boundary(n)) idx[n] = m++;
  ScalarField u = phi;
  for (int n = 0; n < N; ++n)
    if (!d.is_boundary(n)) u[n] = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (int c = 0; c < d.num_cells(); ++c) {
      const auto nodes = d.cell_nodes(c);
      for (int k = 0; k < q; ++k) {
        const int s = c * q + k;
        const double xi = d.sample_xi(k), eta = d.sample_eta(k);
        const double gx[4] = {-(1 - eta) / hx, (1 - eta) / hx, -eta / hx, eta / hx};
        const double gy[4] = {-(1 - xi) / hy, -xi / hy, (1 - xi) / hy, xi / hy};
        double ux = 0, uy = 0;
        for (int r = 0; r < 4; ++r) {
          ux += gx[r] * u[nodes[r]];
          uy += gy[r] * u[nodes[r]];
        }
        const double w = d.sample_weight(s) / std::sqrt(a * a + ux * ux + uy * uy);
        for (int r = 0; r < 4; ++r) {
          if (idx[nodes[r]] < 0) continue;
          for (int t = 0; t < 4; ++t) {
            const double kv = w * (gx[r] * gx[t] + gy[r] * gy[t]);
            if (idx[nodes[t]] < 0)
              rhs[idx[nodes[r]]] -= kv * phi[nodes[t]];
            else
              trip.emplace_back(idx[nodes[r]], idx[nodes[t]], kv);
          }
        }
      }
    }
    Eigen::SparseMatrix<double> A(m, m);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-14);
    cg.setMaxIterations(100000);
    cg.compute(A);
    const Eigen::VectorXd x = cg.solve(rhs);
    double change = 0.0;
    for (int n = 0; n < N; ++n)
      if (idx[n] >= 0) {
        change = std::max(change, std::abs(x[idx[n]] - u[n]));
        u[n] = x[idx[n]];
      }
    if (change < 1e-11) break;
  }
  return u;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("config validation") {
  SolverConfig c;
  CHECK(c.a_schedule.size() == 13);
  CHECK(c.a_schedule.front() == 1.0);
  CHECK(c.a_schedule.back() == std::ldexp(1.0, -12));
  CHECK_NOTHROW(c.validate());
  c.a_schedule = {1.0, 1.0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.a_schedule = {1.0, -0.5};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  const GridDomain d = GridDomain::square(-1.0, 1.0, 4);
  CHECK_THROWS_AS(solve_regularized(d, EnergySpec::p_area(), 0.0, ScalarField::zeros(d)), std::invalid_argument);
  CHECK_THROWS_AS(solve_regularized(d, EnergySpec::p_area(), -1.0, ScalarField::zeros(d)), std::invalid_argument);
}

TEST_CASE("affine data with F = 0 is reproduced exactly") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 16);
  const ScalarField phi = ScalarField::sample(d, [](double x, double y) { return 0.7 * x - 1.3 * y + 0.2; });
  const SolveResult r = solve_regularized(d, EnergySpec::least_gradient(), 1.0, phi, zero_start());
  CHECK(r.converged);
  CHECK(r.residual_norm <= 1e-12);
  CHECK(sup_distance(r.u, phi) <= 1e-12);
  for (int n = 0; n < d.num_nodes(); ++n)
    if (d.is_boundary(n)) CHECK(r.u[n] == phi[n]);

  const SolveResult c = continuation_minimize(d, EnergySpec::least_gradient(), phi, zero_start());
  CHECK(c.converged);
  CHECK(sup_distance(c.stages.front().a == 1.0 ? c.u : phi, phi) <= 1e-12);
  CHECK(c.stages.size() <= 2);  // the second stage only confirms the stop rule
}

TEST_CASE("regularized solve agrees with a lagged-coefficient iteration") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 64);
  const ScalarField phi = ScalarField::sample(d, [](double x, double y) { return x * x - y * y; });
  const SolveResult r = solve_regularized(d, EnergySpec::least_gradient(), 1.0, phi);
  REQUIRE(r.converged);
  CHECK(r.residual_norm <= 1e-10);
  CHECK(sup_distance(r.u, kacanov(phi, 1.0)) <= 1e-6);
}

TEST_CASE("planes solve the p-area equation for every a") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 32);
  const ScalarField phi = ScalarField::sample(d, [](double x, double y) { return 2 * x - y + 1; });
  // a cold start at very small a needs more than the default 50 Newton steps
  SolverConfig cfg = zero_start();
  cfg.max_newton_iters = 200;
  for (double a : {1.0, 0.1, 1e-2, 1e-3}) {
    const SolveResult r = solve_regularized(d, EnergySpec::p_area(), a, phi, cfg);
    CHECK(r.converged);
    CHECK(sup_distance(r.u, phi) <= 1e-8);
  }
  const SolveResult c = continuation_minimize(d, EnergySpec::p_area(), phi, zero_start());
  CHECK(c.converged);
  CHECK(sup_distance(c.u, phi) <= 1e-8);
  for (const StageRecord& s : c.stages) CHECK(s.converged);
}

TEST_CASE("xy is recovered with the expected p-area") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 32);
  const ScalarField phi = ScalarField::sample(d, [](double x, double y) { return x * y; });
  const SolveResult r = continuation_minimize(d, EnergySpec::p_area(), phi, zero_start());
  CHECK(r.converged);
  CHECK(std::abs(r.energy - 4.0) <= 0.04);
  const SingularSet s = singular_set(r.u, EnergySpec::p_area());
  for (int c : s.cells) CHECK(std::abs(d.cell_x(d.cell_i(c))) <= 2 * d.h());
}

TEST_CASE("comparison examples") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 16);
  Rng rng(8);
  const ScalarField p = random_smooth_field(d, rng, 2, 0.5);
  const SolveResult r = continuation_minimize(d, EnergySpec::p_area(), p);
  const ComparisonReport same = comparison_check(r, r, p, p, EnergySpec::p_area());
  CHECK(same.pass);
  CHECK(same.min_diff == 0.0);
  CHECK(same.max_diff == 0.0);

  std::vector<double> up = p.values();
  for (double& v : up) v += 1.0;
  const ScalarField p1(d, up);
  const SolveResult r1 = continuation_minimize(d, EnergySpec::p_area(), p1);
  const ComparisonReport tr = comparison_check(r1, r, p1, p, EnergySpec::p_area());
  CHECK(tr.pass);
  CHECK(tr.min_diff == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(tr.max_diff == doctest::Approx(1.0).epsilon(1e-6));

  const ComparisonReport wrong = comparison_check(r, r1, p, p1, EnergySpec::p_area());
  CHECK(wrong.refused);
  const ComparisonReport noF = comparison_check(r, r, p, p, EnergySpec::least_gradient());
  CHECK(noF.refused);
  CHECK(!noF.reason.empty());
}

TEST_CASE("property: ordered boundary data give ordered solutions") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 12);
  Rng rng(33);
  for (int k = 0; k < 4; ++k) {
    const ScalarField p2 = random_smooth_field(d, rng, 2, 0.5);
    const ScalarField bump = random_smooth_field(d, rng, 2, 0.3);
    std::vector<double> v = p2.values();
    for (int n = 0; n < d.num_nodes(); ++n) v[n] += 0.1 + std::abs(bump[n]);
    const ScalarField p1(d, v);
    const ComparisonReport c = comparison_check(continuation_minimize(d, EnergySpec::p_area(), p1),
                                                continuation_minimize(d, EnergySpec::p_area(), p2), p1, p2,
                                                EnergySpec::p_area());
    CHECK(!c.refused);
    CHECK(c.pass);
  }
}

TEST_CASE("property: monotone boundary approximation") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 12);
  Rng rng(4);
  const ScalarField phi = random_smooth_field(d, rng, 2, 0.5);
  std::vector<ScalarField> sols;
  for (int j = 1; j <= 4; ++j) {
    std::vector<double> v = phi.values();
    for (double& x : v) x -= 1.0 / j;
    sols.push_back(continuation_minimize(d, EnergySpec::p_area(), ScalarField(d, v)).u);
  }
  const ScalarField lim = continuation_minimize(d, EnergySpec::p_area(), phi).u;
  for (std::size_t j = 1; j < sols.size(); ++j) {
    for (int n = 0; n < d.num_nodes(); ++n) CHECK(sols[j][n] >= sols[j - 1][n] - 1e-6);
    CHECK(sup_distance(sols[j], lim) <= sup_distance(sols[j - 1], lim) + 1e-6);
  }
  CHECK(sup_distance(sols.back(), lim) <= 0.25 + 1e-6);
}

TEST_CASE("energy bound examples") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 16);
  SolveResult z;
  z.u = ScalarField::zeros(d);
  const EnergyBoundReport e0 = energy_bound_check(z, EnergySpec::least_gradient(), ScalarField::zeros(d));
  CHECK(e0.lhs == 0.0);
  CHECK(e0.rhs == 0.0);
  CHECK(e0.pass);

  const ScalarField plane = ScalarField::sample(d, [](double x, double y) { return 0.5 * x + 0.25 * y; });
  const EnergyBoundReport ep =
      energy_bound_check(continuation_minimize(d, EnergySpec::p_area(), plane), EnergySpec::p_area(), plane);
  CHECK(ep.strict);
  CHECK(ep.pass);

  const GridDomain big = GridDomain::square(-1.0, 1.0, 64);
  SolveResult xy;
  xy.u = ScalarField::sample(big, [](double x, double y) { return x * y; });
  const EnergyBoundReport ex = energy_bound_check(xy, EnergySpec::p_area(), xy.u);
  CHECK(ex.lhs == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(ex.rhs == doctest::Approx(8.0 + 4.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(ex.strict);
}

TEST_CASE("regularized energies compared on a subdomain") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 16);
  const Rect sub{-0.5, 0.5, -0.5, 0.5};
  const ScalarField f = ScalarField::sample(d, [](double x, double y) { return x - 0.5 * y; });
  const SolveResult v = solve_regularized(d, EnergySpec::least_gradient(), 0.5, f);
  const SubdomainComparisonReport same = subdomain_comparison_check(v, v, EnergySpec::least_gradient(), 0.5, sub);
  CHECK(same.lhs == 0.0);
  CHECK(same.pass);

  const double c = 0.3;
  const ScalarField g = ScalarField::sample(d, [&](double x, double y) { return x - 0.5 * y + c; });
  const SolveResult w = solve_regularized(d, EnergySpec::least_gradient(), 0.5, g);
  const SubdomainComparisonReport sh = subdomain_comparison_check(v, w, EnergySpec::least_gradient(), 0.5, sub);
  CHECK(sh.lhs <= 1e-12);
  CHECK(sh.rhs == doctest::Approx(c * 4.0).epsilon(1e-9));
  CHECK(sh.pass);

  const ScalarField p1 = ScalarField::sample(d, [](double x, double y) { return 0.4 * x + 0.9 * y; });
  const ScalarField p2 = ScalarField::sample(d, [](double x, double y) { return -x + 0.2 * y - 0.1; });
  const SolveResult s1 = solve_regularized(d, EnergySpec::p_area(), 0.25, p1);
  const SolveResult s2 = solve_regularized(d, EnergySpec::p_area(), 0.25, p2);
  const SubdomainComparisonReport two = subdomain_comparison_check(s1, s2, EnergySpec::p_area(), 0.25, {-0.7, 0.7, -0.7, 0.7});
  CHECK(two.pass);

  const ScalarField bad = ScalarField::sample(d, [](double x, double y) { return x * x * y; });
  SolveResult fake;
  fake.u = bad;
  CHECK_THROWS_AS(subdomain_comparison_check(fake, v, EnergySpec::least_gradient(), 0.5, sub), std::invalid_argument);
}

TEST_CASE("property: energy descent and stage monotonicity") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 16);
  Rng rng(12);
  for (int k = 0; k < 3; ++k) {
    const ScalarField phi = random_smooth_field(d, rng, 2, 1.0);
    const SolveResult r = solve_regularized(d, EnergySpec::p_area(), 0.05, phi, zero_start());
    for (std::size_t i = 1; i < r.energy_trace.size(); ++i)
      CHECK(r.energy_trace[i] <= r.energy_trace[i - 1] + 1e-12 * (1 + std::abs(r.energy_trace[i - 1])));
    const SolveResult c = continuation_minimize(d, EnergySpec::p_area(), phi);
    for (std::size_t i = 1; i < c.stages.size(); ++i)
      CHECK(c.stages[i].regularized_energy <= c.stages[i - 1].regularized_energy);
  }
}

TEST_CASE("property: continuation limits are not beaten by interior perturbations") {
  const GridDomain d = GridDomain::square(-1.0, 1.0, 16);
  Rng rng(99);
  const ScalarField phi = random_smooth_field(d, rng, 2, 0.5);
  const SolveResult r = continuation_minimize(d, EnergySpec::p_area(), phi);
  REQUIRE(r.converged);
  const double E = energy_FH(r.u, EnergySpec::p_area());
  for (int k = 0; k < 20; ++k) {
    const double amp = std::pow(10.0, -2.0 + 2.0 * k / 19.0);
    const ScalarField psi = random_direction(d, rng).phi();
    CHECK(E <= energy_FH(r.u + amp * psi, EnergySpec::p_area()) + 1e-9);
  }
}

}  // TEST_SUITE
