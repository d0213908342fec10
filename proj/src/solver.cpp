#include "parea/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "parea/numerics.hpp"

namespace parea {

std::vector<double> SolverConfig::default_schedule() {
  std::vector<double> a;
  for (int k = 0; k <= 12; ++k) a.push_back(std::ldexp(1.0, -k));
  return a;
}

void SolverConfig::validate() const {
  if (a_schedule.empty()) throw std::invalid_argument("a_schedule is empty");
  for (std::size_t k = 0; k < a_schedule.size(); ++k) {
    if (!(a_schedule[k] > 0.0)) throw std::invalid_argument("a_schedule entries must be positive");
    if (k > 0 && !(a_schedule[k] < a_schedule[k - 1])) throw std::invalid_argument("a_schedule must be strictly decreasing");
  }
  if (!(newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be positive");
  if (max_newton_iters < 0) throw std::invalid_argument("max_newton_iters must be >= 0");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw std::invalid_argument("backtrack factor must lie in (0, 1)");
  if (max_halvings < 1) throw std::invalid_argument("max_halvings must be >= 1");
  if (!(continuation_stop >= 0.0)) throw std::invalid_argument("continuation_stop must be >= 0");
  if (!(cg_tol > 0.0) || cg_max_iters < 1) throw std::invalid_argument("bad CG settings");
}

namespace {

using Sym4 = std::array<double, 16>;

// Discrete regularized energy sum_s w_s sqrt(a^2 + |∇u + F|^2) + sum_c H_c ubar_c |c|
// on a fixed grid, with the per-sample gradient stencils cached.
class Problem {
 public:
  Problem(const GridDomain& dom, const EnergySpec& spec, double a) : dom_(dom), spec_(spec), a2_(a * a) {
    if (!(a > 0.0)) throw std::invalid_argument("regularization parameter a must be positive");
    spec.check(dom);
    const int q = dom.samples_per_cell();
    gx_.resize(q);
    gy_.resize(q);
    rel_.resize(q);
    for (int k = 0; k < q; ++k) {
      const double xi = dom.sample_xi(k), eta = dom.sample_eta(k);
      gx_[k] = {-(1 - eta) / dom.hx(), (1 - eta) / dom.hx(), -eta / dom.hx(), eta / dom.hx()};
      gy_[k] = {-(1 - xi) / dom.hy(), -xi / dom.hy(), (1 - xi) / dom.hy(), xi / dom.hy()};
      rel_[k] = dom.sample_rel_weight(k);
    }
    F_.resize(2 * dom.num_samples());
    for (int s = 0; s < dom.num_samples(); ++s) {
      const auto p = dom.sample_point(s);
      const auto f = spec.F_at(p[0], p[1], dom.cell_of_sample(s));
      F_[2 * s] = f[0];
      F_[2 * s + 1] = f[1];
    }
    dof_.assign(dom.num_nodes(), -1);
    for (int n = 0; n < dom.num_nodes(); ++n)
      if (!dom.is_boundary(n)) dof_[n] = ndof_++;
  }

  const GridDomain& dom() const { return dom_; }
  int ndof() const { return ndof_; }
  const std::vector<int>& dof() const { return dof_; }

  double energy(const std::vector<double>& u) const {
    const int q = dom_.samples_per_cell();
    std::vector<double> terms(dom_.num_samples());
    for (int c = 0; c < dom_.num_cells(); ++c) {
      const auto n = dom_.cell_nodes(c);
      for (int k = 0; k < q; ++k) {
        const auto w = horizontal(u, n, c * q + k, k);
        terms[c * q + k] = std::sqrt(a2_ + w[0] * w[0] + w[1] * w[1]) * rel_[k];
      }
    }
    double e = pairwise_sum(terms) * dom_.cell_area();
    if (spec_.has_H()) e += pairwise_sum(h_terms(u));
    return e;
  }

  // energy(v) - energy(u) without cancellation: per sample
  // Psi(w') - Psi(w) = (w' - w).(w' + w) / (Psi(w') + Psi(w)).
  double energy_change(const std::vector<double>& u, const std::vector<double>& v) const {
    const int q = dom_.samples_per_cell();
    std::vector<double> terms(dom_.num_samples());
    for (int c = 0; c < dom_.num_cells(); ++c) {
      const auto n = dom_.cell_nodes(c);
      for (int k = 0; k < q; ++k) {
        const auto w = horizontal(u, n, c * q + k, k);
        const auto w2 = horizontal(v, n, c * q + k, k);
        double dx = 0.0, dy = 0.0;
        for (int l = 0; l < 4; ++l) {
          dx += gx_[k][l] * (v[n[l]] - u[n[l]]);
          dy += gy_[k][l] * (v[n[l]] - u[n[l]]);
        }
        const double p1 = std::sqrt(a2_ + w[0] * w[0] + w[1] * w[1]);
        const double p2 = std::sqrt(a2_ + w2[0] * w2[0] + w2[1] * w2[1]);
        terms[c * q + k] = (dx * (w[0] + w2[0]) + dy * (w[1] + w2[1])) / (p1 + p2) * rel_[k];
      }
    }
    double de = pairwise_sum(terms) * dom_.cell_area();
    if (spec_.has_H()) {
      std::vector<double> t(dom_.num_cells());
      for (int c = 0; c < dom_.num_cells(); ++c) {
        const auto n = dom_.cell_nodes(c);
        double du = 0.0;
        for (int l = 0; l < 4; ++l) du += v[n[l]] - u[n[l]];
        t[c] = spec_.H_at(c) * 0.25 * du * dom_.cell_area();
      }
      de += pairwise_sum(t);
    }
    return de;
  }

  // Gradient with respect to all nodal values.
  std::vector<double> gradient(const std::vector<double>& u) const {
    const int q = dom_.samples_per_cell();
    std::vector<double> g(dom_.num_nodes(), 0.0);
    for (int c = 0; c < dom_.num_cells(); ++c) {
      const auto n = dom_.cell_nodes(c);
      std::array<double, 4> loc{};
      for (int k = 0; k < q; ++k) {
        const auto w = horizontal(u, n, c * q + k, k);
        const double psi = std::sqrt(a2_ + w[0] * w[0] + w[1] * w[1]);
        const double nx = w[0] / psi * rel_[k], ny = w[1] / psi * rel_[k];
        for (int l = 0; l < 4; ++l) loc[l] += gx_[k][l] * nx + gy_[k][l] * ny;
      }
      const double hc = spec_.H_at(c) * 0.25;
      for (int l = 0; l < 4; ++l) g[n[l]] += (loc[l] + hc) * dom_.cell_area();
    }
    return g;
  }

  double residual(const std::vector<double>& g) const {
    double r = 0.0;
    for (int n = 0; n < dom_.num_nodes(); ++n)
      if (dof_[n] >= 0) r = std::max(r, std::abs(g[n]));
    return r / dom_.cell_area();
  }

  // Element Hessians, one dense 4x4 per cell.
  std::vector<Sym4> element_matrices(const std::vector<double>& u) const {
    const int q = dom_.samples_per_cell();
    std::vector<Sym4> K(dom_.num_cells());
    for (int c = 0; c < dom_.num_cells(); ++c) {
      const auto n = dom_.cell_nodes(c);
      Sym4 ke{};
      for (int k = 0; k < q; ++k) {
        const auto w = horizontal(u, n, c * q + k, k);
        const double s2 = a2_ + w[0] * w[0] + w[1] * w[1];
        const double s = std::sqrt(s2), s3 = s2 * s;
        const double scale = rel_[k] * dom_.cell_area();
        const double mxx = (s2 - w[0] * w[0]) / s3 * scale, myy = (s2 - w[1] * w[1]) / s3 * scale;
        const double mxy = -w[0] * w[1] / s3 * scale;
        for (int l = 0; l < 4; ++l) {
          const double bx = mxx * gx_[k][l] + mxy * gy_[k][l];
          const double by = mxy * gx_[k][l] + myy * gy_[k][l];
          for (int m = 0; m < 4; ++m) ke[4 * l + m] += bx * gx_[k][m] + by * gy_[k][m];
        }
      }
      K[c] = ke;
    }
    return K;
  }

 private:
  std::array<double, 2> horizontal(const std::vector<double>& u, const std::array<int, 4>& n, int s, int k) const {
    double gx = 0.0, gy = 0.0;
    for (int l = 0; l < 4; ++l) {
      gx += gx_[k][l] * u[n[l]];
      gy += gy_[k][l] * u[n[l]];
    }
    return {gx + F_[2 * s], gy + F_[2 * s + 1]};
  }

  std::vector<double> h_terms(const std::vector<double>& u) const {
    std::vector<double> t(dom_.num_cells());
    for (int c = 0; c < dom_.num_cells(); ++c) {
      const auto n = dom_.cell_nodes(c);
      t[c] = spec_.H_at(c) * 0.25 * (u[n[0]] + u[n[1]] + u[n[2]] + u[n[3]]) * dom_.cell_area();
    }
    return t;
  }

  const GridDomain& dom_;
  const EnergySpec& spec_;
  double a2_;
  std::vector<std::array<double, 4>> gx_, gy_;
  std::vector<double> rel_;
  std::vector<double> F_;
  std::vector<int> dof_;
  int ndof_ = 0;
};

// Jacobi-preconditioned CG on the interior block, matrix free.
std::vector<double> solve_cg(const Problem& p, const std::vector<Sym4>& K, const std::vector<double>& rhs,
                             const SolverConfig& cfg) {
  const GridDomain& dom = p.dom();
  const auto& dof = p.dof();
  const int n = p.ndof();
  std::vector<double> diag(n, 0.0);
  for (int c = 0; c < dom.num_cells(); ++c) {
    const auto nd = dom.cell_nodes(c);
    for (int l = 0; l < 4; ++l)
      if (dof[nd[l]] >= 0) diag[dof[nd[l]]] += K[c][5 * l];
  }
  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (int c = 0; c < dom.num_cells(); ++c) {
      const auto nd = dom.cell_nodes(c);
      std::array<double, 4> xl{};
      for (int l = 0; l < 4; ++l) xl[l] = dof[nd[l]] >= 0 ? x[dof[nd[l]]] : 0.0;
      for (int l = 0; l < 4; ++l) {
        if (dof[nd[l]] < 0) continue;
        double acc = 0.0;
        for (int m = 0; m < 4; ++m) acc += K[c][4 * l + m] * xl[m];
        y[dof[nd[l]]] += acc;
      }
    }
  };
  std::vector<double> x(n, 0.0), r = rhs, z(n), d(n), Ad(n);
  const double bnorm = norm(rhs);
  if (bnorm == 0.0) return x;
  for (int i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  d = z;
  double rz = dot(r, z);
  for (int it = 0; it < cfg.cg_max_iters; ++it) {
    apply(d, Ad);
    const double dAd = dot(d, Ad);
    if (!(dAd > 0.0)) break;
    const double alpha = rz / dAd;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * d[i];
      r[i] -= alpha * Ad[i];
    }
    if (norm(r) <= cfg.cg_tol * bnorm) break;
    for (int i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) d[i] = z[i] + beta * d[i];
  }
  return x;
}

class CholeskySolver {
 public:
  std::vector<double> solve(const Problem& p, const std::vector<Sym4>& K, const std::vector<double>& rhs) {
    const GridDomain& dom = p.dom();
    const auto& dof = p.dof();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(16 * dom.num_cells());
    for (int c = 0; c < dom.num_cells(); ++c) {
      const auto nd = dom.cell_nodes(c);
      for (int l = 0; l < 4; ++l)
        for (int m = 0; m < 4; ++m)
          if (dof[nd[l]] >= 0 && dof[nd[m]] >= 0) trip.emplace_back(dof[nd[l]], dof[nd[m]], K[c][4 * l + m]);
    }
    Eigen::SparseMatrix<double> A(p.ndof(), p.ndof());
    A.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed_) {
      llt_.analyzePattern(A);
      analyzed_ = true;
    }
    llt_.factorize(A);
    if (llt_.info() != Eigen::Success) throw std::runtime_error("sparse factorization failed");
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), p.ndof());
    Eigen::VectorXd x = llt_.solve(b);
    return std::vector<double>(x.data(), x.data() + x.size());
  }

 private:
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> llt_;
  bool analyzed_ = false;
};

}  // namespace

double regularized_energy(const ScalarField& u, const EnergySpec& spec, double a) {
  return Problem(u.domain(), spec, a).energy(u.values());
}

double pde_residual(const ScalarField& u, const EnergySpec& spec, double a) {
  Problem p(u.domain(), spec, a);
  return p.residual(p.gradient(u.values()));
}

ScalarField initial_guess(const ScalarField& phi, InitialGuess kind) {
  const GridDomain& dom = phi.domain();
  if (kind == InitialGuess::from_phi) return phi;
  std::vector<double> u = phi.values();
  const int nx = dom.nx(), ny = dom.ny();
  for (int j = 1; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      double v = 0.0;
      if (kind == InitialGuess::coons) {
        const double s = static_cast<double>(i) / nx, t = static_cast<double>(j) / ny;
        v = (1 - s) * phi.at(0, j) + s * phi.at(nx, j) + (1 - t) * phi.at(i, 0) + t * phi.at(i, ny) -
            ((1 - s) * (1 - t) * phi.at(0, 0) + s * (1 - t) * phi.at(nx, 0) + (1 - s) * t * phi.at(0, ny) +
             s * t * phi.at(nx, ny));
      }
      u[dom.node(i, j)] = v;
    }
  return ScalarField(dom, std::move(u));
}

SolveResult solve_regularized_from(const ScalarField& start, const EnergySpec& spec, double a, const SolverConfig& cfg) {
  cfg.validate();
  const GridDomain& dom = start.domain();
  Problem prob(dom, spec, a);
  CholeskySolver chol;
  std::vector<double> u = start.values();
  double E = prob.energy(u);
  SolveResult res;
  res.a_final = a;
  res.energy_trace.push_back(E);
  const auto& dof = prob.dof();
  double best = INFINITY;
  int flat = 0;
  bool full_step = false;
  // round-off level of the residual, about eps (1 + |∇u + F|) / (a h^2)
  double wmax = 0.0;
  for (double w : horizontal_samples(start, spec)) wmax = std::max(wmax, std::abs(w));
  const double floor = 100.0 * 2.220446049250313e-16 * (1.0 + wmax) / (a * dom.h() * dom.h());
  for (int it = 0;; ++it) {
    const std::vector<double> g = prob.gradient(u);
    res.residual_norm = prob.residual(g);
    if (res.residual_norm <= cfg.newton_tol) {
      res.converged = true;
      break;
    }
    if (it >= cfg.max_newton_iters) {
      res.message = "Newton iteration limit reached";
      break;
    }
    // Near the round-off floor, full Newton steps that stop improving the
    // residual mean there is nothing left to gain. Damped steps far from the
    // solution may raise the residual legitimately.
    if (res.residual_norm < 0.9 * best || !full_step || res.residual_norm > floor) {
      best = std::min(best, res.residual_norm);
      flat = 0;
    } else if (++flat >= 5) {
      res.message = "residual stalled at round-off level " + std::to_string(res.residual_norm);
      break;
    }
    std::vector<double> rhs(prob.ndof());
    for (int n = 0; n < dom.num_nodes(); ++n)
      if (dof[n] >= 0) rhs[dof[n]] = -g[n];
    const auto K = prob.element_matrices(u);
    std::vector<double> d = cfg.linear_solver == LinearSolverKind::cholesky ? chol.solve(prob, K, rhs)
                                                                            : solve_cg(prob, K, rhs, cfg);
    double gd = -dot(rhs, d);
    if (!(gd < 0.0)) {  // not a descent direction: fall back to steepest descent
      d = rhs;
      gd = -dot(rhs, rhs);
    }
    double t = 1.0;
    bool accepted = false;
    std::vector<double> trial(u);
    for (int h = 0; h <= cfg.max_halvings; ++h) {
      for (int n = 0; n < dom.num_nodes(); ++n)
        if (dof[n] >= 0) trial[n] = u[n] + t * d[dof[n]];
      const double dE = prob.energy_change(u, trial);
      if (dE <= 1e-4 * t * gd) {
        accepted = true;
        break;
      }
      t *= cfg.backtrack;
    }
    if (!accepted) {
      res.message = "line search failed to decrease the energy";
      break;
    }
    full_step = t == 1.0;
    u.swap(trial);
    E = prob.energy(u);
    res.energy_trace.push_back(E);
    ++res.iterations;
  }
  res.u = ScalarField(dom, std::move(u));
  res.energy = energy_FH(res.u, EnergySpec{spec.preset, spec.F_custom, {}});
  StageRecord st;
  st.a = a;
  st.iterations = res.iterations;
  st.residual = res.residual_norm;
  st.regularized_energy = E;
  st.converged = res.converged;
  res.stages.push_back(st);
  return res;
}

SolveResult solve_regularized(const GridDomain& dom, const EnergySpec& spec, double a, const ScalarField& phi,
                              const SolverConfig& cfg) {
  if (!(phi.domain() == dom)) throw std::invalid_argument("boundary data lives on another grid");
  return solve_regularized_from(initial_guess(phi, cfg.initial_guess), spec, a, cfg);
}

SolveResult continuation_minimize(const GridDomain& dom, const EnergySpec& spec, const ScalarField& phi,
                                  const SolverConfig& cfg) {
  cfg.validate();
  if (!(phi.domain() == dom)) throw std::invalid_argument("boundary data lives on another grid");
  ScalarField u = initial_guess(phi, cfg.initial_guess);
  SolveResult out;
  for (std::size_t k = 0; k < cfg.a_schedule.size(); ++k) {
    SolveResult r = solve_regularized_from(u, spec, cfg.a_schedule[k], cfg);
    StageRecord st = r.stages.front();
    st.change = sup_distance(r.u, u);
    out.stages.push_back(st);
    out.iterations += r.iterations;
    out.energy_trace.insert(out.energy_trace.end(), r.energy_trace.begin(), r.energy_trace.end());
    out.residual_norm = r.residual_norm;
    out.a_final = r.a_final;
    out.converged = r.converged;
    u = r.u;
    if (!r.converged) {
      out.message = "stage " + std::to_string(k) + " (a = " + std::to_string(r.a_final) + "): " + r.message;
      break;
    }
    if (k > 0 && st.change <= cfg.continuation_stop) break;
  }
  out.u = u;
  out.energy = energy_FH(u, EnergySpec{spec.preset, spec.F_custom, {}});
  return out;
}

ComparisonReport comparison_check(const SolveResult& r1, const SolveResult& r2, const ScalarField& phi1,
                                  const ScalarField& phi2, const EnergySpec& spec, double tol) {
  ComparisonReport rep;
  rep.tol = tol;
  const GridDomain& dom = r1.u.domain();
  if (!(r2.u.domain() == dom) || !(phi1.domain() == dom) || !(phi2.domain() == dom))
    throw std::invalid_argument("comparison_check: fields live on different grids");
  const HypothesisReport hyp = hypothesis_checks(dom, spec);
  if (!hyp.div_F_star_positive) {
    rep.refused = true;
    rep.reason = "div F* is not positive (min " + std::to_string(hyp.min_div_F_star) +
                 "); the comparison bounds are not guaranteed";
    return rep;
  }
  for (int n = 0; n < dom.num_nodes(); ++n) {
    if (!dom.is_boundary(n)) continue;
    if (phi1[n] < phi2[n]) {
      rep.refused = true;
      rep.reason = "boundary data are not ordered (phi1 < phi2 at a boundary node)";
      return rep;
    }
    rep.boundary_gap = std::max(rep.boundary_gap, phi1[n] - phi2[n]);
  }
  rep.min_diff = INFINITY;
  rep.max_diff = -INFINITY;
  for (int n = 0; n < dom.num_nodes(); ++n) {
    const double d = r1.u[n] - r2.u[n];
    rep.min_diff = std::min(rep.min_diff, d);
    rep.max_diff = std::max(rep.max_diff, d);
  }
  rep.pass = rep.min_diff >= -tol && rep.max_diff <= rep.boundary_gap + tol;
  return rep;
}

EnergyBoundReport energy_bound_check(const SolveResult& r, const EnergySpec& spec, const ScalarField& phi) {
  const GridDomain& dom = r.u.domain();
  EnergyBoundReport rep;
  rep.lhs = energy_FH(r.u, EnergySpec{spec.preset, spec.F_custom, {}});
  rep.rhs = phi.boundary_sup() * dom.perimeter() + F_sup_norm(spec, dom) * dom.area();
  rep.slack = 10.0 * dom.h() * dom.perimeter();
  rep.strict = rep.lhs < rep.rhs;
  rep.pass = rep.lhs <= rep.rhs + rep.slack;
  return rep;
}

SubdomainComparisonReport subdomain_comparison_check(const SolveResult& v1, const SolveResult& v2, const EnergySpec& spec, double a,
                            const Rect& sub, double residual_tol) {
  const GridDomain& dom = v1.u.domain();
  if (!(v2.u.domain() == dom)) throw std::invalid_argument("subdomain_comparison_check: fields live on different grids");
  auto snap = [](double v, double lo, double h, int n) {
    return std::clamp(static_cast<int>(std::lround((v - lo) / h)), 0, n);
  };
  const int i0 = snap(sub.x0, dom.axes()[0].lo, dom.hx(), dom.nx()), i1 = snap(sub.x1, dom.axes()[0].lo, dom.hx(), dom.nx());
  const int j0 = snap(sub.y0, dom.axes()[1].lo, dom.hy(), dom.ny()), j1 = snap(sub.y1, dom.axes()[1].lo, dom.hy(), dom.ny());
  if (i1 - i0 < 1 || j1 - j0 < 1) throw std::invalid_argument("subdomain_comparison_check: subdomain covers no cells");

  SubdomainComparisonReport rep;
  Problem p(dom, spec, a);
  const auto g1 = p.gradient(v1.u.values()), g2 = p.gradient(v2.u.values());
  for (int j = j0 + 1; j < j1; ++j)
    for (int i = i0 + 1; i < i1; ++i) {
      const int n = dom.node(i, j);
      if (dom.is_boundary(n)) continue;
      rep.residual1 = std::max(rep.residual1, std::abs(g1[n]) / dom.cell_area());
      rep.residual2 = std::max(rep.residual2, std::abs(g2[n]) / dom.cell_area());
    }
  if (rep.residual1 > residual_tol || rep.residual2 > residual_tol)
    throw std::invalid_argument("subdomain_comparison_check: inputs are not solutions on the subdomain (residual " +
                                std::to_string(std::max(rep.residual1, rep.residual2)) + ")");

  const auto w1 = horizontal_samples(v1.u, spec), w2 = horizontal_samples(v2.u, spec);
  const double a2 = a * a;
  std::vector<double> terms;
  const int q = dom.samples_per_cell();
  for (int j = j0; j < j1; ++j)
    for (int i = i0; i < i1; ++i) {
      const int c = dom.cell(i, j);
      for (int k = 0; k < q; ++k) {
        const int s = c * q + k;
        const double e1 = std::sqrt(a2 + w1[2 * s] * w1[2 * s] + w1[2 * s + 1] * w1[2 * s + 1]);
        const double e2 = std::sqrt(a2 + w2[2 * s] * w2[2 * s] + w2[2 * s + 1] * w2[2 * s + 1]);
        terms.push_back((e1 - e2) * dom.sample_weight(s));
      }
    }
  rep.lhs = std::abs(pairwise_sum(terms));

  // trapezoid rule for the boundary integral of |v1 - v2|
  auto diff = [&](int i, int j) { return std::abs(v1.u.at(i, j) - v2.u.at(i, j)); };
  std::vector<double> edge;
  double gap = 0.0;
  for (int i = i0; i < i1; ++i) {
    edge.push_back(0.5 * (diff(i, j0) + diff(i + 1, j0)) * dom.hx());
    edge.push_back(0.5 * (diff(i, j1) + diff(i + 1, j1)) * dom.hx());
  }
  for (int j = j0; j < j1; ++j) {
    edge.push_back(0.5 * (diff(i0, j) + diff(i0, j + 1)) * dom.hy());
    edge.push_back(0.5 * (diff(i1, j) + diff(i1, j + 1)) * dom.hy());
  }
  for (int i = i0; i <= i1; ++i) gap = std::max({gap, diff(i, j0), diff(i, j1)});
  for (int j = j0; j <= j1; ++j) gap = std::max({gap, diff(i0, j), diff(i1, j)});
  rep.rhs = pairwise_sum(edge);
  const double perim = 2.0 * ((i1 - i0) * dom.hx() + (j1 - j0) * dom.hy());
  rep.slack = 10.0 * dom.h() * perim * gap;
  rep.pass = rep.lhs <= rep.rhs + rep.slack;
  return rep;
}

}  // namespace parea
