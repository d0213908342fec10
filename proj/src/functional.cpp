#include "parea/functional.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parea/numerics.hpp"

namespace parea {

EnergySpec EnergySpec::custom(VectorField F) {
  if (F.dim() != 2) throw std::invalid_argument("custom F must have one component per axis");
  EnergySpec s;
  s.preset = FieldPreset::custom;
  s.F_custom = std::move(F);
  return s;
}

EnergySpec EnergySpec::with_H(std::vector<double> h) const {
  EnergySpec s = *this;
  s.H = std::move(h);
  return s;
}

std::array<double, 2> EnergySpec::F_at(double x, double y, int cell) const {
  switch (preset) {
    case FieldPreset::zero:
      return {0.0, 0.0};
    case FieldPreset::minus_X_star:
      // X* = (y, -x) for coordinates (x, y)
      return {-y, x};
    case FieldPreset::custom:
      return {F_custom->at(cell)[0], F_custom->at(cell)[1]};
  }
  return {0.0, 0.0};
}

void EnergySpec::check(const GridDomain& dom) const {
  dom.require_planar();
  if (preset == FieldPreset::minus_X_star && dom.dimension() % 2 != 0)
    throw std::invalid_argument("minus_X_star needs an even-dimensional domain");
  if (preset == FieldPreset::custom) {
    if (!F_custom) throw std::invalid_argument("custom preset without a field");
    if (!(F_custom->domain().axes() == dom.axes())) throw std::invalid_argument("custom F lives on another grid");
  }
  if (!H.empty()) {
    if (static_cast<int>(H.size()) != dom.num_cells()) throw std::invalid_argument("H must have one value per cell");
    for (double h : H)
      if (!std::isfinite(h)) throw std::invalid_argument("H must be finite");
  }
}

std::string EnergySpec::preset_name() const {
  switch (preset) {
    case FieldPreset::zero: return "zero";
    case FieldPreset::minus_X_star: return "minus_X_star";
    case FieldPreset::custom: return "custom";
  }
  return "?";
}

double F_sup_norm(const EnergySpec& spec, const GridDomain& dom) {
  switch (spec.preset) {
    case FieldPreset::zero:
      return 0.0;
    case FieldPreset::minus_X_star: {
      // |F| = |(x, y)| is convex, so its sup sits at a corner
      double m = 0.0;
      for (double x : {dom.axes()[0].lo, dom.axes()[0].hi})
        for (double y : {dom.axes()[1].lo, dom.axes()[1].hi}) m = std::max(m, std::hypot(x, y));
      return m;
    }
    case FieldPreset::custom: {
      double m = 0.0;
      for (int c = 0; c < dom.num_cells(); ++c) m = std::max(m, std::hypot(spec.F_custom->at(c)[0], spec.F_custom->at(c)[1]));
      return m;
    }
  }
  return 0.0;
}

VectorField gradient(const ScalarField& u) {
  const GridDomain& dom = u.domain();
  std::vector<double> g(2 * dom.num_cells());
  for (int c = 0; c < dom.num_cells(); ++c) {
    const auto n = dom.cell_nodes(c);
    const double u00 = u[n[0]], u10 = u[n[1]], u01 = u[n[2]], u11 = u[n[3]];
    g[2 * c] = 0.5 * ((u10 - u00) + (u11 - u01)) / dom.hx();
    g[2 * c + 1] = 0.5 * ((u01 - u00) + (u11 - u10)) / dom.hy();
  }
  return VectorField(dom, 2, std::move(g));
}

std::vector<double> horizontal_samples(const ScalarField& u, const EnergySpec& spec) {
  const GridDomain& dom = u.domain();
  spec.check(dom);
  std::vector<double> w(2 * dom.num_samples());
  for (int s = 0; s < dom.num_samples(); ++s) {
    const auto g = u.sample_gradient(s);
    const auto p = dom.sample_point(s);
    const auto F = spec.F_at(p[0], p[1], dom.cell_of_sample(s));
    w[2 * s] = g[0] + F[0];
    w[2 * s + 1] = g[1] + F[1];
  }
  return w;
}

std::array<double, 2> horizontal_at_center(const ScalarField& u, const EnergySpec& spec, int c) {
  const GridDomain& dom = u.domain();
  const auto g = u.gradient_in_cell(c, 0.5, 0.5);
  const auto F = spec.F_at(dom.cell_x(dom.cell_i(c)), dom.cell_y(dom.cell_j(c)), c);
  return {g[0] + F[0], g[1] + F[1]};
}

double energy_FH(const ScalarField& u, const EnergySpec& spec) {
  const GridDomain& dom = u.domain();
  const std::vector<double> w = horizontal_samples(u, spec);
  std::vector<double> terms(dom.num_samples());
  for (int s = 0; s < dom.num_samples(); ++s) terms[s] = norm(std::span<const double>(w.data() + 2 * s, 2)) * dom.sample_weight(s);
  double e = pairwise_sum(terms);
  if (spec.has_H()) {
    std::vector<double> hu(dom.num_cells());
    for (int c = 0; c < dom.num_cells(); ++c) {
      const auto n = dom.cell_nodes(c);
      const double ubar = 0.25 * (u[n[0]] + u[n[1]] + u[n[2]] + u[n[3]]);
      hu[c] = spec.H_at(c) * ubar * dom.cell_area();
    }
    e += pairwise_sum(hu);
  }
  return e;
}

SingularSet singular_set(const ScalarField& u, const EnergySpec& spec, double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("singular_set: tol must be >= 0");
  const GridDomain& dom = u.domain();
  spec.check(dom);
  std::vector<double> mag(dom.num_cells());
  for (int c = 0; c < dom.num_cells(); ++c) {
    const auto w = horizontal_at_center(u, spec, c);
    mag[c] = std::hypot(w[0], w[1]);
  }
  std::vector<double> sorted = mag;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  const double h = dom.h();
  SingularSet out;
  out.threshold = tol * 2.0 * h * std::max(median, h);
  out.mask.assign(dom.num_cells(), 0);
  for (int c = 0; c < dom.num_cells(); ++c) {
    if (mag[c] <= out.threshold) {
      out.mask[c] = 1;
      out.cells.push_back(c);
    }
  }
  out.measure = static_cast<double>(out.cells.size()) * dom.cell_area();
  return out;
}

LiftedMeasure field_to_measure(const ScalarField& u, const EnergySpec& spec, double tol) {
  const GridDomain& dom = u.domain();
  SingularSet sing = singular_set(u, spec, tol);
  std::vector<double> w = horizontal_samples(u, spec);
  for (int s = 0; s < dom.num_samples(); ++s) {
    if (sing.mask[dom.cell_of_sample(s)]) {
      w[2 * s] = 0.0;
      w[2 * s + 1] = 0.0;
    }
  }
  std::vector<double> weights = dom.sample_weights();
  VectorMeasure tmpl(2, weights, std::vector<double>(w.size(), 0.0));
  VectorMeasure mu(2, std::move(weights), std::move(w));
  return {std::move(mu), std::move(tmpl), std::move(sing)};
}

VectorMeasure direction_measure(const ScalarField& phi, const VectorMeasure& tmpl) {
  const GridDomain& dom = phi.domain();
  if (static_cast<int>(tmpl.num_cells()) != dom.num_samples() || tmpl.dim() != 2)
    throw std::invalid_argument("direction_measure: template does not match the grid samples");
  std::vector<double> g(2 * dom.num_samples());
  for (int s = 0; s < dom.num_samples(); ++s) {
    const auto d = phi.sample_gradient(s);
    g[2 * s] = d[0];
    g[2 * s + 1] = d[1];
  }
  return VectorMeasure(2, tmpl.weights(), std::move(g));
}

namespace {

// DF at every cell center as (dF1/dx, dF1/dy, dF2/dx, dF2/dy).
std::vector<std::array<double, 4>> field_jacobian(const GridDomain& dom, const EnergySpec& spec) {
  std::vector<std::array<double, 4>> J(dom.num_cells());
  if (spec.preset != FieldPreset::custom) {
    // pointwise field: averaged differences of corner values (exact on affine F)
    for (int c = 0; c < dom.num_cells(); ++c) {
      const int i = dom.cell_i(c), j = dom.cell_j(c);
      const auto f00 = spec.F_at(dom.x(i), dom.y(j), c), f10 = spec.F_at(dom.x(i + 1), dom.y(j), c);
      const auto f01 = spec.F_at(dom.x(i), dom.y(j + 1), c), f11 = spec.F_at(dom.x(i + 1), dom.y(j + 1), c);
      for (int k = 0; k < 2; ++k) {
        J[c][2 * k] = 0.5 * ((f10[k] - f00[k]) + (f11[k] - f01[k])) / dom.hx();
        J[c][2 * k + 1] = 0.5 * ((f01[k] - f00[k]) + (f11[k] - f10[k])) / dom.hy();
      }
    }
    return J;
  }
  // cell field: central differences between cell centers, one-sided at the rim
  const VectorField& F = *spec.F_custom;
  for (int c = 0; c < dom.num_cells(); ++c) {
    const int i = dom.cell_i(c), j = dom.cell_j(c);
    const int il = std::max(i - 1, 0), ir = std::min(i + 1, dom.nx() - 1);
    const int jl = std::max(j - 1, 0), jr = std::min(j + 1, dom.ny() - 1);
    for (int k = 0; k < 2; ++k) {
      J[c][2 * k] = (F.at(dom.cell(ir, j))[k] - F.at(dom.cell(il, j))[k]) / ((ir - il) * dom.hx());
      J[c][2 * k + 1] = (F.at(dom.cell(i, jr))[k] - F.at(dom.cell(i, jl))[k]) / ((jr - jl) * dom.hy());
    }
  }
  return J;
}

}  // namespace

HypothesisReport hypothesis_checks(const GridDomain& dom, const EnergySpec& spec, const std::vector<ScalarField>& f_list) {
  spec.check(dom);
  if (!f_list.empty() && static_cast<int>(f_list.size()) != dom.dimension())
    throw std::invalid_argument("hypothesis_checks: need one candidate f_K per axis");
  const auto J = field_jacobian(dom, spec);
  HypothesisReport r;
  r.min_div_F_star = INFINITY;
  for (int c = 0; c < dom.num_cells(); ++c) {
    // F* = (F2, -F1), div F* = dF2/dx - dF1/dy
    r.min_div_F_star = std::min(r.min_div_F_star, J[c][2] - J[c][1]);
  }
  r.div_F_star_positive = r.min_div_F_star > 0.0;
  if (!f_list.empty()) {
    r.compatibility_checked = true;
    std::vector<VectorField> df;
    for (const ScalarField& f : f_list) df.push_back(gradient(f));
    for (int c = 0; c < dom.num_cells(); ++c)
      for (int I = 0; I < 2; ++I)
        for (int K = 0; K < 2; ++K) {
          // ∂_K F_I versus ∂_I f_K
          const double lhs = J[c][2 * I + K];
          const double rhs = df[K].at(c)[I];
          r.compatibility_residual = std::max(r.compatibility_residual, std::abs(lhs - rhs));
        }
  }
  r.domain_convexity =
      "rectangle: flat sides are not parabolically convex; the comparison bounds do not depend on it";
  return r;
}

}  // namespace parea
