#include "parea/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace parea {

GridDomain::GridDomain(std::vector<Axis> axes, int quadrature_order)
    : axes_(std::move(axes)), order_(quadrature_order), rule_(gauss_legendre01(quadrature_order)) {
  if (axes_.empty()) throw std::invalid_argument("GridDomain: no axes");
  for (const Axis& a : axes_) {
    if (a.cells < 2) throw std::invalid_argument("GridDomain: need at least 2 cells per axis");
    if (!(a.hi > a.lo) || !std::isfinite(a.lo) || !std::isfinite(a.hi))
      throw std::invalid_argument("GridDomain: extents must satisfy lo < hi");
  }
  if (dimension() == 2) {
    boundary_.assign(num_nodes(), 0);
    for (int j = 0; j <= ny(); ++j)
      for (int i = 0; i <= nx(); ++i)
        if (i == 0 || j == 0 || i == nx() || j == ny()) boundary_[node(i, j)] = 1;
  }
}

GridDomain GridDomain::rectangle(double x0, double x1, int nx, double y0, double y1, int ny, int quadrature_order) {
  return GridDomain({Axis{x0, x1, nx}, Axis{y0, y1, ny}}, quadrature_order);
}

void GridDomain::require_planar() const {
  if (dimension() != 2) throw std::invalid_argument("only planar (m = 2) grids are supported by this operation");
}

double GridDomain::h() const {
  double h = axes_[0].spacing();
  for (const Axis& a : axes_) h = std::min(h, a.spacing());
  return h;
}

std::array<int, 4> GridDomain::cell_nodes(int c) const {
  const int i = cell_i(c), j = cell_j(c);
  return {node(i, j), node(i + 1, j), node(i, j + 1), node(i + 1, j + 1)};
}

double GridDomain::area() const {
  double a = 1.0;
  for (const Axis& ax : axes_) a *= ax.hi - ax.lo;
  return a;
}

double GridDomain::perimeter() const {
  require_planar();
  return 2.0 * ((axes_[0].hi - axes_[0].lo) + (axes_[1].hi - axes_[1].lo));
}

double GridDomain::diameter() const {
  double s = 0.0;
  for (const Axis& ax : axes_) s += (ax.hi - ax.lo) * (ax.hi - ax.lo);
  return std::sqrt(s);
}

std::array<double, 2> GridDomain::sample_point(int s) const {
  const int c = cell_of_sample(s), k = s % samples_per_cell();
  return {x(cell_i(c)) + sample_xi(k) * hx(), y(cell_j(c)) + sample_eta(k) * hy()};
}

std::vector<double> GridDomain::sample_weights() const {
  std::vector<double> w(num_samples());
  for (int s = 0; s < num_samples(); ++s) w[s] = sample_weight(s);
  return w;
}

ScalarField::ScalarField(GridDomain dom, std::vector<double> values) : dom_(std::move(dom)), v_(std::move(values)) {
  dom_.require_planar();
  if (static_cast<int>(v_.size()) != dom_.num_nodes())
    throw std::invalid_argument("ScalarField: value count does not match node count");
  for (double x : v_)
    if (!std::isfinite(x)) throw std::invalid_argument("ScalarField: non-finite value");
}

ScalarField ScalarField::zeros(const GridDomain& dom) { return ScalarField(dom, std::vector<double>(dom.num_nodes(), 0.0)); }

ScalarField ScalarField::sample(const GridDomain& dom, const std::function<double(double, double)>& f) {
  dom.require_planar();
  std::vector<double> v(dom.num_nodes());
  for (int j = 0; j <= dom.ny(); ++j)
    for (int i = 0; i <= dom.nx(); ++i) v[dom.node(i, j)] = f(dom.x(i), dom.y(j));
  return ScalarField(dom, std::move(v));
}

double ScalarField::value_in_cell(int c, double xi, double eta) const {
  const auto n = dom_.cell_nodes(c);
  return (1 - xi) * (1 - eta) * v_[n[0]] + xi * (1 - eta) * v_[n[1]] + (1 - xi) * eta * v_[n[2]] + xi * eta * v_[n[3]];
}

std::array<double, 2> ScalarField::gradient_in_cell(int c, double xi, double eta) const {
  const auto n = dom_.cell_nodes(c);
  const double u00 = v_[n[0]], u10 = v_[n[1]], u01 = v_[n[2]], u11 = v_[n[3]];
  return {((1 - eta) * (u10 - u00) + eta * (u11 - u01)) / dom_.hx(),
          ((1 - xi) * (u01 - u00) + xi * (u11 - u10)) / dom_.hy()};
}

double ScalarField::sample_value(int s) const {
  const int k = s % dom_.samples_per_cell();
  return value_in_cell(dom_.cell_of_sample(s), dom_.sample_xi(k), dom_.sample_eta(k));
}

std::array<double, 2> ScalarField::sample_gradient(int s) const {
  const int k = s % dom_.samples_per_cell();
  return gradient_in_cell(dom_.cell_of_sample(s), dom_.sample_xi(k), dom_.sample_eta(k));
}

double ScalarField::boundary_sup() const {
  double m = 0.0;
  for (int n = 0; n < dom_.num_nodes(); ++n)
    if (dom_.is_boundary(n)) m = std::max(m, std::abs(v_[n]));
  return m;
}

double ScalarField::sup() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

namespace {
void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.domain() == b.domain())) throw std::invalid_argument("fields live on different grids");
}
}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  std::vector<double> v(a.values());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += b.values()[k];
  return ScalarField(a.domain(), std::move(v));
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  std::vector<double> v(a.values());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] -= b.values()[k];
  return ScalarField(a.domain(), std::move(v));
}

ScalarField operator*(double s, const ScalarField& a) {
  std::vector<double> v(a.values());
  for (double& x : v) x *= s;
  return ScalarField(a.domain(), std::move(v));
}

double sup_distance(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  double m = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
  return m;
}

VectorField::VectorField(GridDomain dom, int d, std::vector<double> values)
    : dom_(std::move(dom)), d_(d), v_(std::move(values)) {
  dom_.require_planar();
  if (d_ < 1 || static_cast<int>(v_.size()) != dom_.num_cells() * d_)
    throw std::invalid_argument("VectorField: value count does not match cells*d");
  for (double x : v_)
    if (!std::isfinite(x)) throw std::invalid_argument("VectorField: non-finite value");
}

}  // namespace parea
