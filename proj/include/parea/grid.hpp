#pragma once

#include <array>
#include <functional>
#include <vector>

#include "parea/numerics.hpp"

namespace parea {

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  int cells = 2;
  double spacing() const { return (hi - lo) / cells; }
  bool operator==(const Axis&) const = default;
};

// Rectangular grid with nodal unknowns. Fields are bilinear on each cell and
// integrals use a tensor Gauss-Legendre rule with `quadrature_order` points per
// axis ("samples"). The data model keeps a list of axes, but all operators are
// implemented for the planar case only.
class GridDomain {
 public:
  GridDomain() : GridDomain({Axis{}, Axis{}}) {}
  explicit GridDomain(std::vector<Axis> axes, int quadrature_order = 4);
  static GridDomain rectangle(double x0, double x1, int nx, double y0, double y1, int ny, int quadrature_order = 4);
  static GridDomain square(double lo, double hi, int n, int quadrature_order = 4) {
    return rectangle(lo, hi, n, lo, hi, n, quadrature_order);
  }

  int dimension() const { return static_cast<int>(axes_.size()); }
  const std::vector<Axis>& axes() const { return axes_; }
  void require_planar() const;

  int nx() const { return axes_[0].cells; }
  int ny() const { return axes_[1].cells; }
  double hx() const { return axes_[0].spacing(); }
  double hy() const { return axes_[1].spacing(); }
  double h() const;  // smallest spacing
  double cell_area() const { return hx() * hy(); }

  int num_nodes() const { return (nx() + 1) * (ny() + 1); }
  int num_cells() const { return nx() * ny(); }
  int node(int i, int j) const { return i + (nx() + 1) * j; }
  int cell(int i, int j) const { return i + nx() * j; }
  int node_i(int n) const { return n % (nx() + 1); }
  int node_j(int n) const { return n / (nx() + 1); }
  int cell_i(int c) const { return c % nx(); }
  int cell_j(int c) const { return c / nx(); }
  double x(int i) const { return i == nx() ? axes_[0].hi : axes_[0].lo + i * hx(); }
  double y(int j) const { return j == ny() ? axes_[1].hi : axes_[1].lo + j * hy(); }
  double cell_x(int i) const { return axes_[0].lo + (i + 0.5) * hx(); }
  double cell_y(int j) const { return axes_[1].lo + (j + 0.5) * hy(); }
  std::array<int, 4> cell_nodes(int c) const;  // (i,j), (i+1,j), (i,j+1), (i+1,j+1)

  bool is_boundary(int n) const { return boundary_[n] != 0; }
  const std::vector<unsigned char>& boundary_mask() const { return boundary_; }

  double area() const;
  double perimeter() const;
  double diameter() const;

  int quadrature_order() const { return order_; }
  int samples_per_cell() const { return order_ * order_; }
  int num_samples() const { return num_cells() * samples_per_cell(); }
  int cell_of_sample(int s) const { return s / samples_per_cell(); }

  // Local sample k of a cell: reference coordinates (xi, eta) in [0,1]^2 and
  // weight relative to the cell area.
  double sample_xi(int k) const { return rule_.nodes[k % order_]; }
  double sample_eta(int k) const { return rule_.nodes[k / order_]; }
  double sample_rel_weight(int k) const { return rule_.weights[k % order_] * rule_.weights[k / order_]; }
  std::array<double, 2> sample_point(int s) const;
  double sample_weight(int s) const { return cell_area() * sample_rel_weight(s % samples_per_cell()); }
  std::vector<double> sample_weights() const;

  bool operator==(const GridDomain& o) const { return axes_ == o.axes_ && order_ == o.order_; }

 private:
  std::vector<Axis> axes_;
  int order_;
  GaussRule rule_;
  std::vector<unsigned char> boundary_;
};

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(GridDomain dom, std::vector<double> values);
  static ScalarField zeros(const GridDomain& dom);
  static ScalarField sample(const GridDomain& dom, const std::function<double(double, double)>& f);

  const GridDomain& domain() const { return dom_; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }
  double operator[](int n) const { return v_[n]; }
  double& operator[](int n) { return v_[n]; }
  double at(int i, int j) const { return v_[dom_.node(i, j)]; }

  // Bilinear interpolant and its gradient at a sample.
  double sample_value(int s) const;
  std::array<double, 2> sample_gradient(int s) const;
  // Same quantities at reference point (xi, eta) of cell c.
  double value_in_cell(int c, double xi, double eta) const;
  std::array<double, 2> gradient_in_cell(int c, double xi, double eta) const;

  double boundary_sup() const;  // max |value| over boundary nodes
  double sup() const;

 private:
  GridDomain dom_;
  std::vector<double> v_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
double sup_distance(const ScalarField& a, const ScalarField& b);

class VectorField {
 public:
  VectorField() = default;
  VectorField(GridDomain dom, int d, std::vector<double> values);

  const GridDomain& domain() const { return dom_; }
  int dim() const { return d_; }
  const std::vector<double>& values() const { return v_; }
  const double* at(int c) const { return v_.data() + static_cast<std::size_t>(c) * d_; }

 private:
  GridDomain dom_;
  int d_ = 2;
  std::vector<double> v_;
};

}  // namespace parea
