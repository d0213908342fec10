#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "parea/functional.hpp"
#include "parea/grid.hpp"

namespace parea {

// Coframe omega^1..omega^{n+1} described by its Gram matrix g^{ij} = <omega^i, omega^j>.
struct Coframe {
  Eigen::MatrixXd gram;

  explicit Coframe(Eigen::MatrixXd g);
  static Coframe euclidean(int n_plus_1);
  static Coframe heisenberg();  // (dx, dy, Theta), Theta null
  static Coframe intrinsic();   // (d eta, Theta, d tau) for intrinsic graphs
  int size() const { return static_cast<int>(gram.rows()); }
  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
};

// Values v_i(phi) of the defining function on the frame dual to the coframe.
struct DefiningData {
  Eigen::VectorXd v;
  explicit DefiningData(Eigen::VectorXd values);
};

// Sparse exterior form in a fixed basis: sorted index tuple -> coefficient.
class Form {
 public:
  Form(int dim, int degree) : dim_(dim), degree_(degree) {}
  static Form one_form(const Eigen::VectorXd& coeffs);
  static Form volume(int dim);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::map<std::vector<int>, double>& terms() const { return terms_; }
  double coeff(const std::vector<int>& idx) const;
  // Adds c * e^{idx[0]} ^ ... in any index order; sorts and applies the sign.
  void add(std::vector<int> idx, double c);

 private:
  int dim_, degree_;
  std::map<std::vector<int>, double> terms_;
};

Form wedge(const Form& a, const Form& b);

// omega ⌋ dv: coefficients c_k of (-1)^{k-1} omega^1 ^ .. ^ (omega^k omitted) ^ .. omega^{n+1}.
Eigen::VectorXd contract_form(const Eigen::VectorXd& lambda, const Coframe& frame);
// The same n-form expanded in the Form basis.
Form contraction_as_form(const Eigen::VectorXd& c);

struct AreaElement {
  double magnitude = 0.0;  // |coefficient|
  int sign = 1;            // orientation
  double value() const { return sign * magnitude; }
};

// Coefficient (-1)^n |dphi| / v_{n+1} of omega^1 ^ .. ^ omega^n.
AreaElement area_element_coeff(const Coframe& frame, const DefiningData& dd);

enum class GraphKind { euclidean, heisenberg, intrinsic };
GraphKind parse_graph_kind(const std::string& s);
std::string graph_kind_name(GraphKind k);

// Pointwise data: position and the value/gradient of the graph function.
// Intrinsic graphs read (x, y) as (eta, tau).
struct Jet {
  double x = 0.0, y = 0.0;
  double value = 0.0;
  std::vector<double> grad;
};

// Frame and defining data used for a graph of the given kind.
std::pair<Coframe, DefiningData> graph_frame(GraphKind kind, const Jet& jet);
// Closed-form density, returned with the orientation of area_element_coeff.
AreaElement graph_area_density(GraphKind kind, const Jet& jet);

// Cell-centred scalar with a validity mask.
struct CellField {
  GridDomain dom;
  std::vector<double> values;
  std::vector<unsigned char> valid;
  double sup_valid() const;
};

CellField area_density_field(const ScalarField& u, GraphKind kind);

// Mean curvature of a Euclidean graph assembled from a moving frame:
// h_jj = -<D_{e_j} nu, e_j> with nu the upward normal, summed over an
// orthonormal tangent frame. Normal derivatives come from one-sided differences
// of cell normals, so the scheme is first order.
CellField mean_curvature_h22_euclidean(const ScalarField& u);
// div(∇u/W) in flux form from cell gradients (second order); the oracle.
CellField mean_curvature_divergence(const ScalarField& u);
// div((∇u+F)/|∇u+F|) as an edge flux balance; singular and boundary cells masked.
CellField p_mean_curvature(const ScalarField& u, const EnergySpec& spec = EnergySpec::p_area(), double tol = 1.0);

}  // namespace parea
