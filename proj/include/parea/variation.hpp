#pragma once

#include <array>
#include <vector>

#include "parea/functional.hpp"
#include "parea/measure.hpp"

namespace parea {

// Variation direction; boundary nodal values must be exactly zero.
class DirectionField {
 public:
  explicit DirectionField(ScalarField phi);
  const ScalarField& phi() const { return phi_; }

 private:
  ScalarField phi_;
};

// horizontal: measures of ∇u + F for the given EnergySpec; riemannian: graph area
// ∫√(1+|∇u|²) lifted as (∇u, -1) in one more dimension.
enum class GraphMode { horizontal, riemannian };

struct GraphLift {
  VectorMeasure mu;
  VectorMeasure nu;
  SingularSet singular;  // empty in riemannian mode
};

GraphLift lift_graph(const ScalarField& u, const EnergySpec& spec, const DirectionField& dir,
                     GraphMode mode = GraphMode::horizontal, double tol = 1.0);

double riemannian_area(const ScalarField& u);
// ∫ H φ with the cell-averaged rule used by energy_FH.
double h_pairing(const EnergySpec& spec, const ScalarField& phi);
// Energy of u + eps*phi in the given mode, H included.
double graph_energy(const ScalarField& u, const EnergySpec& spec, GraphMode mode);

VariationReport minimizer_first_variation(const ScalarField& u, const EnergySpec& spec, const DirectionField& dir,
                                          double tol = 1.0, GraphMode mode = GraphMode::horizontal);

double second_variation_graph(const ScalarField& u, const EnergySpec& spec, const DirectionField& dir,
                              GraphMode mode = GraphMode::horizontal, double tol = 1.0);

// Optimality tolerance 1e-4 (1 + F(0)).
double optimality_tol(const VariationReport& r);

struct FdRow {
  double h = 0.0;
  double q_plus = 0.0, q_minus = 0.0, q_second = 0.0;
  double err_plus = 0.0, err_minus = 0.0, err_second = 0.0;
};

struct FdReport {
  VariationReport analytic;
  std::vector<FdRow> rows;
  std::vector<double> order_plus, order_minus, order_second;  // between consecutive rows
};

// Difference quotients of eps -> energy(u + eps*phi) against the closed forms.
// tol = 0 keeps only exactly vanishing cells singular, which is what makes the
// lifted energy coincide with energy_FH along the line.
FdReport fd_validate(const ScalarField& u, const EnergySpec& spec, const DirectionField& dir,
                     const std::vector<double>& h_list, GraphMode mode = GraphMode::horizontal, double tol = 0.0);

struct CurveSegment {
  std::array<double, 2> point{};  // midpoint between consecutive chain points
  std::array<double, 2> tau{};
  std::array<double, 2> nu_plus{}, nu_minus{};
  std::array<double, 2> e1_plus{}, e1_minus{};
  double residual = 0.0;           // |e1+ . tau - e1- . tau|
  double antipodal_defect = 0.0;   // |nu+ + nu-|
  bool interior = true;            // farther than the fit window from the boundary
};

struct SingularCurve {
  std::vector<int> cells;  // singular cells, ordered along the chain
  std::vector<std::array<double, 2>> chain;  // one point per slice
  std::vector<CurveSegment> segments;
  bool low_confidence = false;
  double residual = 0.0;           // max over interior segments
  double boundary_residual = 0.0;  // max over the rest
};

std::vector<SingularCurve> angle_condition(const ScalarField& u, const EnergySpec& spec, double tol = 1.0);

}  // namespace parea
