#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "parea/grid.hpp"
#include "parea/measure.hpp"

namespace parea {

enum class FieldPreset { zero, minus_X_star, custom };

// The pair (F, H) of F_H(u) = ∫ |∇u + F| + H u.
struct EnergySpec {
  FieldPreset preset = FieldPreset::zero;
  std::optional<VectorField> F_custom;  // constant on each cell
  std::vector<double> H;                // per cell; empty means H = 0

  static EnergySpec least_gradient() { return {}; }
  static EnergySpec p_area() { return {FieldPreset::minus_X_star, std::nullopt, {}}; }
  static EnergySpec custom(VectorField F);
  EnergySpec with_H(std::vector<double> h) const;

  std::array<double, 2> F_at(double x, double y, int cell) const;
  double H_at(int cell) const { return H.empty() ? 0.0 : H[cell]; }
  bool has_H() const { return !H.empty(); }
  void check(const GridDomain& dom) const;
  std::string preset_name() const;
};

// sup over the domain of |F|.
double F_sup_norm(const EnergySpec& spec, const GridDomain& dom);

// Cell-centered gradient: average of the forward differences over the cell.
VectorField gradient(const ScalarField& u);

// ∇u + F at every quadrature sample, interleaved (x, y).
std::vector<double> horizontal_samples(const ScalarField& u, const EnergySpec& spec);
// ∇u + F at a cell center.
std::array<double, 2> horizontal_at_center(const ScalarField& u, const EnergySpec& spec, int cell);

double energy_FH(const ScalarField& u, const EnergySpec& spec);

struct SingularSet {
  std::vector<int> cells;
  std::vector<unsigned char> mask;  // per cell
  double threshold = 0.0;
  double measure = 0.0;  // count * cell area
};

// Cells with |∇u + F| at the center <= tol * 2h * max(median, h).
SingularSet singular_set(const ScalarField& u, const EnergySpec& spec, double tol = 1.0);

struct LiftedMeasure {
  VectorMeasure mu;        // (∇u + F) per sample, zero on singular cells
  VectorMeasure tmpl;      // same cell complex, zero density
  SingularSet singular;
};

LiftedMeasure field_to_measure(const ScalarField& u, const EnergySpec& spec, double tol = 1.0);

// (∇phi) per sample on the complex of `tmpl`.
VectorMeasure direction_measure(const ScalarField& phi, const VectorMeasure& tmpl);

struct HypothesisReport {
  bool compatibility_checked = false;
  double compatibility_residual = 0.0;  // max |∂_K F_I - ∂_I f_K|
  double min_div_F_star = 0.0;
  bool div_F_star_positive = false;
  std::string domain_convexity;
};

HypothesisReport hypothesis_checks(const GridDomain& dom, const EnergySpec& spec,
                                   const std::vector<ScalarField>& f_list = {});

}  // namespace parea
