#pragma once

#include <string>
#include <vector>

#include "parea/functional.hpp"
#include "parea/grid.hpp"

namespace parea {

enum class LinearSolverKind { cg, cholesky };
enum class InitialGuess { coons, zero_interior, from_phi };

struct SolverConfig {
  std::vector<double> a_schedule = default_schedule();
  double newton_tol = 1e-10;
  int max_newton_iters = 50;
  double backtrack = 0.5;
  int max_halvings = 30;
  double continuation_stop = 1e-6;
  LinearSolverKind linear_solver = LinearSolverKind::cholesky;
  double cg_tol = 1e-12;
  int cg_max_iters = 20000;
  InitialGuess initial_guess = InitialGuess::coons;

  static std::vector<double> default_schedule();  // 2^-k, k = 0..12
  void validate() const;
};

struct StageRecord {
  double a = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double regularized_energy = 0.0;
  double change = 0.0;  // sup-norm distance to the previous stage
  bool converged = false;
};

struct SolveResult {
  ScalarField u;
  double residual_norm = 0.0;
  double a_final = 0.0;
  int iterations = 0;
  double energy = 0.0;  // F_0 energy, H = 0
  bool converged = false;
  std::vector<StageRecord> stages;
  std::vector<double> energy_trace;  // regularized energy after each accepted step
  std::string message;
};

double regularized_energy(const ScalarField& u, const EnergySpec& spec, double a);
// max over interior nodes of |discrete div N_a(u) - H| (gradient of the
// regularized energy divided by the cell area)
double pde_residual(const ScalarField& u, const EnergySpec& spec, double a);

ScalarField initial_guess(const ScalarField& phi, InitialGuess kind);

SolveResult solve_regularized(const GridDomain& dom, const EnergySpec& spec, double a, const ScalarField& phi,
                              const SolverConfig& cfg = {});
// Newton from a given start; boundary values of `start` are kept.
SolveResult solve_regularized_from(const ScalarField& start, const EnergySpec& spec, double a,
                                   const SolverConfig& cfg = {});
SolveResult continuation_minimize(const GridDomain& dom, const EnergySpec& spec, const ScalarField& phi,
                                  const SolverConfig& cfg = {});

struct ComparisonReport {
  bool refused = false;
  std::string reason;
  double min_diff = 0.0;
  double max_diff = 0.0;
  double boundary_gap = 0.0;  // ||phi1 - phi2|| over boundary nodes
  double tol = 1e-6;
  bool pass = false;
};

ComparisonReport comparison_check(const SolveResult& r1, const SolveResult& r2, const ScalarField& phi1,
                                  const ScalarField& phi2, const EnergySpec& spec, double tol = 1e-6);

struct EnergyBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool strict = false;
  bool pass = false;
};

EnergyBoundReport energy_bound_check(const SolveResult& r, const EnergySpec& spec, const ScalarField& phi);

struct Rect {
  double x0, x1, y0, y1;
};

struct SubdomainComparisonReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double residual1 = 0.0;
  double residual2 = 0.0;
  bool pass = false;
};

// Subdomain edges are snapped to the nearest grid lines.
SubdomainComparisonReport subdomain_comparison_check(const SolveResult& v1, const SolveResult& v2, const EnergySpec& spec, double a,
                            const Rect& subdomain, double residual_tol = 1e-6);

}  // namespace parea
