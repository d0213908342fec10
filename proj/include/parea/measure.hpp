#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace parea {

struct Atom {
  std::int64_t site = 0;
  std::vector<double> mass;
};

// Discrete R^d-valued measure: cell densities against positive weights plus
// atoms on a separate site index space.
class VectorMeasure {
 public:
  VectorMeasure() = default;
  VectorMeasure(int d, std::vector<double> cell_weights, std::vector<double> densities,
                std::vector<Atom> atoms = {});

  static VectorMeasure zeros_like(const VectorMeasure& m);

  int dim() const { return d_; }
  std::size_t num_cells() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& densities() const { return density_; }
  std::vector<double>& densities() { return density_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  const double* density(std::size_t cell) const { return density_.data() + cell * d_; }
  double* density(std::size_t cell) { return density_.data() + cell * d_; }
  const Atom* find_atom(std::int64_t site) const;

  void add_atom(std::int64_t site, std::vector<double> mass);

 private:
  void validate() const;

  int d_ = 1;
  std::vector<double> weights_;
  std::vector<double> density_;
  std::vector<Atom> atoms_;  // sorted by site
};

// Throws std::invalid_argument unless a and b share d and the cell complex.
void require_compatible(const VectorMeasure& a, const VectorMeasure& b);

// a + s*b, atoms merged by site.
VectorMeasure combine(const VectorMeasure& a, double s, const VectorMeasure& b);

double total_variation(const VectorMeasure& m);

struct SiteDecomposition {
  bool support = false;  // |dmu_eps| > 0 here
  double tv = 0.0;       // |dmu_eps| mass at this site
  std::vector<double> N;
  std::vector<double> A;
};

struct RNDecomposition {
  int d = 1;
  std::vector<SiteDecomposition> cells;
  std::vector<std::pair<std::int64_t, SiteDecomposition>> atoms;  // union of sites, sorted
  VectorMeasure nu_s;
};

RNDecomposition decompose(const VectorMeasure& nu, const VectorMeasure& mu_eps);

// A*|dmu_eps| + nu_s, i.e. the measure the decomposition claims nu to be.
VectorMeasure recombine(const RNDecomposition& rn, const VectorMeasure& like);

double line_energy(const VectorMeasure& mu, const VectorMeasure& nu, double eps);

struct OneSided {
  double minus = 0.0;
  double plus = 0.0;
};
OneSided first_variation_pm(const VectorMeasure& mu, const VectorMeasure& nu, double eps);
double second_variation(const VectorMeasure& mu, const VectorMeasure& nu, double eps);

std::vector<double> singular_epsilons(const VectorMeasure& mu, const VectorMeasure& nu);

double structural_identity_residual(const VectorMeasure& mu, const VectorMeasure& mu2);

struct VariationReport {
  double F_value = 0.0;
  double Fprime_minus = 0.0;
  double Fprime_plus = 0.0;
  std::optional<double> Fsecond;  // empty at singular eps
  double epsilon = 0.0;
  bool is_regular = true;
};

VariationReport variation_report(const VectorMeasure& mu, const VectorMeasure& nu, double eps);

}  // namespace parea
