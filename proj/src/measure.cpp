#include "parea/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "parea/numerics.hpp"

namespace parea {

namespace {

constexpr double kZeroRel = 1e-14;
constexpr double kColinearRel = 1e-12;

double vnorm(const double* v, int d) { return norm(std::span<const double>(v, d)); }

// Largest density norm over cells and largest mass norm over atoms; each part
// has its own scale since densities and masses carry different units.
struct Scales {
  double cell = 0.0;
  double atom = 0.0;
};

Scales scales_of(const VectorMeasure& m) {
  Scales s;
  for (std::size_t c = 0; c < m.num_cells(); ++c) s.cell = std::max(s.cell, vnorm(m.density(c), m.dim()));
  for (const Atom& a : m.atoms()) s.atom = std::max(s.atom, norm(a.mass));
  return s;
}

bool is_support(double n, double scale) { return n > 0.0 && n >= kZeroRel * scale; }

// Walk the union of atom sites of a and b in ascending order.
template <class F>
void for_atom_union(const VectorMeasure& a, const VectorMeasure& b, F&& f) {
  const std::vector<double> zero(a.dim(), 0.0);
  auto ia = a.atoms().begin(), ib = b.atoms().begin();
  while (ia != a.atoms().end() || ib != b.atoms().end()) {
    if (ib == b.atoms().end() || (ia != a.atoms().end() && ia->site < ib->site)) {
      f(ia->site, ia->mass.data(), zero.data());
      ++ia;
    } else if (ia == a.atoms().end() || ib->site < ia->site) {
      f(ib->site, zero.data(), ib->mass.data());
      ++ib;
    } else {
      f(ia->site, ia->mass.data(), ib->mass.data());
      ++ia;
      ++ib;
    }
  }
}

}  // namespace

VectorMeasure::VectorMeasure(int d, std::vector<double> cell_weights, std::vector<double> densities,
                             std::vector<Atom> atoms)
    : d_(d), weights_(std::move(cell_weights)), density_(std::move(densities)), atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& x, const Atom& y) { return x.site < y.site; });
  validate();
}

VectorMeasure VectorMeasure::zeros_like(const VectorMeasure& m) {
  return VectorMeasure(m.dim(), m.weights(), std::vector<double>(m.densities().size(), 0.0));
}

void VectorMeasure::validate() const {
  if (d_ < 1) throw std::invalid_argument("VectorMeasure: dimension must be >= 1");
  if (density_.size() != weights_.size() * static_cast<std::size_t>(d_))
    throw std::invalid_argument("VectorMeasure: density size does not match cells*d");
  for (double w : weights_)
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("VectorMeasure: cell weights must be positive");
  for (double x : density_)
    if (!std::isfinite(x)) throw std::invalid_argument("VectorMeasure: non-finite density");
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (atoms_[k].mass.size() != static_cast<std::size_t>(d_))
      throw std::invalid_argument("VectorMeasure: atom mass has wrong dimension");
    for (double x : atoms_[k].mass)
      if (!std::isfinite(x)) throw std::invalid_argument("VectorMeasure: non-finite atom mass");
    if (k > 0 && atoms_[k].site == atoms_[k - 1].site)
      throw std::invalid_argument("VectorMeasure: duplicate atom site " + std::to_string(atoms_[k].site));
  }
}

const Atom* VectorMeasure::find_atom(std::int64_t site) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), site,
                             [](const Atom& a, std::int64_t s) { return a.site < s; });
  return (it != atoms_.end() && it->site == site) ? &*it : nullptr;
}

void VectorMeasure::add_atom(std::int64_t site, std::vector<double> mass) {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), site,
                             [](const Atom& a, std::int64_t s) { return a.site < s; });
  if (it != atoms_.end() && it->site == site)
    throw std::invalid_argument("VectorMeasure: duplicate atom site " + std::to_string(site));
  atoms_.insert(it, Atom{site, std::move(mass)});
  validate();
}

void require_compatible(const VectorMeasure& a, const VectorMeasure& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("measures have different dimensions");
  if (a.weights() != b.weights()) throw std::invalid_argument("measures live on different cell complexes");
}

VectorMeasure combine(const VectorMeasure& a, double s, const VectorMeasure& b) {
  require_compatible(a, b);
  const int d = a.dim();
  std::vector<double> dens(a.densities().size());
  for (std::size_t k = 0; k < dens.size(); ++k) dens[k] = a.densities()[k] + s * b.densities()[k];
  std::vector<Atom> atoms;
  for_atom_union(a, b, [&](std::int64_t site, const double* ma, const double* mb) {
    Atom at{site, std::vector<double>(d)};
    for (int k = 0; k < d; ++k) at.mass[k] = ma[k] + s * mb[k];
    atoms.push_back(std::move(at));
  });
  return VectorMeasure(d, a.weights(), std::move(dens), std::move(atoms));
}

double total_variation(const VectorMeasure& m) {
  std::vector<double> terms;
  terms.reserve(m.num_cells() + m.atoms().size());
  for (std::size_t c = 0; c < m.num_cells(); ++c) terms.push_back(vnorm(m.density(c), m.dim()) * m.weights()[c]);
  for (const Atom& a : m.atoms()) terms.push_back(norm(a.mass));
  return pairwise_sum(terms);
}

RNDecomposition decompose(const VectorMeasure& nu, const VectorMeasure& mu_eps) {
  require_compatible(nu, mu_eps);
  const int d = nu.dim();
  const Scales sc = scales_of(mu_eps);
  RNDecomposition rn;
  rn.d = d;
  rn.cells.resize(nu.num_cells());
  std::vector<double> s_dens(nu.densities().size(), 0.0);
  std::vector<Atom> s_atoms;

  auto split = [&](const double* v, const double* n, double weight, double scale, SiteDecomposition& out) -> bool {
    const double nv = vnorm(v, d);
    if (is_support(nv, scale)) {
      out.support = true;
      out.tv = nv * weight;
      out.N.resize(d);
      out.A.resize(d);
      for (int k = 0; k < d; ++k) {
        out.N[k] = v[k] / nv;
        out.A[k] = n[k] / nv;
      }
      return false;
    }
    return vnorm(n, d) > 0.0;  // nu mass here is singular w.r.t. |dmu_eps|
  };

  for (std::size_t c = 0; c < nu.num_cells(); ++c) {
    if (split(mu_eps.density(c), nu.density(c), nu.weights()[c], sc.cell, rn.cells[c]))
      std::copy(nu.density(c), nu.density(c) + d, s_dens.begin() + c * d);
  }
  for_atom_union(mu_eps, nu, [&](std::int64_t site, const double* m, const double* n) {
    SiteDecomposition sd;
    if (split(m, n, 1.0, sc.atom, sd)) s_atoms.push_back(Atom{site, std::vector<double>(n, n + d)});
    rn.atoms.emplace_back(site, std::move(sd));
  });
  rn.nu_s = VectorMeasure(d, nu.weights(), std::move(s_dens), std::move(s_atoms));
  return rn;
}

VectorMeasure recombine(const RNDecomposition& rn, const VectorMeasure& like) {
  const int d = rn.d;
  std::vector<double> dens = rn.nu_s.densities();
  for (std::size_t c = 0; c < rn.cells.size(); ++c) {
    const SiteDecomposition& s = rn.cells[c];
    if (!s.support) continue;
    const double tv_density = s.tv / like.weights()[c];
    for (int k = 0; k < d; ++k) dens[c * d + k] += s.A[k] * tv_density;
  }
  std::map<std::int64_t, std::vector<double>> atoms;
  for (const Atom& a : rn.nu_s.atoms()) atoms[a.site] = a.mass;
  for (const auto& [site, s] : rn.atoms) {
    if (!s.support) continue;
    auto& m = atoms[site];
    m.resize(d, 0.0);
    for (int k = 0; k < d; ++k) m[k] += s.A[k] * s.tv;
  }
  std::vector<Atom> out;
  for (auto& [site, m] : atoms) out.push_back(Atom{site, std::move(m)});
  return VectorMeasure(d, like.weights(), std::move(dens), std::move(out));
}

double line_energy(const VectorMeasure& mu, const VectorMeasure& nu, double eps) {
  return total_variation(combine(mu, eps, nu));
}

namespace {

template <class F>
double sum_over_support(const RNDecomposition& rn, F&& term) {
  std::vector<double> terms;
  terms.reserve(rn.cells.size() + rn.atoms.size());
  for (const SiteDecomposition& s : rn.cells) terms.push_back(s.support ? term(s) : 0.0);
  for (const auto& [site, s] : rn.atoms) terms.push_back(s.support ? term(s) : 0.0);
  return pairwise_sum(terms);
}

}  // namespace

OneSided first_variation_pm(const VectorMeasure& mu, const VectorMeasure& nu, double eps) {
  const RNDecomposition rn = decompose(nu, combine(mu, eps, nu));
  const double interior = sum_over_support(rn, [](const SiteDecomposition& s) { return dot(s.N, s.A) * s.tv; });
  const double jump = total_variation(rn.nu_s);
  return {interior - jump, interior + jump};
}

double second_variation(const VectorMeasure& mu, const VectorMeasure& nu, double eps) {
  const RNDecomposition rn = decompose(nu, combine(mu, eps, nu));
  return sum_over_support(rn, [](const SiteDecomposition& s) {
    // |A|^2 - (A.N)^2 as the squared norm of the part of A orthogonal to N
    const double an = dot(s.A, s.N);
    double q = 0.0;
    for (std::size_t k = 0; k < s.A.size(); ++k) {
      const double p = s.A[k] - an * s.N[k];
      q += p * p;
    }
    return q * s.tv;
  });
}

std::vector<double> singular_epsilons(const VectorMeasure& mu, const VectorMeasure& nu) {
  require_compatible(mu, nu);
  const int d = mu.dim();
  std::vector<double> eps;
  auto probe = [&](const double* v, const double* n) {
    int k = 0;
    for (int j = 1; j < d; ++j)
      if (std::abs(n[j]) > std::abs(n[k])) k = j;
    if (n[k] == 0.0) return;
    const double e = -v[k] / n[k];
    for (int j = 0; j < d; ++j) {
      const double r = v[j] + e * n[j];
      if (std::abs(r) > kColinearRel * std::max(std::abs(v[j]), std::abs(e * n[j]))) return;
    }
    eps.push_back(e);
  };
  for (std::size_t c = 0; c < mu.num_cells(); ++c) probe(mu.density(c), nu.density(c));
  for_atom_union(mu, nu, [&](std::int64_t, const double* v, const double* n) { probe(v, n); });
  std::sort(eps.begin(), eps.end());
  std::vector<double> out;
  for (double e : eps) {
    if (!out.empty() && std::abs(e - out.back()) <= kColinearRel * std::max(std::abs(e), std::abs(out.back()))) continue;
    out.push_back(e);
  }
  return out;
}

double structural_identity_residual(const VectorMeasure& mu, const VectorMeasure& mu2) {
  require_compatible(mu, mu2);
  const int d = mu.dim();
  double worst = 0.0;
  std::vector<double> N(d), N2(d);
  auto site = [&](const double* v, const double* v2, double w) {
    const double a = vnorm(v, d), b = vnorm(v2, d);
    for (int k = 0; k < d; ++k) {
      N[k] = a > 0.0 ? v[k] / a : 0.0;
      N2[k] = b > 0.0 ? v2[k] / b : 0.0;
    }
    double lhs = 0.0, dn2 = 0.0;
    for (int k = 0; k < d; ++k) {
      const double dn = N[k] - N2[k];
      lhs += dn * (v[k] - v2[k]);
      dn2 += dn * dn;
    }
    lhs *= w;
    const int chi = (a > 0.0 ? 1 : 0) + (b > 0.0 ? 1 : 0);
    const double rhs = chi == 0 ? 0.0 : dn2 * (a + b) * w / chi;
    worst = std::max(worst, std::abs(lhs - rhs));
  };
  for (std::size_t c = 0; c < mu.num_cells(); ++c) site(mu.density(c), mu2.density(c), mu.weights()[c]);
  for_atom_union(mu, mu2, [&](std::int64_t, const double* v, const double* v2) { site(v, v2, 1.0); });
  return worst;
}

VariationReport variation_report(const VectorMeasure& mu, const VectorMeasure& nu, double eps) {
  VariationReport r;
  r.epsilon = eps;
  const VectorMeasure mu_eps = combine(mu, eps, nu);
  r.F_value = total_variation(mu_eps);
  const RNDecomposition rn = decompose(nu, mu_eps);
  r.is_regular = total_variation(rn.nu_s) == 0.0;
  const OneSided fp = first_variation_pm(mu, nu, eps);
  r.Fprime_minus = fp.minus;
  r.Fprime_plus = fp.plus;
  if (r.is_regular) r.Fsecond = second_variation(mu, nu, eps);
  return r;
}

}  // namespace parea
