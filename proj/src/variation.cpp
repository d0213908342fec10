#include "parea/variation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <stdexcept>

#include "parea/numerics.hpp"

namespace parea {

DirectionField::DirectionField(ScalarField phi) : phi_(std::move(phi)) {
  const GridDomain& dom = phi_.domain();
  for (int n = 0; n < dom.num_nodes(); ++n)
    if (dom.is_boundary(n) && phi_[n] != 0.0)
      throw std::invalid_argument("direction field must vanish on boundary nodes");
}

GraphLift lift_graph(const ScalarField& u, const EnergySpec& spec, const DirectionField& dir, GraphMode mode,
                     double tol) {
  const GridDomain& dom = u.domain();
  if (!(dir.phi().domain() == dom)) throw std::invalid_argument("direction lives on another grid");
  if (mode == GraphMode::horizontal) {
    LiftedMeasure lm = field_to_measure(u, spec, tol);
    VectorMeasure nu = direction_measure(dir.phi(), lm.tmpl);
    return {std::move(lm.mu), std::move(nu), std::move(lm.singular)};
  }
  const int S = dom.num_samples();
  std::vector<double> m(3 * S), n(3 * S);
  for (int s = 0; s < S; ++s) {
    const auto g = u.sample_gradient(s);
    const auto p = dir.phi().sample_gradient(s);
    m[3 * s] = g[0];
    m[3 * s + 1] = g[1];
    m[3 * s + 2] = -1.0;
    n[3 * s] = p[0];
    n[3 * s + 1] = p[1];
    n[3 * s + 2] = 0.0;
  }
  std::vector<double> w = dom.sample_weights();
  GraphLift out{VectorMeasure(3, w, std::move(m)), VectorMeasure(3, w, std::move(n)), {}};
  out.singular.mask.assign(dom.num_cells(), 0);
  return out;
}

double riemannian_area(const ScalarField& u) {
  const GridDomain& dom = u.domain();
  std::vector<double> terms(dom.num_samples());
  for (int s = 0; s < dom.num_samples(); ++s) {
    const auto g = u.sample_gradient(s);
    const double v[3] = {g[0], g[1], -1.0};
    terms[s] = norm(std::span<const double>(v, 3)) * dom.sample_weight(s);
  }
  return pairwise_sum(terms);
}

double h_pairing(const EnergySpec& spec, const ScalarField& phi) {
  if (!spec.has_H()) return 0.0;
  const GridDomain& dom = phi.domain();
  std::vector<double> t(dom.num_cells());
  for (int c = 0; c < dom.num_cells(); ++c) {
    const auto n = dom.cell_nodes(c);
    t[c] = spec.H_at(c) * 0.25 * (phi[n[0]] + phi[n[1]] + phi[n[2]] + phi[n[3]]) * dom.cell_area();
  }
  return pairwise_sum(t);
}

double graph_energy(const ScalarField& u, const EnergySpec& spec, GraphMode mode) {
  if (mode == GraphMode::horizontal) return energy_FH(u, spec);
  return riemannian_area(u) + h_pairing(spec, u);
}

VariationReport minimizer_first_variation(const ScalarField& u, const EnergySpec& spec, const DirectionField& dir,
                                          double tol, GraphMode mode) {
  const GraphLift lift = lift_graph(u, spec, dir, mode, tol);
  VariationReport r = variation_report(lift.mu, lift.nu, 0.0);
  const double hphi = h_pairing(spec, dir.phi());
  r.F_value += h_pairing(spec, u);
  r.Fprime_minus += hphi;
  r.Fprime_plus += hphi;
  return r;
}

double second_variation_graph(const ScalarField& u, const EnergySpec& spec, const DirectionField& dir, GraphMode mode,
                              double tol) {
  const GridDomain& dom = u.domain();
  if (!(dir.phi().domain() == dom)) throw std::invalid_argument("direction lives on another grid");
  std::vector<double> terms(dom.num_samples(), 0.0);
  if (mode == GraphMode::riemannian) {
    // (|∇φ|² + |∇φ|²|∇u|² - (∇φ.∇u)²) / W³, using the planar Lagrange identity
    for (int s = 0; s < dom.num_samples(); ++s) {
      const auto p = u.sample_gradient(s);
      const auto g = dir.phi().sample_gradient(s);
      const double cross = p[0] * g[1] - p[1] * g[0];
      const double W2 = 1.0 + p[0] * p[0] + p[1] * p[1];
      terms[s] = (g[0] * g[0] + g[1] * g[1] + cross * cross) / (W2 * std::sqrt(W2)) * dom.sample_weight(s);
    }
    return pairwise_sum(terms);
  }
  const SingularSet sing = singular_set(u, spec, tol);
  const std::vector<double> w = horizontal_samples(u, spec);
  for (int s = 0; s < dom.num_samples(); ++s) {
    if (sing.mask[dom.cell_of_sample(s)]) continue;
    const double wx = w[2 * s], wy = w[2 * s + 1];
    const double r = std::sqrt(wx * wx + wy * wy);
    if (r == 0.0) continue;
    const auto g = dir.phi().sample_gradient(s);
    // (|w|²|∇φ|² - (w.∇φ)²) / |w|³
    const double cross = wx * g[1] - wy * g[0];
    terms[s] = cross * cross / (r * r * r) * dom.sample_weight(s);
  }
  return pairwise_sum(terms);
}

double optimality_tol(const VariationReport& r) { return 1e-4 * (1.0 + r.F_value); }

FdReport fd_validate(const ScalarField& u, const EnergySpec& spec, const DirectionField& dir,
                     const std::vector<double>& h_list, GraphMode mode, double tol) {
  for (double h : h_list)
    if (!(h > 0.0)) throw std::invalid_argument("fd_validate: step sizes must be positive");
  FdReport rep;
  rep.analytic = minimizer_first_variation(u, spec, dir, tol, mode);
  const double f2 = second_variation_graph(u, spec, dir, mode, tol);
  const double E0 = graph_energy(u, spec, mode);
  for (double h : h_list) {
    FdRow row;
    row.h = h;
    const double Ep = graph_energy(u + h * dir.phi(), spec, mode);
    const double Em = graph_energy(u - h * dir.phi(), spec, mode);
    row.q_plus = (Ep - E0) / h;
    row.q_minus = (E0 - Em) / h;
    row.q_second = (Ep - 2.0 * E0 + Em) / (h * h);
    row.err_plus = std::abs(row.q_plus - rep.analytic.Fprime_plus);
    row.err_minus = std::abs(row.q_minus - rep.analytic.Fprime_minus);
    row.err_second = std::abs(row.q_second - f2);
    rep.rows.push_back(row);
  }
  rep.analytic.Fsecond = f2;
  auto order = [](double e1, double e2, double h1, double h2) -> double {
    if (e1 <= 0.0 || e2 <= 0.0) return INFINITY;
    return std::log(e1 / e2) / std::log(h1 / h2);
  };
  for (std::size_t k = 0; k + 1 < rep.rows.size(); ++k) {
    const FdRow &a = rep.rows[k], &b = rep.rows[k + 1];
    rep.order_plus.push_back(order(a.err_plus, b.err_plus, a.h, b.h));
    rep.order_minus.push_back(order(a.err_minus, b.err_minus, a.h, b.h));
    rep.order_second.push_back(order(a.err_second, b.err_second, a.h, b.h));
  }
  return rep;
}

namespace {

using Vec2 = std::array<double, 2>;

Vec2 unit(Vec2 v) {
  const double r = std::hypot(v[0], v[1]);
  return r > 0.0 ? Vec2{v[0] / r, v[1] / r} : Vec2{0.0, 0.0};
}
Vec2 rot_plus(Vec2 v) { return {-v[1], v[0]}; }   // +pi/2
Vec2 rot_minus(Vec2 v) { return {v[1], -v[0]}; }  // -pi/2
double dot2(Vec2 a, Vec2 b) { return a[0] * b[0] + a[1] * b[1]; }

struct Finder {
  const ScalarField& u;
  const EnergySpec& spec;
  const SingularSet& sing;

  int cell_at(Vec2 p) const {
    const GridDomain& d = u.domain();
    const double fx = (p[0] - d.axes()[0].lo) / d.hx(), fy = (p[1] - d.axes()[1].lo) / d.hy();
    if (fx < 0 || fy < 0 || fx >= d.nx() || fy >= d.ny()) return -1;
    return d.cell(static_cast<int>(fx), static_cast<int>(fy));
  }

  bool w_at(Vec2 p, Vec2& w) const {
    const GridDomain& d = u.domain();
    const int c = cell_at(p);
    if (c < 0) return false;
    const double xi = (p[0] - d.x(d.cell_i(c))) / d.hx(), eta = (p[1] - d.y(d.cell_j(c))) / d.hy();
    const auto g = u.gradient_in_cell(c, xi, eta);
    const auto F = spec.F_at(p[0], p[1], c);
    w = {g[0] + F[0], g[1] + F[1]};
    return true;
  }

  // Zero of w . d along p0 + s*nrm, |s| <= R, where d is the direction of w at
  // the far + end. Returns the crossing closest to s = 0.
  bool locate(Vec2 p0, Vec2 nrm, double R, Vec2& out) const {
    const double h = u.domain().h();
    Vec2 wd;
    if (!w_at({p0[0] + R * nrm[0], p0[1] + R * nrm[1]}, wd)) return false;
    const Vec2 d = unit(wd);
    if (d[0] == 0.0 && d[1] == 0.0) return false;
    auto g = [&](double s, double& val) {
      Vec2 w;
      if (!w_at({p0[0] + s * nrm[0], p0[1] + s * nrm[1]}, w)) return false;
      val = dot2(w, d);
      return true;
    };
    const double step = 0.125 * h;
    double best = INFINITY;
    double prev_s = -R, prev_g;
    if (!g(prev_s, prev_g)) return false;
    for (double s = -R + step; s <= R + 1e-12; s += step) {
      double gs;
      if (!g(s, gs)) return false;
      if ((prev_g <= 0.0) != (gs <= 0.0)) {
        double lo = prev_s, hi = s, glo = prev_g;
        for (int it = 0; it < 40; ++it) {
          const double mid = 0.5 * (lo + hi);
          double gm;
          g(mid, gm);
          if ((gm <= 0.0) == (glo <= 0.0)) {
            lo = mid;
            glo = gm;
          } else {
            hi = mid;
          }
        }
        const double z = 0.5 * (lo + hi);
        if (std::abs(z) < std::abs(best)) best = z;
      }
      prev_s = s;
      prev_g = gs;
    }
    if (!std::isfinite(best)) return false;
    out = {p0[0] + best * nrm[0], p0[1] + best * nrm[1]};
    return true;
  }

  Vec2 center(int c) const {
    const GridDomain& d = u.domain();
    return {d.cell_x(d.cell_i(c)), d.cell_y(d.cell_j(c))};
  }

  // Limit of the unit field at p from direction dir: first two non-singular
  // cells met while marching, extrapolated linearly back to p.
  bool one_sided(Vec2 p, Vec2 dir, Vec2& out) const {
    const double h = u.domain().h();
    int found[2] = {-1, -1};
    int k = 0;
    for (double t = 0.25 * h; t < 40.0 * h && k < 2; t += 0.25 * h) {
      const int c = cell_at({p[0] + t * dir[0], p[1] + t * dir[1]});
      if (c < 0) return false;
      if (sing.mask[c]) continue;
      // the second cell must be farther out, not a neighbour across a grid line
      if (k == 1 && dot2({center(c)[0] - center(found[0])[0], center(c)[1] - center(found[0])[1]}, dir) < 0.5 * h)
        continue;
      const auto w = horizontal_at_center(u, spec, c);
      if (w[0] == 0.0 && w[1] == 0.0) continue;
      found[k++] = c;
    }
    if (k < 2) return false;
    const Vec2 c1 = center(found[0]), c2 = center(found[1]);
    const Vec2 n1 = unit(horizontal_at_center(u, spec, found[0]));
    const Vec2 n2 = unit(horizontal_at_center(u, spec, found[1]));
    const double d1 = dot2({c1[0] - p[0], c1[1] - p[1]}, dir), d2 = dot2({c2[0] - p[0], c2[1] - p[1]}, dir);
    if (!(d2 > d1)) {
      out = n1;
      return true;
    }
    const double s = d1 / (d2 - d1);
    const Vec2 ex = unit({n1[0] - s * (n2[0] - n1[0]), n1[1] - s * (n2[1] - n1[1])});
    out = (ex[0] == 0.0 && ex[1] == 0.0) ? n1 : ex;
    return true;
  }
};

}  // namespace

std::vector<SingularCurve> angle_condition(const ScalarField& u, const EnergySpec& spec, double tol) {
  const GridDomain& dom = u.domain();
  const SingularSet sing = singular_set(u, spec, tol);
  const double h = dom.h();
  Finder finder{u, spec, sing};

  std::vector<int> comp(dom.num_cells(), -1);
  std::vector<SingularCurve> curves;
  for (int seed : sing.cells) {
    if (comp[seed] >= 0) continue;
    // 8-connected component
    std::vector<int> cells;
    std::queue<int> q;
    q.push(seed);
    comp[seed] = seed;
    while (!q.empty()) {
      const int c = q.front();
      q.pop();
      cells.push_back(c);
      const int i = dom.cell_i(c), j = dom.cell_j(c);
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= dom.nx() || jj >= dom.ny()) continue;
          const int nb = dom.cell(ii, jj);
          if (sing.mask[nb] && comp[nb] < 0) {
            comp[nb] = seed;
            q.push(nb);
          }
        }
    }
    std::sort(cells.begin(), cells.end());

    // principal axis of the cell centers
    Vec2 mean{0.0, 0.0};
    for (int c : cells) {
      const Vec2 p = finder.center(c);
      mean[0] += p[0];
      mean[1] += p[1];
    }
    mean[0] /= cells.size();
    mean[1] /= cells.size();
    double sxx = 0, sxy = 0, syy = 0;
    for (int c : cells) {
      const Vec2 p = finder.center(c);
      sxx += (p[0] - mean[0]) * (p[0] - mean[0]);
      sxy += (p[0] - mean[0]) * (p[1] - mean[1]);
      syy += (p[1] - mean[1]) * (p[1] - mean[1]);
    }
    const double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    Vec2 tau{std::cos(theta), std::sin(theta)};
    if (std::abs(tau[1]) >= std::abs(tau[0]) ? tau[1] < 0 : tau[0] < 0) tau = {-tau[0], -tau[1]};
    const Vec2 nrm = rot_minus(tau);
    double tmin = INFINITY, tmax = -INFINITY, smin = INFINITY, smax = -INFINITY;
    for (int c : cells) {
      const Vec2 p = finder.center(c);
      const Vec2 d{p[0] - mean[0], p[1] - mean[1]};
      tmin = std::min(tmin, dot2(d, tau));
      tmax = std::max(tmax, dot2(d, tau));
      smin = std::min(smin, dot2(d, nrm));
      smax = std::max(smax, dot2(d, nrm));
    }
    const double length = tmax - tmin + h, width = smax - smin + h;
    if (length < 4.0 * h || length < 3.0 * width) continue;  // point-like component

    // slice along tau, one chain point per slice
    std::map<long, std::vector<int>> slices;
    for (int c : cells) {
      const Vec2 p = finder.center(c);
      const double t = dot2({p[0] - mean[0], p[1] - mean[1]}, tau);
      slices[std::lround((t - tmin) / h)].push_back(c);
    }
    SingularCurve curve;
    long prev = -1;
    for (auto& [bin, members] : slices) {
      if (prev >= 0 && bin != prev + 1) curve.low_confidence = true;  // gap in the chain
      prev = bin;
      double lo = INFINITY, hi = -INFINITY, sbar = 0.0;
      for (int c : members) {
        const Vec2 q = finder.center(c);
        const double s = dot2({q[0] - mean[0], q[1] - mean[1]}, nrm);
        sbar += s;
        lo = std::min(lo, s);
        hi = std::max(hi, s);
        curve.cells.push_back(c);
      }
      sbar /= members.size();
      if (hi - lo > 3.0 * h) curve.low_confidence = true;  // ragged slice
      // cell centroids only move in half-cell steps; place the point on the
      // sign change of w across the band instead
      const double t = tmin + bin * h;
      const Vec2 p0{mean[0] + t * tau[0] + sbar * nrm[0], mean[1] + t * tau[1] + sbar * nrm[1]};
      Vec2 p;
      if (!finder.locate(p0, nrm, 0.5 * (hi - lo) + 1.5 * h, p)) {
        p = p0;
        curve.low_confidence = true;
      }
      curve.chain.push_back(p);
    }
    for (std::size_t k = 0; k + 1 < curve.chain.size(); ++k) {
      CurveSegment seg;
      const Vec2 a = curve.chain[k], b = curve.chain[k + 1];
      seg.point = {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
      // Chain points jitter by a fraction of h where the band is pinned to the
      // grid, so the tangent is a least-squares fit over a window that scales
      // with the curve rather than the grid.
      const double window = std::max(2.0 * h, 0.125 * length);
      const double tm = dot2({seg.point[0] - mean[0], seg.point[1] - mean[1]}, tau);
      Vec2 cm{0.0, 0.0};
      std::vector<Vec2> pts;
      for (const Vec2& q : curve.chain)
        if (std::abs(dot2({q[0] - mean[0], q[1] - mean[1]}, tau) - tm) <= window) {
          pts.push_back(q);
          cm[0] += q[0];
          cm[1] += q[1];
        }
      if (pts.size() < 3) {
        seg.tau = unit({b[0] - a[0], b[1] - a[1]});
      } else {
        cm[0] /= pts.size();
        cm[1] /= pts.size();
        double qxx = 0, qxy = 0, qyy = 0;
        for (const Vec2& q : pts) {
          qxx += (q[0] - cm[0]) * (q[0] - cm[0]);
          qxy += (q[0] - cm[0]) * (q[1] - cm[1]);
          qyy += (q[1] - cm[1]) * (q[1] - cm[1]);
        }
        const double th = 0.5 * std::atan2(2.0 * qxy, qxx - qyy);
        seg.tau = {std::cos(th), std::sin(th)};
      }
      if (dot2(seg.tau, tau) < 0) seg.tau = {-seg.tau[0], -seg.tau[1]};
      const Vec2 side = rot_minus(seg.tau);
      if (!finder.one_sided(seg.point, side, seg.nu_plus) ||
          !finder.one_sided(seg.point, {-side[0], -side[1]}, seg.nu_minus)) {
        curve.low_confidence = true;
        continue;
      }
      seg.e1_plus = rot_plus(seg.nu_plus);
      seg.e1_minus = rot_plus(seg.nu_minus);
      seg.residual = std::abs(dot2(seg.e1_plus, seg.tau) - dot2(seg.e1_minus, seg.tau));
      seg.antipodal_defect = std::hypot(seg.nu_plus[0] + seg.nu_minus[0], seg.nu_plus[1] + seg.nu_minus[1]);
      // near the boundary the Dirichlet data, not stationarity, shapes the curve
      const auto& ax = dom.axes();
      const double to_edge = std::min({seg.point[0] - ax[0].lo, ax[0].hi - seg.point[0], seg.point[1] - ax[1].lo,
                                       ax[1].hi - seg.point[1]});
      seg.interior = to_edge >= 1.5 * window;
      double& worst = seg.interior ? curve.residual : curve.boundary_residual;
      worst = std::max(worst, seg.residual);
      curve.segments.push_back(seg);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

}  // namespace parea
