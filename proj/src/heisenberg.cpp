#include "parea/heisenberg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parea/numerics.hpp"

namespace parea {

Coframe::Coframe(Eigen::MatrixXd g) : gram(std::move(g)) {
  if (gram.rows() < 1 || gram.rows() != gram.cols()) throw std::invalid_argument("Gram matrix must be square");
  if (!gram.allFinite()) throw std::invalid_argument("Gram matrix must be finite");
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("Gram matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12 * scale)
    throw std::invalid_argument("Gram matrix must be positive semidefinite");
}

Coframe Coframe::euclidean(int n_plus_1) { return Coframe(Eigen::MatrixXd::Identity(n_plus_1, n_plus_1)); }

Coframe Coframe::heisenberg() {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(3, 3);
  g(0, 0) = g(1, 1) = 1.0;
  return Coframe(g);
}

Coframe Coframe::intrinsic() {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(3, 3);
  g(0, 0) = g(2, 2) = 1.0;
  return Coframe(g);
}

// Plain double loop in row order; graph densities repeat exactly this order.
double Coframe::inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  if (a.size() != size() || b.size() != size()) throw std::invalid_argument("length does not match the coframe");
  double acc = 0.0;
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j) acc += a[i] * gram(i, j) * b[j];
  return acc;
}

DefiningData::DefiningData(Eigen::VectorXd values) : v(std::move(values)) {
  if (v.size() < 1 || !v.allFinite()) throw std::invalid_argument("defining data must be finite and nonempty");
  if (v[v.size() - 1] == 0.0) throw std::invalid_argument("v_{n+1}(phi) must be nonzero");
}

Form Form::one_form(const Eigen::VectorXd& coeffs) {
  Form f(static_cast<int>(coeffs.size()), 1);
  for (int i = 0; i < coeffs.size(); ++i) f.add({i}, coeffs[i]);
  return f;
}

Form Form::volume(int dim) {
  Form f(dim, dim);
  std::vector<int> idx(dim);
  for (int i = 0; i < dim; ++i) idx[i] = i;
  f.add(idx, 1.0);
  return f;
}

double Form::coeff(const std::vector<int>& idx) const {
  auto it = terms_.find(idx);
  return it == terms_.end() ? 0.0 : it->second;
}

void Form::add(std::vector<int> idx, double c) {
  if (static_cast<int>(idx.size()) != degree_) throw std::invalid_argument("index tuple has the wrong degree");
  for (int i : idx)
    if (i < 0 || i >= dim_) throw std::invalid_argument("basis index out of range");
  // bubble sort, counting transpositions
  int sign = 1;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b + 1 < idx.size() - a; ++b)
      if (idx[b] > idx[b + 1]) {
        std::swap(idx[b], idx[b + 1]);
        sign = -sign;
      }
  for (std::size_t a = 0; a + 1 < idx.size(); ++a)
    if (idx[a] == idx[a + 1]) return;  // repeated factor
  if (c == 0.0) return;
  terms_[idx] += sign * c;
}

Form wedge(const Form& a, const Form& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge of forms on different spaces");
  Form out(a.dim(), a.degree() + b.degree());
  if (out.degree() > out.dim()) return out;
  for (const auto& [ia, ca] : a.terms())
    for (const auto& [ib, cb] : b.terms()) {
      std::vector<int> idx = ia;
      idx.insert(idx.end(), ib.begin(), ib.end());
      out.add(std::move(idx), ca * cb);
    }
  return out;
}

Eigen::VectorXd contract_form(const Eigen::VectorXd& lambda, const Coframe& frame) {
  if (lambda.size() != frame.size()) throw std::invalid_argument("contract_form: length mismatch");
  Eigen::VectorXd c(frame.size());
  for (int k = 0; k < frame.size(); ++k) {
    double acc = 0.0;
    for (int j = 0; j < frame.size(); ++j) acc += lambda[j] * frame.gram(j, k);
    c[k] = acc;
  }
  return c;
}

Form contraction_as_form(const Eigen::VectorXd& c) {
  const int dim = static_cast<int>(c.size());
  Form f(dim, dim - 1);
  for (int k = 0; k < dim; ++k) {
    std::vector<int> idx;
    for (int i = 0; i < dim; ++i)
      if (i != k) idx.push_back(i);
    f.add(idx, (k % 2 == 0 ? 1.0 : -1.0) * c[k]);
  }
  return f;
}

AreaElement area_element_coeff(const Coframe& frame, const DefiningData& dd) {
  if (dd.v.size() != frame.size()) throw std::invalid_argument("defining data does not match the coframe");
  const int n = frame.size() - 1;
  const double norm_dphi = std::sqrt(std::max(0.0, frame.inner(dd.v, dd.v)));
  const double last = dd.v[n];
  AreaElement a;
  a.magnitude = norm_dphi / std::abs(last);
  a.sign = ((n % 2 == 0) == (last > 0.0)) ? 1 : -1;
  return a;
}

GraphKind parse_graph_kind(const std::string& s) {
  if (s == "euclidean") return GraphKind::euclidean;
  if (s == "heisenberg") return GraphKind::heisenberg;
  if (s == "intrinsic") return GraphKind::intrinsic;
  throw std::invalid_argument("unknown graph kind '" + s + "'");
}

std::string graph_kind_name(GraphKind k) {
  switch (k) {
    case GraphKind::euclidean: return "euclidean";
    case GraphKind::heisenberg: return "heisenberg";
    case GraphKind::intrinsic: return "intrinsic";
  }
  return "?";
}

namespace {
void need_grad(const Jet& jet, std::size_t n) {
  if (jet.grad.size() != n) throw std::invalid_argument("jet gradient has the wrong length");
}
}  // namespace

// Euclidean: phi = x_{n+1} - u, orthonormal frame.
// Heisenberg: phi = z - u with X = ∂x + y∂z, Y = ∂y - x∂z, so Xphi = y - u_x, Yphi = -x - u_y.
// Intrinsic: x = phi(eta, tau), frame (∂_eta, T, ∂_tau) with the middle direction null.
std::pair<Coframe, DefiningData> graph_frame(GraphKind kind, const Jet& jet) {
  switch (kind) {
    case GraphKind::euclidean: {
      const int n = static_cast<int>(jet.grad.size());
      if (n < 1) throw std::invalid_argument("euclidean jet needs a gradient");
      Eigen::VectorXd v(n + 1);
      for (int i = 0; i < n; ++i) v[i] = -jet.grad[i];
      v[n] = 1.0;
      return {Coframe::euclidean(n + 1), DefiningData(v)};
    }
    case GraphKind::heisenberg: {
      need_grad(jet, 2);
      Eigen::VectorXd v(3);
      v << jet.y - jet.grad[0], -jet.x - jet.grad[1], 1.0;
      return {Coframe::heisenberg(), DefiningData(v)};
    }
    case GraphKind::intrinsic: {
      need_grad(jet, 2);
      Eigen::VectorXd v(3);
      v << -jet.grad[0] + 2.0 * jet.value * jet.grad[1], -jet.grad[1], 1.0;
      return {Coframe::intrinsic(), DefiningData(v)};
    }
  }
  throw std::invalid_argument("unknown graph kind");
}

AreaElement graph_area_density(GraphKind kind, const Jet& jet) {
  AreaElement a;
  switch (kind) {
    case GraphKind::euclidean: {
      const std::size_t n = jet.grad.size();
      if (n < 1) throw std::invalid_argument("euclidean jet needs a gradient");
      double s = 0.0;
      for (double g : jet.grad) s += g * g;
      a.magnitude = std::sqrt(s + 1.0);
      a.sign = (n % 2 == 0) ? 1 : -1;
      return a;
    }
    case GraphKind::heisenberg: {
      need_grad(jet, 2);
      const double p = jet.y - jet.grad[0], q = jet.x + jet.grad[1];
      a.magnitude = std::sqrt(p * p + q * q);
      return a;
    }
    case GraphKind::intrinsic: {
      need_grad(jet, 2);
      const double t = jet.grad[0] - 2.0 * jet.value * jet.grad[1];
      a.magnitude = std::sqrt(t * t + 1.0);
      return a;
    }
  }
  throw std::invalid_argument("unknown graph kind");
}

double CellField::sup_valid() const {
  double m = 0.0;
  for (std::size_t c = 0; c < values.size(); ++c)
    if (valid[c]) m = std::max(m, std::abs(values[c]));
  return m;
}

namespace {

CellField make_cells(const GridDomain& dom) {
  return {dom, std::vector<double>(dom.num_cells(), 0.0), std::vector<unsigned char>(dom.num_cells(), 0)};
}

bool interior_cell(const GridDomain& dom, int i, int j) {
  return i >= 1 && j >= 1 && i <= dom.nx() - 2 && j <= dom.ny() - 2;
}

}  // namespace

CellField area_density_field(const ScalarField& u, GraphKind kind) {
  const GridDomain& dom = u.domain();
  const VectorField g = gradient(u);
  CellField out = make_cells(dom);
  for (int c = 0; c < dom.num_cells(); ++c) {
    Jet jet;
    jet.x = dom.cell_x(dom.cell_i(c));
    jet.y = dom.cell_y(dom.cell_j(c));
    jet.value = u.value_in_cell(c, 0.5, 0.5);
    jet.grad = {g.at(c)[0], g.at(c)[1]};
    out.values[c] = graph_area_density(kind, jet).magnitude;
    out.valid[c] = 1;
  }
  return out;
}

CellField mean_curvature_h22_euclidean(const ScalarField& u) {
  const GridDomain& dom = u.domain();
  const VectorField g = gradient(u);
  const int C = dom.num_cells();
  std::vector<Eigen::Vector3d> nu(C);
  for (int c = 0; c < C; ++c) {
    const double p = g.at(c)[0], q = g.at(c)[1];
    nu[c] = Eigen::Vector3d(-p, -q, 1.0) / std::sqrt(1.0 + p * p + q * q);
  }
  CellField out = make_cells(dom);
  for (int j = 0; j < dom.ny(); ++j)
    for (int i = 0; i < dom.nx(); ++i) {
      if (!interior_cell(dom, i, j)) continue;
      const int c = dom.cell(i, j);
      const double p = g.at(c)[0], q = g.at(c)[1];
      const Eigen::Vector3d Xx(1.0, 0.0, p), Xy(0.0, 1.0, q);
      const Eigen::Vector3d Dx = (nu[dom.cell(i + 1, j)] - nu[c]) / dom.hx();
      const Eigen::Vector3d Dy = (nu[dom.cell(i, j + 1)] - nu[c]) / dom.hy();
      // orthonormal tangent frame e_j = a_j Xx + b_j Xy
      const double nx = Xx.norm();
      const Eigen::Vector3d e1 = Xx / nx;
      const double proj = Xy.dot(e1);
      const Eigen::Vector3d r = Xy - proj * e1;
      const double nr = r.norm();
      const Eigen::Vector3d e2 = r / nr;
      const double a1 = 1.0 / nx, b1 = 0.0;
      const double a2 = -proj / (nx * nr), b2 = 1.0 / nr;
      const double h11 = -(a1 * Dx + b1 * Dy).dot(e1);
      const double h22 = -(a2 * Dx + b2 * Dy).dot(e2);
      out.values[c] = h11 + h22;
      out.valid[c] = 1;
    }
  return out;
}

CellField mean_curvature_divergence(const ScalarField& u) {
  const GridDomain& dom = u.domain();
  const VectorField g = gradient(u);
  auto flux = [&](int c1, int c2, int comp) {
    const double p = 0.5 * (g.at(c1)[0] + g.at(c2)[0]);
    const double q = 0.5 * (g.at(c1)[1] + g.at(c2)[1]);
    return (comp == 0 ? p : q) / std::sqrt(1.0 + p * p + q * q);
  };
  CellField out = make_cells(dom);
  for (int j = 0; j < dom.ny(); ++j)
    for (int i = 0; i < dom.nx(); ++i) {
      if (!interior_cell(dom, i, j)) continue;
      const int c = dom.cell(i, j);
      const double fx = flux(c, dom.cell(i + 1, j), 0) - flux(dom.cell(i - 1, j), c, 0);
      const double fy = flux(c, dom.cell(i, j + 1), 1) - flux(dom.cell(i, j - 1), c, 1);
      out.values[c] = fx / dom.hx() + fy / dom.hy();
      out.valid[c] = 1;
    }
  return out;
}

CellField p_mean_curvature(const ScalarField& u, const EnergySpec& spec, double tol) {
  const GridDomain& dom = u.domain();
  spec.check(dom);
  const SingularSet sing = singular_set(u, spec, tol);
  const GaussRule rule = gauss_legendre01(dom.quadrature_order());
  const int q = static_cast<int>(rule.nodes.size());

  // Unit field at a point of the edge shared by cells ca (at reference point
  // (xa, ya)) and cb (at (xb, yb)); gradients of the two traces are averaged.
  auto unit_at = [&](int ca, double xa, double ya, int cb, double xb, double yb, double x, double y) {
    const auto ga = u.gradient_in_cell(ca, xa, ya), gb = u.gradient_in_cell(cb, xb, yb);
    const auto Fa = spec.F_at(x, y, ca), Fb = spec.F_at(x, y, cb);
    const double w0 = 0.5 * (ga[0] + gb[0]) + 0.5 * (Fa[0] + Fb[0]);
    const double w1 = 0.5 * (ga[1] + gb[1]) + 0.5 * (Fa[1] + Fb[1]);
    const double r = std::hypot(w0, w1);
    return r > 0.0 ? std::array<double, 2>{w0 / r, w1 / r} : std::array<double, 2>{0.0, 0.0};
  };

  CellField out = make_cells(dom);
  for (int j = 0; j < dom.ny(); ++j)
    for (int i = 0; i < dom.nx(); ++i) {
      const int c = dom.cell(i, j);
      if (!interior_cell(dom, i, j) || sing.mask[c]) continue;
      const int cr = dom.cell(i + 1, j), cl = dom.cell(i - 1, j);
      const int ct = dom.cell(i, j + 1), cb = dom.cell(i, j - 1);
      double total = 0.0;
      for (int k = 0; k < q; ++k) {
        const double t = rule.nodes[k], w = rule.weights[k];
        const double ys = dom.y(j) + t * dom.hy(), xs = dom.x(i) + t * dom.hx();
        const double right = unit_at(c, 1.0, t, cr, 0.0, t, dom.x(i + 1), ys)[0];
        const double left = unit_at(cl, 1.0, t, c, 0.0, t, dom.x(i), ys)[0];
        const double top = unit_at(c, t, 1.0, ct, t, 0.0, xs, dom.y(j + 1))[1];
        const double bottom = unit_at(cb, t, 1.0, c, t, 0.0, xs, dom.y(j))[1];
        total += w * ((right - left) * dom.hy() + (top - bottom) * dom.hx());
      }
      out.values[c] = total / dom.cell_area();
      out.valid[c] = 1;
    }
  return out;
}

}  // namespace parea
