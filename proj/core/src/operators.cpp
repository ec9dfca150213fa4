#include "srlab/operators.hpp"

#include <cmath>
#include <json.hpp>

namespace srlab {

std::string to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::Sublaplacian: return "sublaplacian";
    case OperatorKind::Penalty: return "penalty";
    case OperatorKind::StrongFormCheck: return "strong-form-check";
  }
  return "unknown";
}

Expr OperatorSpec::apply(const Expr& f) const {
  Expr out = c * f;
  for (int j = 0; j < dim; ++j) {
    Expr dj = differentiate(f, j);
    if (dj.is_zero()) continue;
    out += b[static_cast<std::size_t>(j)] * dj;
    for (int l = 0; l < dim; ++l) {
      const Expr& ajl = a[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)];
      if (ajl.is_zero()) continue;
      out += ajl * differentiate(dj, l);
    }
  }
  return out;
}

double OperatorSpec::apply_at(const Expr& f, std::span<const double> p) const {
  double out = c.evaluate(p) * f.evaluate(p);
  for (int j = 0; j < dim; ++j) {
    Expr dj = differentiate(f, j);
    if (dj.is_zero()) continue;
    out += b[static_cast<std::size_t>(j)].evaluate(p) * dj.evaluate(p);
    for (int l = 0; l < dim; ++l) {
      const Expr& ajl = a[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)];
      if (ajl.is_zero()) continue;
      out += ajl.evaluate(p) * differentiate(dj, l).evaluate(p);
    }
  }
  return out;
}

std::string OperatorSpec::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = to_string(kind);
  if (eps) j["eps"] = *eps;
  j["a"] = nlohmann::ordered_json::array();
  for (const auto& row : a) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& e : row) r.push_back(e.to_string());
    j["a"].push_back(r);
  }
  j["b"] = nlohmann::ordered_json::array();
  for (const auto& e : b) j["b"].push_back(e.to_string());
  return j.dump(2);
}

ConnectionCoefficients connection_coefficients(const StructureData& d) {
  const int k = d.rank;
  ConnectionCoefficients g;
  g.rank = k;
  g.gamma.resize(static_cast<std::size_t>(k * k * k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int a = 0; a < k; ++a)
        g.gamma[static_cast<std::size_t>((i * k + j) * k + a)] = 0.5 * (d(i, j, a) - d(j, a, i) + d(a, i, j));
  return g;
}

ConnectionCoefficients connection_coefficients(const MetricExtension& ext, std::span<const double> p) {
  return connection_coefficients(FrameAlgebra(ext.frame(), ext.rank()).at(p));
}

std::vector<Expr> horizontal_gradient_components(const MetricExtension& ext, const Expr& f) {
  std::vector<Expr> out;
  out.reserve(ext.horizontal.size());
  for (const auto& X : ext.horizontal) out.push_back(X.apply(f));
  return out;
}

VectorField horizontal_gradient(const MetricExtension& ext, const Expr& f) {
  VectorField g = VectorField::zero(ext.dim);
  auto comps = horizontal_gradient_components(ext, f);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (!comps[i].is_zero()) g = g + comps[i] * ext.horizontal[i];
  }
  return g;
}

Expr horizontal_divergence(const MetricExtension& ext, const std::vector<Expr>& phi) {
  const int k = ext.rank();
  if (static_cast<int>(phi.size()) != k) throw std::invalid_argument("horizontal_divergence: need k components");
  FrameAlgebra alg(ext.frame(), k);
  Expr out;
  for (int i = 0; i < k; ++i) out += ext.horizontal[static_cast<std::size_t>(i)].apply(phi[static_cast<std::size_t>(i)]);
  for (int j = 0; j < k; ++j) {
    if (phi[static_cast<std::size_t>(j)].is_zero()) continue;
    Expr trace;
    for (int i = 0; i < k; ++i) trace += alg.constant(i, j, i);
    if (!trace.is_zero()) out += phi[static_cast<std::size_t>(j)] * trace;
  }
  return out;
}

double horizontal_divergence(const MetricExtension& ext, const VectorField& X, std::span<const double> p) {
  const int k = ext.rank();
  const int m = ext.dim;
  FrameAlgebra alg(ext.frame(), k);
  std::vector<Expr> phi(static_cast<std::size_t>(m));
  for (int w = 0; w < m; ++w) {
    Expr s;
    for (int j = 0; j < m; ++j) {
      if (!X[j].is_zero()) s += alg.coframe(w, j) * X[j];
    }
    phi[static_cast<std::size_t>(w)] = s;
  }
  for (int b = k; b < m; ++b) {
    if (std::abs(phi[static_cast<std::size_t>(b)].evaluate(p)) > kHorizontalTolerance) {
      throw NotHorizontalError("div^H is defined for horizontal fields only");
    }
  }
  auto gamma = connection_coefficients(alg.at(p));
  double out = 0.0;
  for (int i = 0; i < k; ++i) out += ext.horizontal[static_cast<std::size_t>(i)].apply(phi[static_cast<std::size_t>(i)]).evaluate(p);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out += phi[static_cast<std::size_t>(j)].evaluate(p) * gamma(i, j, i);
  return out;
}

double riemannian_divergence(const MetricExtension& ext, const VectorField& X, std::span<const double> p) {
  FrameAlgebra alg(ext.frame(), ext.rank());
  const Expr& det = alg.determinant();
  double dv = det.evaluate(p);
  double out = 0.0;
  for (int j = 0; j < ext.dim; ++j) {
    out += differentiate(X[j], j).evaluate(p);
    out -= X[j].evaluate(p) * differentiate(det, j).evaluate(p) / dv;
  }
  return out;
}

namespace {

// sum_{u in fields} E_u^2 - sum_{w in fields} (sum_{u in fields} c_wu^u) E_w over
// the frame indices listed in `fields`.
OperatorSpec frame_laplacian(const std::vector<VectorField>& frame, const FrameAlgebra& alg,
                             const std::vector<int>& fields, int dim) {
  OperatorSpec op;
  op.dim = dim;
  op.a.assign(static_cast<std::size_t>(dim), std::vector<Expr>(static_cast<std::size_t>(dim)));
  op.b.assign(static_cast<std::size_t>(dim), Expr());
  for (int u : fields) {
    const VectorField& E = frame[static_cast<std::size_t>(u)];
    for (int j = 0; j < dim; ++j) {
      if (E[j].is_zero()) continue;
      for (int l = 0; l < dim; ++l) {
        if (!E[l].is_zero()) op.a[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] += E[j] * E[l];
      }
      op.b[static_cast<std::size_t>(j)] += E.apply(E[j]);
    }
  }
  for (int w : fields) {
    Expr trace;
    for (int u : fields) trace += alg.constant(w, u, u);
    if (trace.is_zero()) continue;
    const VectorField& E = frame[static_cast<std::size_t>(w)];
    for (int j = 0; j < dim; ++j) {
      if (!E[j].is_zero()) op.b[static_cast<std::size_t>(j)] -= trace * E[j];
    }
  }
  for (auto& row : op.a)
    for (auto& e : row) e = simplify(e);
  for (auto& e : op.b) e = simplify(e);
  return op;
}

std::vector<int> iota(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

}  // namespace

OperatorSpec sublaplacian(const MetricExtension& ext) {
  auto frame = ext.frame();
  FrameAlgebra alg(frame, ext.rank());
  OperatorSpec op = frame_laplacian(frame, alg, iota(ext.rank()), ext.dim);
  op.kind = OperatorKind::Sublaplacian;
  return op;
}

std::vector<Expr> mean_curvature(const MetricExtension& ext) {
  const int k = ext.rank();
  FrameAlgebra alg(ext.frame(), k);
  std::vector<Expr> h(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    for (int b = k; b < ext.dim; ++b) h[static_cast<std::size_t>(i)] += alg.constant(i, b, b);
  }
  return h;
}

VectorField mean_curvature_field(const MetricExtension& ext) {
  VectorField H = VectorField::zero(ext.dim);
  auto h = mean_curvature(ext);
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!h[i].is_zero()) H = H + h[i] * ext.horizontal[i];
  }
  return H;
}

OperatorSpec penalty_laplacian(const MetricExtension& ext, double eps) {
  MetricExtension pe = ext.penalty(eps);
  auto frame = pe.frame();
  FrameAlgebra alg(frame, pe.rank());
  OperatorSpec op = frame_laplacian(frame, alg, iota(pe.dim), pe.dim);
  op.kind = OperatorKind::Penalty;
  op.eps = eps;
  return op;
}

double product_rule_residual(const MetricExtension& ext, const OperatorSpec& sub, const Expr& u,
                             std::span<const double> p) {
  double grad2 = 0.0;
  for (const auto& g : horizontal_gradient_components(ext, u)) {
    double v = g.evaluate(p);
    grad2 += v * v;
  }
  double lhs = sub.apply_at(u * u, p);
  double rhs = 2.0 * grad2 + 2.0 * u.evaluate(p) * sub.apply_at(u, p);
  return std::abs(lhs - rhs);
}

double potential_residual(const MetricExtension& ext, const Expr& u, const std::vector<Point>& samples) {
  auto grad = horizontal_gradient_components(ext, u);
  auto h = mean_curvature(ext);
  double worst = 0.0;
  for (const auto& p : samples) {
    double uv = u.evaluate(p);
    if (!(uv > 0.0)) throw std::domain_error("density must be positive at every sample");
    double s = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) {
      double d = grad[i].evaluate(p) / uv - h[i].evaluate(p);
      s += d * d;
    }
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

}  // namespace srlab
