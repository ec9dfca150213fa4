#include "srlab/complement.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace srlab {

std::string to_string(Solvability s) { return s == Solvability::Unique ? "unique" : "least-squares"; }

Eigen::MatrixXd reference_mean_curvature(const StructureData& data) {
  const int k = data.rank;
  const int q = data.dim - k;
  Eigen::MatrixXd F(k, q);
  for (int b = 0; b < q; ++b) {
    for (int i = 0; i < k; ++i) F(i, b) = data(i, k + b, k + b);
  }
  return F;
}

Eigen::MatrixXd reference_mean_curvature(const SubRiemannianStructure& s, std::span<const double> p) {
  return reference_mean_curvature(structure_constants(s, p));
}

namespace {

struct PinvSolve {
  Eigen::VectorXd x;
  bool full_rank = false;
  double condition = 0.0;
};

// Minimum-norm least squares with the same rank cutoff as the flag code.
PinvSolve pinv_solve(const Eigen::MatrixXd& C, const Eigen::VectorXd& rhs) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  PinvSolve out;
  out.x = Eigen::VectorXd::Zero(C.cols());
  double smax = s.size() > 0 ? s[0] : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (smax > 0.0 && s[i] > kRankTolerance * smax) {
      out.x += svd.matrixV().col(i) * (svd.matrixU().col(i).dot(rhs) / s[i]);
      ++rank;
    }
  }
  out.full_rank = rank == C.cols();
  double smin = s.size() > 0 ? s[s.size() - 1] : 0.0;
  out.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  return out;
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& C) {
  Eigen::MatrixXd P(C.cols(), C.rows());
  for (Eigen::Index r = 0; r < C.rows(); ++r) P.col(r) = pinv_solve(C, Eigen::VectorXd::Unit(C.rows(), r)).x;
  return P;
}

// Small-denominator rationals stay exact so constant frames produce exact A.
Expr rationalize(double v) {
  for (std::int64_t q = 1; q <= 64; ++q) {
    double n = std::round(v * static_cast<double>(q));
    if (std::abs(n) < 1e15 && std::abs(v - n / static_cast<double>(q)) <= 1e-13 * std::max(1.0, std::abs(v))) {
      return Expr(Number(static_cast<std::int64_t>(n), q));
    }
  }
  return Expr::real(v);
}

}  // namespace

PointSolve solve_canonical_complement(const StructureData& data) {
  const int k = data.rank;
  const int q = data.dim - k;
  Eigen::MatrixXd Fbar = reference_mean_curvature(data);
  PointSolve ps;
  ps.point = data.point;
  ps.A = Eigen::MatrixXd::Zero(k, q);
  for (int b = 0; b < q; ++b) {
    Eigen::MatrixXd C = data.vertical_matrix(b);
    auto sol = pinv_solve(C, -Fbar.col(b));
    ps.A.col(b) = sol.x;
    ps.modes.push_back(sol.full_rank ? Solvability::Unique : Solvability::LeastSquares);
    ps.residuals.push_back((C * sol.x + Fbar.col(b)).norm());
    ps.condition.push_back(sol.condition);
  }
  return ps;
}

PointSolve solve_canonical_complement(const SubRiemannianStructure& s, std::span<const double> p) {
  return solve_canonical_complement(structure_constants(s, p));
}

double flat_residual(const StructureData& data, const Eigen::MatrixXd& A) {
  const int k = data.rank;
  const int q = data.dim - k;
  double worst = 0.0;
  for (int b = 0; b < q; ++b) {
    Eigen::VectorXd v(k);
    for (int i = 0; i < k; ++i) {
      double s = data(i, k + b, k + b);
      for (int j = 0; j < k; ++j) s += A(j, b) * data.vertical(i, j, b);
      v[i] = s;
    }
    worst = std::max(worst, v.norm());
  }
  return worst;
}

Eigen::MatrixXd AdaptedComplement::coefficients_at(std::span<const double> p) const {
  if (mode == ComplementMode::Pointwise) return solve_canonical_complement(reference, p).A;
  const int q = static_cast<int>(A.size());
  const int k = reference.rank();
  Eigen::MatrixXd out(k, q);
  for (int b = 0; b < q; ++b) {
    for (int i = 0; i < k; ++i) out(i, b) = A[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)].evaluate(p);
  }
  return out;
}

bool AdaptedComplement::unique() const {
  for (auto s : solvability) {
    if (s != Solvability::Unique) return false;
  }
  return true;
}

SubRiemannianStructure AdaptedComplement::adapted_structure() const {
  if (mode != ComplementMode::Symbolic) throw std::logic_error("adapted structure needs a symbolic complement");
  SubRiemannianStructure s = reference;
  s.complement = adapted_fields;
  return s;
}

AdaptedComplement canonical_complement(const SubRiemannianStructure& s, const std::vector<Point>& samples, Rng& rng,
                                       int probes) {
  if (samples.empty()) throw std::invalid_argument("canonical_complement: no sample points");
  const int k = s.rank();
  const int q = s.corank();
  AdaptedComplement ac;
  ac.reference = s;
  ac.solvability.assign(static_cast<std::size_t>(q), Solvability::Unique);

  FrameAlgebra alg(s);
  std::vector<StructureData> data;
  data.reserve(samples.size());
  for (const auto& p : samples) data.push_back(alg.at(p));

  std::vector<bool> warned(static_cast<std::size_t>(q), false);
  for (const auto& d : data) {
    PointSolve ps = solve_canonical_complement(d);
    for (int b = 0; b < q; ++b) {
      auto ub = static_cast<std::size_t>(b);
      if (ps.modes[ub] == Solvability::LeastSquares) ac.solvability[ub] = Solvability::LeastSquares;
      ac.max_residual = std::max(ac.max_residual, ps.residuals[ub]);
      ac.max_condition = std::max(ac.max_condition, ps.condition[ub]);
      if (!warned[ub] && ps.modes[ub] == Solvability::LeastSquares) {
        ac.warnings.push_back("C^" + std::to_string(b + 1) + " is singular; minimum-norm least-squares solution");
        warned[ub] = true;
      } else if (!warned[ub] && ps.condition[ub] > kConditionWarning) {
        ac.warnings.push_back("C^" + std::to_string(b + 1) + " is ill-conditioned (condition number above 1e8)");
        warned[ub] = true;
      }
    }
  }

  // Symbolic mode needs every C_ij^beta constant; test on samples and random probes.
  std::vector<Point> probe_points = samples;
  for (int t = 0; t < probes; ++t) probe_points.push_back(random_point(rng, s.periods));
  bool constant = true;
  std::vector<Eigen::MatrixXd> C0;
  StructureData first = data.front();
  for (int b = 0; b < q; ++b) C0.push_back(first.vertical_matrix(b));
  for (std::size_t n = 0; n < probe_points.size() && constant; ++n) {
    StructureData d = n < data.size() ? data[n] : alg.at(probe_points[n]);
    for (int b = 0; b < q && constant; ++b) {
      Eigen::MatrixXd diff = d.vertical_matrix(b) - C0[static_cast<std::size_t>(b)];
      double scale = 1.0 + C0[static_cast<std::size_t>(b)].cwiseAbs().maxCoeff();
      if (diff.cwiseAbs().maxCoeff() > 1e-12 * scale) constant = false;
    }
  }
  if (!constant) return ac;

  ac.mode = ComplementMode::Symbolic;
  ac.A.assign(static_cast<std::size_t>(q), std::vector<Expr>(static_cast<std::size_t>(k)));
  for (int b = 0; b < q; ++b) {
    Eigen::MatrixXd P = pinv(C0[static_cast<std::size_t>(b)]);
    VectorField T = s.complement[static_cast<std::size_t>(b)];
    for (int i = 0; i < k; ++i) {
      Expr a;
      for (int j = 0; j < k; ++j) {
        if (std::abs(P(i, j)) <= kRankTolerance * (1.0 + P.cwiseAbs().maxCoeff())) continue;
        a -= rationalize(P(i, j)) * alg.constant(j, k + b, k + b);
      }
      // Collapse coefficients that vanish at every probe to the literal zero.
      bool vanishes = true;
      for (const auto& p : probe_points) {
        if (std::abs(a.evaluate(p)) > 1e-13) {
          vanishes = false;
          break;
        }
      }
      if (vanishes) a = Expr();
      ac.A[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)] = a;
      if (!a.is_zero()) T = T + a * s.horizontal[static_cast<std::size_t>(i)];
    }
    for (auto& c : T.components) c = simplify(c);
    ac.adapted_fields.push_back(std::move(T));
  }
  return ac;
}

double verify_flat_complement(const AdaptedComplement& ac, const std::vector<Point>& samples) {
  FrameAlgebra alg(ac.reference);
  double worst = 0.0;
  for (const auto& p : samples) worst = std::max(worst, flat_residual(alg.at(p), ac.coefficients_at(p)));
  return worst;
}

// ---------------------------------------------------------------------------
// MetricExtension

MetricExtension MetricExtension::from_structure(const SubRiemannianStructure& s) {
  MetricExtension e;
  e.dim = s.dim;
  e.horizontal = s.horizontal;
  e.complement = s.complement;
  return e;
}

MetricExtension MetricExtension::canonical(const AdaptedComplement& ac) {
  return from_structure(ac.adapted_structure());
}

std::vector<VectorField> MetricExtension::frame() const {
  std::vector<VectorField> f = horizontal;
  Expr inv = eps == 1.0 ? Expr(1) : Expr::real(1.0 / eps);
  for (const auto& T : complement) f.push_back(eps == 1.0 ? T : inv * T);
  return f;
}

MetricExtension MetricExtension::penalty(double e) const {
  if (!(e > 0.0)) throw std::invalid_argument("penalty parameter must be positive");
  MetricExtension out = *this;
  out.eps = e;
  return out;
}

Eigen::MatrixXd MetricExtension::frame_matrix(std::span<const double> p) const {
  return srlab::frame_matrix(frame(), p);
}

double MetricExtension::volume_density(std::span<const double> p) const {
  double det = frame_matrix(p).determinant();
  if (det == 0.0 || !std::isfinite(det)) throw StructureError("singular frame in volume_density");
  return 1.0 / std::abs(det);
}

}  // namespace srlab
