#include "srlab/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace srlab {

// ---------------------------------------------------------------------------
// VectorField

VectorField VectorField::parse(const std::vector<std::string>& text, int dim) {
  if (static_cast<int>(text.size()) != dim) {
    throw StructureError("vector field has " + std::to_string(text.size()) + " components, expected " +
                         std::to_string(dim));
  }
  std::vector<Expr> c;
  c.reserve(text.size());
  for (const auto& t : text) c.push_back(srlab::parse(t, dim));
  return VectorField(std::move(c));
}

VectorField VectorField::zero(int dim) { return VectorField(std::vector<Expr>(static_cast<std::size_t>(dim))); }

VectorField VectorField::coordinate(int dim, int axis) {
  VectorField X = zero(dim);
  X.components[static_cast<std::size_t>(axis)] = Expr(1);
  return X;
}

bool VectorField::is_zero() const {
  return std::all_of(components.begin(), components.end(), [](const Expr& e) { return e.is_zero(); });
}

Expr VectorField::apply(const Expr& f) const {
  Expr out;
  for (int j = 0; j < dim(); ++j) {
    if ((*this)[j].is_zero()) continue;
    Expr d = differentiate(f, j);
    if (d.is_zero()) continue;
    out += (*this)[j] * d;
  }
  return out;
}

Eigen::VectorXd VectorField::evaluate(std::span<const double> p) const {
  Eigen::VectorXd v(dim());
  for (int j = 0; j < dim(); ++j) v[j] = (*this)[j].evaluate(p);
  return v;
}

std::vector<std::string> VectorField::to_strings() const {
  std::vector<std::string> out;
  out.reserve(components.size());
  for (const auto& c : components) out.push_back(c.to_string());
  return out;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  VectorField r = a;
  for (std::size_t j = 0; j < r.components.size(); ++j) r.components[j] += b.components[j];
  return r;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  VectorField r = a;
  for (std::size_t j = 0; j < r.components.size(); ++j) r.components[j] -= b.components[j];
  return r;
}

VectorField operator*(const Expr& f, const VectorField& X) {
  VectorField r = X;
  for (auto& c : r.components) c = f * c;
  return r;
}

VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
  if (X.dim() != Y.dim()) throw std::invalid_argument("lie_bracket: dimension mismatch");
  VectorField r = VectorField::zero(X.dim());
  for (int j = 0; j < X.dim(); ++j) r.components[static_cast<std::size_t>(j)] = X.apply(Y[j]) - Y.apply(X[j]);
  return r;
}

// ---------------------------------------------------------------------------
// Structure

std::vector<VectorField> SubRiemannianStructure::frame() const {
  std::vector<VectorField> f = horizontal;
  f.insert(f.end(), complement.begin(), complement.end());
  return f;
}

void SubRiemannianStructure::validate(const std::vector<Point>* samples) const {
  if (dim < 2) throw StructureError("dimension must be at least 2");
  int k = rank();
  if (k < 1 || k >= dim) {
    throw StructureError("horizontal rank " + std::to_string(k) + " must satisfy 1 <= k < " + std::to_string(dim));
  }
  if (static_cast<int>(periods.size()) != dim) throw StructureError("periods must have one entry per coordinate");
  for (double L : periods) {
    if (!(L > 0.0) || !std::isfinite(L)) throw StructureError("periods must be positive");
  }
  if (static_cast<int>(complement.size()) != dim - k) {
    throw StructureError("complement has " + std::to_string(complement.size()) + " fields, expected " +
                         std::to_string(dim - k));
  }
  for (const auto& X : frame()) {
    if (X.dim() != dim) throw StructureError("field with wrong number of components");
    for (const auto& c : X.components) {
      if (c.max_variable() >= dim) throw StructureError("coefficient uses a variable outside the dimension");
    }
  }
  std::vector<Point> own;
  if (samples == nullptr) {
    own = lattice(periods, 5);
    samples = &own;
  }
  auto all = frame();
  for (const auto& p : *samples) {
    Eigen::MatrixXd F = frame_matrix(all, p);
    if (numerical_rank(F.leftCols(k)) < k) throw StructureError("horizontal fields are dependent at a sample point");
    if (numerical_rank(F) < dim) throw StructureError("frame matrix is singular at a sample point");
  }
}

std::vector<Point> lattice(std::span<const double> periods, int per_axis) {
  std::size_t m = periods.size();
  std::size_t total = 1;
  for (std::size_t j = 0; j < m; ++j) total *= static_cast<std::size_t>(per_axis);
  std::vector<Point> pts;
  pts.reserve(total);
  std::vector<int> idx(m, 0);
  for (std::size_t n = 0; n < total; ++n) {
    Point p(m);
    for (std::size_t j = 0; j < m; ++j) p[j] = periods[j] * idx[j] / per_axis;
    pts.push_back(std::move(p));
    for (std::size_t j = m; j-- > 0;) {
      if (++idx[j] < per_axis) break;
      idx[j] = 0;
    }
  }
  return pts;
}

std::vector<Point> random_points(std::span<const double> periods, int count, Rng& rng) {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) pts.push_back(random_point(rng, periods));
  return pts;
}

Eigen::MatrixXd frame_matrix(const std::vector<VectorField>& frame, std::span<const double> p) {
  int m = frame.empty() ? 0 : frame[0].dim();
  Eigen::MatrixXd F(m, static_cast<Eigen::Index>(frame.size()));
  for (std::size_t u = 0; u < frame.size(); ++u) F.col(static_cast<Eigen::Index>(u)) = frame[u].evaluate(p);
  return F;
}

int numerical_rank(const Eigen::MatrixXd& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > tol * s[0]) ++r;
  }
  return r;
}

Eigen::MatrixXd StructureData::vertical_matrix(int beta) const {
  Eigen::MatrixXd M(rank, rank);
  for (int i = 0; i < rank; ++i) {
    for (int j = 0; j < rank; ++j) M(i, j) = vertical(i, j, beta);
  }
  return M;
}

// ---------------------------------------------------------------------------
// FrameAlgebra

FrameAlgebra::FrameAlgebra(std::vector<VectorField> frame, int rank)
    : frame_(std::move(frame)), dim_(static_cast<int>(frame_.size())), rank_(rank) {
  for (const auto& f : frame_) {
    if (f.dim() != dim_) throw StructureError("frame must consist of m fields in m coordinates");
  }
  brackets_.assign(static_cast<std::size_t>(dim_ * dim_), VectorField::zero(dim_));
  for (int u = 0; u < dim_; ++u) {
    for (int v = u + 1; v < dim_; ++v) {
      VectorField b = lie_bracket(frame_[static_cast<std::size_t>(u)], frame_[static_cast<std::size_t>(v)]);
      VectorField nb = VectorField::zero(dim_) - b;
      brackets_[static_cast<std::size_t>(u * dim_ + v)] = std::move(b);
      brackets_[static_cast<std::size_t>(v * dim_ + u)] = std::move(nb);
    }
  }
}

FrameAlgebra::FrameAlgebra(const SubRiemannianStructure& s) : FrameAlgebra(s.frame(), s.rank()) {}

const VectorField& FrameAlgebra::bracket(int u, int v) const {
  return brackets_[static_cast<std::size_t>(u * dim_ + v)];
}

StructureData FrameAlgebra::at(std::span<const double> p) const {
  StructureData d;
  d.point.assign(p.begin(), p.end());
  d.dim = dim_;
  d.rank = rank_;
  Eigen::MatrixXd F = frame_matrix(frame_, p);
  if (numerical_rank(F) < dim_) throw StructureError("frame matrix is singular at the evaluation point");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(F);
  d.c.assign(static_cast<std::size_t>(dim_ * dim_ * dim_), 0.0);
  d.bracket_table.assign(static_cast<std::size_t>(dim_ * dim_), Eigen::VectorXd::Zero(dim_));
  for (int u = 0; u < dim_; ++u) {
    for (int v = u + 1; v < dim_; ++v) {
      Eigen::VectorXd b = bracket(u, v).evaluate(p);
      Eigen::VectorXd c = lu.solve(b);
      for (int w = 0; w < dim_; ++w) {
        d.c[static_cast<std::size_t>((u * dim_ + v) * dim_ + w)] = c[w];
        d.c[static_cast<std::size_t>((v * dim_ + u) * dim_ + w)] = -c[w];
      }
      d.bracket_table[static_cast<std::size_t>(u * dim_ + v)] = b;
      d.bracket_table[static_cast<std::size_t>(v * dim_ + u)] = -b;
    }
  }
  return d;
}

void FrameAlgebra::build_symbolic() const {
  std::call_once(symbolic_once_, [this] {
    const int m = dim_;
    auto entry = [this](int row, int col) -> const Expr& {
      return frame_[static_cast<std::size_t>(col)][row];
    };
    // Laplace expansion along the lowest remaining row, memoized on (rows, cols).
    std::map<std::pair<unsigned, unsigned>, Expr> memo;
    std::function<Expr(unsigned, unsigned)> minor = [&](unsigned rows, unsigned cols) -> Expr {
      if (rows == 0) return Expr(1);
      auto key = std::make_pair(rows, cols);
      if (auto it = memo.find(key); it != memo.end()) return it->second;
      int r = std::countr_zero(rows);
      Expr sum;
      int t = 0;
      for (int c = 0; c < m; ++c) {
        if (!(cols & (1U << c))) continue;
        const Expr& a = entry(r, c);
        if (!a.is_zero()) {
          Expr term = a * minor(rows & ~(1U << r), cols & ~(1U << c));
          sum = (t % 2 == 0) ? sum + term : sum - term;
        }
        ++t;
      }
      memo.emplace(key, sum);
      return sum;
    };
    const unsigned full = (1U << m) - 1U;
    det_ = minor(full, full);
    std::vector<Expr> adj(static_cast<std::size_t>(m * m));
    for (int w = 0; w < m; ++w) {
      for (int j = 0; j < m; ++j) {
        Expr mnr = minor(full & ~(1U << j), full & ~(1U << w));
        adj[static_cast<std::size_t>(w * m + j)] = ((w + j) % 2 == 0) ? mnr : -mnr;
      }
    }
    coframe_.resize(static_cast<std::size_t>(m * m));
    for (std::size_t i = 0; i < adj.size(); ++i) coframe_[i] = adj[i] / det_;

    constants_.assign(static_cast<std::size_t>(m * m * m), Expr());
    for (int u = 0; u < m; ++u) {
      for (int v = u + 1; v < m; ++v) {
        const VectorField& b = bracket(u, v);
        for (int w = 0; w < m; ++w) {
          Expr num;
          for (int j = 0; j < m; ++j) {
            if (b[j].is_zero()) continue;
            num += adj[static_cast<std::size_t>(w * m + j)] * b[j];
          }
          Expr c = num / det_;
          constants_[static_cast<std::size_t>((u * m + v) * m + w)] = c;
          constants_[static_cast<std::size_t>((v * m + u) * m + w)] = -c;
        }
      }
    }
  });
}

const Expr& FrameAlgebra::determinant() const {
  build_symbolic();
  return det_;
}

const Expr& FrameAlgebra::coframe(int w, int j) const {
  build_symbolic();
  return coframe_[static_cast<std::size_t>(w * dim_ + j)];
}

const Expr& FrameAlgebra::constant(int u, int v, int w) const {
  build_symbolic();
  return constants_[static_cast<std::size_t>((u * dim_ + v) * dim_ + w)];
}

StructureData structure_constants(const SubRiemannianStructure& s, std::span<const double> p) {
  return FrameAlgebra(s).at(p);
}

// ---------------------------------------------------------------------------
// Flag

BracketFlag::BracketFlag(const SubRiemannianStructure& s, int max_depth) : dim_(s.dim) {
  if (max_depth < 1) throw std::invalid_argument("max_depth must be at least 1");
  levels_.push_back(s.horizontal);
  for (int d = 1; d < max_depth; ++d) {
    std::vector<VectorField> next;
    const auto& prev = levels_.back();
    for (std::size_t a = 0; a < s.horizontal.size(); ++a) {
      for (std::size_t f = 0; f < prev.size(); ++f) {
        if (d == 1 && f <= a) continue;  // [X_a, X_b] with a >= b adds nothing new
        VectorField b = lie_bracket(s.horizontal[a], prev[f]);
        if (!b.is_zero()) next.push_back(std::move(b));
      }
    }
    levels_.push_back(std::move(next));
  }
}

BracketFlag::Result BracketFlag::at(std::span<const double> p, double tol) const {
  Result r;
  Eigen::MatrixXd span(dim_, 0);
  for (std::size_t level = 0; level < levels_.size(); ++level) {
    const auto& fields = levels_[level];
    Eigen::Index old = span.cols();
    span.conservativeResize(Eigen::NoChange, old + static_cast<Eigen::Index>(fields.size()));
    for (std::size_t i = 0; i < fields.size(); ++i) span.col(old + static_cast<Eigen::Index>(i)) = fields[i].evaluate(p);
    int d = numerical_rank(span, tol);
    r.dims.push_back(d);
    if (d == dim_) {
      r.degree = static_cast<int>(level) + 1;
      break;
    }
  }
  return r;
}

BracketFlag::Result hormander_flag(const SubRiemannianStructure& s, std::span<const double> p, int max_depth) {
  return BracketFlag(s, max_depth).at(p);
}

int hausdorff_dimension(const std::vector<int>& flag_dims, int dim) {
  if (flag_dims.empty() || flag_dims.back() != dim) {
    throw std::invalid_argument("hausdorff_dimension: flag does not reach the full dimension");
  }
  int q = 0;
  int prev = 0;
  for (std::size_t i = 0; i < flag_dims.size(); ++i) {
    if (flag_dims[i] < prev) throw std::invalid_argument("hausdorff_dimension: flag dimensions decrease");
    q += static_cast<int>(i + 1) * (flag_dims[i] - prev);
    prev = flag_dims[i];
  }
  return q;
}

RegularityReport is_regular(const SubRiemannianStructure& s, const std::vector<Point>& samples, int max_depth) {
  if (samples.empty()) throw std::invalid_argument("is_regular: no sample points");
  BracketFlag flag(s, max_depth);
  RegularityReport rep;
  rep.regular = true;
  for (const auto& p : samples) {
    auto r = flag.at(p);
    if (!rep.dims.empty() && r.dims != rep.dims.front()) rep.regular = false;
    rep.dims.push_back(r.dims);
    rep.degrees.push_back(r.degree);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Fatness

FatnessReport is_fat(const StructureData& data, int covector_samples, Rng& rng, double tol) {
  const int k = data.rank;
  const int q = data.dim - data.rank;
  std::vector<Eigen::MatrixXd> C;
  for (int b = 0; b < q; ++b) C.push_back(data.vertical_matrix(b));
  FatnessReport rep;
  rep.fat = true;
  rep.min_relative_det = std::numeric_limits<double>::infinity();
  int total = std::max(covector_samples, q);
  for (int s = 0; s < total; ++s) {
    std::vector<double> lambda(static_cast<std::size_t>(q), 0.0);
    if (s < q) {
      lambda[static_cast<std::size_t>(s)] = 1.0;
    } else {
      lambda = random_unit(rng, static_cast<std::size_t>(q));
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k, k);
    for (int b = 0; b < q; ++b) M += lambda[static_cast<std::size_t>(b)] * C[static_cast<std::size_t>(b)];
    double scale = M.cwiseAbs().maxCoeff();
    double rel = scale > 0.0 ? std::abs(M.determinant()) / std::pow(scale, k) : 0.0;
    rep.min_relative_det = std::min(rep.min_relative_det, rel);
    if (!(rel > tol) && rep.fat) {
      rep.fat = false;
      rep.witness = lambda;
    }
  }
  return rep;
}

FatnessReport is_fat(const SubRiemannianStructure& s, std::span<const double> p, int covector_samples, Rng& rng,
                     double tol) {
  return is_fat(structure_constants(s, p), covector_samples, rng, tol);
}

double cartan_residual(const std::vector<Expr>& omega, const VectorField& X, const VectorField& Y,
                       std::span<const double> p) {
  const int m = X.dim();
  if (static_cast<int>(omega.size()) != m || Y.dim() != m) {
    throw std::invalid_argument("cartan_residual: dimension mismatch");
  }
  Eigen::VectorXd x = X.evaluate(p);
  Eigen::VectorXd y = Y.evaluate(p);
  double lhs = 0.0;
  for (int j = 0; j < m; ++j) {
    for (int l = 0; l < m; ++l) {
      if (j == l) continue;
      double dj_wl = differentiate(omega[static_cast<std::size_t>(l)], j).evaluate(p);
      double dl_wj = differentiate(omega[static_cast<std::size_t>(j)], l).evaluate(p);
      lhs += (dj_wl - dl_wj) * x[j] * y[l];
    }
  }
  auto pair = [&](const VectorField& Z) {
    Expr s;
    for (int j = 0; j < m; ++j) s += omega[static_cast<std::size_t>(j)] * Z[j];
    return s;
  };
  double rhs = X.apply(pair(Y)).evaluate(p) - Y.apply(pair(X)).evaluate(p) - pair(lie_bracket(X, Y)).evaluate(p);
  return std::abs(lhs - rhs);
}

}  // namespace srlab
