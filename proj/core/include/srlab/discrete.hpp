// Periodic grids, difference operators for frame fields, diagonal mass
// matrices and the weak-form Laplacian sum_sigma sum_i D^T M D.
//
// Assembly is templated on the scalar so the same code can run on exact
// rationals. Coefficients are always evaluated in double and then converted.
#pragma once

#include <cmath>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "srlab/operators.hpp"
#include "srlab/parallel.hpp"

namespace srlab {

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a coefficient differs at x_j = 0 and x_j = L_j.
class PeriodicityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class Grid {
 public:
  Grid(std::vector<int> n, std::vector<double> periods);
  static Grid uniform(const std::vector<double>& periods, int n);

  int dim() const { return static_cast<int>(n_.size()); }
  std::size_t size() const { return size_; }
  int n(int j) const { return n_[static_cast<std::size_t>(j)]; }
  const std::vector<int>& resolution() const { return n_; }
  const std::vector<double>& periods() const { return periods_; }
  double h(int j) const { return periods_[static_cast<std::size_t>(j)] / n_[static_cast<std::size_t>(j)]; }
  double cell_volume() const;

  /// Row-major: the last axis varies fastest.
  std::size_t index(const std::vector<int>& multi) const;
  std::vector<int> multi_index(std::size_t idx) const;
  /// Neighbour idx + delta * e_axis with periodic wraparound.
  std::size_t shift(std::size_t idx, int axis, int delta) const;
  Point point(std::size_t idx) const;
  std::vector<Point> points() const;

 private:
  std::vector<int> n_;
  std::vector<double> periods_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 0;
};

/// Throws PeriodicityError if some expression differs by more than `tol`
/// between x_j = 0 and x_j = L_j on a small sample set.
void check_periodic(const std::vector<Expr>& coefficients, const Grid& grid, double tol = 1e-8);

/// A = diag + off. Off-diagonal entries are stored in CSR with ascending
/// columns. apply() computes row i as sum_q a_iq (x_q - x_i) + (row sum) x_i,
/// so a diagonal built as minus the off-diagonal sum sends every constant
/// vector to exactly zero.
template <class Scalar>
struct SparseOperator {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::size_t> col;
  std::vector<Scalar> val;
  std::vector<Scalar> diag;
  bool symmetric = false;

  std::size_t nonzeros() const;
  Scalar at(std::size_t i, std::size_t j) const;
  std::vector<Scalar> apply(const std::vector<Scalar>& x) const;
  /// max |A_ij - A_ji| over stored entries.
  Scalar max_asymmetry() const;
  Scalar bilinear(const std::vector<Scalar>& f, const std::vector<Scalar>& e) const;
};

template <class Scalar>
SparseOperator<Scalar> diagonal_operator(std::vector<Scalar> d);

/// Builds an operator from per-row (column, value) maps. With zero_row_sum the
/// diagonal is minus the off-diagonal sum of each row, in column order.
template <class Scalar>
SparseOperator<Scalar> from_rows(std::vector<std::map<std::size_t, Scalar>> rows, bool zero_row_sum);

enum class Stencil { Central, Forward, Backward };

/// (D f)(p) = sum_j w_j(p) (f(p + a_j) - f(p - b_j)) where (a_j, b_j) is
/// (e_j, e_j), (e_j, 0) or (0, e_j) for central, forward and backward
/// stencils and w_j = X^j(p) / (2 h_j) or X^j(p) / h_j.
template <class Scalar>
struct DifferenceOperator {
  Stencil stencil = Stencil::Central;
  std::vector<std::vector<Scalar>> weight;  // [axis][point]

  std::vector<Scalar> apply(const Grid& grid, const std::vector<Scalar>& f) const;
  SparseOperator<Scalar> to_sparse(const Grid& grid) const;
};

template <class Scalar>
DifferenceOperator<Scalar> assemble_field(const VectorField& X, const Grid& grid,
                                          Stencil stencil = Stencil::Central);

/// Diagonal weights density(p) * prod h_j. Throws std::domain_error on a
/// nonpositive value.
template <class Scalar>
SparseOperator<Scalar> mass_matrix(const std::vector<double>& density, const Grid& grid);

/// L = 1/2 sum_sigma sum_r s_r D_{r,sigma}^T M D_{r,sigma} with sigma over the
/// forward and backward stencils. The fields are X_1..X_k with s_r = 1 and,
/// when eps is given, T_beta with s_r = eps^-2. M carries u * dvol.
template <class Scalar>
struct WeakForm {
  SparseOperator<Scalar> L;
  SparseOperator<Scalar> M;
  std::vector<DifferenceOperator<Scalar>> forward;
  std::vector<DifferenceOperator<Scalar>> backward;
  std::vector<Scalar> scale;

  /// 1/2 sum_sigma sum_r s_r (D e)^T M (D f), accumulated independently of L.
  Scalar energy(const std::vector<Scalar>& e, const std::vector<Scalar>& f, const Grid& grid) const;
};

struct WeakOptions {
  std::optional<double> eps;
  /// Density u of the measure u dvol; defaults to 1.
  std::optional<Expr> density;
};

template <class Scalar>
WeakForm<Scalar> assemble_weak_laplacian(const MetricExtension& ext, const Grid& grid,
                                         const WeakOptions& options = {});

/// a^{jl} d_j d_l + b^j d_j + c with every derivative a central difference;
/// second derivatives are composed first differences (width 2h).
SparseOperator<double> assemble_strong(const OperatorSpec& spec, const Grid& grid);

/// Values of f at every grid point.
std::vector<double> sample(const Expr& f, const Grid& grid);

/// Coordinate format; symmetric operators are written as their lower triangle.
void write_matrix_market(std::ostream& out, const SparseOperator<double>& A);
SparseOperator<double> read_matrix_market(std::istream& in);

// ---------------------------------------------------------------------------
// Template definitions

namespace detail {

template <class Scalar>
Scalar from_double(double v) {
  return Scalar(v);
}

template <class Scalar>
Scalar abs_value(const Scalar& v) {
  return v < Scalar(0) ? Scalar(-v) : v;
}

// w[axis][point] = X^axis(p) / (factor * h_axis).
std::vector<std::vector<double>> field_weights(const VectorField& X, const Grid& grid, double factor);

std::vector<double> positive_density(const std::optional<Expr>& density, const MetricExtension& ext,
                                     const Grid& grid);

}  // namespace detail

template <class Scalar>
std::size_t SparseOperator<Scalar>::nonzeros() const {
  std::size_t d = 0;
  for (const auto& v : diag) {
    if (v != Scalar(0)) ++d;
  }
  return d + val.size();
}

template <class Scalar>
Scalar SparseOperator<Scalar>::at(std::size_t i, std::size_t j) const {
  if (i == j) return diag[i];
  for (std::size_t q = row_ptr[i]; q < row_ptr[i + 1]; ++q) {
    if (col[q] == j) return val[q];
  }
  return Scalar(0);
}

template <class Scalar>
std::vector<Scalar> SparseOperator<Scalar>::apply(const std::vector<Scalar>& x) const {
  if (x.size() != n) throw std::invalid_argument("SparseOperator::apply: size mismatch");
  std::vector<Scalar> y(n);
  parallel_for(n, [&](std::size_t i) {
    Scalar s(0), t(0);
    for (std::size_t q = row_ptr[i]; q < row_ptr[i + 1]; ++q) {
      s += val[q] * (x[col[q]] - x[i]);
      t += val[q];
    }
    y[i] = s + (diag[i] + t) * x[i];
  });
  return y;
}

template <class Scalar>
Scalar SparseOperator<Scalar>::max_asymmetry() const {
  Scalar worst(0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t q = row_ptr[i]; q < row_ptr[i + 1]; ++q) {
      Scalar d = detail::abs_value<Scalar>(val[q] - at(col[q], i));
      if (d > worst) worst = d;
    }
  }
  return worst;
}

template <class Scalar>
Scalar SparseOperator<Scalar>::bilinear(const std::vector<Scalar>& f, const std::vector<Scalar>& e) const {
  std::vector<Scalar> Le = apply(e);
  Scalar s(0);
  for (std::size_t i = 0; i < n; ++i) s += f[i] * Le[i];
  return s;
}

template <class Scalar>
SparseOperator<Scalar> diagonal_operator(std::vector<Scalar> d) {
  SparseOperator<Scalar> A;
  A.n = d.size();
  A.row_ptr.assign(A.n + 1, 0);
  A.diag = std::move(d);
  A.symmetric = true;
  return A;
}

template <class Scalar>
SparseOperator<Scalar> from_rows(std::vector<std::map<std::size_t, Scalar>> rows, bool zero_row_sum) {
  SparseOperator<Scalar> A;
  A.n = rows.size();
  A.row_ptr.assign(A.n + 1, 0);
  A.diag.assign(A.n, Scalar(0));
  for (std::size_t i = 0; i < A.n; ++i) {
    std::size_t off = rows[i].size() - (rows[i].count(i) ? 1 : 0);
    A.row_ptr[i + 1] = A.row_ptr[i] + off;
  }
  A.col.resize(A.row_ptr[A.n]);
  A.val.resize(A.row_ptr[A.n]);
  for (std::size_t i = 0; i < A.n; ++i) {
    std::size_t q = A.row_ptr[i];
    Scalar sum(0);
    for (auto& [j, v] : rows[i]) {
      if (j == i) {
        A.diag[i] = v;
        continue;
      }
      sum += v;
      A.col[q] = j;
      A.val[q] = std::move(v);
      ++q;
    }
    if (zero_row_sum) A.diag[i] = -sum;
  }
  return A;
}

template <class Scalar>
std::vector<Scalar> DifferenceOperator<Scalar>::apply(const Grid& grid, const std::vector<Scalar>& f) const {
  if (f.size() != grid.size()) throw std::invalid_argument("DifferenceOperator::apply: size mismatch");
  std::vector<Scalar> out(grid.size());
  const int plus = stencil == Stencil::Backward ? 0 : 1;
  const int minus = stencil == Stencil::Forward ? 0 : -1;
  parallel_for(grid.size(), [&](std::size_t p) {
    Scalar s(0);
    for (int j = 0; j < grid.dim(); ++j) {
      const Scalar& w = weight[static_cast<std::size_t>(j)][p];
      if (w == Scalar(0)) continue;
      s += w * (f[grid.shift(p, j, plus)] - f[grid.shift(p, j, minus)]);
    }
    out[p] = s;
  });
  return out;
}

template <class Scalar>
SparseOperator<Scalar> DifferenceOperator<Scalar>::to_sparse(const Grid& grid) const {
  std::vector<std::map<std::size_t, Scalar>> rows(grid.size());
  const int plus = stencil == Stencil::Backward ? 0 : 1;
  const int minus = stencil == Stencil::Forward ? 0 : -1;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (int j = 0; j < grid.dim(); ++j) {
      const Scalar& w = weight[static_cast<std::size_t>(j)][p];
      if (w == Scalar(0)) continue;
      std::size_t a = grid.shift(p, j, plus);
      std::size_t b = grid.shift(p, j, minus);
      if (a != p) rows[p][a] += w;
      if (b != p) rows[p][b] -= w;
    }
  }
  return from_rows(std::move(rows), true);
}

template <class Scalar>
DifferenceOperator<Scalar> assemble_field(const VectorField& X, const Grid& grid, Stencil stencil) {
  if (X.dim() != grid.dim()) throw GridError("assemble_field: field and grid dimensions differ");
  check_periodic(X.components, grid);
  DifferenceOperator<Scalar> D;
  D.stencil = stencil;
  auto w = detail::field_weights(X, grid, stencil == Stencil::Central ? 2.0 : 1.0);
  D.weight.resize(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    D.weight[j].reserve(w[j].size());
    for (double v : w[j]) D.weight[j].push_back(detail::from_double<Scalar>(v));
  }
  return D;
}

template <class Scalar>
SparseOperator<Scalar> mass_matrix(const std::vector<double>& density, const Grid& grid) {
  if (density.size() != grid.size()) throw std::invalid_argument("mass_matrix: one density value per grid point");
  Scalar cell = detail::from_double<Scalar>(grid.cell_volume());
  std::vector<Scalar> d;
  d.reserve(density.size());
  for (double u : density) {
    if (!(u > 0.0)) throw std::domain_error("mass_matrix: density must be positive");
    d.push_back(detail::from_double<Scalar>(u) * cell);
  }
  return diagonal_operator(std::move(d));
}

template <class Scalar>
Scalar WeakForm<Scalar>::energy(const std::vector<Scalar>& e, const std::vector<Scalar>& f, const Grid& grid) const {
  Scalar total(0);
  for (std::size_t r = 0; r < forward.size(); ++r) {
    Scalar part(0);
    for (const auto* D : {&forward[r], &backward[r]}) {
      auto De = D->apply(grid, e);
      auto Df = D->apply(grid, f);
      for (std::size_t p = 0; p < De.size(); ++p) part += De[p] * M.diag[p] * Df[p];
    }
    total += scale[r] * part / Scalar(2);
  }
  return total;
}

template <class Scalar>
WeakForm<Scalar> assemble_weak_laplacian(const MetricExtension& ext, const Grid& grid, const WeakOptions& options) {
  if (ext.dim != grid.dim()) throw GridError("assemble_weak_laplacian: structure and grid dimensions differ");
  {
    std::vector<Expr> coefficients;
    for (const auto& fs : {ext.horizontal, ext.complement})
      for (const auto& X : fs) coefficients.insert(coefficients.end(), X.components.begin(), X.components.end());
    if (options.density) coefficients.push_back(*options.density);
    check_periodic(coefficients, grid);
  }
  WeakForm<Scalar> wf;
  wf.M = mass_matrix<Scalar>(detail::positive_density(options.density, ext, grid), grid);

  std::vector<VectorField> fields = ext.horizontal;
  for (std::size_t r = 0; r < fields.size(); ++r) wf.scale.push_back(Scalar(1));
  if (options.eps) {
    if (!(*options.eps > 0.0)) throw std::invalid_argument("penalty parameter must be positive");
    Scalar e = detail::from_double<Scalar>(*options.eps);
    for (const auto& T : ext.complement) {
      fields.push_back(T);
      wf.scale.push_back(Scalar(1) / (e * e));
    }
  }
  for (const auto& X : fields) {
    wf.forward.push_back(assemble_field<Scalar>(X, grid, Stencil::Forward));
    wf.backward.push_back(assemble_field<Scalar>(X, grid, Stencil::Backward));
  }

  // Row a gathers every stencil containing it: forward stencils based at a and
  // at a - e_j, backward ones at a and a + e_j. Only the upper triangle is
  // summed here and then mirrored, so L is symmetric by construction.
  const int m = grid.dim();
  const std::size_t N = grid.size();
  std::vector<std::map<std::size_t, Scalar>> upper(N);
  parallel_for(N, [&](std::size_t a) {
    auto& row = upper[a];
    for (std::size_t r = 0; r < fields.size(); ++r) {
      for (int sigma = 0; sigma < 2; ++sigma) {
        const auto& D = sigma == 0 ? wf.forward[r] : wf.backward[r];
        const int dir = sigma == 0 ? 1 : -1;
        // Stencil at base p: node p with coefficient -dir * sum_j w_j, node
        // p + dir e_j with coefficient dir * w_j.
        auto visit = [&](std::size_t p) {
          Scalar wsum(0);
          for (int j = 0; j < m; ++j) wsum += D.weight[static_cast<std::size_t>(j)][p];
          auto coeff = [&](std::size_t node) -> std::optional<Scalar> {
            if (node == p) return dir > 0 ? Scalar(-wsum) : wsum;
            for (int j = 0; j < m; ++j) {
              if (grid.shift(p, j, dir) == node) {
                const Scalar& w = D.weight[static_cast<std::size_t>(j)][p];
                return dir > 0 ? w : Scalar(-w);
              }
            }
            return std::nullopt;
          };
          auto ca = coeff(a);
          if (!ca || *ca == Scalar(0)) return;
          Scalar mu = wf.M.diag[p] * wf.scale[r] / Scalar(2);
          auto add = [&](std::size_t b, const Scalar& cb) {
            if (b <= a || cb == Scalar(0)) return;
            row[b] += mu * (*ca * cb);
          };
          add(p, *coeff(p));
          for (int j = 0; j < m; ++j) add(grid.shift(p, j, dir), *coeff(grid.shift(p, j, dir)));
        };
        visit(a);
        for (int j = 0; j < m; ++j) visit(grid.shift(a, j, -dir));
      }
    }
  });

  std::vector<std::map<std::size_t, Scalar>> rows(N);
  for (std::size_t a = 0; a < N; ++a) {
    for (const auto& [b, v] : upper[a]) {
      if (v == Scalar(0)) continue;
      rows[a][b] = v;
      rows[b][a] = v;
    }
  }
  wf.L = from_rows(std::move(rows), true);
  wf.L.symmetric = true;
  return wf;
}

}  // namespace srlab
