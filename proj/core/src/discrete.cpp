#include "srlab/discrete.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace srlab {

Grid::Grid(std::vector<int> n, std::vector<double> periods) : n_(std::move(n)), periods_(std::move(periods)) {
  if (n_.empty() || n_.size() != periods_.size()) throw GridError("grid: one resolution and one period per axis");
  for (std::size_t j = 0; j < n_.size(); ++j) {
    if (n_[j] < 4 || n_[j] % 2 != 0) {
      throw GridError("grid: resolution along axis " + std::to_string(j) + " must be even and at least 4");
    }
    if (!(periods_[j] > 0.0) || !std::isfinite(periods_[j])) throw GridError("grid: periods must be positive");
  }
  stride_.assign(n_.size(), 1);
  for (std::size_t j = n_.size() - 1; j > 0; --j) stride_[j - 1] = stride_[j] * static_cast<std::size_t>(n_[j]);
  size_ = stride_[0] * static_cast<std::size_t>(n_[0]);
}

Grid Grid::uniform(const std::vector<double>& periods, int n) {
  return Grid(std::vector<int>(periods.size(), n), periods);
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int j = 0; j < dim(); ++j) v *= h(j);
  return v;
}

std::size_t Grid::index(const std::vector<int>& multi) const {
  std::size_t idx = 0;
  for (std::size_t j = 0; j < n_.size(); ++j) {
    int i = ((multi[j] % n_[j]) + n_[j]) % n_[j];
    idx += static_cast<std::size_t>(i) * stride_[j];
  }
  return idx;
}

std::vector<int> Grid::multi_index(std::size_t idx) const {
  std::vector<int> out(n_.size());
  for (std::size_t j = 0; j < n_.size(); ++j) out[j] = static_cast<int>((idx / stride_[j]) % static_cast<std::size_t>(n_[j]));
  return out;
}

std::size_t Grid::shift(std::size_t idx, int axis, int delta) const {
  auto a = static_cast<std::size_t>(axis);
  auto n = static_cast<long long>(n_[a]);
  auto i = static_cast<long long>((idx / stride_[a]) % static_cast<std::size_t>(n));
  long long k = ((i + delta) % n + n) % n;
  return static_cast<std::size_t>(static_cast<long long>(idx) + (k - i) * static_cast<long long>(stride_[a]));
}

Point Grid::point(std::size_t idx) const {
  auto mi = multi_index(idx);
  Point p(n_.size());
  for (std::size_t j = 0; j < n_.size(); ++j) p[j] = mi[j] * h(static_cast<int>(j));
  return p;
}

std::vector<Point> Grid::points() const {
  std::vector<Point> out(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = point(i);
  return out;
}

void check_periodic(const std::vector<Expr>& coefficients, const Grid& grid, double tol) {
  auto samples = lattice(grid.periods(), 3);
  for (const auto& e : coefficients) {
    if (e.is_constant()) continue;
    for (int j = 0; j < grid.dim(); ++j) {
      if (e.max_variable() < j) continue;
      for (auto p : samples) {
        p[static_cast<std::size_t>(j)] = 0.0;
        double a = e.evaluate(p);
        p[static_cast<std::size_t>(j)] = grid.periods()[static_cast<std::size_t>(j)];
        double b = e.evaluate(p);
        if (std::abs(a - b) > tol * std::max(1.0, std::abs(a))) {
          throw PeriodicityError("coefficient '" + e.to_string() + "' is not periodic along x" + std::to_string(j));
        }
      }
    }
  }
}

namespace detail {

std::vector<std::vector<double>> field_weights(const VectorField& X, const Grid& grid, double factor) {
  std::vector<std::vector<double>> w(static_cast<std::size_t>(grid.dim()));
  for (int j = 0; j < grid.dim(); ++j) {
    auto& wj = w[static_cast<std::size_t>(j)];
    wj.assign(grid.size(), 0.0);
    if (X[j].is_zero()) continue;
    double denom = factor * grid.h(j);
    parallel_for(grid.size(), [&](std::size_t p) { wj[p] = X[j].evaluate(grid.point(p)) / denom; });
  }
  return w;
}

std::vector<double> positive_density(const std::optional<Expr>& density, const MetricExtension& ext,
                                     const Grid& grid) {
  MetricExtension base = ext;
  base.eps = 1.0;
  std::vector<double> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    Point p = grid.point(i);
    double u = density ? density->evaluate(p) : 1.0;
    out[i] = u * base.volume_density(p);
  });
  return out;
}

}  // namespace detail

std::vector<double> sample(const Expr& f, const Grid& grid) {
  std::vector<double> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { out[i] = f.evaluate(grid.point(i)); });
  return out;
}

SparseOperator<double> assemble_strong(const OperatorSpec& spec, const Grid& grid) {
  const int m = grid.dim();
  if (spec.dim != m) throw GridError("assemble_strong: operator and grid dimensions differ");
  std::vector<Expr> all(spec.b.begin(), spec.b.end());
  for (const auto& row : spec.a) all.insert(all.end(), row.begin(), row.end());
  all.push_back(spec.c);
  check_periodic(all, grid);

  auto a = [&](int j, int l) -> const Expr& { return spec.a[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)]; };
  std::vector<std::map<std::size_t, double>> rows(grid.size());
  std::vector<double> zeroth(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t i) {
    Point p = grid.point(i);
    auto& row = rows[i];
    for (int j = 0; j < m; ++j) {
      double hj = grid.h(j);
      std::size_t up = grid.shift(i, j, 1), down = grid.shift(i, j, -1);
      if (!a(j, j).is_zero()) {
        double v = a(j, j).evaluate(p) / (4.0 * hj * hj);
        row[grid.shift(i, j, 2)] += v;
        row[grid.shift(i, j, -2)] += v;
      }
      const Expr& bj = spec.b[static_cast<std::size_t>(j)];
      if (!bj.is_zero()) {
        double v = bj.evaluate(p) / (2.0 * hj);
        row[up] += v;
        row[down] -= v;
      }
      for (int l = j + 1; l < m; ++l) {
        if (a(j, l).is_zero() && a(l, j).is_zero()) continue;
        double v = (a(j, l).evaluate(p) + a(l, j).evaluate(p)) / (4.0 * hj * grid.h(l));
        row[grid.shift(up, l, 1)] += v;
        row[grid.shift(down, l, -1)] += v;
        row[grid.shift(up, l, -1)] -= v;
        row[grid.shift(down, l, 1)] -= v;
      }
    }
    if (!spec.c.is_zero()) zeroth[i] = spec.c.evaluate(p);
  });
  auto A = from_rows(std::move(rows), true);
  for (std::size_t i = 0; i < A.n; ++i) A.diag[i] += zeroth[i];
  return A;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_matrix_market(std::ostream& out, const SparseOperator<double>& A) {
  std::size_t count = 0;
  std::ostringstream body;
  for (std::size_t i = 0; i < A.n; ++i) {
    auto emit = [&](std::size_t j, double v) {
      body << i + 1 << ' ' << j + 1 << ' ' << format_double(v) << '\n';
      ++count;
    };
    bool diag_written = false;
    for (std::size_t q = A.row_ptr[i]; q < A.row_ptr[i + 1]; ++q) {
      std::size_t j = A.col[q];
      if (!diag_written && j > i) {
        if (A.diag[i] != 0.0) emit(i, A.diag[i]);
        diag_written = true;
      }
      if (A.symmetric && j > i) continue;
      emit(j, A.val[q]);
    }
    if (!diag_written && A.diag[i] != 0.0) emit(i, A.diag[i]);
  }
  out << "%%MatrixMarket matrix coordinate real " << (A.symmetric ? "symmetric" : "general") << '\n';
  out << A.n << ' ' << A.n << ' ' << count << '\n' << body.str();
}

SparseOperator<double> read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("matrix market: empty input");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate" || field != "real") {
    throw std::runtime_error("matrix market: only 'matrix coordinate real' is supported");
  }
  if (symmetry != "general" && symmetry != "symmetric") throw std::runtime_error("matrix market: unsupported symmetry " + symmetry);
  bool symmetric = symmetry == "symmetric";
  do {
    if (!std::getline(in, line)) throw std::runtime_error("matrix market: missing size line");
  } while (!line.empty() && line[0] == '%');
  std::size_t rows = 0, cols = 0, nnz = 0;
  std::istringstream size_line(line);
  if (!(size_line >> rows >> cols >> nnz) || rows != cols) throw std::runtime_error("matrix market: bad size line");
  std::vector<std::map<std::size_t, double>> data(rows);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t i = 0, j = 0;
    std::string text;
    if (!(in >> i >> j >> text) || i < 1 || j < 1 || i > rows || j > cols) {
      throw std::runtime_error("matrix market: bad entry " + std::to_string(k + 1));
    }
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      throw std::runtime_error("matrix market: bad value '" + text + "'");
    }
    data[i - 1][j - 1] = v;
    if (symmetric) data[j - 1][i - 1] = v;
  }
  auto A = from_rows(std::move(data), false);
  A.symmetric = symmetric;
  return A;
}

}  // namespace srlab
