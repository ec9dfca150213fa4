#include "srlab/spectrum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <numeric>
#include <sstream>

namespace srlab {

namespace {

// Column-major n x n access.
struct ColMajor {
  std::vector<double>& a;
  std::size_t n;
  double& operator()(std::size_t r, std::size_t c) { return a[c * n + r]; }
};

// Householder reduction to tridiagonal form (the EISPACK tred2 scheme). On
// exit d holds the diagonal, e[1..n-1] the subdiagonal and, if requested, V
// the accumulated orthogonal transformation.
void householder(std::vector<double>& storage, std::size_t n, std::vector<double>& d, std::vector<double>& e,
                 bool accumulate) {
  ColMajor V{storage, n};
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) d[j] = V(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
        V(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        V(j, i) = f;
        g = e[j] + V(j, j) * f;
        double* col = &V(0, j);
        for (std::size_t k = j + 1; k < i; ++k) {
          g += col[k] * d[k];
          e[k] += col[k] * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        double* col = &V(0, j);
        for (std::size_t k = j; k < i; ++k) col[k] -= f * e[k] + g * d[k];
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  if (!accumulate) {
    for (std::size_t j = 0; j < n; ++j) d[j] = V(j, j);
    e[0] = 0.0;
    return;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    V(n - 1, i) = V(i, i);
    V(i, i) = 1.0;
    double h = d[i + 1];
    if (h != 0.0) {
      double* ci = &V(0, i + 1);
      for (std::size_t k = 0; k <= i; ++k) d[k] = ci[k] / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double* cj = &V(0, j);
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += ci[k] * cj[k];
        for (std::size_t k = 0; k <= i; ++k) cj[k] -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) V(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = V(n - 1, j);
    V(n - 1, j) = 0.0;
  }
  V(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit QL with Wilkinson-type shifts (the EISPACK tql2 scheme). e uses the
// householder() layout; V (if non-null) is rotated along.
void implicit_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>* storage, std::size_t n) {
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 60) throw SpectrumError("QL iteration did not converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          if (storage) {
            double* a = storage->data() + ii * n;
            double* b = storage->data() + (ii + 1) * n;
            for (std::size_t k = 0; k < n; ++k) {
              double t = b[k];
              b[k] = s * a[k] + c * t;
              a[k] = c * a[k] - s * t;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

SymmetricEigen sorted(std::vector<double> d, std::vector<double> storage, std::size_t n, bool vectors) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  SymmetricEigen out;
  out.n = n;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = d[order[i]];
  if (vectors) {
    out.vectors.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(storage.data() + order[i] * n, n, out.vectors.data() + i * n);
    }
  }
  return out;
}

}  // namespace

SymmetricEigen symmetric_eigen(std::vector<double> a, std::size_t n, bool want_vectors) {
  if (a.size() != n * n) throw std::invalid_argument("symmetric_eigen: matrix must be n x n");
  if (n == 0) return {};
  std::vector<double> d, e;
  householder(a, n, d, e, want_vectors);
  implicit_ql(d, e, want_vectors ? &a : nullptr, n);
  return sorted(std::move(d), std::move(a), n, want_vectors);
}

SymmetricEigen tridiagonal_eigen(std::vector<double> d, std::vector<double> e, bool want_vectors) {
  const std::size_t n = d.size();
  if (n == 0) return {};
  if (e.size() + 1 != n) throw std::invalid_argument("tridiagonal_eigen: need n - 1 off-diagonal entries");
  std::vector<double> ee(n, 0.0);
  std::copy(e.begin(), e.end(), ee.begin() + 1);
  std::vector<double> V;
  if (want_vectors) {
    V.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) V[i * n + i] = 1.0;
  }
  implicit_ql(d, ee, want_vectors ? &V : nullptr, n);
  return sorted(std::move(d), std::move(V), n, want_vectors);
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::ordered_json json_number(double v) {
  if (!std::isfinite(v)) return number(v);
  return v;
}

nlohmann::ordered_json report_json(const SpectrumReport& r) {
  nlohmann::ordered_json j;
  j["solver"] = r.solver;
  j["operator"] = r.eps ? "penalty" : "sublaplacian";
  if (r.eps) j["eps"] = *r.eps;
  j["grid"] = r.grid;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  auto& ev = j["eigenvalues"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    nlohmann::ordered_json e;
    e["i"] = i + 1;
    e["lambda"] = json_number(r.eigenvalues[i]);
    e["residual"] = json_number(i < r.residuals.size() ? r.residuals[i] : std::nan(""));
    e["multiplicity_cluster"] = i < r.multiplicity.size() ? r.multiplicity[i] : 1;
    ev.push_back(e);
  }
  return j;
}

}  // namespace

std::string SpectrumReport::to_csv(bool header) const {
  std::ostringstream out;
  if (header) out << "eps,i,lambda,residual,multiplicity_cluster\n";
  std::string e = eps ? number(*eps) : "inf";
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    out << e << ',' << i + 1 << ',' << number(eigenvalues[i]) << ','
        << number(i < residuals.size() ? residuals[i] : std::nan("")) << ','
        << (i < multiplicity.size() ? multiplicity[i] : 1) << '\n';
  }
  return out.str();
}

std::string SpectrumReport::to_json() const { return report_json(*this).dump(2) + "\n"; }

void assign_clusters(SpectrumReport& report, double tol) {
  const auto& v = report.eigenvalues;
  report.cluster.assign(v.size(), 0);
  report.multiplicity.assign(v.size(), 1);
  int id = 0;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= v.size(); ++i) {
    bool split = i == v.size() || v[i] - v[i - 1] > tol * std::max(1.0, std::abs(v[i - 1]));
    if (!split) continue;
    for (std::size_t k = start; k < i; ++k) {
      report.cluster[k] = id;
      report.multiplicity[k] = static_cast<int>(i - start);
    }
    ++id;
    start = i;
  }
}

namespace {

std::vector<double> inverse_sqrt_mass(const SparseOperator<double>& M, std::size_t n) {
  if (M.n != n || !M.val.empty()) throw SpectrumError("mass matrix must be diagonal with the size of L");
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(M.diag[i] > 0.0)) throw SpectrumError("mass matrix must be positive");
    s[i] = 1.0 / std::sqrt(M.diag[i]);
  }
  return s;
}

void fill_residuals(SpectrumReport& r, const SparseOperator<double>& L, const SparseOperator<double>& M) {
  r.residuals.resize(r.eigenvalues.size());
  parallel_for(r.vectors.size(), [&](std::size_t i) { r.residuals[i] = eigen_residual(L, M, r.eigenvalues[i], r.vectors[i]); });
}

}  // namespace

double eigen_residual(const SparseOperator<double>& L, const SparseOperator<double>& M, double lambda,
                      const std::vector<double>& v) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < L.n; ++i) {
    double s = 0.0;
    for (std::size_t q = L.row_ptr[i]; q < L.row_ptr[i + 1]; ++q) s += L.val[q] * v[L.col[q]];
    s += L.diag[i] * v[i];
    double mv = M.diag[i] * v[i];
    num += (s - lambda * mv) * (s - lambda * mv);
    den += mv * mv;
  }
  return std::sqrt(num) / std::sqrt(den);
}

double gershgorin_bound(const SparseOperator<double>& L, const SparseOperator<double>& M) {
  auto s = inverse_sqrt_mass(M, L.n);
  double c = 0.0;
  for (std::size_t i = 0; i < L.n; ++i) {
    double r = L.diag[i] * s[i] * s[i];
    for (std::size_t q = L.row_ptr[i]; q < L.row_ptr[i + 1]; ++q) r += std::abs(L.val[q]) * s[i] * s[L.col[q]];
    c = std::max(c, r);
  }
  return c;
}

SpectrumReport dense_spectrum(const SparseOperator<double>& L, const SparseOperator<double>& M,
                              const DenseOptions& options) {
  const std::size_t n = L.n;
  if (n > kDenseLimit) throw SpectrumError("dense_spectrum: N = " + std::to_string(n) + " exceeds " + std::to_string(kDenseLimit));
  auto s = inverse_sqrt_mass(M, n);
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    a[i * n + i] = L.diag[i] * (s[i] * s[i]);
    for (std::size_t q = L.row_ptr[i]; q < L.row_ptr[i + 1]; ++q) {
      std::size_t j = L.col[q];
      a[j * n + i] = L.val[q] * (s[i] * s[j]);
    }
  }
  auto eig = symmetric_eigen(std::move(a), n, options.vectors);
  SpectrumReport r;
  r.solver = "dense";
  r.eigenvalues = eig.values;
  r.iterations = 1;
  if (options.vectors) {
    r.vectors.assign(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) r.vectors[i][k] = s[k] * eig.vector(k, i);
    fill_residuals(r, L, M);
  } else {
    r.residuals.assign(n, std::nan(""));
  }
  assign_clusters(r, options.cluster_tol);
  return r;
}

double rayleigh(const std::vector<double>& f, const SparseOperator<double>& L, const SparseOperator<double>& M) {
  double den = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) den += f[i] * M.diag[i] * f[i];
  if (!(den > 0.0)) throw std::domain_error("rayleigh: f has zero M-norm");
  return L.bilinear(f, f) / den;
}

// ---------------------------------------------------------------------------
// Lanczos

namespace {

struct Transformed {
  const SparseOperator<double>& L;
  std::vector<double> s;
  double c;

  // y = c x - S L S x
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    std::vector<double> sx(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) sx[i] = s[i] * x[static_cast<Eigen::Index>(i)];
    auto Lx = L.apply(sx);
    y.resize(x.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto k = static_cast<Eigen::Index>(i);
      y[k] = c * x[k] - s[i] * Lx[i];
    }
  }
};

struct RunResult {
  std::vector<double> theta;  // converged leading Ritz values, descending
  std::vector<Eigen::VectorXd> ritz;
  Eigen::VectorXd restart;  // best unconverged Ritz vector
  int steps = 0;
};

void deflate(Eigen::VectorXd& w, const std::vector<Eigen::VectorXd>& basis) {
  for (const auto& y : basis) w -= y.dot(w) * y;
}

// One Lanczos run on the complement of `locked`, stopping once `need` leading
// Ritz pairs have residual bound below tol * c.
RunResult lanczos_run(const Transformed& op, const std::vector<Eigen::VectorXd>& locked, Eigen::VectorXd start,
                      int need, int krylov, double tol, int& budget) {
  const Eigen::Index n = start.size();
  const int kmax = static_cast<int>(std::min<Eigen::Index>(krylov, n - static_cast<Eigen::Index>(locked.size())));
  RunResult out;
  for (int pass = 0; pass < 2; ++pass) deflate(start, locked);
  double norm = start.norm();
  if (!(norm > 0.0) || kmax <= 0) return out;

  Eigen::MatrixXd Q(n, kmax);
  Q.col(0) = start / norm;
  std::vector<double> alpha, beta;
  Eigen::VectorXd w;
  const double small = 1e-13 * std::max(1.0, op.c);
  for (int j = 0; j < kmax; ++j) {
    op.apply(Q.col(j), w);
    --budget;
    alpha.push_back(Q.col(j).dot(w));
    w -= alpha.back() * Q.col(j);
    if (j > 0) w -= beta.back() * Q.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) {
      deflate(w, locked);
      auto Qj = Q.leftCols(j + 1);
      w -= Qj * (Qj.transpose() * w);
    }
    double b = w.norm();
    bool exhausted = b <= small || j + 1 == kmax || budget <= 0;
    if ((j + 1) % 10 == 0 || exhausted) {
      std::vector<double> off(beta.begin(), beta.end());
      auto eig = tridiagonal_eigen(alpha, off, true);
      const std::size_t t = eig.n;
      // descending Ritz values: index t-1-r
      std::size_t conv = 0;
      while (conv < t) {
        std::size_t col = t - 1 - conv;
        double bound = b * std::abs(eig.vector(t - 1, col));
        if (!(bound <= tol * op.c || b <= small)) break;
        ++conv;
      }
      if (static_cast<int>(conv) >= need || exhausted) {
        auto Qk = Q.leftCols(j + 1);
        std::size_t take = std::min<std::size_t>(conv, static_cast<std::size_t>(std::max(need, 0)));
        for (std::size_t r = 0; r < take; ++r) {
          std::size_t col = t - 1 - r;
          Eigen::VectorXd s(static_cast<Eigen::Index>(t));
          for (std::size_t k = 0; k < t; ++k) s[static_cast<Eigen::Index>(k)] = eig.vector(k, col);
          Eigen::VectorXd y = Qk * s;
          out.theta.push_back(eig.values[col]);
          out.ritz.push_back(y / y.norm());
        }
        if (take < t) {
          std::size_t col = t - 1 - take;
          Eigen::VectorXd s(static_cast<Eigen::Index>(t));
          for (std::size_t k = 0; k < t; ++k) s[static_cast<Eigen::Index>(k)] = eig.vector(k, col);
          out.restart = Qk * s;
        }
        out.steps = j + 1;
        return out;
      }
    }
    beta.push_back(b);
    Q.col(j + 1) = w / b;
  }
  return out;
}

Eigen::VectorXd random_start(Rng& rng, Eigen::Index n) {
  auto u = random_unit(rng, static_cast<std::size_t>(n));
  return Eigen::Map<Eigen::VectorXd>(u.data(), n);
}

}  // namespace

SpectrumReport lanczos_smallest(const SparseOperator<double>& L, const SparseOperator<double>& M,
                                const LanczosOptions& options, Rng& rng) {
  const std::size_t n = L.n;
  if (options.count < 1 || options.count > 32) throw SpectrumError("lanczos_smallest: count must be in 1..32");
  if (static_cast<std::size_t>(options.count) > n) throw SpectrumError("lanczos_smallest: count exceeds N");
  Transformed op{L, inverse_sqrt_mass(M, n), gershgorin_bound(L, M)};
  const auto N = static_cast<Eigen::Index>(n);
  const double tol = options.tol;
  const double c = op.c;

  std::vector<Eigen::VectorXd> locked;
  std::vector<double> lambda;
  int budget = options.max_iter;
  int used_runs = 0;
  bool converged = false;
  Eigen::VectorXd start = random_start(rng, N);

  auto count_th = [&]() {
    std::vector<double> v = lambda;
    std::sort(v.begin(), v.end());
    return v[static_cast<std::size_t>(options.count) - 1];
  };

  while (budget > 0 && locked.size() < n) {
    bool verifying = static_cast<int>(locked.size()) >= options.count;
    int need = verifying ? 1 : options.count - static_cast<int>(locked.size());
    auto run = lanczos_run(op, locked, start, need, options.krylov, tol, budget);
    ++used_runs;
    if (run.steps == 0) break;  // start vector lies in the locked span
    if (verifying) {
      double bar = count_th();
      if (run.theta.empty()) {
        start = run.restart.size() ? run.restart : random_start(rng, N);
        continue;
      }
      double found = c - run.theta.front();
      if (found < bar - std::max(tol * c, 1e-12 * std::abs(bar))) {
        locked.push_back(run.ritz.front());
        lambda.push_back(found);
        start = random_start(rng, N);
        continue;
      }
      converged = true;
      break;
    }
    for (std::size_t r = 0; r < run.theta.size(); ++r) {
      locked.push_back(run.ritz[r]);
      lambda.push_back(c - run.theta[r]);
    }
    // Converged pairs restart from a fresh vector so that further copies of a
    // repeated eigenvalue can appear; otherwise continue from the best Ritz vector.
    start = run.theta.empty() && run.restart.size() ? run.restart : random_start(rng, N);
  }
  if (locked.size() == n) converged = true;

  std::vector<std::size_t> order(lambda.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lambda[a] < lambda[b]; });
  SpectrumReport r;
  r.solver = "lanczos";
  r.iterations = options.max_iter - budget;
  r.converged = converged;
  std::size_t keep = std::min<std::size_t>(order.size(), static_cast<std::size_t>(options.count));
  for (std::size_t k = 0; k < keep; ++k) {
    r.eigenvalues.push_back(lambda[order[k]]);
    std::vector<double> v(n);
    const auto& y = locked[order[k]];
    for (std::size_t i = 0; i < n; ++i) v[i] = op.s[i] * y[static_cast<Eigen::Index>(i)];
    r.vectors.push_back(std::move(v));
  }
  (void)used_runs;
  fill_residuals(r, L, M);
  assign_clusters(r, options.cluster_tol);
  return r;
}

// ---------------------------------------------------------------------------
// Sweeps and the Hopf check

SpectrumReport smallest_eigenpairs(const WeakForm<double>& wf, const SweepOptions& options, Rng& rng) {
  if (options.solver == EigenSolver::Dense) {
    auto r = dense_spectrum(wf.L, wf.M, {.vectors = true, .cluster_tol = options.lanczos.cluster_tol});
    auto keep = static_cast<std::size_t>(options.count);
    r.eigenvalues.resize(std::min(keep, r.eigenvalues.size()));
    r.residuals.resize(r.eigenvalues.size());
    r.vectors.resize(r.eigenvalues.size());
    assign_clusters(r, options.lanczos.cluster_tol);
    return r;
  }
  LanczosOptions lo = options.lanczos;
  lo.count = options.count;
  return lanczos_smallest(wf.L, wf.M, lo, rng);
}

SweepTable epsilon_sweep(const MetricExtension& ext, const Grid& grid, const std::vector<double>& eps_list,
                         const SweepOptions& options, Rng& rng) {
  if (eps_list.empty()) throw std::invalid_argument("epsilon_sweep: empty eps list");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw std::invalid_argument("epsilon_sweep: eps must be positive");
    if (i > 0 && !(eps_list[i] > eps_list[i - 1])) throw std::invalid_argument("epsilon_sweep: eps must be ascending");
  }
  SweepTable t;
  t.eps = eps_list;
  auto limit_form = assemble_weak_laplacian<double>(ext, grid, {.eps = std::nullopt, .density = options.density});
  t.limit = smallest_eigenpairs(limit_form, options, rng);
  t.limit.grid = grid.resolution();
  for (double e : eps_list) {
    auto wf = assemble_weak_laplacian<double>(ext, grid, {.eps = e, .density = options.density});
    auto r = smallest_eigenpairs(wf, options, rng);
    r.eps = e;
    r.grid = grid.resolution();
    std::vector<double> g;
    for (std::size_t i = 0; i < std::min(r.eigenvalues.size(), t.limit.eigenvalues.size()); ++i) {
      g.push_back(std::abs(r.eigenvalues[i] - t.limit.eigenvalues[i]));
    }
    t.gap.push_back(std::move(g));
    t.reports.push_back(std::move(r));
  }
  double scale = 0.0;
  for (double v : t.limit.eigenvalues) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < t.limit.eigenvalues.size(); ++i) {
    std::optional<double> order;
    bool usable = std::abs(t.limit.eigenvalues[i]) > 1e-8 * std::max(1.0, scale);
    std::vector<double> xs, ys;
    for (std::size_t e = 0; e < t.eps.size() && usable; ++e) {
      if (i >= t.gap[e].size() || !(t.gap[e][i] > 0.0)) {
        usable = false;
        break;
      }
      xs.push_back(std::log(1.0 / (t.eps[e] * t.eps[e])));
      ys.push_back(std::log(t.gap[e][i]));
    }
    if (usable && xs.size() >= 2) {
      double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
      double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
      }
      order = sxy / sxx;
    }
    t.decay_order.push_back(order);
  }
  return t;
}

std::string SweepTable::to_csv() const {
  std::string out = limit.to_csv(true);
  for (const auto& r : reports) out += r.to_csv(false);
  return out;
}

std::string SweepTable::to_json() const {
  nlohmann::ordered_json j;
  j["eps"] = eps;
  j["limit"] = report_json(limit);
  j["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) j["reports"].push_back(report_json(r));
  j["gap"] = gap;
  j["decay_order"] = nlohmann::ordered_json::array();
  for (const auto& o : decay_order) j["decay_order"].push_back(o ? nlohmann::ordered_json(*o) : nlohmann::ordered_json());
  return j.dump(2) + "\n";
}

std::string HopfReport::to_json() const {
  nlohmann::ordered_json j;
  j["kernel_dim"] = kernel_dim;
  j["flatness"] = json_number(flatness);
  j["lambda2"] = json_number(lambda2);
  j["kernel_tol"] = kernel_tol;
  j["bracket_generating"] = bracket_generating;
  j["ok"] = ok;
  j["message"] = message;
  return j.dump(2) + "\n";
}

HopfReport hopf_check(const MetricExtension& ext, const Grid& grid, std::optional<double> eps, double kernel_rel) {
  HopfReport h;
  SubRiemannianStructure s;
  s.dim = ext.dim;
  s.periods = grid.periods();
  s.horizontal = ext.horizontal;
  s.complement = ext.complement;
  h.bracket_generating = true;
  BracketFlag flag(s, ext.dim);
  for (const auto& p : lattice(s.periods, 3)) {
    if (!flag.at(p).degree) {
      h.bracket_generating = false;
      break;
    }
  }

  auto wf = assemble_weak_laplacian<double>(ext, grid, {.eps = eps, .density = std::nullopt});
  auto r = dense_spectrum(wf.L, wf.M, {.vectors = true});
  h.kernel_tol = kernel_rel * std::max(1.0, gershgorin_bound(wf.L, wf.M));
  std::size_t k = 0;
  while (k < r.eigenvalues.size() && std::abs(r.eigenvalues[k]) <= h.kernel_tol) ++k;
  h.kernel_dim = static_cast<int>(k);
  h.lambda2 = k < r.eigenvalues.size() ? r.eigenvalues[k] : std::nan("");
  if (k == 1) {
    const auto& v = r.vectors[0];
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    h.flatness = (*hi - *lo) / std::abs(mean);
  } else {
    h.flatness = std::nan("");
  }
  h.ok = h.kernel_dim == 1 && h.flatness < 1e-6 && h.lambda2 > h.kernel_tol;
  if (h.ok) {
    h.message = "horizontal-harmonic functions are constant";
  } else if (h.kernel_dim > 1) {
    h.message = "kernel dimension " + std::to_string(h.kernel_dim) +
                (h.bracket_generating ? ": Hopf violation" : ": structure is not bracket-generating");
  } else {
    h.message = "kernel vector is not constant or no spectral gap";
  }
  return h;
}

}  // namespace srlab
