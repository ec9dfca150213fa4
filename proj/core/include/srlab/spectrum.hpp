// Generalized symmetric eigenproblem L f = lambda M f with diagonal M:
// a dense Householder + QL oracle, restarted Lanczos for the bottom of the
// spectrum, epsilon sweeps and the horizontal-harmonic (Hopf) check.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "srlab/discrete.hpp"

namespace srlab {

class SpectrumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest N accepted by the dense solver.
constexpr std::size_t kDenseLimit = 4096;
/// Relative width used to group eigenvalues into clusters.
constexpr double kClusterTolerance = 1e-6;

/// Eigenpairs of a real symmetric matrix, values ascending. `vectors` is
/// column-major (column i belongs to values[i]) and empty unless requested.
struct SymmetricEigen {
  std::size_t n = 0;
  std::vector<double> values;
  std::vector<double> vectors;

  double vector(std::size_t row, std::size_t i) const { return vectors[i * n + row]; }
};

/// Householder tridiagonalization followed by implicit QL. `a` is a
/// column-major n x n matrix; only its lower triangle is read.
SymmetricEigen symmetric_eigen(std::vector<double> a, std::size_t n, bool want_vectors);

/// Implicit QL on the tridiagonal matrix with diagonal d and off-diagonal e
/// (e.size() == d.size() - 1).
SymmetricEigen tridiagonal_eigen(std::vector<double> d, std::vector<double> e, bool want_vectors);

struct SpectrumReport {
  std::vector<double> eigenvalues;
  /// ||L v - lambda M v|| / ||M v||, recomputed from the returned vectors.
  std::vector<double> residuals;
  /// Size of the cluster containing each eigenvalue.
  std::vector<int> multiplicity;
  /// Cluster index of each eigenvalue.
  std::vector<int> cluster;
  /// Generalized eigenvectors, one per eigenvalue (empty if not computed).
  std::vector<std::vector<double>> vectors;

  std::vector<int> grid;
  /// Penalty parameter, or nothing for the sublaplacian.
  std::optional<double> eps;
  std::string solver;
  int iterations = 0;
  bool converged = true;

  /// Columns eps, i, lambda, residual, multiplicity_cluster (eps = inf for
  /// the sublaplacian). `header` controls the first line.
  std::string to_csv(bool header = true) const;
  std::string to_json() const;
};

/// Groups sorted eigenvalues whose neighbours differ by at most
/// tol * max(1, |lambda|) and fills `multiplicity` and `cluster`.
void assign_clusters(SpectrumReport& report, double tol = kClusterTolerance);

/// ||L v - lambda M v|| / ||M v||.
double eigen_residual(const SparseOperator<double>& L, const SparseOperator<double>& M, double lambda,
                      const std::vector<double>& v);

struct DenseOptions {
  bool vectors = true;
  double cluster_tol = kClusterTolerance;
};

/// Full spectrum of M^{-1/2} L M^{-1/2}. Throws SpectrumError if N > kDenseLimit
/// or M is not a positive diagonal.
SpectrumReport dense_spectrum(const SparseOperator<double>& L, const SparseOperator<double>& M,
                              const DenseOptions& options = {});

struct LanczosOptions {
  int count = 6;
  /// Ritz residual bound relative to the Gershgorin bound c.
  double tol = 1e-10;
  /// Budget of operator applications.
  int max_iter = 20000;
  /// Krylov dimension per run before an explicit restart.
  int krylov = 300;
  double cluster_tol = kClusterTolerance;
};

/// The `count` smallest eigenpairs via Lanczos with full reorthogonalization on
/// c I - A (A = M^{-1/2} L M^{-1/2}, c its Gershgorin bound). Converged pairs
/// are locked and the iteration restarts from fresh random vectors until a
/// deflated run finds nothing below the count-th value. On budget exhaustion
/// the report is partial with converged = false.
SpectrumReport lanczos_smallest(const SparseOperator<double>& L, const SparseOperator<double>& M,
                                const LanczosOptions& options, Rng& rng);

/// f^T L f / f^T M f. Throws std::domain_error if f^T M f = 0.
double rayleigh(const std::vector<double>& f, const SparseOperator<double>& L, const SparseOperator<double>& M);

/// Upper Gershgorin bound of M^{-1/2} L M^{-1/2}.
double gershgorin_bound(const SparseOperator<double>& L, const SparseOperator<double>& M);

enum class EigenSolver { Dense, Lanczos };

struct SweepOptions {
  int count = 6;
  EigenSolver solver = EigenSolver::Lanczos;
  LanczosOptions lanczos;
  std::optional<Expr> density;
};

/// The options.count smallest eigenpairs of a weak form with the chosen solver.
SpectrumReport smallest_eigenpairs(const WeakForm<double>& wf, const SweepOptions& options, Rng& rng);

struct SweepTable {
  SpectrumReport limit;
  std::vector<double> eps;
  std::vector<SpectrumReport> reports;
  /// gap[e][i] = |lambda_i(eps_e) - lambda_i|.
  std::vector<std::vector<double>> gap;
  /// Least-squares slope of log gap against log eps^-2, per i; empty when
  /// lambda_i is zero or a gap vanishes.
  std::vector<std::optional<double>> decay_order;

  std::string to_csv() const;
  std::string to_json() const;
};

/// Weak forms of Delta^eps for each eps (ascending, positive) and of the
/// sublaplacian, solved for the `count` smallest eigenvalues.
SweepTable epsilon_sweep(const MetricExtension& ext, const Grid& grid, const std::vector<double>& eps_list,
                         const SweepOptions& options, Rng& rng);

struct HopfReport {
  int kernel_dim = 0;
  /// (max - min) / |mean| of the kernel vector when the kernel is one-dimensional.
  double flatness = 0.0;
  /// First eigenvalue above the kernel threshold.
  double lambda2 = 0.0;
  double kernel_tol = 0.0;
  bool bracket_generating = false;
  bool ok = false;
  std::string message;
  std::string to_json() const;
};

/// Dense kernel of the weak sublaplacian, or of Delta^eps when eps is given
/// (eigenvalues below kernel_rel * max(1, Gershgorin bound)). ok iff the
/// kernel is one-dimensional and flat to 1e-6 and lambda2 > 0.
HopfReport hopf_check(const MetricExtension& ext, const Grid& grid, std::optional<double> eps = std::nullopt,
                      double kernel_rel = 1e-9);

}  // namespace srlab
