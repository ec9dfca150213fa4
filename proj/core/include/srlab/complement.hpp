// Canonical mean-curvature-free complement: solve C^beta A_beta = -Fbar_beta
// per complement direction and tilt the reference complement by A.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "srlab/geometry.hpp"

namespace srlab {

/// Condition numbers of C^beta above this raise a warning.
constexpr double kConditionWarning = 1e8;

enum class Solvability { Unique, LeastSquares };

std::string to_string(Solvability s);

/// Fbar at p: column beta holds g(T_beta, [X_i, T_beta]), i = 1..k.
Eigen::MatrixXd reference_mean_curvature(const StructureData& data);
Eigen::MatrixXd reference_mean_curvature(const SubRiemannianStructure& s, std::span<const double> p);

/// Pointwise solve at one point. A(i, beta) = A^i_beta.
struct PointSolve {
  Point point;
  Eigen::MatrixXd A;
  std::vector<Solvability> modes;
  /// Least-squares residual |C^beta A_beta + Fbar_beta| per beta.
  std::vector<double> residuals;
  std::vector<double> condition;
};

PointSolve solve_canonical_complement(const StructureData& data);
PointSolve solve_canonical_complement(const SubRiemannianStructure& s, std::span<const double> p);

/// |sum_i (sum_j A^j_beta C_ij^beta + c_{i beta}^beta) X_i|, maximized over beta.
double flat_residual(const StructureData& data, const Eigen::MatrixXd& A);

enum class ComplementMode { Symbolic, Pointwise };

struct AdaptedComplement {
  SubRiemannianStructure reference;
  ComplementMode mode = ComplementMode::Pointwise;
  /// Symbolic mode only: A[beta][i] and T'_beta = T_beta + sum_i A^i_beta X_i.
  std::vector<std::vector<Expr>> A;
  std::vector<VectorField> adapted_fields;
  /// Worst mode per beta over the samples.
  std::vector<Solvability> solvability;
  double max_residual = 0.0;
  double max_condition = 0.0;
  std::vector<std::string> warnings;

  /// A at p: evaluated (symbolic) or solved on the spot (pointwise).
  Eigen::MatrixXd coefficients_at(std::span<const double> p) const;
  bool unique() const;
  /// The reference structure with its complement replaced by T'. Symbolic mode only.
  SubRiemannianStructure adapted_structure() const;
};

/// Solves on `samples`; switches to symbolic mode when every C^beta is
/// constant over the samples plus `probes` random points.
AdaptedComplement canonical_complement(const SubRiemannianStructure& s, const std::vector<Point>& samples,
                                       Rng& rng, int probes = 16);

/// Max of flat_residual over samples.
double verify_flat_complement(const AdaptedComplement& ac, const std::vector<Point>& samples);

/// The g-orthonormal frame {X_i, T_beta}, possibly with T_beta scaled by 1/eps.
struct MetricExtension {
  int dim = 0;
  std::vector<VectorField> horizontal;
  std::vector<VectorField> complement;
  double eps = 1.0;

  static MetricExtension from_structure(const SubRiemannianStructure& s);
  /// Throws std::logic_error unless the complement is in symbolic mode.
  static MetricExtension canonical(const AdaptedComplement& ac);

  int rank() const { return static_cast<int>(horizontal.size()); }
  /// X_1..X_k, T_1/eps..T_{m-k}/eps.
  std::vector<VectorField> frame() const;
  /// Same fields, complement scaled by 1/eps.
  MetricExtension penalty(double eps) const;
  Eigen::MatrixXd frame_matrix(std::span<const double> p) const;
  /// 1 / |det F|, the density of the Riemannian volume of the extension.
  double volume_density(std::span<const double> p) const;
};

}  // namespace srlab
