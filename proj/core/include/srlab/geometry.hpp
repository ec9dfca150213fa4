// Vector fields, frames, brackets and the structural tests on a
// sub-Riemannian structure (Hörmander flag, regularity, fatness).
#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "srlab/expr.hpp"
#include "srlab/random.hpp"

namespace srlab {

using Point = std::vector<double>;

/// Default singular-value cutoff for numerical rank: sigma > tol * sigma_max.
constexpr double kRankTolerance = 1e-9;

class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// X = sum_j X^j d/dx_j with symbolic coefficients.
struct VectorField {
  std::vector<Expr> components;

  VectorField() = default;
  explicit VectorField(std::vector<Expr> c) : components(std::move(c)) {}
  static VectorField parse(const std::vector<std::string>& text, int dim);
  static VectorField zero(int dim);
  static VectorField coordinate(int dim, int axis);

  int dim() const { return static_cast<int>(components.size()); }
  const Expr& operator[](int j) const { return components[static_cast<std::size_t>(j)]; }
  bool is_zero() const;

  /// The derivative X f.
  Expr apply(const Expr& f) const;
  Eigen::VectorXd evaluate(std::span<const double> p) const;
  std::vector<std::string> to_strings() const;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const Expr& f, const VectorField& X);

/// Component j is sum_i (X^i d_i Y^j - Y^i d_i X^j).
VectorField lie_bracket(const VectorField& X, const VectorField& Y);

struct SubRiemannianStructure {
  std::string name;
  int dim = 0;
  /// Box sizes. Coefficients are assumed periodic only by the discrete module,
  /// which checks it; elsewhere the box only sets the sampling region.
  std::vector<double> periods;
  /// Declared g_c-orthonormal.
  std::vector<VectorField> horizontal;
  /// Reference complement T_beta, declared orthonormal and orthogonal to Σ.
  std::vector<VectorField> complement;

  int rank() const { return static_cast<int>(horizontal.size()); }
  int corank() const { return dim - rank(); }
  /// X_1..X_k followed by T_1..T_{m-k}.
  std::vector<VectorField> frame() const;

  /// Checks counts and dimensions, then the frame condition on `samples`
  /// (default: the 5^m lattice). Throws StructureError.
  void validate(const std::vector<Point>* samples = nullptr) const;
};

/// Points j * L / n along every axis, row-major.
std::vector<Point> lattice(std::span<const double> periods, int per_axis = 5);
std::vector<Point> random_points(std::span<const double> periods, int count, Rng& rng);

/// Column u holds the coefficients of frame field u at p.
Eigen::MatrixXd frame_matrix(const std::vector<VectorField>& frame, std::span<const double> p);

/// Structure constants c_uv^w of a full frame at a point: [E_u, E_v] = sum_w c_uv^w E_w.
struct StructureData {
  Point point;
  int dim = 0;
  int rank = 0;
  std::vector<double> c;
  /// Brackets [E_u, E_v] in coordinates, indexed u * dim + v.
  std::vector<Eigen::VectorXd> bracket_table;

  double operator()(int u, int v, int w) const {
    return c[static_cast<std::size_t>((u * dim + v) * dim + w)];
  }
  /// C_ij^a, horizontal part of [X_i, X_j].
  double horizontal(int i, int j, int a) const { return (*this)(i, j, a); }
  /// C_ij^beta, vertical part of [X_i, X_j].
  double vertical(int i, int j, int beta) const { return (*this)(i, j, rank + beta); }
  /// The k x k matrix (C_ij^beta).
  Eigen::MatrixXd vertical_matrix(int beta) const;
};

/// Symbolic and numeric bracket data of a frame E_0..E_{m-1} whose first
/// `rank` fields are horizontal. Symbolic coframe and constants are built on
/// first use (thread-safe).
class FrameAlgebra {
 public:
  FrameAlgebra(std::vector<VectorField> frame, int rank);
  explicit FrameAlgebra(const SubRiemannianStructure& s);

  int dim() const { return dim_; }
  int rank() const { return rank_; }
  const std::vector<VectorField>& frame() const { return frame_; }
  const VectorField& field(int u) const { return frame_[static_cast<std::size_t>(u)]; }
  const VectorField& bracket(int u, int v) const;

  /// Numeric constants at p via an m x m solve. Throws StructureError when the
  /// frame matrix is singular at p.
  StructureData at(std::span<const double> p) const;

  /// det of the frame coefficient matrix.
  const Expr& determinant() const;
  /// Coframe theta^w_j = (F^{-1})_{wj}.
  const Expr& coframe(int w, int j) const;
  /// Symbolic c_uv^w.
  const Expr& constant(int u, int v, int w) const;

 private:
  void build_symbolic() const;

  std::vector<VectorField> frame_;
  int dim_;
  int rank_;
  std::vector<VectorField> brackets_;
  mutable std::once_flag symbolic_once_;
  mutable Expr det_;
  mutable std::vector<Expr> coframe_;
  mutable std::vector<Expr> constants_;
};

StructureData structure_constants(const SubRiemannianStructure& s, std::span<const double> p);

/// Numerical rank of the columns of `m`.
int numerical_rank(const Eigen::MatrixXd& m, double tol = kRankTolerance);

/// Symbolic generators of the flag: level 0 holds the horizontal fields,
/// level i+1 the brackets [X_a, F] with F in level i.
class BracketFlag {
 public:
  BracketFlag(const SubRiemannianStructure& s, int max_depth);

  struct Result {
    std::vector<int> dims;
    /// r(p); empty when the flag stops short of m within max_depth.
    std::optional<int> degree;
  };

  int max_depth() const { return static_cast<int>(levels_.size()); }
  Result at(std::span<const double> p, double tol = kRankTolerance) const;

 private:
  int dim_;
  std::vector<std::vector<VectorField>> levels_;
};

BracketFlag::Result hormander_flag(const SubRiemannianStructure& s, std::span<const double> p,
                                   int max_depth);

/// Q = sum_i i (dim Σ_i - dim Σ_{i-1}). Throws std::invalid_argument if the
/// flag does not reach `dim` or decreases.
int hausdorff_dimension(const std::vector<int>& flag_dims, int dim);

struct RegularityReport {
  bool regular = false;
  std::vector<std::vector<int>> dims;
  std::vector<std::optional<int>> degrees;
};

RegularityReport is_regular(const SubRiemannianStructure& s, const std::vector<Point>& samples,
                            int max_depth);

struct FatnessReport {
  bool fat = false;
  std::optional<std::vector<double>> witness;
  /// Smallest |det M(lambda)| / scale seen.
  double min_relative_det = 0.0;
};

/// Samples the m-k basis covectors then random unit combinations, up to
/// max(covector_samples, m-k) in total.
FatnessReport is_fat(const StructureData& data, int covector_samples, Rng& rng, double tol = 1e-10);
FatnessReport is_fat(const SubRiemannianStructure& s, std::span<const double> p,
                     int covector_samples, Rng& rng, double tol = 1e-10);

/// |dω(X,Y) - (X(ω(Y)) - Y(ω(X)) - ω([X,Y]))| at p; dω from coefficient derivatives.
double cartan_residual(const std::vector<Expr>& omega, const VectorField& X, const VectorField& Y,
                       std::span<const double> p);

}  // namespace srlab
