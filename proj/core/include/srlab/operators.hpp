// Horizontal connection, gradient, divergence, the sublaplacian and the
// penalty Laplacians, all built from frame structure constants (Koszul).
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "srlab/complement.hpp"

namespace srlab {

enum class OperatorKind { Sublaplacian, Penalty, StrongFormCheck };

std::string to_string(OperatorKind k);

/// L f = sum_{j,l} a^{jl} d_j d_l f + sum_j b^j d_j f + c f.
struct OperatorSpec {
  OperatorKind kind = OperatorKind::Sublaplacian;
  std::optional<double> eps;
  int dim = 0;
  std::vector<std::vector<Expr>> a;
  std::vector<Expr> b;
  Expr c;

  Expr apply(const Expr& f) const;
  double apply_at(const Expr& f, std::span<const double> p) const;
  /// {kind, eps?, a: [[expr]], b: [expr]}
  std::string to_json() const;
};

/// Gamma_ij^a = g(D_{X_i} X_j, X_a) at one point.
struct ConnectionCoefficients {
  int rank = 0;
  std::vector<double> gamma;
  double operator()(int i, int j, int a) const {
    return gamma[static_cast<std::size_t>((i * rank + j) * rank + a)];
  }
};

/// Koszul in an orthonormal frame: Gamma_ij^a = (c_ij^a - c_ja^i + c_ai^j) / 2.
ConnectionCoefficients connection_coefficients(const StructureData& data);
ConnectionCoefficients connection_coefficients(const MetricExtension& ext, std::span<const double> p);

/// Frame components X_i f of the horizontal gradient.
std::vector<Expr> horizontal_gradient_components(const MetricExtension& ext, const Expr& f);
/// sum_i (X_i f) X_i in coordinates.
VectorField horizontal_gradient(const MetricExtension& ext, const Expr& f);

/// div^H of sum_i phi^i X_i: sum_i X_i(phi^i) + sum_{i,j} phi^j c_ij^i (symbolic).
Expr horizontal_divergence(const MetricExtension& ext, const std::vector<Expr>& phi);

/// Maximum vertical part |theta^beta(X)| seen before a field counts as non-horizontal.
constexpr double kHorizontalTolerance = 1e-10;

class NotHorizontalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// div^H of a coordinate field at p, using the numeric connection. Throws
/// NotHorizontalError when X has a vertical part above kHorizontalTolerance.
double horizontal_divergence(const MetricExtension& ext, const VectorField& X, std::span<const double> p);

/// Riemannian divergence of g: sum_j d_j X^j - X^j d_j(det F) / det F.
double riemannian_divergence(const MetricExtension& ext, const VectorField& X, std::span<const double> p);

/// sum_i X_i^2 - sum_i D_{X_i} X_i in coordinates.
OperatorSpec sublaplacian(const MetricExtension& ext);

/// H-perp components: sum_beta c_{i beta}^beta, i = 1..k.
std::vector<Expr> mean_curvature(const MetricExtension& ext);
VectorField mean_curvature_field(const MetricExtension& ext);

/// Riemannian Laplacian of g^eps (frame X_i, T_beta / eps).
OperatorSpec penalty_laplacian(const MetricExtension& ext, double eps);

/// |Delta^H(u^2) - 2|grad^H u|^2 - 2 u Delta^H u| at p.
double product_rule_residual(const MetricExtension& ext, const OperatorSpec& sub, const Expr& u,
                             std::span<const double> p);

/// max over samples of |grad^H u / u - H-perp|. Throws std::domain_error if u <= 0 at a sample.
double potential_residual(const MetricExtension& ext, const Expr& u, const std::vector<Point>& samples);

}  // namespace srlab
