#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gxe::splines {

/// Degree, interior knot count and the range of the continuous environment factor.
struct SplineConfig {
  int degree = 2;
  int interior_knots = 2;
  double domain_lo = 0.0;
  double domain_hi = 1.0;

  /// q_n = degree + interior_knots + 1.
  int num_basis() const noexcept { return degree + interior_knots + 1; }

  /// Throws ConfigError when the configuration cannot define a basis with at least two functions.
  void validate() const;
};

/// Clamped knot vector: boundary knots repeated degree+1 times, equally spaced interior knots.
std::vector<double> build_knot_vector(const SplineConfig& cfg);

/// n x q_n matrix whose first column is identically one; columns 2..q_n are the
/// varying-part basis functions.
struct BasisBlock {
  Eigen::MatrixXd columns;

  Eigen::Index rows() const noexcept { return columns.rows(); }
  Eigen::Index cols() const noexcept { return columns.cols(); }
  /// Columns 2..q_n.
  auto varying() const { return columns.rightCols(columns.cols() - 1); }
};

/// Shares one knot vector across every gene and the intercept.
class SplineSystem {
 public:
  explicit SplineSystem(SplineConfig cfg);

  const SplineConfig& config() const noexcept { return cfg_; }
  const std::vector<double>& knots() const noexcept { return knots_; }
  int num_basis() const noexcept { return cfg_.num_basis(); }

  double clamp(double z) const noexcept;

  /// Raw B-spline basis at z (Cox-de Boor); z outside the domain is clamped.
  Eigen::VectorXd raw(double z) const;
  void raw_into(double z, Eigen::Ref<Eigen::VectorXd> out) const;
  Eigen::MatrixXd raw_matrix(std::span<const double> z) const;

  /// (1, B_2(z), ..., B_qn(z)) after the change of basis.
  Eigen::VectorXd changed(double z) const;
  BasisBlock block(std::span<const double> z) const;

 private:
  SplineConfig cfg_;
  std::vector<double> knots_;
};

/// Raw basis values; same as SplineSystem(cfg).raw(z).
Eigen::VectorXd eval_raw_basis(const SplineConfig& cfg, double z);

/// Replaces the first raw column by ones. Raw rows must sum to one (1e-8).
BasisBlock change_of_basis(const Eigen::MatrixXd& raw);

/// Row i, column k is B_{k+1}(Z_i) * x_i, all q_n columns.
Eigen::MatrixXd interaction_block(const BasisBlock& block, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace gxe::splines
