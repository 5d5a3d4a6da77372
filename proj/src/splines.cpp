#include "gxe/splines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gxe/errors.hpp"

namespace gxe::splines {

void SplineConfig::validate() const {
  if (degree < 0) throw ConfigError("spline degree must be non-negative");
  if (interior_knots < 0) throw ConfigError("interior knot count must be non-negative");
  if (num_basis() < 2) throw ConfigError("spline basis needs at least two functions (degree + knots + 1 >= 2)");
  if (!std::isfinite(domain_lo) || !std::isfinite(domain_hi) || !(domain_lo < domain_hi)) {
    throw ConfigError("spline domain must satisfy lo < hi, got [" + std::to_string(domain_lo) + ", " +
                      std::to_string(domain_hi) + "]");
  }
}

std::vector<double> build_knot_vector(const SplineConfig& cfg) {
  cfg.validate();
  const int order = cfg.degree + 1;
  std::vector<double> knots;
  knots.reserve(2 * order + cfg.interior_knots);
  knots.insert(knots.end(), order, cfg.domain_lo);
  const double width = cfg.domain_hi - cfg.domain_lo;
  for (int k = 1; k <= cfg.interior_knots; ++k) {
    knots.push_back(cfg.domain_lo + width * k / (cfg.interior_knots + 1));
  }
  knots.insert(knots.end(), order, cfg.domain_hi);
  return knots;
}

SplineSystem::SplineSystem(SplineConfig cfg) : cfg_(cfg), knots_(build_knot_vector(cfg)) {}

double SplineSystem::clamp(double z) const noexcept { return std::clamp(z, cfg_.domain_lo, cfg_.domain_hi); }

void SplineSystem::raw_into(double z, Eigen::Ref<Eigen::VectorXd> out) const {
  const int p = cfg_.degree;
  const int nb = num_basis();
  out.setZero();
  z = clamp(z);

  // Span s with knots[s] <= z < knots[s+1]; the right end belongs to the last non-empty span.
  int span;
  if (z >= cfg_.domain_hi) {
    span = nb - 1;
  } else {
    auto it = std::upper_bound(knots_.begin() + p, knots_.begin() + nb + 1, z);
    span = static_cast<int>(it - knots_.begin()) - 1;
  }

  // Triangular Cox-de Boor evaluation of the p+1 non-zero functions.
  std::vector<double> n(p + 1, 0.0), left(p + 1, 0.0), right(p + 1, 0.0);
  n[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = z - knots_[span + 1 - j];
    right[j] = knots_[span + j] - z;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom > 0.0 ? n[r] / denom : 0.0;
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
  }
  for (int r = 0; r <= p; ++r) out(span - p + r) = n[r];
}

Eigen::VectorXd SplineSystem::raw(double z) const {
  Eigen::VectorXd out(num_basis());
  raw_into(z, out);
  return out;
}

Eigen::MatrixXd SplineSystem::raw_matrix(std::span<const double> z) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(z.size()), num_basis());
  Eigen::VectorXd row(num_basis());
  for (std::size_t i = 0; i < z.size(); ++i) {
    raw_into(z[i], row);
    out.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return out;
}

Eigen::VectorXd SplineSystem::changed(double z) const {
  Eigen::VectorXd b = raw(z);
  b(0) = 1.0;
  return b;
}

BasisBlock SplineSystem::block(std::span<const double> z) const { return change_of_basis(raw_matrix(z)); }

Eigen::VectorXd eval_raw_basis(const SplineConfig& cfg, double z) { return SplineSystem(cfg).raw(z); }

BasisBlock change_of_basis(const Eigen::MatrixXd& raw) {
  if (raw.cols() < 2) throw DimensionError("change of basis needs at least two raw columns");
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    const double s = raw.row(i).sum();
    if (std::abs(s - 1.0) > 1e-8) {
      throw DataError("basis integrity: raw basis row " + std::to_string(i) + " sums to " + std::to_string(s));
    }
  }
  BasisBlock out{raw};
  out.columns.col(0).setOnes();
  return out;
}

Eigen::MatrixXd interaction_block(const BasisBlock& block, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != block.rows()) {
    throw DimensionError("interaction block: x has " + std::to_string(x.size()) + " rows, basis has " +
                         std::to_string(block.rows()));
  }
  return block.columns.array().colwise() * x.array();
}

}  // namespace gxe::splines
