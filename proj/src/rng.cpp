#include "gxe/rng.hpp"

#include <cmath>
#include <string>

#include "gxe/errors.hpp"

namespace gxe::rng {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t id) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(id >> 32), 0x6778u};
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(what) + " must be positive and finite");
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), id_(stream_id) {
  auto seq = make_seed_seq(seed, stream_id);
  engine_.seed(seq);
}

double RngStream::uniform() { return unif_(engine_); }
double RngStream::normal() { return norm_(engine_); }

Eigen::VectorXd sample_mvn(const Eigen::Ref<const Eigen::VectorXd>& mean, const Eigen::Ref<const Eigen::MatrixXd>& matrix,
                           MatrixMode mode, RngStream& rng, const char* block) {
  const Eigen::Index d = mean.size();
  if (matrix.rows() != d || matrix.cols() != d) throw DimensionError("sample_mvn: matrix does not match mean");
  Eigen::LLT<Eigen::MatrixXd> llt(matrix);
  if (llt.info() != Eigen::Success) throw NumericalError("Cholesky factorization failed", block);
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < d; ++i) z(i) = rng.normal();
  if (mode == MatrixMode::Covariance) return mean + llt.matrixL() * z;
  // Q = L L' so L'^{-1} z has covariance Q^{-1}.
  return mean + llt.matrixU().solve(z);
}

Eigen::VectorXd sample_canonical(const Eigen::LLT<Eigen::MatrixXd>& chol, const Eigen::Ref<const Eigen::VectorXd>& b,
                                 double scale, RngStream& rng) {
  const Eigen::Index d = b.size();
  Eigen::VectorXd w = chol.matrixL().solve(b);
  const double sd = std::sqrt(scale);
  for (Eigen::Index i = 0; i < d; ++i) w(i) += sd * rng.normal();
  return chol.matrixU().solve(w);
}

double sample_inverse_gaussian(double mu, double lambda, RngStream& rng) {
  require_positive(mu, "inverse-Gaussian mean");
  require_positive(lambda, "inverse-Gaussian shape");
  const double nu = rng.normal();
  const double y = nu * nu;
  const double t = mu * y / (2.0 * lambda);
  // Smaller root of the MSH quadratic written as mu^2 / (larger root) to avoid cancellation.
  const double x1 = mu / (1.0 + t + std::sqrt(t * (2.0 + t)));
  if (rng.uniform() * (mu + x1) <= mu) return x1;
  return mu * mu / x1;
}

double sample_gamma(double shape, double rate, RngStream& rng) {
  require_positive(shape, "gamma shape");
  require_positive(rate, "gamma rate");
  std::gamma_distribution<double> g(shape, 1.0 / rate);
  return g(rng.engine());
}

double sample_inverse_gamma(double shape, double scale, RngStream& rng) {
  require_positive(shape, "inverse-gamma shape");
  require_positive(scale, "inverse-gamma scale");
  return 1.0 / sample_gamma(shape, scale, rng);
}

double sample_beta(double a, double b, RngStream& rng) {
  require_positive(a, "beta a");
  require_positive(b, "beta b");
  const double x = sample_gamma(a, 1.0, rng);
  const double y = sample_gamma(b, 1.0, rng);
  return x / (x + y);
}

int sample_bernoulli(double p, RngStream& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("bernoulli probability must lie in [0, 1]");
  return rng.uniform() < p ? 1 : 0;
}

}  // namespace gxe::rng
