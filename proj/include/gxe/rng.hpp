#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace gxe::rng {

/// Default master seed used when none is given on the command line or in a config.
inline constexpr std::uint64_t kDefaultSeed = 20200917ULL;

/// Roles used when deriving sub-streams for a replicate study.
enum class StreamRole : std::uint64_t { Data = 1, TestData = 2, Chain = 3, Init = 4, Other = 5 };

/// Counter-based sub-stream id: distinct (replicate, role, index) triples map to distinct ids.
constexpr std::uint64_t stream_id(std::uint64_t replicate, StreamRole role, std::uint64_t index = 0) {
  return (replicate << 24) ^ (static_cast<std::uint64_t>(role) << 16) ^ index;
}

/// A seedable generator. Identical (seed, stream_id) pairs produce identical draw sequences.
/// Not thread-safe; each worker owns its own stream.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = kDefaultSeed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t id() const noexcept { return id_; }

  /// Uniform on [0, 1).
  double uniform();
  double normal();
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t id_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

enum class MatrixMode { Covariance, Precision };

/// Draw from N(mean, Sigma). In precision mode `matrix` is Sigma^{-1} and the draw is formed
/// with triangular solves against its Cholesky factor. Throws NumericalError carrying
/// `block` when the factorization fails.
Eigen::VectorXd sample_mvn(const Eigen::Ref<const Eigen::VectorXd>& mean, const Eigen::Ref<const Eigen::MatrixXd>& matrix,
                           MatrixMode mode, RngStream& rng, const char* block = "mvn");

/// Draw from the Gaussian with density proportional to exp(-x'Qx/2 + b'x) scaled by `scale`:
/// mean Q^{-1}b and covariance scale * Q^{-1}. `chol` must hold the lower Cholesky factor of Q.
Eigen::VectorXd sample_canonical(const Eigen::LLT<Eigen::MatrixXd>& chol, const Eigen::Ref<const Eigen::VectorXd>& b,
                                 double scale, RngStream& rng);

/// Inverse-Gaussian with mean `mu` and shape `lambda` (Michael-Schucany-Haas).
double sample_inverse_gaussian(double mu, double lambda, RngStream& rng);

/// Gamma with mean shape/rate.
double sample_gamma(double shape, double rate, RngStream& rng);

/// Inverse-Gamma with mean scale/(shape-1).
double sample_inverse_gamma(double shape, double scale, RngStream& rng);

double sample_beta(double a, double b, RngStream& rng);

int sample_bernoulli(double p, RngStream& rng);

}  // namespace gxe::rng
