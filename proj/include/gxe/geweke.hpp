#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gxe/gibbs.hpp"

namespace gxe::geweke {

/// Joint prior draw of every sampled quantity. Needs s > 0 and h > 0.
model::ModelState sample_prior(const model::ModelLayout& layout, const model::Hyperparameters& h,
                               rng::RngStream& rng);

/// y = mean(state) + sigma * noise.
Eigen::VectorXd simulate_response(const model::ModelState& s, const model::DesignCache& c, rng::RngStream& rng);

struct GewekeConfig {
  model::Method method = model::Method::BssvcSi;
  int n = 15, p = 3, degree = 2, knots = 1, n_covariates = 1;
  int replicas = 4000;  ///< independent successive-conditional runs
  int steps = 20;       ///< (sweep, redraw y) steps per run
  std::uint64_t seed = rng::kDefaultSeed;
  double alpha = 0.005;
  model::Hyperparameters prior = moderate();
  /// Hyperparameters handed to the sampler; defaults to `prior`. A mismatch must be detected.
  std::optional<model::Hyperparameters> sampler;

  static model::Hyperparameters moderate();
};

struct GewekeTest {
  std::string name;
  std::string kind;  ///< ks1, ks2 or prop
  double statistic = 0.0;
  double p_value = 1.0;
  bool pass = true;
};

struct GewekeReport {
  std::vector<GewekeTest> tests;
  double seconds = 0.0;

  int failures() const;
  bool all_pass() const { return failures() == 0; }
};

/// Runs each replica from a prior draw through `steps` alternations of a Gibbs sweep and a fresh
/// response, then compares the final marginals with the prior: one-sample KS where the marginal is
/// known in closed form, two-sample KS against independent prior draws otherwise, and a proportion
/// test for inclusion indicators.
GewekeReport geweke_check(const GewekeConfig& cfg);

}  // namespace gxe::geweke
