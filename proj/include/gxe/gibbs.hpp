#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gxe/model.hpp"
#include "gxe/rng.hpp"

namespace gxe::gibbs {

using model::DesignCache;
using model::Family;
using model::Hyperparameters;
using model::ModelLayout;
using model::ModelState;
using model::Residual;

struct ChainSettings {
  long iterations = 10000;
  long burn_in = 5000;
  long thin = 1;
  std::uint64_t seed = rng::kDefaultSeed;
  int n_chains = 3;
  long resync_every = 500;

  void validate() const;
  long retained() const noexcept { return (iterations - burn_in) / thin; }
};

struct SweepOptions {
  bool update_pi = true;      ///< off: inclusion rates stay at their current values
  bool update_lambda = true;  ///< off: shrinkage parameters stay fixed
};

/// Gamma (a, b) and Beta (r, w) hyperparameters of one family.
struct FamilyPrior {
  double a, b, r, w;
};
FamilyPrior family_prior(const Hyperparameters& h, Family f) noexcept;

/// Full conditional of one penalized block given everything else.
/// Q = D'D + tau^{-2} I, mean = Q^{-1} b with b = D'(y - mu_(-block)); covariance sigma^2 Q^{-1}.
struct PenalizedConditional {
  Eigen::LLT<Eigen::MatrixXd> chol;
  Eigen::VectorXd mean;
  double log_det_q = 0.0;       ///< log |Q|
  double log_spike_odds = 0.0;  ///< log of spike weight over slab weight
  double slab_prob = 1.0;       ///< l: probability that the block is non-zero
};

PenalizedConditional penalized_conditional(const Eigen::Ref<const Eigen::MatrixXd>& gram,
                                           const Eigen::Ref<const Eigen::VectorXd>& b, double tau2, double pi,
                                           bool spike, double sigma2);

/// 1 / (1 + exp(log_odds)), evaluated without overflow.
double slab_probability(double log_spike_odds) noexcept;

// Individual full-conditional updates. Each keeps `res.r` equal to y minus the current mean.
void update_eta(ModelState& s, const DesignCache& c, const Hyperparameters& h, Residual& res, rng::RngStream& rng);
void update_alpha(ModelState& s, const DesignCache& c, const Hyperparameters& h, Residual& res, rng::RngStream& rng);
void update_zeta0(ModelState& s, const DesignCache& c, const Hyperparameters& h, Residual& res, rng::RngStream& rng);
/// Coefficients of gene j in family f together with its indicator.
void update_penalized(Family f, Eigen::Index j, ModelState& s, const DesignCache& c, Residual& res,
                      rng::RngStream& rng);
void update_tau(Family f, Eigen::Index j, ModelState& s, const ModelLayout& layout, rng::RngStream& rng);
void update_lambda(Family f, ModelState& s, const ModelLayout& layout, const Hyperparameters& h, rng::RngStream& rng);
void update_pi(Family f, ModelState& s, const ModelLayout& layout, const Hyperparameters& h, rng::RngStream& rng);
void update_sigma2(ModelState& s, const DesignCache& c, const Hyperparameters& h, const Residual& res,
                   rng::RngStream& rng);

/// Shape and scale of the sigma^2 full conditional.
std::pair<double, double> sigma2_conditional(const ModelState& s, const DesignCache& c, const Hyperparameters& h,
                                             const Residual& res);

/// One full sweep in the fixed order eta, alpha, zeta0, per gene (c, v, e, taus), lambdas, pis, sigma^2.
void sweep(ModelState& s, const DesignCache& c, const Hyperparameters& h, Residual& res, rng::RngStream& rng,
           const SweepOptions& opt = {});

/// Starting state: random base coefficients, zero spike blocks, lambda^2 near 1, prior draws for tau^2 and pi.
ModelState initial_state(const DesignCache& c, const Hyperparameters& h, const Eigen::VectorXd& y,
                         rng::RngStream& rng);

/// Column layout of one stored draw.
struct ParamIndex {
  std::vector<std::string> names;
  Eigen::Index eta = 0, alpha = 0, zeta0 = 0, sigma2 = 0;
  struct FamilyCols {
    Eigen::Index coef = -1, tau2 = -1, lambda2 = -1, pi = -1, phi = -1;
  };
  std::array<FamilyCols, 3> fam;
  int base_size = 0, n_covariates = 0, n_genes = 0;
  std::array<int, 3> group{};

  static ParamIndex make(const ModelLayout& layout);
  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(names.size()); }
  /// Column of coefficient k of gene j in family f.
  Eigen::Index coef(Family f, Eigen::Index j, Eigen::Index k = 0) const {
    return fam[model::idx(f)].coef + j * group[model::idx(f)] + k;
  }
  Eigen::Index find(const std::string& name) const;  ///< -1 if absent

  void pack(const ModelState& s, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) const;
  ModelState unpack(const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& row, const ModelLayout& layout) const;
};

/// Retained draws of one chain, one row per draw.
struct ChainOutput {
  ModelLayout layout;
  ParamIndex index;
  Eigen::MatrixXd draws;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  long iterations = 0, burn_in = 0, thin = 1;
  double seconds = 0.0;  ///< wall clock, not persisted

  Eigen::Index retained() const noexcept { return draws.rows(); }
  double seconds_per_sweep() const noexcept { return iterations > 0 ? seconds / iterations : 0.0; }
};

/// Runs one chain on a private RNG stream. NumericalError carries the sweep index.
ChainOutput run_chain(const DesignCache& c, const Eigen::VectorXd& y, const Hyperparameters& h,
                      const ChainSettings& settings, std::uint64_t stream_id, const SweepOptions& opt = {});

}  // namespace gxe::gibbs
