#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gxe/splines.hpp"

namespace gxe::model {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Response, genetic matrix, environment factors and clinical covariates for n subjects.
struct GxEDataset {
  Eigen::VectorXd y;  ///< response
  Eigen::MatrixXd x;  ///< n x p genetic factors
  Eigen::VectorXd z;  ///< continuous environment factor
  Eigen::VectorXd e;  ///< discrete environment factor, coded real
  Eigen::MatrixXd w;  ///< n x q clinical covariates

  Eigen::Index n() const noexcept { return y.size(); }
  Eigen::Index p() const noexcept { return x.cols(); }
  Eigen::Index q() const noexcept { return w.cols(); }

  /// Throws DataError on mismatched row counts or non-finite entries. `allow_no_genes`
  /// admits p = 0 (used by the conjugate regression check).
  void validate(bool allow_no_genes = false) const;
};

/// Prior hyperparameters. Gamma pairs (a, b) are shape/rate for lambda^2, Beta pairs (r, w)
/// for the inclusion rates, (s, h) the Inverse-Gamma prior on sigma^2.
struct Hyperparameters {
  double a_v = 1.0, b_v = 1.0;
  double a_c = 1.0, b_c = 1.0;
  double a_e = 1.0, b_e = 1.0;
  double r_v = 1.0, w_v = 1.0;
  double r_c = 1.0, w_c = 1.0;
  double r_e = 1.0, w_e = 1.0;
  double s = 1.0, h = 1.0;
  double prior_var_eta = 1e4;
  double prior_var_alpha = 1e4;
  double prior_var_zeta0 = 1e4;

  /// All strictly positive, except s = h = 0 which selects the improper 1/sigma^2 prior.
  void validate() const;
};

enum class Method { BssvcSi, Bssvc, BvcSi, Bvc, Bl };

std::string_view method_name(Method m) noexcept;
/// Accepts "BSSVC-SI", "bssvc_si", "bvc", ... ; throws ConfigError otherwise.
Method parse_method(std::string_view text);
inline constexpr std::array<Method, 5> kAllMethods{Method::BssvcSi, Method::Bssvc, Method::BvcSi, Method::Bvc,
                                                   Method::Bl};

/// Penalized coefficient families: constant main effect, varying (spline) part, linear E interaction.
enum class Family : int { Constant = 0, Varying = 1, Environment = 2 };
inline constexpr std::array<Family, 3> kFamilies{Family::Constant, Family::Varying, Family::Environment};
constexpr int idx(Family f) noexcept { return static_cast<int>(f); }
std::string_view family_tag(Family f) noexcept;  // "c", "v", "e"

struct FamilyLayout {
  bool present = false;
  int group_size = 0;
  bool spike = false;
};

/// Which blocks a method variant samples and how large they are.
struct ModelLayout {
  Method method = Method::BssvcSi;
  splines::SplineConfig spline;
  int n_genes = 0;
  int n_covariates = 0;
  bool linear_base = false;  ///< intercept design (1, z) instead of B0
  std::array<FamilyLayout, 3> families;

  static ModelLayout make(Method method, const splines::SplineConfig& spline, int n_genes, int n_covariates);

  const FamilyLayout& family(Family f) const { return families[idx(f)]; }
  int base_size() const noexcept { return linear_base ? 2 : spline.num_basis(); }
  bool spike_variant() const noexcept;
  /// Coefficient label used in output files: gamma1, gamma_star, gamma, gamma_z, zeta.
  std::string coefficient_label(Family f) const;
};

/// Per-family sampled quantities.
struct FamilyState {
  RowMatrix coef;                 ///< p x group_size
  Eigen::VectorXd tau2;           ///< latent scales
  double lambda2 = 1.0;
  double pi = 0.5;
  std::vector<std::uint8_t> phi;  ///< inclusion indicators

  bool block_is_zero(Eigen::Index j) const { return (coef.row(j).array() == 0.0).all(); }
};

/// Full parameter state at one MCMC iteration.
struct ModelState {
  Eigen::VectorXd eta;
  Eigen::VectorXd alpha;
  double zeta0 = 0.0;
  double sigma2 = 1.0;
  std::array<FamilyState, 3> fam;

  FamilyState& family(Family f) { return fam[idx(f)]; }
  const FamilyState& family(Family f) const { return fam[idx(f)]; }

  double gamma1(Eigen::Index j) const { return fam[0].coef(j, 0); }
  auto gamma_star(Eigen::Index j) const { return fam[1].coef.row(j); }
  double zeta(Eigen::Index j) const { return fam[2].coef(j, 0); }
};

/// All coefficients zero, unit scales, pi = 0.5, sigma^2 = 1; sized for `layout`.
ModelState zero_state(const ModelLayout& layout);

/// phi_j == 1 exactly when the block is non-zero, for every present family.
bool indicators_consistent(const ModelState& state, const ModelLayout& layout);

/// Design columns of one penalized family, gene blocks stored side by side.
struct PenalizedDesign {
  int group_size = 0;
  Eigen::MatrixXd columns;            ///< n x (p * group_size)
  std::vector<Eigen::MatrixXd> gram;  ///< per-gene D_j' D_j

  auto block(Eigen::Index j) const { return columns.middleCols(j * group_size, group_size); }
};

/// Fixed designs and their Gram matrices; immutable once assembled and shareable across chains.
struct DesignCache {
  ModelLayout layout;
  splines::SplineSystem spline;
  Eigen::MatrixXd base;  ///< B0 (n x q_n) or (1, z) for the linear variant
  Eigen::MatrixXd base_gram;
  Eigen::MatrixXd w;
  Eigen::MatrixXd w_gram;
  Eigen::VectorXd e;
  double e_sq = 0.0;
  Eigen::MatrixXd t;  ///< T_ij = X_ij * E_i
  std::array<PenalizedDesign, 3> families;

  Eigen::Index n() const noexcept { return base.rows(); }
  Eigen::Index p() const noexcept { return layout.n_genes; }
  const PenalizedDesign& family(Family f) const { return families[idx(f)]; }
};

/// Spline configuration spanning the observed range of z.
splines::SplineConfig spline_for(int degree, int interior_knots, const Eigen::Ref<const Eigen::VectorXd>& z);

DesignCache assemble_designs(const GxEDataset& data, const ModelLayout& layout);

enum class BlockKind { Base, Covariates, EnvMain, Penalized };

/// Names one additive block of the mean.
struct BlockId {
  BlockKind kind = BlockKind::Base;
  Family family = Family::Constant;
  Eigen::Index gene = -1;

  static BlockId base() { return {BlockKind::Base}; }
  static BlockId covariates() { return {BlockKind::Covariates}; }
  static BlockId env_main() { return {BlockKind::EnvMain}; }
  static BlockId penalized(Family f, Eigen::Index j) { return {BlockKind::Penalized, f, j}; }
  std::string label() const;
};

/// Current contribution of one block to the mean.
Eigen::VectorXd block_contribution(const BlockId& id, const ModelState& state, const DesignCache& cache);

/// Mean assembled from scratch.
Eigen::VectorXd assemble_mean(const ModelState& state, const DesignCache& cache);

/// Response plus the running residual r = y - mu.
struct Residual {
  Eigen::VectorXd y;
  Eigen::VectorXd r;

  /// r recomputed from scratch.
  void resync(const ModelState& state, const DesignCache& cache);
};

Residual make_residual(const Eigen::VectorXd& y, const ModelState& state, const DesignCache& cache);

/// y - mu_(-block): the residual with the block's current contribution added back. `r` is untouched.
Eigen::VectorXd residual_exclude(const BlockId& id, const ModelState& state, const DesignCache& cache,
                                 const Eigen::VectorXd& r);

/// r -= D_block * delta, where delta is the change in that block's coefficients.
void residual_apply(const BlockId& id, const Eigen::Ref<const Eigen::VectorXd>& delta, const DesignCache& cache,
                    Eigen::VectorXd& r);

/// Gaussian log density of y given the state, mean assembled from scratch.
double log_likelihood(const ModelState& state, const DesignCache& cache, const Eigen::VectorXd& y);

// CSV I/O: header `y,z,e,w1..wq,x1..xp`.
GxEDataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const std::string& path, const GxEDataset& data);

}  // namespace gxe::model
