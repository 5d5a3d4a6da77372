#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gxe/model.hpp"
#include "gxe/rng.hpp"

namespace gxe::simgen {

/// True coefficients of the simulation designs. Genes are 0-based here; gene j is x_{j+1}.
struct TruthSpec {
  std::array<double, 5> constants{0.5, 0.8, -1.2, 0.7, -1.1};  ///< genes 4..8
  std::array<double, 2> alpha{-0.5, 1.0};
  double zeta0 = 1.5;
  std::array<double, 5> zeta{0.6, 1.5, -1.3, 1.0, -0.8};  ///< genes 1..5
  double noise_sd = 1.0;
  int n_genes = 100;

  /// Intercept function when gene = -1, otherwise coefficient function of gene `gene`.
  double beta(int gene, double z) const;
  double zeta_of(int gene) const;
  bool is_varying(int gene) const noexcept { return gene >= 0 && gene < 3; }
  bool is_constant(int gene) const noexcept { return gene >= 3 && gene < 8; }
  bool has_env(int gene) const noexcept { return gene >= 0 && gene < 5; }
};

/// Adjacent-locus linkage parameters.
struct LdSpec {
  double q1 = 0.3, q2 = 0.3, r = 0.6;

  double delta() const;
  /// p_AB, p_Ab, p_aB, p_ab. Throws ConfigError when any is outside [0, 1].
  std::array<double, 4> haplotypes() const;
  void validate() const;
};

/// 3x3 matrix P(genotype at locus 2 | genotype at locus 1), genotypes coded 2 = AA, 1 = Aa, 0 = aa
/// (A the minor allele). Row index is 2 - code.
Eigen::Matrix3d conditional_genotype_matrix(const LdSpec& ld);

struct SimOptions {
  double rho = 0.5;       ///< AR correlation of the genetic factors
  double w_rho = 0.5;     ///< correlation of the two clinical covariates
  double e_prob = 0.5;    ///< Bernoulli rate of E
  double noise_sd = 1.0;  ///< 0 gives noise-free responses
};

struct SimData {
  model::GxEDataset data;
  TruthSpec truth;
  Eigen::VectorXd mean;  ///< noise-free mean
};

/// Mean under the true coefficients, assembled directly from the truth functions.
Eigen::VectorXd truth_mean(const model::GxEDataset& data, const TruthSpec& truth);

/// Fills Z, E, W and Y for a given genetic matrix.
SimData attach_response(Eigen::MatrixXd x, const TruthSpec& truth, const SimOptions& opt, rng::RngStream& rng);

/// AR(rho) Gaussian expressions.
Eigen::MatrixXd ar_gaussian(int n, int p, double rho, rng::RngStream& rng);
/// Per column: above Q3 -> 2, below Q1 -> 0, otherwise 1.
Eigen::MatrixXd dichotomize_quartiles(const Eigen::MatrixXd& x);
/// Locus 1 from HWE, later loci chained through the conditional genotype matrix.
Eigen::MatrixXd ld_genotypes(int n, int p, const LdSpec& ld, rng::RngStream& rng);

SimData gen_example1(int n, int p, rng::RngStream& rng, const SimOptions& opt = {});
SimData gen_example2(int n, int p, rng::RngStream& rng, const SimOptions& opt = {});
SimData gen_example3(int n, int p, const LdSpec& ld, rng::RngStream& rng, const SimOptions& opt = {});

/// Genotype CSV with a header row, one column per locus. Reads all rows.
Eigen::MatrixXd read_genotype_csv(const std::string& path);
/// Subsamples n_sub rows without replacement, keeps the first p columns, attaches the response.
SimData gen_from_genotypes(const Eigen::MatrixXd& genotypes, int n_sub, int p, rng::RngStream& rng,
                           const SimOptions& opt = {});

/// Example 1..4 dispatch; Example 4 needs a genotype file.
SimData generate(int example, int n, int p, rng::RngStream& rng, const SimOptions& opt = {},
                 const LdSpec& ld = {}, const std::string& genotype_path = "");

/// Columns term,index,kind,value; varying functions are listed with value NA.
void write_truth_csv(const std::string& path, const TruthSpec& truth);
/// Columns z,beta0,beta1,beta2,beta3 on `grid`.
void write_truth_curves_csv(const std::string& path, const TruthSpec& truth, const std::vector<double>& grid);

}  // namespace gxe::simgen
