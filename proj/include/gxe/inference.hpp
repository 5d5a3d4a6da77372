#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gxe/gibbs.hpp"

namespace gxe::inference {

using gibbs::ChainOutput;
using model::Family;

/// Rows of all chains stacked in chain order. Chains must share one layout.
ChainOutput pool(const std::vector<ChainOutput>& chains);

/// Posterior inclusion probability per gene and family (empty vector for absent families).
struct InclusionProbabilities {
  std::array<Eigen::VectorXd, 3> prob;
  const Eigen::VectorXd& of(Family f) const { return prob[model::idx(f)]; }
};

/// Mean of the stored indicators. Throws DiagnosticError on a chain without draws.
InclusionProbabilities inclusion_probabilities(const ChainOutput& chain);

enum class SelectionRule { MedianProbability, CredibleInterval };

struct SelectionReport {
  model::Method method = model::Method::BssvcSi;
  SelectionRule rule = SelectionRule::MedianProbability;
  double cutoff = 0.5;  ///< MPM threshold or credible level
  int n_genes = 0;
  InclusionProbabilities inclusion;
  std::array<std::vector<std::uint8_t>, 3> selected;  ///< empty for absent families
  Eigen::VectorXd gamma1_median;                      ///< constant part (NaN when the family is absent)
  Eigen::VectorXd zeta_median;

  bool is_selected(Family f, Eigen::Index j) const {
    const auto& s = selected[model::idx(f)];
    return !s.empty() && s[static_cast<std::size_t>(j)] != 0;
  }
  int count(Family f) const;
};

/// Selected iff inclusion probability >= threshold, families independently.
SelectionReport mpm_select(const InclusionProbabilities& inclusion, const model::ModelLayout& layout,
                           double threshold = 0.5);

/// Selected iff some coefficient of the block has an equal-tailed interval excluding zero.
SelectionReport ci_select(const ChainOutput& chain, double level = 0.95);

/// MPM for spike-and-slab variants, credible intervals otherwise; medians filled in.
SelectionReport select(const ChainOutput& pooled);

/// Coordinate-wise posterior medians.
struct PointEstimate {
  Eigen::VectorXd eta, alpha;
  double zeta0 = 0.0;
  std::array<model::RowMatrix, 3> coef;
};
PointEstimate point_estimate(const ChainOutput& chain);
model::ModelState to_state(const PointEstimate& est, const model::ModelLayout& layout);

struct Curve {
  std::vector<double> z, median, lo, hi;
};

/// Coefficient function of gene `gene` (0-based) or of the intercept when gene = -1, per retained
/// draw, summarized by the pointwise median and equal-tailed band. Grid points are clamped to the domain.
Curve reconstruct_beta(const ChainOutput& chain, Eigen::Index gene, const std::vector<double>& grid,
                       double level = 0.95);

/// Evaluates the coefficient function of a point estimate on a grid.
std::vector<double> evaluate_beta(const PointEstimate& est, const model::ModelLayout& layout, Eigen::Index gene,
                                  const std::vector<double>& grid);

/// n equally spaced points on [lo, hi].
std::vector<double> uniform_grid(double lo, double hi, int n);

/// Fitted mean on a new dataset from a point estimate; z outside the fitted domain is clamped.
Eigen::VectorXd predict(const PointEstimate& est, const model::ModelLayout& layout, const model::GxEDataset& data);

/// Gelman-Rubin factor of one scalar across chains of equal length.
double psrf_value(const std::vector<Eigen::VectorXd>& chains);

struct PsrfReport {
  std::vector<std::string> names;
  std::vector<double> values;
  std::vector<std::uint8_t> gated;
  double max_gated = 1.0;
  std::string worst;
  double cutoff = 1.1;
  bool converged = true;
};

/// PSRF for every stored scalar. Gated: eta, alpha, zeta0, sigma^2, lambda^2, pi, and coefficients
/// of blocks whose pooled inclusion is at least 1/2 (all coefficients for non-spike variants).
PsrfReport psrf(const std::vector<ChainOutput>& chains, double cutoff = 1.1);

// CSV writers.
void write_summary_csv(const std::string& path, const ChainOutput& pooled);
void write_selection_csv(const std::string& path, const SelectionReport& report);
void write_curve_csv(const std::string& path, const Curve& curve);
void write_psrf_csv(const std::string& path, const PsrfReport& report);

}  // namespace gxe::inference
