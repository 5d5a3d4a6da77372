#pragma once

#include <functional>
#include <vector>

#include "gxe/inference.hpp"
#include "gxe/simgen.hpp"

namespace gxe::metrics {

/// Mean squared deviation between two curves on the same grid.
double imse(const std::vector<double>& estimate, const std::vector<double>& truth);
double imse(const std::vector<double>& estimate, const std::function<double(double)>& truth,
            const std::vector<double>& grid);

struct IdCounts {
  int varying_tp = 0, varying_fp = 0;
  int constant_tp = 0, constant_fp = 0;
  int env_tp = 0, env_fp = 0;
};

/// Varying against genes 1-3, constant against 4-8 (genes 1-3 never count as constant FP),
/// E interactions against 1-5.
IdCounts identification_counts(const inference::SelectionReport& report, const simgen::TruthSpec& truth);

/// Mean squared error of the fitted mean against observed responses.
double prediction_error(const inference::PointEstimate& est, const model::ModelLayout& layout,
                        const model::GxEDataset& test);

struct EstimationError {
  std::vector<double> imse_beta;  ///< index 0 is the intercept function, then genes 1..p
  std::vector<double> sq_alpha;
  double sq_zeta0 = 0.0;
  std::vector<double> sq_zeta;  ///< genes 1..p
  double total = 0.0;           ///< sum of every part above
};

EstimationError estimation_error(const inference::PointEstimate& est, const model::ModelLayout& layout,
                                 const simgen::TruthSpec& truth, const std::vector<double>& grid);

/// Sum of the parts of an estimation error.
double total_squared_error(const EstimationError& e);

/// Default scoring grid: 200 equally spaced points on [0, 1].
std::vector<double> default_grid();

}  // namespace gxe::metrics
