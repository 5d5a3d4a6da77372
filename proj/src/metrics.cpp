#include "gxe/metrics.hpp"

#include <numeric>

#include "gxe/errors.hpp"

namespace gxe::metrics {

using model::Family;

double imse(const std::vector<double>& estimate, const std::vector<double>& truth) {
  if (estimate.empty()) throw DimensionError("IMSE needs a non-empty grid");
  if (estimate.size() != truth.size()) throw DimensionError("IMSE: curve and truth lengths differ");
  double s = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) s += (estimate[i] - truth[i]) * (estimate[i] - truth[i]);
  return s / static_cast<double>(estimate.size());
}

double imse(const std::vector<double>& estimate, const std::function<double(double)>& truth,
            const std::vector<double>& grid) {
  if (estimate.size() != grid.size()) throw DimensionError("IMSE: curve and grid lengths differ");
  std::vector<double> t;
  t.reserve(grid.size());
  for (double z : grid) t.push_back(truth(z));
  return imse(estimate, t);
}

IdCounts identification_counts(const inference::SelectionReport& r, const simgen::TruthSpec& t) {
  IdCounts c;
  for (int j = 0; j < r.n_genes; ++j) {
    if (r.is_selected(Family::Varying, j)) (t.is_varying(j) ? c.varying_tp : c.varying_fp)++;
    if (r.is_selected(Family::Constant, j)) {
      if (t.is_constant(j)) {
        ++c.constant_tp;
      } else if (!t.is_varying(j)) {
        ++c.constant_fp;
      }
    }
    if (r.is_selected(Family::Environment, j)) (t.has_env(j) ? c.env_tp : c.env_fp)++;
  }
  return c;
}

double prediction_error(const inference::PointEstimate& est, const model::ModelLayout& layout,
                        const model::GxEDataset& test) {
  const Eigen::VectorXd mu = inference::predict(est, layout, test);
  return (test.y - mu).squaredNorm() / static_cast<double>(test.n());
}

EstimationError estimation_error(const inference::PointEstimate& est, const model::ModelLayout& layout,
                                 const simgen::TruthSpec& t, const std::vector<double>& grid) {
  EstimationError e;
  for (int j = -1; j < layout.n_genes; ++j) {
    const auto curve = inference::evaluate_beta(est, layout, j, grid);
    e.imse_beta.push_back(imse(curve, [&](double z) { return t.beta(j, z); }, grid));
  }
  for (Eigen::Index k = 0; k < est.alpha.size(); ++k) {
    const double truth = k < 2 ? t.alpha[static_cast<std::size_t>(k)] : 0.0;
    e.sq_alpha.push_back((est.alpha(k) - truth) * (est.alpha(k) - truth));
  }
  e.sq_zeta0 = (est.zeta0 - t.zeta0) * (est.zeta0 - t.zeta0);
  const auto& zeta = est.coef[model::idx(Family::Environment)];
  for (int j = 0; j < layout.n_genes; ++j) {
    const double fit = layout.family(Family::Environment).present ? zeta(j, 0) : 0.0;
    e.sq_zeta.push_back((fit - t.zeta_of(j)) * (fit - t.zeta_of(j)));
  }
  e.total = total_squared_error(e);
  return e;
}

double total_squared_error(const EstimationError& e) {
  auto sum = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); };
  return sum(e.imse_beta) + sum(e.sq_alpha) + e.sq_zeta0 + sum(e.sq_zeta);
}

std::vector<double> default_grid() { return inference::uniform_grid(0.0, 1.0, 200); }

}  // namespace gxe::metrics
