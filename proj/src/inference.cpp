#include "gxe/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "gxe/errors.hpp"
#include "gxe/stats.hpp"

namespace gxe::inference {

using model::idx;
using model::kFamilies;

namespace {

std::vector<double> column(const Eigen::MatrixXd& draws, Eigen::Index c) {
  return std::vector<double>(draws.col(c).data(), draws.col(c).data() + draws.rows());
}

void require_draws(const ChainOutput& chain) {
  if (chain.draws.rows() == 0) throw DiagnosticError("chain holds no retained draws");
}

Eigen::VectorXd function_basis(const model::ModelLayout& layout, const splines::SplineSystem& spline, double z) {
  if (layout.linear_base) {
    Eigen::VectorXd b(2);
    b << 1.0, spline.clamp(z);
    return b;
  }
  return spline.changed(z);
}

// Columns holding the coefficient function of a gene, aligned with function_basis.
std::vector<Eigen::Index> function_columns(const gibbs::ParamIndex& ix, const model::ModelLayout& layout,
                                           Eigen::Index gene) {
  std::vector<Eigen::Index> cols;
  if (gene < 0) {
    for (int k = 0; k < ix.base_size; ++k) cols.push_back(ix.eta + k);
    return cols;
  }
  if (gene >= layout.n_genes) throw DimensionError("gene index out of range");
  for (Family f : {Family::Constant, Family::Varying}) {
    const auto& fl = layout.family(f);
    if (!fl.present) continue;
    for (int k = 0; k < fl.group_size; ++k) cols.push_back(ix.coef(f, gene, k));
  }
  return cols;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

}  // namespace

ChainOutput pool(const std::vector<ChainOutput>& chains) {
  if (chains.empty()) throw DiagnosticError("no chains to pool");
  ChainOutput out = chains.front();
  Eigen::Index rows = 0;
  for (const auto& c : chains) {
    if (c.index.names != out.index.names) throw DimensionError("chains do not share a parameter layout");
    rows += c.draws.rows();
  }
  out.draws.resize(rows, out.index.size());
  Eigen::Index at = 0;
  for (const auto& c : chains) {
    out.draws.middleRows(at, c.draws.rows()) = c.draws;
    at += c.draws.rows();
  }
  out.seconds = 0.0;
  for (const auto& c : chains) out.seconds += c.seconds;
  return out;
}

InclusionProbabilities inclusion_probabilities(const ChainOutput& chain) {
  require_draws(chain);
  InclusionProbabilities out;
  for (Family f : kFamilies) {
    const auto& fc = chain.index.fam[idx(f)];
    if (fc.phi < 0) continue;
    out.prob[idx(f)] = chain.draws.middleCols(fc.phi, chain.index.n_genes).colwise().mean().transpose();
  }
  return out;
}

int SelectionReport::count(Family f) const {
  const auto& s = selected[idx(f)];
  return static_cast<int>(std::count(s.begin(), s.end(), std::uint8_t{1}));
}

SelectionReport mpm_select(const InclusionProbabilities& inclusion, const model::ModelLayout& layout,
                           double threshold) {
  SelectionReport r;
  r.method = layout.method;
  r.rule = SelectionRule::MedianProbability;
  r.cutoff = threshold;
  r.n_genes = layout.n_genes;
  r.inclusion = inclusion;
  for (Family f : kFamilies) {
    const auto& p = inclusion.of(f);
    if (!layout.family(f).present || p.size() == 0) continue;
    auto& sel = r.selected[idx(f)];
    sel.resize(static_cast<std::size_t>(p.size()));
    for (Eigen::Index j = 0; j < p.size(); ++j) sel[static_cast<std::size_t>(j)] = p(j) >= threshold ? 1 : 0;
  }
  r.gamma1_median = Eigen::VectorXd::Constant(layout.n_genes, std::numeric_limits<double>::quiet_NaN());
  r.zeta_median = r.gamma1_median;
  return r;
}

SelectionReport ci_select(const ChainOutput& chain, double level) {
  require_draws(chain);
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("credible level must lie in (0, 1)");
  const auto& layout = chain.layout;
  SelectionReport r = mpm_select(inclusion_probabilities(chain), layout, 0.5);
  r.rule = SelectionRule::CredibleInterval;
  r.cutoff = level;
  const double lo_p = 0.5 * (1.0 - level), hi_p = 1.0 - lo_p;
  for (Family f : kFamilies) {
    const auto& fl = layout.family(f);
    if (!fl.present) continue;
    auto& sel = r.selected[idx(f)];
    sel.assign(static_cast<std::size_t>(layout.n_genes), 0);
    for (int j = 0; j < layout.n_genes; ++j) {
      for (int k = 0; k < fl.group_size; ++k) {
        auto v = column(chain.draws, chain.index.coef(f, j, k));
        std::sort(v.begin(), v.end());
        const double lo = stats::quantile_sorted(v, lo_p), hi = stats::quantile_sorted(v, hi_p);
        if (lo > 0.0 || hi < 0.0) {
          sel[static_cast<std::size_t>(j)] = 1;
          break;
        }
      }
    }
  }
  return r;
}

SelectionReport select(const ChainOutput& pooled) {
  SelectionReport r =
      pooled.layout.spike_variant() ? mpm_select(inclusion_probabilities(pooled), pooled.layout) : ci_select(pooled);
  const PointEstimate est = point_estimate(pooled);
  for (int j = 0; j < pooled.layout.n_genes; ++j) {
    if (pooled.layout.family(Family::Constant).present) r.gamma1_median(j) = est.coef[idx(Family::Constant)](j, 0);
    if (pooled.layout.family(Family::Environment).present) r.zeta_median(j) = est.coef[idx(Family::Environment)](j, 0);
  }
  return r;
}

PointEstimate point_estimate(const ChainOutput& chain) {
  require_draws(chain);
  const auto& ix = chain.index;
  auto med = [&](Eigen::Index c) { return stats::median(column(chain.draws, c)); };
  PointEstimate est;
  est.eta.resize(ix.base_size);
  for (int k = 0; k < ix.base_size; ++k) est.eta(k) = med(ix.eta + k);
  est.alpha.resize(ix.n_covariates);
  for (int k = 0; k < ix.n_covariates; ++k) est.alpha(k) = med(ix.alpha + k);
  est.zeta0 = med(ix.zeta0);
  for (Family f : kFamilies) {
    const auto& fl = chain.layout.family(f);
    if (!fl.present) continue;
    auto& m = est.coef[idx(f)];
    m.resize(ix.n_genes, fl.group_size);
    for (int j = 0; j < ix.n_genes; ++j) {
      for (int k = 0; k < fl.group_size; ++k) m(j, k) = med(ix.coef(f, j, k));
    }
  }
  return est;
}

model::ModelState to_state(const PointEstimate& est, const model::ModelLayout& layout) {
  model::ModelState s = model::zero_state(layout);
  s.eta = est.eta;
  s.alpha = est.alpha;
  s.zeta0 = est.zeta0;
  for (Family f : kFamilies) {
    if (!layout.family(f).present) continue;
    auto& fs = s.family(f);
    fs.coef = est.coef[idx(f)];
    for (Eigen::Index j = 0; j < fs.coef.rows(); ++j) fs.phi[static_cast<std::size_t>(j)] = fs.block_is_zero(j) ? 0 : 1;
  }
  return s;
}

Curve reconstruct_beta(const ChainOutput& chain, Eigen::Index gene, const std::vector<double>& grid, double level) {
  require_draws(chain);
  const splines::SplineSystem spline(chain.layout.spline);
  const auto cols = function_columns(chain.index, chain.layout, gene);
  Eigen::MatrixXd coefs(chain.draws.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) coefs.col(static_cast<Eigen::Index>(k)) = chain.draws.col(cols[k]);
  const double lo_p = 0.5 * (1.0 - level), hi_p = 1.0 - lo_p;
  Curve c;
  std::vector<double> values(static_cast<std::size_t>(chain.draws.rows()));
  for (double z : grid) {
    const Eigen::VectorXd basis = function_basis(chain.layout, spline, z);
    const Eigen::VectorXd f = coefs * basis;
    values.assign(f.data(), f.data() + f.size());
    std::sort(values.begin(), values.end());
    c.z.push_back(spline.clamp(z));
    c.median.push_back(stats::quantile_sorted(values, 0.5));
    c.lo.push_back(stats::quantile_sorted(values, lo_p));
    c.hi.push_back(stats::quantile_sorted(values, hi_p));
  }
  return c;
}

std::vector<double> evaluate_beta(const PointEstimate& est, const model::ModelLayout& layout, Eigen::Index gene,
                                  const std::vector<double>& grid) {
  const splines::SplineSystem spline(layout.spline);
  Eigen::VectorXd coef;
  if (gene < 0) {
    coef = est.eta;
  } else {
    std::vector<double> v;
    for (Family f : {Family::Constant, Family::Varying}) {
      if (!layout.family(f).present) continue;
      const auto& m = est.coef[idx(f)];
      for (Eigen::Index k = 0; k < m.cols(); ++k) v.push_back(m(gene, k));
    }
    coef = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  std::vector<double> out;
  out.reserve(grid.size());
  for (double z : grid) out.push_back(function_basis(layout, spline, z).dot(coef));
  return out;
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
  if (n < 1) throw ConfigError("grid needs at least one point");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return g;
}

Eigen::VectorXd predict(const PointEstimate& est, const model::ModelLayout& layout, const model::GxEDataset& data) {
  const model::DesignCache cache = model::assemble_designs(data, layout);
  return model::assemble_mean(to_state(est, layout), cache);
}

double psrf_value(const std::vector<Eigen::VectorXd>& chains) {
  if (chains.size() < 2) throw DiagnosticError("PSRF needs at least two chains");
  const Eigen::Index n = chains.front().size();
  if (n < 10) throw DiagnosticError("PSRF needs at least 10 draws per chain");
  for (const auto& c : chains) {
    if (c.size() != n) throw DiagnosticError("PSRF needs chains of equal length");
  }
  const double m = static_cast<double>(chains.size());
  const double g = static_cast<double>(n);
  Eigen::VectorXd means(chains.size());
  double w = 0.0;
  for (std::size_t i = 0; i < chains.size(); ++i) {
    means(static_cast<Eigen::Index>(i)) = chains[i].mean();
    w += (chains[i].array() - chains[i].mean()).square().sum() / (g - 1.0);
  }
  w /= m;
  const double b = g * (means.array() - means.mean()).square().sum() / (m - 1.0);
  if (w <= 0.0) return b <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(((g - 1.0) / g * w + b / g) / w);
}

PsrfReport psrf(const std::vector<ChainOutput>& chains, double cutoff) {
  if (chains.size() < 2) throw DiagnosticError("PSRF needs at least two chains");
  const ChainOutput pooled = pool(chains);
  const auto& ix = pooled.index;
  const auto& layout = pooled.layout;
  std::vector<std::uint8_t> gate(static_cast<std::size_t>(ix.size()), 0);
  auto mark = [&](Eigen::Index c) { gate[static_cast<std::size_t>(c)] = 1; };
  for (int k = 0; k < ix.base_size; ++k) mark(ix.eta + k);
  for (int k = 0; k < ix.n_covariates; ++k) mark(ix.alpha + k);
  mark(ix.zeta0);
  mark(ix.sigma2);
  const InclusionProbabilities inc = inclusion_probabilities(pooled);
  for (Family f : kFamilies) {
    const auto& fl = layout.family(f);
    if (!fl.present) continue;
    const auto& fc = ix.fam[idx(f)];
    mark(fc.lambda2);
    if (fc.pi >= 0) mark(fc.pi);
    for (int j = 0; j < ix.n_genes; ++j) {
      if (fl.spike && inc.of(f)(j) < 0.5) continue;
      for (int k = 0; k < fl.group_size; ++k) mark(ix.coef(f, j, k));
    }
  }

  PsrfReport r;
  r.cutoff = cutoff;
  r.names = ix.names;
  r.values.resize(r.names.size());
  r.gated.resize(r.names.size());
  std::vector<Eigen::VectorXd> cols(chains.size());
  for (Eigen::Index c = 0; c < ix.size(); ++c) {
    for (std::size_t i = 0; i < chains.size(); ++i) cols[i] = chains[i].draws.col(c);
    const double v = psrf_value(cols);
    const auto u = static_cast<std::size_t>(c);
    r.values[u] = v;
    bool degenerate = true;
    for (const auto& col : cols) {
      if ((col.array() != col(0)).any() || col(0) != cols[0](0)) degenerate = false;
    }
    r.gated[u] = gate[u] && !degenerate;
    if (r.gated[u] && !(v <= r.max_gated)) {
      r.max_gated = v;
      r.worst = r.names[u];
    }
  }
  r.converged = r.max_gated <= cutoff;
  return r;
}

void write_summary_csv(const std::string& path, const ChainOutput& pooled) {
  require_draws(pooled);
  auto out = open_out(path);
  const auto& ix = pooled.index;
  const InclusionProbabilities inc = inclusion_probabilities(pooled);
  std::vector<double> inclusion(static_cast<std::size_t>(ix.size()), std::numeric_limits<double>::quiet_NaN());
  std::vector<std::uint8_t> skip(static_cast<std::size_t>(ix.size()), 0);
  for (Family f : kFamilies) {
    const auto& fl = pooled.layout.family(f);
    if (!fl.present) continue;
    for (int j = 0; j < ix.n_genes; ++j) {
      skip[static_cast<std::size_t>(ix.fam[idx(f)].phi + j)] = 1;
      if (!fl.spike) continue;
      for (int k = 0; k < fl.group_size; ++k) inclusion[static_cast<std::size_t>(ix.coef(f, j, k))] = inc.of(f)(j);
    }
  }
  out << "name,median,q2.5,q97.5,inclusion\n";
  for (Eigen::Index c = 0; c < ix.size(); ++c) {
    if (skip[static_cast<std::size_t>(c)]) continue;
    auto v = column(pooled.draws, c);
    std::sort(v.begin(), v.end());
    out << ix.names[static_cast<std::size_t>(c)] << ',' << fmt(stats::quantile_sorted(v, 0.5)) << ','
        << fmt(stats::quantile_sorted(v, 0.025)) << ',' << fmt(stats::quantile_sorted(v, 0.975)) << ','
        << fmt(inclusion[static_cast<std::size_t>(c)]) << '\n';
  }
}

void write_selection_csv(const std::string& path, const SelectionReport& report) {
  auto out = open_out(path);
  out << "gene,p_c,p_v,p_e,selected_constant,selected_varying,selected_linear_e,gamma1_median,zeta_median,rule\n";
  const std::string rule = report.rule == SelectionRule::MedianProbability ? "mpm" : "ci";
  auto prob = [&](Family f, int j) {
    const auto& p = report.inclusion.of(f);
    const bool meaningful = report.rule == SelectionRule::MedianProbability && p.size() > 0;
    return meaningful ? fmt(p(j)) : std::string("NA");
  };
  for (int j = 0; j < report.n_genes; ++j) {
    out << j + 1 << ',' << prob(Family::Constant, j) << ',' << prob(Family::Varying, j) << ','
        << prob(Family::Environment, j) << ',' << int(report.is_selected(Family::Constant, j)) << ','
        << int(report.is_selected(Family::Varying, j)) << ',' << int(report.is_selected(Family::Environment, j)) << ','
        << fmt(report.gamma1_median.size() > j ? report.gamma1_median(j) : std::nan("")) << ','
        << fmt(report.zeta_median.size() > j ? report.zeta_median(j) : std::nan("")) << ',' << rule << '\n';
  }
}

void write_curve_csv(const std::string& path, const Curve& curve) {
  auto out = open_out(path);
  out << "z,median,lo95,hi95\n";
  for (std::size_t i = 0; i < curve.z.size(); ++i) {
    out << fmt(curve.z[i]) << ',' << fmt(curve.median[i]) << ',' << fmt(curve.lo[i]) << ',' << fmt(curve.hi[i])
        << '\n';
  }
}

void write_psrf_csv(const std::string& path, const PsrfReport& report) {
  auto out = open_out(path);
  out << "name,psrf,gated\n";
  for (std::size_t i = 0; i < report.names.size(); ++i) {
    out << report.names[i] << ',' << fmt(report.values[i]) << ',' << int(report.gated[i]) << '\n';
  }
}

}  // namespace gxe::inference
