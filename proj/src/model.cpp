#include "gxe/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "gxe/errors.hpp"

namespace gxe::model {

void GxEDataset::validate(bool allow_no_genes) const {
  const Eigen::Index rows = y.size();
  if (rows == 0) throw DataError("dataset has no observations");
  if (x.rows() != rows || z.size() != rows || e.size() != rows || w.rows() != rows) {
    throw DataError("dataset columns have inconsistent row counts");
  }
  if (!allow_no_genes && x.cols() < 1) throw DataError("dataset needs at least one genetic factor");
  auto finite = [](const auto& m) { return m.size() == 0 || m.allFinite(); };
  if (!finite(y) || !finite(x) || !finite(z) || !finite(e) || !finite(w)) {
    throw DataError("dataset contains missing or non-finite values");
  }
}

void Hyperparameters::validate() const {
  const std::array<std::pair<const char*, double>, 15> positive{{{"a_v", a_v},
                                                                  {"b_v", b_v},
                                                                  {"a_c", a_c},
                                                                  {"b_c", b_c},
                                                                  {"a_e", a_e},
                                                                  {"b_e", b_e},
                                                                  {"r_v", r_v},
                                                                  {"w_v", w_v},
                                                                  {"r_c", r_c},
                                                                  {"w_c", w_c},
                                                                  {"r_e", r_e},
                                                                  {"w_e", w_e},
                                                                  {"prior_var_eta", prior_var_eta},
                                                                  {"prior_var_alpha", prior_var_alpha},
                                                                  {"prior_var_zeta0", prior_var_zeta0}}};
  for (const auto& [name, v] : positive) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("hyperparameter ") + name + " must be positive");
  }
  const bool improper = s == 0.0 && h == 0.0;
  if (!improper && (!(s > 0.0) || !(h > 0.0) || !std::isfinite(s) || !std::isfinite(h))) {
    throw ConfigError("sigma^2 prior needs s > 0 and h > 0 (or s = h = 0 for the 1/sigma^2 prior)");
  }
}

std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::BssvcSi: return "BSSVC-SI";
    case Method::Bssvc: return "BSSVC";
    case Method::BvcSi: return "BVC-SI";
    case Method::Bvc: return "BVC";
    case Method::Bl: return "BL";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  std::string norm;
  for (char ch : text) {
    if (ch == '_' ) ch = '-';
    norm.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  }
  for (Method m : kAllMethods) {
    if (norm == method_name(m)) return m;
  }
  throw ConfigError("unknown method '" + std::string(text) + "' (expected BSSVC-SI, BSSVC, BVC-SI, BVC or BL)");
}

std::string_view family_tag(Family f) noexcept {
  switch (f) {
    case Family::Constant: return "c";
    case Family::Varying: return "v";
    case Family::Environment: return "e";
  }
  return "?";
}

ModelLayout ModelLayout::make(Method method, const splines::SplineConfig& spline, int n_genes, int n_covariates) {
  spline.validate();
  if (n_genes < 0 || n_covariates < 0) throw ConfigError("negative dimension in model layout");
  ModelLayout l;
  l.method = method;
  l.spline = spline;
  l.n_genes = n_genes;
  l.n_covariates = n_covariates;
  const int qn = spline.num_basis();
  auto& c = l.families[idx(Family::Constant)];
  auto& v = l.families[idx(Family::Varying)];
  auto& e = l.families[idx(Family::Environment)];
  switch (method) {
    case Method::BssvcSi:
      c = {true, 1, true};
      v = {true, qn - 1, true};
      e = {true, 1, true};
      break;
    case Method::Bssvc:
      v = {true, qn, true};
      e = {true, 1, true};
      break;
    case Method::BvcSi:
      c = {true, 1, false};
      v = {true, qn - 1, false};
      e = {true, 1, false};
      break;
    case Method::Bvc:
      v = {true, qn, false};
      e = {true, 1, false};
      break;
    case Method::Bl:
      l.linear_base = true;
      c = {true, 1, false};
      v = {true, 1, false};
      e = {true, 1, false};
      break;
  }
  return l;
}

bool ModelLayout::spike_variant() const noexcept {
  return std::any_of(families.begin(), families.end(), [](const FamilyLayout& f) { return f.present && f.spike; });
}

std::string ModelLayout::coefficient_label(Family f) const {
  switch (f) {
    case Family::Constant: return "gamma1";
    case Family::Environment: return "zeta";
    case Family::Varying:
      if (linear_base) return "gamma_z";
      return family(Family::Constant).present ? "gamma_star" : "gamma";
  }
  return "?";
}

ModelState zero_state(const ModelLayout& layout) {
  ModelState s;
  s.eta = Eigen::VectorXd::Zero(layout.base_size());
  s.alpha = Eigen::VectorXd::Zero(layout.n_covariates);
  for (Family f : kFamilies) {
    const auto& fl = layout.family(f);
    auto& fs = s.family(f);
    const int g = fl.present ? fl.group_size : 0;
    const int p = fl.present ? layout.n_genes : 0;
    fs.coef = RowMatrix::Zero(p, g);
    fs.tau2 = Eigen::VectorXd::Ones(p);
    fs.phi.assign(static_cast<std::size_t>(p), 0);
    fs.lambda2 = 1.0;
    fs.pi = 0.5;
  }
  return s;
}

bool indicators_consistent(const ModelState& state, const ModelLayout& layout) {
  for (Family f : kFamilies) {
    if (!layout.family(f).present) continue;
    const auto& fs = state.family(f);
    for (Eigen::Index j = 0; j < fs.coef.rows(); ++j) {
      const bool nonzero = !fs.block_is_zero(j);
      if (nonzero != (fs.phi[static_cast<std::size_t>(j)] == 1)) return false;
    }
  }
  return true;
}

splines::SplineConfig spline_for(int degree, int interior_knots, const Eigen::Ref<const Eigen::VectorXd>& z) {
  if (z.size() == 0) throw DataError("cannot derive spline domain from an empty z");
  splines::SplineConfig cfg{degree, interior_knots, z.minCoeff(), z.maxCoeff()};
  cfg.validate();
  return cfg;
}

DesignCache assemble_designs(const GxEDataset& data, const ModelLayout& layout) {
  data.validate(true);
  const Eigen::Index n = data.n();
  if (data.p() != layout.n_genes || data.q() != layout.n_covariates) {
    throw DimensionError("design: dataset has p=" + std::to_string(data.p()) + ", q=" + std::to_string(data.q()) +
                         " but layout expects p=" + std::to_string(layout.n_genes) +
                         ", q=" + std::to_string(layout.n_covariates));
  }
  splines::SplineSystem spline(layout.spline);
  const std::span<const double> zs(data.z.data(), static_cast<std::size_t>(n));
  const splines::BasisBlock basis = spline.block(zs);

  DesignCache c{layout, spline, {}, {}, data.w, {}, data.e, 0.0, {}, {}};
  if (layout.linear_base) {
    c.base.resize(n, 2);
    c.base.col(0).setOnes();
    c.base.col(1) = data.z;
  } else {
    c.base = basis.columns;
  }
  c.base_gram = c.base.transpose() * c.base;
  c.w_gram = c.w.transpose() * c.w;
  c.e_sq = c.e.squaredNorm();
  c.t = data.x.array().colwise() * data.e.array();

  const Eigen::Index p = layout.n_genes;
  for (Family f : kFamilies) {
    const auto& fl = layout.family(f);
    if (!fl.present) continue;
    auto& d = c.families[idx(f)];
    const int g = fl.group_size;
    d.group_size = g;
    d.columns.resize(n, p * g);
    for (Eigen::Index j = 0; j < p; ++j) {
      auto blk = d.columns.middleCols(j * g, g);
      switch (f) {
        case Family::Constant: blk.col(0) = data.x.col(j); break;
        case Family::Environment: blk.col(0) = c.t.col(j); break;
        case Family::Varying:
          if (layout.linear_base) {
            blk.col(0) = data.x.col(j).cwiseProduct(data.z);
          } else {
            blk = splines::interaction_block(basis, data.x.col(j)).rightCols(g);
          }
          break;
      }
    }
    d.gram.resize(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
      d.gram[static_cast<std::size_t>(j)] = d.block(j).transpose() * d.block(j);
    }
  }
  return c;
}

std::string BlockId::label() const {
  switch (kind) {
    case BlockKind::Base: return "eta";
    case BlockKind::Covariates: return "alpha";
    case BlockKind::EnvMain: return "zeta0";
    case BlockKind::Penalized: return std::string(family_tag(family)) + "[" + std::to_string(gene + 1) + "]";
  }
  return "?";
}

namespace {

void check_gene(const BlockId& id, const DesignCache& cache) {
  if (id.kind != BlockKind::Penalized) return;
  if (!cache.layout.family(id.family).present || id.gene < 0 || id.gene >= cache.p()) {
    throw DimensionError("unknown block " + id.label() + " for method " + std::string(method_name(cache.layout.method)));
  }
}

}  // namespace

Eigen::VectorXd block_contribution(const BlockId& id, const ModelState& state, const DesignCache& cache) {
  check_gene(id, cache);
  switch (id.kind) {
    case BlockKind::Base: return cache.base * state.eta;
    case BlockKind::Covariates:
      if (cache.w.cols() == 0) return Eigen::VectorXd::Zero(cache.n());
      return cache.w * state.alpha;
    case BlockKind::EnvMain: return cache.e * state.zeta0;
    case BlockKind::Penalized:
      return cache.family(id.family).block(id.gene) * state.family(id.family).coef.row(id.gene).transpose();
  }
  return {};
}

Eigen::VectorXd assemble_mean(const ModelState& state, const DesignCache& cache) {
  Eigen::VectorXd mu = cache.base * state.eta + cache.e * state.zeta0;
  if (cache.w.cols() > 0) mu += cache.w * state.alpha;
  for (Family f : kFamilies) {
    if (!cache.layout.family(f).present) continue;
    const auto& d = cache.family(f);
    const auto& coef = state.family(f).coef;
    for (Eigen::Index j = 0; j < cache.p(); ++j) {
      if (state.family(f).block_is_zero(j)) continue;
      mu.noalias() += d.block(j) * coef.row(j).transpose();
    }
  }
  return mu;
}

void Residual::resync(const ModelState& state, const DesignCache& cache) { r = y - assemble_mean(state, cache); }

Residual make_residual(const Eigen::VectorXd& y, const ModelState& state, const DesignCache& cache) {
  if (y.size() != cache.n()) throw DimensionError("response length does not match design");
  Residual res{y, {}};
  res.resync(state, cache);
  return res;
}

Eigen::VectorXd residual_exclude(const BlockId& id, const ModelState& state, const DesignCache& cache,
                                 const Eigen::VectorXd& r) {
  return r + block_contribution(id, state, cache);
}

void residual_apply(const BlockId& id, const Eigen::Ref<const Eigen::VectorXd>& delta, const DesignCache& cache,
                    Eigen::VectorXd& r) {
  check_gene(id, cache);
  switch (id.kind) {
    case BlockKind::Base: r.noalias() -= cache.base * delta; break;
    case BlockKind::Covariates:
      if (cache.w.cols() > 0) r.noalias() -= cache.w * delta;
      break;
    case BlockKind::EnvMain: r -= cache.e * delta(0); break;
    case BlockKind::Penalized: r.noalias() -= cache.family(id.family).block(id.gene) * delta; break;
  }
}

double log_likelihood(const ModelState& state, const DesignCache& cache, const Eigen::VectorXd& y) {
  if (!(state.sigma2 > 0.0)) throw ParameterError("log-likelihood needs sigma2 > 0");
  const Eigen::VectorXd r = y - assemble_mean(state, cache);
  const double n = static_cast<double>(y.size());
  return -0.5 * n * std::log(2.0 * std::numbers::pi * state.sigma2) - 0.5 * r.squaredNorm() / state.sigma2;
}

}  // namespace gxe::model
