#include "gxe/gibbs.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "gxe/errors.hpp"

namespace gxe::gibbs {

using model::BlockId;
using model::idx;
using model::kFamilies;

void ChainSettings::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw ConfigError("burn-in must satisfy 0 <= burn_in < iterations");
  if (thin < 1) throw ConfigError("thin must be at least 1");
  if (n_chains < 1) throw ConfigError("chain count must be at least 1");
  if (resync_every < 1) throw ConfigError("resync interval must be at least 1");
  if (retained() < 1) throw ConfigError("settings retain no draws");
}

FamilyPrior family_prior(const Hyperparameters& h, Family f) noexcept {
  switch (f) {
    case Family::Constant: return {h.a_c, h.b_c, h.r_c, h.w_c};
    case Family::Varying: return {h.a_v, h.b_v, h.r_v, h.w_v};
    case Family::Environment: return {h.a_e, h.b_e, h.r_e, h.w_e};
  }
  return {1, 1, 1, 1};
}

double slab_probability(double log_spike_odds) noexcept {
  if (std::isnan(log_spike_odds)) return 0.0;
  if (log_spike_odds > 0.0) {
    const double t = std::exp(-log_spike_odds);
    return t / (1.0 + t);
  }
  return 1.0 / (1.0 + std::exp(log_spike_odds));
}

namespace {

struct Canonical {
  Eigen::LLT<Eigen::MatrixXd> chol;
  Eigen::VectorXd white;  // L^{-1} b
};

Canonical factor(const Eigen::Ref<const Eigen::MatrixXd>& gram, double ridge, const Eigen::Ref<const Eigen::VectorXd>& b,
                 const std::string& block) {
  Eigen::MatrixXd q = gram;
  q.diagonal().array() += ridge;
  Canonical out{Eigen::LLT<Eigen::MatrixXd>(q), {}};
  if (out.chol.info() != Eigen::Success || !std::isfinite(ridge)) {
    throw NumericalError("Cholesky factorization failed", block);
  }
  out.white = out.chol.matrixL().solve(b);
  return out;
}

Eigen::VectorXd draw_from(const Canonical& c, double scale, rng::RngStream& rng) {
  Eigen::VectorXd w = c.white;
  const double sd = std::sqrt(scale);
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) += sd * rng.normal();
  return c.chol.matrixU().solve(w);
}

// Unpenalized Gaussian block with N(0, prior_var I) prior.
void update_base_block(const BlockId& id, Eigen::Ref<Eigen::VectorXd> coef, const Eigen::MatrixXd& design,
                       const Eigen::MatrixXd& gram, double prior_var, double sigma2, const DesignCache& c,
                       Residual& res, rng::RngStream& rng) {
  Eigen::VectorXd b = design.transpose() * res.r;
  b.noalias() += gram * coef;
  const Canonical can = factor(gram, sigma2 / prior_var, b, id.label());
  const Eigen::VectorXd fresh = draw_from(can, sigma2, rng);
  const Eigen::VectorXd delta = fresh - coef;
  coef = fresh;
  model::residual_apply(id, delta, c, res.r);
}

}  // namespace

PenalizedConditional penalized_conditional(const Eigen::Ref<const Eigen::MatrixXd>& gram,
                                           const Eigen::Ref<const Eigen::VectorXd>& b, double tau2, double pi,
                                           bool spike, double sigma2) {
  if (!(tau2 > 0.0)) throw ParameterError("latent scale tau^2 must be positive");
  if (!(sigma2 > 0.0)) throw ParameterError("sigma^2 must be positive");
  const Canonical can = factor(gram, 1.0 / tau2, b, "penalized");
  PenalizedConditional out{can.chol, can.chol.matrixU().solve(can.white), 0.0, 0.0, 1.0};
  out.log_det_q = 2.0 * out.chol.matrixLLT().diagonal().array().log().sum();
  if (!spike) return out;
  if (pi <= 0.0) {
    out.log_spike_odds = std::numeric_limits<double>::infinity();
    out.slab_prob = 0.0;
    return out;
  }
  if (pi >= 1.0) {
    out.log_spike_odds = -std::numeric_limits<double>::infinity();
    out.slab_prob = 1.0;
    return out;
  }
  const double g = static_cast<double>(b.size());
  out.log_spike_odds = std::log1p(-pi) - std::log(pi) + 0.5 * g * std::log(tau2) + 0.5 * out.log_det_q -
                       0.5 * can.white.squaredNorm() / sigma2;
  out.slab_prob = slab_probability(out.log_spike_odds);
  return out;
}

void update_eta(ModelState& s, const DesignCache& c, const Hyperparameters& h, Residual& res, rng::RngStream& rng) {
  update_base_block(BlockId::base(), s.eta, c.base, c.base_gram, h.prior_var_eta, s.sigma2, c, res, rng);
}

void update_alpha(ModelState& s, const DesignCache& c, const Hyperparameters& h, Residual& res, rng::RngStream& rng) {
  if (c.w.cols() == 0) return;
  update_base_block(BlockId::covariates(), s.alpha, c.w, c.w_gram, h.prior_var_alpha, s.sigma2, c, res, rng);
}

void update_zeta0(ModelState& s, const DesignCache& c, const Hyperparameters& h, Residual& res, rng::RngStream& rng) {
  const double q = c.e_sq + s.sigma2 / h.prior_var_zeta0;
  const double b = c.e.dot(res.r) + c.e_sq * s.zeta0;
  const double fresh = b / q + std::sqrt(s.sigma2 / q) * rng.normal();
  const double delta = fresh - s.zeta0;
  s.zeta0 = fresh;
  res.r -= delta * c.e;
}

void update_penalized(Family f, Eigen::Index j, ModelState& s, const DesignCache& c, Residual& res,
                      rng::RngStream& rng) {
  const auto& fl = c.layout.family(f);
  const auto& design = c.family(f);
  auto& fs = s.family(f);
  const auto d = design.block(j);
  const Eigen::MatrixXd& gram = design.gram[static_cast<std::size_t>(j)];
  const bool was_zero = fs.block_is_zero(j);

  Eigen::VectorXd b = d.transpose() * res.r;
  if (!was_zero) b.noalias() += gram * fs.coef.row(j).transpose();

  const auto label = [&] { return BlockId::penalized(f, j).label(); };
  if (!(fs.tau2(j) > 0.0) || !std::isfinite(fs.tau2(j))) throw NumericalError("invalid latent scale", label());
  const Canonical can = factor(gram, 1.0 / fs.tau2(j), b, label());

  bool slab = true;
  if (fl.spike) {
    double l;
    if (fs.pi <= 0.0) {
      l = 0.0;
    } else if (fs.pi >= 1.0) {
      l = 1.0;
    } else {
      const double log_det = 2.0 * can.chol.matrixLLT().diagonal().array().log().sum();
      const double odds = std::log1p(-fs.pi) - std::log(fs.pi) + 0.5 * static_cast<double>(fl.group_size) *
                                                                     std::log(fs.tau2(j)) +
                          0.5 * log_det - 0.5 * can.white.squaredNorm() / s.sigma2;
      l = slab_probability(odds);
    }
    slab = rng.uniform() < l;
  }

  if (slab) {
    const Eigen::VectorXd fresh = draw_from(can, s.sigma2, rng);
    Eigen::VectorXd delta = fresh;
    if (!was_zero) delta -= fs.coef.row(j).transpose();
    fs.coef.row(j) = fresh.transpose();
    res.r.noalias() -= d * delta;
    fs.phi[static_cast<std::size_t>(j)] = fs.block_is_zero(j) ? 0 : 1;
  } else {
    if (!was_zero) {
      res.r.noalias() += d * fs.coef.row(j).transpose();
      fs.coef.row(j).setZero();
    }
    fs.phi[static_cast<std::size_t>(j)] = 0;
  }
}

void update_tau(Family f, Eigen::Index j, ModelState& s, const ModelLayout& layout, rng::RngStream& rng) {
  auto& fs = s.family(f);
  const double g = layout.family(f).group_size;
  if (fs.block_is_zero(j)) {
    fs.tau2(j) = rng::sample_gamma(0.5 * (g + 1.0), 0.5 * g * fs.lambda2, rng);
    return;
  }
  const double norm2 = fs.coef.row(j).squaredNorm();
  const double mu = std::sqrt(g * fs.lambda2 * s.sigma2 / norm2);
  const double inv = rng::sample_inverse_gaussian(mu, g * fs.lambda2, rng);
  fs.tau2(j) = 1.0 / inv;
}

void update_lambda(Family f, ModelState& s, const ModelLayout& layout, const Hyperparameters& h, rng::RngStream& rng) {
  auto& fs = s.family(f);
  const FamilyPrior pr = family_prior(h, f);
  const double g = layout.family(f).group_size;
  const double p = static_cast<double>(fs.tau2.size());
  fs.lambda2 = rng::sample_gamma(pr.a + 0.5 * p * (g + 1.0), pr.b + 0.5 * g * fs.tau2.sum(), rng);
}

void update_pi(Family f, ModelState& s, const ModelLayout& layout, const Hyperparameters& h, rng::RngStream& rng) {
  if (!layout.family(f).spike) return;
  auto& fs = s.family(f);
  const FamilyPrior pr = family_prior(h, f);
  double active = 0.0;
  for (auto v : fs.phi) active += v;
  const double zero = static_cast<double>(fs.phi.size()) - active;
  fs.pi = rng::sample_beta(pr.r + active, pr.w + zero, rng);
}

std::pair<double, double> sigma2_conditional(const ModelState& s, const DesignCache& c, const Hyperparameters& h,
                                             const Residual& res) {
  double count = static_cast<double>(c.n());
  double quad = res.r.squaredNorm();
  for (Family f : kFamilies) {
    const auto& fl = c.layout.family(f);
    if (!fl.present) continue;
    const auto& fs = s.family(f);
    for (Eigen::Index j = 0; j < fs.coef.rows(); ++j) {
      if (fs.block_is_zero(j)) continue;
      count += fl.group_size;
      quad += fs.coef.row(j).squaredNorm() / fs.tau2(j);
    }
  }
  return {h.s + 0.5 * count, h.h + 0.5 * quad};
}

void update_sigma2(ModelState& s, const DesignCache& c, const Hyperparameters& h, const Residual& res,
                   rng::RngStream& rng) {
  const auto [shape, scale] = sigma2_conditional(s, c, h, res);
  s.sigma2 = rng::sample_inverse_gamma(shape, scale, rng);
}

void sweep(ModelState& s, const DesignCache& c, const Hyperparameters& h, Residual& res, rng::RngStream& rng,
           const SweepOptions& opt) {
  const ModelLayout& layout = c.layout;
  update_eta(s, c, h, res, rng);
  update_alpha(s, c, h, res, rng);
  update_zeta0(s, c, h, res, rng);
  for (Eigen::Index j = 0; j < c.p(); ++j) {
    for (Family f : kFamilies) {
      if (layout.family(f).present) update_penalized(f, j, s, c, res, rng);
    }
    for (Family f : kFamilies) {
      if (layout.family(f).present) update_tau(f, j, s, layout, rng);
    }
  }
  if (opt.update_lambda) {
    for (Family f : kFamilies) {
      if (layout.family(f).present) update_lambda(f, s, layout, h, rng);
    }
  }
  if (opt.update_pi) {
    for (Family f : kFamilies) {
      if (layout.family(f).present) update_pi(f, s, layout, h, rng);
    }
  }
  update_sigma2(s, c, h, res, rng);
}

ModelState initial_state(const DesignCache& c, const Hyperparameters& h, const Eigen::VectorXd& y,
                         rng::RngStream& rng) {
  const ModelLayout& layout = c.layout;
  ModelState s = model::zero_state(layout);
  const double n = static_cast<double>(y.size());
  const double var_y = n > 1 ? (y.array() - y.mean()).square().sum() / (n - 1.0) : 1.0;
  s.sigma2 = (var_y > 0.0 ? var_y : 1.0) * std::exp(rng.uniform() - 0.5);

  Eigen::MatrixXd g = c.base_gram;
  g.diagonal().array() += 1e-8 * (1.0 + g.diagonal().maxCoeff());
  s.eta = g.ldlt().solve(c.base.transpose() * y);
  for (Eigen::Index k = 0; k < s.eta.size(); ++k) s.eta(k) += 0.5 * rng.normal();
  for (Eigen::Index k = 0; k < s.alpha.size(); ++k) s.alpha(k) = 0.5 * rng.normal();
  s.zeta0 = 0.5 * rng.normal();

  for (Family f : kFamilies) {
    const auto& fl = layout.family(f);
    if (!fl.present) continue;
    auto& fs = s.family(f);
    const FamilyPrior pr = family_prior(h, f);
    // Jittered around 1 rather than a hyperprior draw: a tiny start under a diffuse Gamma inflates
    // every tau2, empties the family and the chain does not recover within a practical run.
    fs.lambda2 = std::exp(rng.uniform() - 0.5);
    fs.pi = fl.spike ? rng::sample_beta(pr.r, pr.w, rng) : 1.0;
    const double g_size = fl.group_size;
    for (Eigen::Index j = 0; j < fs.coef.rows(); ++j) {
      fs.tau2(j) = rng::sample_gamma(0.5 * (g_size + 1.0), 0.5 * g_size * fs.lambda2, rng);
      if (!fl.spike) {
        for (Eigen::Index k = 0; k < fs.coef.cols(); ++k) fs.coef(j, k) = 0.1 * rng.normal();
      }
      fs.phi[static_cast<std::size_t>(j)] = fs.block_is_zero(j) ? 0 : 1;
    }
  }
  return s;
}

ParamIndex ParamIndex::make(const ModelLayout& layout) {
  ParamIndex ix;
  ix.base_size = layout.base_size();
  ix.n_covariates = layout.n_covariates;
  ix.n_genes = layout.n_genes;
  auto& names = ix.names;
  auto at = [&] { return static_cast<Eigen::Index>(names.size()); };
  ix.eta = at();
  for (int k = 0; k < ix.base_size; ++k) names.push_back("eta[" + std::to_string(k + 1) + "]");
  ix.alpha = at();
  for (int k = 0; k < ix.n_covariates; ++k) names.push_back("alpha[" + std::to_string(k + 1) + "]");
  ix.zeta0 = at();
  names.emplace_back("zeta0");
  ix.sigma2 = at();
  names.emplace_back("sigma2");
  for (Family f : kFamilies) {
    const auto& fl = layout.family(f);
    if (!fl.present) continue;
    auto& fc = ix.fam[idx(f)];
    ix.group[idx(f)] = fl.group_size;
    const std::string label = layout.coefficient_label(f);
    const std::string tag(model::family_tag(f));
    fc.coef = at();
    for (int j = 0; j < ix.n_genes; ++j) {
      const std::string gene = "[" + std::to_string(j + 1) + "]";
      if (fl.group_size == 1) {
        names.push_back(label + gene);
      } else {
        for (int k = 0; k < fl.group_size; ++k) names.push_back(label + gene + "[" + std::to_string(k + 1) + "]");
      }
    }
    fc.tau2 = at();
    for (int j = 0; j < ix.n_genes; ++j) names.push_back("tau2_" + tag + "[" + std::to_string(j + 1) + "]");
    fc.lambda2 = at();
    names.push_back("lambda2_" + tag);
    if (fl.spike) {
      fc.pi = at();
      names.push_back("pi_" + tag);
    }
    fc.phi = at();
    for (int j = 0; j < ix.n_genes; ++j) names.push_back("phi_" + tag + "[" + std::to_string(j + 1) + "]");
  }
  return ix;
}

Eigen::Index ParamIndex::find(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<Eigen::Index>(i);
  }
  return -1;
}

void ParamIndex::pack(const ModelState& s, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) const {
  row.segment(eta, base_size) = s.eta.transpose();
  if (n_covariates > 0) row.segment(alpha, n_covariates) = s.alpha.transpose();
  row(zeta0) = s.zeta0;
  row(sigma2) = s.sigma2;
  for (Family f : kFamilies) {
    const auto& fc = fam[idx(f)];
    if (fc.coef < 0) continue;
    const auto& fs = s.family(f);
    const int g = group[idx(f)];
    for (int j = 0; j < n_genes; ++j) {
      for (int k = 0; k < g; ++k) row(fc.coef + j * g + k) = fs.coef(j, k);
      row(fc.tau2 + j) = fs.tau2(j);
      row(fc.phi + j) = fs.phi[static_cast<std::size_t>(j)];
    }
    row(fc.lambda2) = fs.lambda2;
    if (fc.pi >= 0) row(fc.pi) = fs.pi;
  }
}

ModelState ParamIndex::unpack(const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& row, const ModelLayout& layout) const {
  if (row.size() != size()) throw DimensionError("draw width does not match parameter index");
  ModelState s = model::zero_state(layout);
  s.eta = row.segment(eta, base_size).transpose();
  if (n_covariates > 0) s.alpha = row.segment(alpha, n_covariates).transpose();
  s.zeta0 = row(zeta0);
  s.sigma2 = row(sigma2);
  for (Family f : kFamilies) {
    const auto& fc = fam[idx(f)];
    if (fc.coef < 0) continue;
    auto& fs = s.family(f);
    const int g = group[idx(f)];
    for (int j = 0; j < n_genes; ++j) {
      for (int k = 0; k < g; ++k) fs.coef(j, k) = row(fc.coef + j * g + k);
      fs.tau2(j) = row(fc.tau2 + j);
      fs.phi[static_cast<std::size_t>(j)] = row(fc.phi + j) != 0.0 ? 1 : 0;
    }
    fs.lambda2 = row(fc.lambda2);
    fs.pi = fc.pi >= 0 ? row(fc.pi) : 1.0;
  }
  return s;
}

ChainOutput run_chain(const DesignCache& c, const Eigen::VectorXd& y, const Hyperparameters& h,
                      const ChainSettings& settings, std::uint64_t stream_id, const SweepOptions& opt) {
  settings.validate();
  h.validate();
  const auto start = std::chrono::steady_clock::now();
  rng::RngStream rng(settings.seed, stream_id);

  ChainOutput out;
  out.layout = c.layout;
  out.index = ParamIndex::make(c.layout);
  out.seed = settings.seed;
  out.stream = stream_id;
  out.iterations = settings.iterations;
  out.burn_in = settings.burn_in;
  out.thin = settings.thin;
  out.draws.resize(settings.retained(), out.index.size());

  ModelState s = initial_state(c, h, y, rng);
  Residual res = model::make_residual(y, s, c);
  Eigen::Index row = 0;
  for (long it = 0; it < settings.iterations; ++it) {
    try {
      sweep(s, c, h, res, rng, opt);
    } catch (const NumericalError& e) {
      if (e.sweep() >= 0) throw;
      throw NumericalError("Cholesky factorization failed", e.block(), it);
    }
    if ((it + 1) % settings.resync_every == 0) res.resync(s, c);
    if (it >= settings.burn_in && (it - settings.burn_in + 1) % settings.thin == 0 && row < out.draws.rows()) {
      out.index.pack(s, out.draws.row(row++));
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace gxe::gibbs
