#include "gxe/geweke.hpp"

#include <chrono>
#include <cmath>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/inverse_gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include "gxe/errors.hpp"
#include "gxe/stats.hpp"

namespace gxe::geweke {

using model::Family;
using model::idx;
using model::kFamilies;

model::ModelState sample_prior(const model::ModelLayout& layout, const model::Hyperparameters& h,
                               rng::RngStream& rng) {
  h.validate();
  if (!(h.s > 0.0 && h.h > 0.0)) throw ConfigError("prior sampling needs a proper sigma^2 prior");
  model::ModelState s = model::zero_state(layout);
  s.sigma2 = rng::sample_inverse_gamma(h.s, h.h, rng);
  for (Eigen::Index k = 0; k < s.eta.size(); ++k) s.eta(k) = std::sqrt(h.prior_var_eta) * rng.normal();
  for (Eigen::Index k = 0; k < s.alpha.size(); ++k) s.alpha(k) = std::sqrt(h.prior_var_alpha) * rng.normal();
  s.zeta0 = std::sqrt(h.prior_var_zeta0) * rng.normal();
  for (Family f : kFamilies) {
    const auto& fl = layout.family(f);
    if (!fl.present) continue;
    auto& fs = s.family(f);
    const gibbs::FamilyPrior pr = gibbs::family_prior(h, f);
    const double g = fl.group_size;
    fs.lambda2 = rng::sample_gamma(pr.a, pr.b, rng);
    fs.pi = fl.spike ? rng::sample_beta(pr.r, pr.w, rng) : 1.0;
    for (Eigen::Index j = 0; j < fs.coef.rows(); ++j) {
      fs.tau2(j) = rng::sample_gamma(0.5 * (g + 1.0), 0.5 * g * fs.lambda2, rng);
      const bool on = fl.spike ? rng.uniform() < fs.pi : true;
      if (on) {
        const double sd = std::sqrt(s.sigma2 * fs.tau2(j));
        for (Eigen::Index k = 0; k < fs.coef.cols(); ++k) fs.coef(j, k) = sd * rng.normal();
      }
      fs.phi[static_cast<std::size_t>(j)] = fs.block_is_zero(j) ? 0 : 1;
    }
  }
  return s;
}

Eigen::VectorXd simulate_response(const model::ModelState& s, const model::DesignCache& c, rng::RngStream& rng) {
  Eigen::VectorXd y = model::assemble_mean(s, c);
  const double sd = std::sqrt(s.sigma2);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += sd * rng.normal();
  return y;
}

model::Hyperparameters GewekeConfig::moderate() {
  model::Hyperparameters h;
  h.a_c = h.a_v = h.a_e = 3.0;
  h.b_c = h.b_v = h.b_e = 2.0;
  h.r_c = h.r_v = h.r_e = 2.0;
  h.w_c = h.w_v = h.w_e = 2.0;
  h.s = 3.0;
  h.h = 2.0;
  h.prior_var_eta = h.prior_var_alpha = h.prior_var_zeta0 = 1.0;
  return h;
}

int GewekeReport::failures() const {
  int k = 0;
  for (const auto& t : tests) k += t.pass ? 0 : 1;
  return k;
}

namespace {

model::GxEDataset fixed_design(const GewekeConfig& cfg, rng::RngStream& rng) {
  model::GxEDataset d;
  d.y = Eigen::VectorXd::Zero(cfg.n);
  d.x.resize(cfg.n, cfg.p);
  d.z.resize(cfg.n);
  d.e.resize(cfg.n);
  d.w.resize(cfg.n, cfg.n_covariates);
  for (int i = 0; i < cfg.n; ++i) {
    for (int j = 0; j < cfg.p; ++j) d.x(i, j) = rng.normal();
    for (int k = 0; k < cfg.n_covariates; ++k) d.w(i, k) = rng.normal();
    d.z(i) = rng.uniform();
    d.e(i) = rng.uniform() < 0.5 ? 1.0 : 0.0;
  }
  return d;
}

std::vector<double> col(const Eigen::MatrixXd& m, Eigen::Index c) {
  return std::vector<double>(m.col(c).data(), m.col(c).data() + m.rows());
}

}  // namespace

GewekeReport geweke_check(const GewekeConfig& cfg) {
  namespace bm = boost::math;
  const auto start = std::chrono::steady_clock::now();
  if (cfg.replicas < 10 || cfg.steps < 1) throw ConfigError("Geweke check needs replicas >= 10 and steps >= 1");
  const model::Hyperparameters& prior = cfg.prior;
  const model::Hyperparameters& sampler = cfg.sampler ? *cfg.sampler : cfg.prior;
  prior.validate();
  sampler.validate();

  rng::RngStream design_rng(cfg.seed, rng::stream_id(0, rng::StreamRole::Other, 0));
  const model::GxEDataset data = fixed_design(cfg, design_rng);
  const auto spline = model::spline_for(cfg.degree, cfg.knots, data.z);
  const auto layout = model::ModelLayout::make(cfg.method, spline, cfg.p, cfg.n_covariates);
  const model::DesignCache cache = model::assemble_designs(data, layout);
  const auto ix = gibbs::ParamIndex::make(layout);

  Eigen::MatrixXd chained(cfg.replicas, ix.size());
  Eigen::MatrixXd direct(cfg.replicas, ix.size());
  for (int rep = 0; rep < cfg.replicas; ++rep) {
    rng::RngStream rng(cfg.seed, rng::stream_id(static_cast<std::uint64_t>(rep), rng::StreamRole::Chain));
    model::ModelState s = sample_prior(layout, prior, rng);
    model::Residual res{simulate_response(s, cache, rng), {}};
    res.resync(s, cache);
    for (int k = 0; k < cfg.steps; ++k) {
      gibbs::sweep(s, cache, sampler, res, rng);
      res.y = simulate_response(s, cache, rng);
      res.resync(s, cache);
    }
    ix.pack(s, chained.row(rep));
    rng::RngStream ref(cfg.seed, rng::stream_id(static_cast<std::uint64_t>(rep), rng::StreamRole::Init));
    ix.pack(sample_prior(layout, prior, ref), direct.row(rep));
  }

  GewekeReport report;
  auto add = [&](std::string name, std::string kind, stats::KsResult r) {
    report.tests.push_back({std::move(name), std::move(kind), r.statistic, r.p_value, r.p_value >= cfg.alpha});
  };
  auto ks1 = [&](Eigen::Index c, auto dist) {
    add(ix.names[static_cast<std::size_t>(c)], "ks1",
        stats::ks_one_sample(col(chained, c), [&](double x) { return bm::cdf(dist, x); }));
  };
  auto ks2 = [&](Eigen::Index c) {
    add(ix.names[static_cast<std::size_t>(c)], "ks2", stats::ks_two_sample(col(chained, c), col(direct, c)));
  };

  ks1(ix.sigma2, bm::inverse_gamma_distribution<double>(prior.s, prior.h));
  for (int k = 0; k < ix.base_size; ++k) ks1(ix.eta + k, bm::normal_distribution<double>(0.0, std::sqrt(prior.prior_var_eta)));
  for (int k = 0; k < ix.n_covariates; ++k) {
    ks1(ix.alpha + k, bm::normal_distribution<double>(0.0, std::sqrt(prior.prior_var_alpha)));
  }
  ks1(ix.zeta0, bm::normal_distribution<double>(0.0, std::sqrt(prior.prior_var_zeta0)));
  for (Family f : kFamilies) {
    const auto& fl = layout.family(f);
    if (!fl.present) continue;
    const auto& fc = ix.fam[idx(f)];
    const gibbs::FamilyPrior pr = gibbs::family_prior(prior, f);
    ks1(fc.lambda2, bm::gamma_distribution<double>(pr.a, 1.0 / pr.b));
    if (fc.pi >= 0) ks1(fc.pi, bm::beta_distribution<double>(pr.r, pr.w));
    for (int j = 0; j < cfg.p; ++j) {
      ks2(fc.tau2 + j);
      for (int k = 0; k < fl.group_size; ++k) ks2(ix.coef(f, j, k));
      if (!fl.spike) continue;
      // Indicator frequency against the prior mean r / (r + w).
      const double p0 = pr.r / (pr.r + pr.w);
      const double phat = chained.col(fc.phi + j).mean();
      const double z = (phat - p0) / std::sqrt(p0 * (1.0 - p0) / cfg.replicas);
      const double pv = std::erfc(std::abs(z) / std::sqrt(2.0));
      add(ix.names[static_cast<std::size_t>(fc.phi + j)], "prop", {z, pv});
    }
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace gxe::geweke
