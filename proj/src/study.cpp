#include "gxe/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gxe/chain_io.hpp"
#include "gxe/errors.hpp"
#include "gxe/parallel.hpp"

namespace gxe::study {

using model::Family;
using model::Method;

FitResult fit(const model::GxEDataset& data, Method method, const config::RunConfig& cfg, std::uint64_t replicate,
              unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  data.validate();
  const auto spline = model::spline_for(cfg.degree, cfg.knots, data.z);
  FitResult out;
  out.layout = model::ModelLayout::make(method, spline, static_cast<int>(data.p()), static_cast<int>(data.q()));
  const model::DesignCache cache = model::assemble_designs(data, out.layout);
  const auto n_chains = static_cast<std::size_t>(cfg.chain.n_chains);
  out.chains.resize(n_chains);
  parallel_for(n_chains, threads, [&](std::size_t c) {
    out.chains[c] = gibbs::run_chain(cache, data.y, cfg.hyper, cfg.chain,
                                     rng::stream_id(replicate, rng::StreamRole::Chain, c));
  });
  out.pooled = inference::pool(out.chains);
  out.selection = inference::select(out.pooled);
  out.estimate = inference::point_estimate(out.pooled);
  if (n_chains >= 2) out.psrf = inference::psrf(out.chains, cfg.psrf_cutoff);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void write_fit_outputs(const FitResult& fit, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "curves");
  for (std::size_t c = 0; c < fit.chains.size(); ++c) {
    chain_io::write_chain((fs::path(dir) / ("chain_" + std::to_string(c + 1) + ".bin")).string(), fit.chains[c]);
  }
  inference::write_summary_csv((fs::path(dir) / "summary.csv").string(), fit.pooled);
  inference::write_selection_csv((fs::path(dir) / "selection.csv").string(), fit.selection);
  if (fit.psrf) inference::write_psrf_csv((fs::path(dir) / "psrf.csv").string(), *fit.psrf);
  const auto& sp = fit.layout.spline;
  const auto grid = inference::uniform_grid(sp.domain_lo, sp.domain_hi, 200);
  inference::write_curve_csv((fs::path(dir) / "curves" / "beta0.csv").string(),
                             inference::reconstruct_beta(fit.pooled, -1, grid));
  for (int j = 0; j < fit.layout.n_genes; ++j) {
    if (!fit.selection.is_selected(Family::Varying, j) && !fit.selection.is_selected(Family::Constant, j)) continue;
    inference::write_curve_csv((fs::path(dir) / "curves" / ("beta" + std::to_string(j + 1) + ".csv")).string(),
                               inference::reconstruct_beta(fit.pooled, j, grid));
  }
}

simgen::SimData replicate_data(const config::RunConfig& cfg, int replicate, bool test) {
  const auto role = test ? rng::StreamRole::TestData : rng::StreamRole::Data;
  rng::RngStream rng(cfg.chain.seed, rng::stream_id(static_cast<std::uint64_t>(replicate), role));
  return simgen::generate(cfg.example, test ? cfg.test_n : cfg.n, cfg.p, rng, cfg.sim, cfg.ld, cfg.genotype_path);
}

std::vector<ReplicateRecord> run_replicates(const config::RunConfig& cfg, const std::vector<Method>& methods,
                                            int replicates, unsigned threads,
                                            const std::function<void(const ReplicateRecord&)>& progress) {
  cfg.validate();
  const std::size_t m = methods.size();
  const std::size_t total = static_cast<std::size_t>(replicates) * m;
  std::vector<ReplicateRecord> records(total);
  std::mutex report_guard;
  const auto grid = metrics::default_grid();
  parallel_for(total, threads, [&](std::size_t k) {
    ReplicateRecord& rec = records[k];
    rec.replicate = static_cast<int>(k / m);
    rec.method = methods[k % m];
    const auto start = std::chrono::steady_clock::now();
    try {
      const simgen::SimData train = replicate_data(cfg, rec.replicate, false);
      const simgen::SimData test = replicate_data(cfg, rec.replicate, true);
      const FitResult f = fit(train.data, rec.method, cfg, static_cast<std::uint64_t>(rec.replicate), 1);
      rec.id = metrics::identification_counts(f.selection, train.truth);
      rec.est = metrics::estimation_error(f.estimate, f.layout, train.truth, grid);
      rec.pred_error = metrics::prediction_error(f.estimate, f.layout, test.data);
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (progress) {
      std::lock_guard lock(report_guard);
      progress(rec);
    }
  });
  return records;
}

const MetricSummary& MethodSummary::get(const std::string& name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return m;
  }
  throw ConfigError("no metric named " + name);
}

namespace {

std::vector<std::pair<std::string, double>> flatten(const ReplicateRecord& r) {
  std::vector<std::pair<std::string, double>> v{
      {"varying_tp", r.id.varying_tp}, {"varying_fp", r.id.varying_fp}, {"constant_tp", r.id.constant_tp},
      {"constant_fp", r.id.constant_fp}, {"env_tp", r.id.env_tp},       {"env_fp", r.id.env_fp}};
  const auto& e = r.est;
  for (std::size_t j = 0; j < e.imse_beta.size() && j < 9; ++j) {
    v.emplace_back((j < 4 ? "imse_beta" : "mse_beta") + std::to_string(j), e.imse_beta[j]);
  }
  for (std::size_t k = 0; k < e.sq_alpha.size(); ++k) v.emplace_back("mse_alpha" + std::to_string(k + 1), e.sq_alpha[k]);
  v.emplace_back("mse_zeta0", e.sq_zeta0);
  for (std::size_t j = 0; j < e.sq_zeta.size() && j < 5; ++j) v.emplace_back("mse_zeta" + std::to_string(j + 1), e.sq_zeta[j]);
  v.emplace_back("total", e.total);
  v.emplace_back("pred_error", r.pred_error);
  v.emplace_back("seconds", r.seconds);
  return v;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::vector<MethodSummary> aggregate(const std::vector<ReplicateRecord>& records, const std::vector<Method>& methods) {
  std::vector<MethodSummary> out;
  for (Method m : methods) {
    MethodSummary s{m, 0, 0, {}};
    std::vector<std::vector<double>> cols;
    for (const auto& r : records) {
      if (r.method != m) continue;
      if (!r.ok) {
        ++s.failures;
        continue;
      }
      const auto flat = flatten(r);
      if (s.metrics.empty()) {
        for (const auto& [name, _] : flat) s.metrics.push_back({name, 0.0, 0.0});
        cols.resize(flat.size());
      }
      for (std::size_t i = 0; i < flat.size() && i < cols.size(); ++i) cols[i].push_back(flat[i].second);
      ++s.successes;
    }
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const auto& c = cols[i];
      double mean = 0.0;
      for (double x : c) mean += x;
      mean /= static_cast<double>(c.size());
      double ss = 0.0;
      for (double x : c) ss += (x - mean) * (x - mean);
      s.metrics[i].mean = mean;
      s.metrics[i].sd = c.size() > 1 ? std::sqrt(ss / static_cast<double>(c.size() - 1)) : 0.0;
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_replicate_table(const std::string& path, const std::vector<MethodSummary>& table) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  std::vector<std::string> names;
  for (const auto& row : table) {
    if (!row.metrics.empty()) {
      for (const auto& m : row.metrics) names.push_back(m.name);
      break;
    }
  }
  out << "method,successes,failures";
  for (const auto& n : names) {
    if (n != "seconds") out << ',' << n;
  }
  out << '\n';
  for (const auto& row : table) {
    out << model::method_name(row.method) << ',' << row.successes << ',' << row.failures;
    for (const auto& n : names) {
      if (n == "seconds") continue;
      out << ',';
      if (row.successes > 0) out << num(row.get(n).mean) << '(' << num(row.get(n).sd) << ')';
    }
    out << '\n';
  }
}

void write_replicate_records(const std::string& path, const std::vector<ReplicateRecord>& records) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  bool header = false;
  for (const auto& r : records) {
    if (!r.ok) continue;
    const auto flat = flatten(r);
    if (!header) {
      out << "replicate,method";
      for (const auto& [name, _] : flat) {
        if (name != "seconds") out << ',' << name;
      }
      out << '\n';
      header = true;
    }
    out << r.replicate << ',' << model::method_name(r.method);
    for (const auto& [name, v] : flat) {
      if (name == "seconds") continue;
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.10g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
  for (const auto& r : records) {
    if (!r.ok) out << "# replicate " << r.replicate << ' ' << model::method_name(r.method) << " failed: " << r.error << '\n';
  }
}

std::vector<BenchRow> run_benchmark(const std::vector<int>& ns, const std::vector<int>& ps, long iterations,
                                    const config::RunConfig& cfg) {
  std::vector<BenchRow> rows;
  for (int n : ns) {
    for (int p : ps) {
      rng::RngStream rng(cfg.chain.seed, rng::stream_id(0, rng::StreamRole::Data, 0));
      const simgen::SimData sim = simgen::gen_example1(n, p, rng, cfg.sim);
      const auto spline = model::spline_for(cfg.degree, cfg.knots, sim.data.z);
      const auto layout = model::ModelLayout::make(Method::BssvcSi, spline, p, static_cast<int>(sim.data.q()));
      const model::DesignCache cache = model::assemble_designs(sim.data, layout);
      gibbs::ChainSettings settings = cfg.chain;
      settings.iterations = iterations;
      settings.burn_in = iterations / 2;
      settings.thin = 1;
      const auto chain = gibbs::run_chain(cache, sim.data.y, cfg.hyper, settings,
                                          rng::stream_id(0, rng::StreamRole::Chain, 0));
      rows.push_back({n, p, iterations, spline.num_basis() * p + p, chain.seconds});
    }
  }
  return rows;
}

void write_benchmark_csv(const std::string& path, const std::vector<BenchRow>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "n,p,iterations,coefficients,seconds\n";
  for (const auto& r : rows) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r.seconds);
    out << r.n << ',' << r.p << ',' << r.iterations << ',' << r.coefficients << ',' << buf << '\n';
  }
}

}  // namespace gxe::study
