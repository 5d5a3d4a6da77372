#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gxe/config.hpp"
#include "gxe/errors.hpp"
#include "gxe/model.hpp"
#include "gxe/parallel.hpp"
#include "gxe/study.hpp"

namespace fs = std::filesystem;
using gxe::config::RunConfig;

namespace {

enum Exit { kOk = 0, kConfig = 2, kData = 3, kNumerical = 4, kGate = 5 };

// Flags shared by several subcommands; unset flags leave the config value alone.
struct Overrides {
  std::string config_path;
  std::optional<std::string> method, methods, out;
  std::optional<int> example, n, p, chains, replicates, degree, knots, threads;
  std::optional<long> iters, burnin;
  std::optional<std::uint64_t> seed;
  bool no_psrf_gate = false;

  RunConfig apply() const {
    RunConfig c = config_path.empty() ? RunConfig{} : gxe::config::load_config(config_path);
    if (method) c.method = gxe::model::parse_method(*method);
    if (methods) c.methods = gxe::config::parse_method_list(*methods);
    if (out) c.out_dir = *out;
    if (example) c.example = *example;
    if (n) c.n = *n;
    if (p) c.p = *p;
    if (chains) c.chain.n_chains = *chains;
    if (replicates) c.replicates = *replicates;
    if (degree) c.degree = *degree;
    if (knots) c.knots = *knots;
    if (threads) c.threads = *threads;
    if (iters) c.chain.iterations = *iters;
    if (burnin) {
      c.chain.burn_in = *burnin;
    } else if (iters && c.chain.burn_in >= c.chain.iterations) {
      c.chain.burn_in = c.chain.iterations / 2;  // keep the half split when only --iters is given
    }
    if (seed) c.chain.seed = *seed;
    if (no_psrf_gate) c.psrf_gate = false;
    c.validate();
    return c;
  }
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "INI config file (flags override it)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

void add_chain(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--iters", o.iters, "MCMC iterations");
  cmd->add_option("--burnin", o.burnin, "burn-in iterations");
  cmd->add_option("--chains", o.chains, "chains per fit");
  cmd->add_option("--degree", o.degree, "B-spline degree");
  cmd->add_option("--knots", o.knots, "interior knots");
}

void add_sim(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--example", o.example, "simulation example 1-4");
  cmd->add_option("--n", o.n, "sample size");
  cmd->add_option("--p", o.p, "number of genetic factors");
}

void prepare_out(const RunConfig& c) {
  fs::create_directories(c.out_dir);
  gxe::config::save_config((fs::path(c.out_dir) / "config.ini").string(), c);
}

int cmd_simulate(const Overrides& o) {
  const RunConfig c = o.apply();
  prepare_out(c);
  gxe::rng::RngStream rng(c.chain.seed, gxe::rng::stream_id(0, gxe::rng::StreamRole::Data));
  const auto sim = gxe::simgen::generate(c.example, c.n, c.p, rng, c.sim, c.ld, c.genotype_path);
  gxe::model::write_dataset_csv((fs::path(c.out_dir) / "data.csv").string(), sim.data);
  gxe::simgen::write_truth_csv((fs::path(c.out_dir) / "truth.csv").string(), sim.truth);
  gxe::simgen::write_truth_curves_csv((fs::path(c.out_dir) / "truth_curves.csv").string(), sim.truth,
                                      gxe::metrics::default_grid());
  std::cout << "wrote " << sim.data.n() << " rows, " << sim.data.p() << " genetic factors to " << c.out_dir << '\n';
  return kOk;
}

int cmd_fit(const Overrides& o, const std::string& data_path) {
  RunConfig c = o.apply();
  if (!data_path.empty()) c.data_path = data_path;
  if (c.data_path.empty()) throw gxe::ConfigError("fit needs --data or data.path");
  prepare_out(c);
  const auto data = gxe::model::read_dataset_csv(c.data_path);
  const auto result = gxe::study::fit(data, c.method, c, 0, gxe::resolve_threads(c.threads));
  gxe::study::write_fit_outputs(result, c.out_dir);
  const auto& sel = result.selection;
  using gxe::model::Family;
  std::cout << gxe::model::method_name(c.method) << ": " << result.pooled.retained() << " draws in "
            << result.seconds << " s; selected varying " << sel.count(Family::Varying) << ", constant "
            << sel.count(Family::Constant) << ", E interactions " << sel.count(Family::Environment) << '\n';
  if (result.psrf) {
    std::cout << "max gated PSRF " << result.psrf->max_gated << " (" << result.psrf->worst << ")\n";
    if (!result.psrf->converged && c.psrf_gate) {
      std::cerr << "convergence gate failed: PSRF above " << result.psrf->cutoff << '\n';
      return kGate;
    }
  }
  return kOk;
}

int cmd_replicate(const Overrides& o) {
  const RunConfig c = o.apply();
  prepare_out(c);
  const auto records = gxe::study::run_replicates(
      c, c.methods, c.replicates, gxe::resolve_threads(c.threads), [](const gxe::study::ReplicateRecord& r) {
        std::cerr << "replicate " << r.replicate + 1 << ' ' << gxe::model::method_name(r.method)
                  << (r.ok ? " ok" : " failed: " + r.error) << " (" << r.seconds << " s)\n";
      });
  const auto table = gxe::study::aggregate(records, c.methods);
  gxe::study::write_replicate_table((fs::path(c.out_dir) / "table.csv").string(), table);
  gxe::study::write_replicate_records((fs::path(c.out_dir) / "records.csv").string(), records);
  for (const auto& row : table) {
    std::cout << gxe::model::method_name(row.method) << ": " << row.successes << " ok, " << row.failures
              << " failed\n";
  }
  return kOk;
}

int cmd_benchmark(const Overrides& o, const std::vector<int>& ns, const std::vector<int>& ps) {
  const RunConfig c = o.apply();
  prepare_out(c);
  const auto rows = gxe::study::run_benchmark(ns, ps, c.chain.iterations, c);
  gxe::study::write_benchmark_csv((fs::path(c.out_dir) / "benchmark.csv").string(), rows);
  for (const auto& r : rows) {
    std::cout << "n=" << r.n << " p=" << r.p << " coefficients=" << r.coefficients << ": " << r.seconds << " s\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian variable selection for gene-environment interactions"};
  app.require_subcommand(1);
  Overrides o;
  std::string data_path;
  std::vector<int> bench_n{500}, bench_p{100};

  auto* defaults = app.add_subcommand("defaults", "print the default configuration");

  auto* simulate = app.add_subcommand("simulate", "generate a simulation dataset with its truth");
  add_common(simulate, o);
  add_sim(simulate, o);

  auto* fit = app.add_subcommand("fit", "fit one method to a dataset CSV");
  add_common(fit, o);
  add_chain(fit, o);
  fit->add_option("--data", data_path, "dataset CSV (y,z,e,w1..wq,x1..xp)");
  fit->add_option("--method", o.method, "BSSVC-SI, BSSVC, BVC-SI, BVC or BL");
  fit->add_flag("--no-psrf-gate", o.no_psrf_gate, "exit 0 even when PSRF exceeds the cutoff");

  auto* replicate = app.add_subcommand("replicate", "replicated simulation study");
  add_common(replicate, o);
  add_chain(replicate, o);
  add_sim(replicate, o);
  replicate->add_option("--method", o.methods, "comma-separated methods");
  replicate->add_option("--replicates", o.replicates, "replicate count");

  auto* bench = app.add_subcommand("benchmark", "BSSVC-SI timing");
  add_common(bench, o);
  bench->add_option("--iters", o.iters, "MCMC iterations");
  bench->add_option("--n", bench_n, "sample sizes")->delimiter(',');
  bench->add_option("--p", bench_p, "gene counts")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*defaults) {
      std::cout << gxe::config::to_ini(RunConfig{});
      return kOk;
    }
    if (*simulate) return cmd_simulate(o);
    if (*fit) return cmd_fit(o, data_path);
    if (*replicate) return cmd_replicate(o);
    if (*bench) return cmd_benchmark(o, bench_n, bench_p);
  } catch (const gxe::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const gxe::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const gxe::ParameterError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const gxe::DiagnosticError& e) {
    std::cerr << "diagnostic error: " << e.what() << '\n';
    return kGate;
  } catch (const gxe::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
