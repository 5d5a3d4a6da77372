#pragma once

#include <string>
#include <vector>

#include "gxe/gibbs.hpp"
#include "gxe/simgen.hpp"

namespace gxe::config {

/// Everything a run needs; validated before any work starts and echoed next to the outputs.
struct RunConfig {
  model::Method method = model::Method::BssvcSi;
  std::vector<model::Method> methods{model::Method::BssvcSi, model::Method::Bssvc, model::Method::BvcSi,
                                     model::Method::Bl};
  int degree = 2;
  int knots = 2;
  gibbs::ChainSettings chain;
  model::Hyperparameters hyper;

  std::string data_path;
  std::string genotype_path;
  int example = 1;
  int n = 500;
  int p = 100;
  int test_n = 500;
  simgen::SimOptions sim;
  simgen::LdSpec ld;

  int replicates = 20;
  int threads = 0;
  bool psrf_gate = true;
  double psrf_cutoff = 1.1;
  std::string out_dir = "out";

  void validate() const;
};

/// Overlays the keys present in an INI file on `base`. Unknown keys are a ConfigError.
RunConfig load_config(const std::string& path, RunConfig base = {});
std::string to_ini(const RunConfig& cfg);
void save_config(const std::string& path, const RunConfig& cfg);

std::vector<model::Method> parse_method_list(const std::string& text);

}  // namespace gxe::config
