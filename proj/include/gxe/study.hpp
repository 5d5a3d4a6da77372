#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gxe/config.hpp"
#include "gxe/inference.hpp"
#include "gxe/metrics.hpp"

namespace gxe::study {

struct FitResult {
  model::ModelLayout layout;
  std::vector<gibbs::ChainOutput> chains;
  gibbs::ChainOutput pooled;
  inference::SelectionReport selection;
  inference::PointEstimate estimate;
  std::optional<inference::PsrfReport> psrf;  ///< present with two or more chains
  double seconds = 0.0;
};

/// Fits one method with cfg.chain.n_chains chains. Chain c of replicate r uses sub-stream
/// (r, Chain, c) of cfg.chain.seed; chains run on up to `threads` workers.
FitResult fit(const model::GxEDataset& data, model::Method method, const config::RunConfig& cfg,
              std::uint64_t replicate = 0, unsigned threads = 1);

/// Chain files, summary, selection, PSRF and curve CSVs into `dir` (created if missing).
void write_fit_outputs(const FitResult& fit, const std::string& dir);

struct ReplicateRecord {
  int replicate = 0;
  model::Method method = model::Method::BssvcSi;
  bool ok = false;
  std::string error;
  metrics::IdCounts id;
  metrics::EstimationError est;
  double pred_error = 0.0;
  double seconds = 0.0;
};

/// Training and test data of replicate r: sub-streams (r, Data) and (r, TestData).
simgen::SimData replicate_data(const config::RunConfig& cfg, int replicate, bool test);

/// Replicates x methods on a worker pool; records ordered by (replicate, method).
std::vector<ReplicateRecord> run_replicates(const config::RunConfig& cfg, const std::vector<model::Method>& methods,
                                            int replicates, unsigned threads,
                                            const std::function<void(const ReplicateRecord&)>& progress = {});

struct MetricSummary {
  std::string name;
  double mean = 0.0, sd = 0.0;
};

struct MethodSummary {
  model::Method method;
  int successes = 0, failures = 0;
  std::vector<MetricSummary> metrics;

  const MetricSummary& get(const std::string& name) const;
};

/// Mean and sample sd per metric over successful replicates of each method, in `methods` order.
std::vector<MethodSummary> aggregate(const std::vector<ReplicateRecord>& records,
                                     const std::vector<model::Method>& methods);

void write_replicate_table(const std::string& path, const std::vector<MethodSummary>& table);
void write_replicate_records(const std::string& path, const std::vector<ReplicateRecord>& records);

struct BenchRow {
  int n = 0, p = 0;
  long iterations = 0;
  int coefficients = 0;  ///< penalized coefficients per sweep, q_n * p + p
  double seconds = 0.0;
};

/// Single-chain BSSVC-SI timing on Example 1 data.
std::vector<BenchRow> run_benchmark(const std::vector<int>& ns, const std::vector<int>& ps, long iterations,
                                    const config::RunConfig& cfg);
void write_benchmark_csv(const std::string& path, const std::vector<BenchRow>& rows);

}  // namespace gxe::study
