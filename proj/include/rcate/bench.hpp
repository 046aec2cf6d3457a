#pragma once

// Benchmark harness: run a roster of learners over shared per-seed
// train/test splits, score the test split with the ranking and calibration
// metrics, stream one CSV row per (learner, seed), and summarize against the
// S-Learner baseline. Everything is driven by a JSON config so reruns are
// reproducible byte for byte (wall-clock column aside).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcate/csv.hpp"
#include "rcate/data.hpp"
#include "rcate/learner.hpp"

namespace rcate {

struct DatasetSource {
  // Exactly one of preset/csv_path is nonempty.
  std::string preset;
  Index n = 0;  // synthetic row count
  std::string csv_path;
  CsvSchema schema;
};

struct RunConfig {
  DatasetSource source;
  std::string name;  // dataset label in result rows
  std::vector<std::string> learners;
  std::vector<std::uint64_t> seeds;
  int folds = 5;
  double train_fraction = 0.7;
  LearnerSpec base_spec;                   // nuisance and plug-in stages
  std::optional<LearnerSpec> final_spec;   // overrides the per-scale default
  ClippingConfig clipping;
  bool use_known_propensity = true;  // use the design e wherever it exists
  std::string output_dir = "bench_out";

  void validate() const;
};

// Parse a config from JSON text / file. Unknown keys are an error so typos
// don't silently fall back to defaults.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

struct ResultRow {
  std::string dataset;
  std::string learner;
  std::uint64_t seed = 0;
  double qini = 0.0;
  double cal_error = 0.0;
  double wall_time_ms = 0.0;
  std::string flags;  // empty means the row is clean
};

struct BenchmarkResult {
  std::vector<ResultRow> rows;

  bool any_flagged() const;
};

// Learner ids accepted in configs, in canonical roster order.
const std::vector<std::string>& known_learner_ids();

// Runs the full grid. Writes <output_dir>/results.csv incrementally (header
// first, one flushed line per row) and returns the same rows. A learner
// failure becomes a flagged row, never aborts the run.
BenchmarkResult run_benchmark(const RunConfig& config);

std::string results_csv_header();
std::string result_row_csv(const ResultRow& row);
BenchmarkResult read_results_csv(const std::string& path);

struct SummaryRow {
  std::string dataset;
  std::string learner;
  std::size_t seeds = 0;    // clean rows entering the aggregates
  std::size_t flagged = 0;  // rows dropped from the aggregates
  double mean_qini = 0.0;
  double se_qini = 0.0;
  double mean_cal_error = 0.0;
  // Versus the S-Learner over shared seeds; absent when "s" is not in the
  // run or the pairing is impossible.
  std::optional<double> qini_vs_s;
  bool qini_negative = false;
  std::optional<double> z_vs_s;
  bool significant = false;
  bool degenerate = false;
};

std::vector<SummaryRow> summarize(const BenchmarkResult& result);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string summary_text(const std::vector<SummaryRow>& rows);

// Resolve the dataset a config points at (generation or CSV load).
Dataset load_config_dataset(const RunConfig& config);

}  // namespace rcate
