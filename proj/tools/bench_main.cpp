#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rcate/bench.hpp"
#include "rcate/synthetic.hpp"

namespace {

std::vector<std::string> split_comma(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

int cmd_run(const std::string& config_path, int seed_count, const std::string& learners,
            const std::string& out_dir) {
  rcate::RunConfig config = rcate::load_run_config(config_path);
  if (seed_count > 0) {
    config.seeds.clear();
    for (int i = 1; i <= seed_count; ++i) config.seeds.push_back(static_cast<std::uint64_t>(i));
  }
  if (!learners.empty()) config.learners = split_comma(learners);
  if (!out_dir.empty()) config.output_dir = out_dir;
  config.validate();

  const rcate::BenchmarkResult result = rcate::run_benchmark(config);
  std::cout << rcate::summary_text(rcate::summarize(result));
  std::cout << "results: " << (std::filesystem::path(config.output_dir) / "results.csv").string()
            << "\n";
  if (result.any_flagged()) {
    std::size_t flagged = 0;
    for (const auto& row : result.rows) flagged += row.flags.empty() ? 0 : 1;
    std::cerr << flagged << " flagged row(s)\n";
    return 1;
  }
  return 0;
}

int cmd_summarize(const std::string& results_path, const std::string& out_path) {
  const rcate::BenchmarkResult result = rcate::read_results_csv(results_path);
  const std::vector<rcate::SummaryRow> rows = rcate::summarize(result);
  std::cout << rcate::summary_text(rows);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write summary file: " + out_path);
    out << rcate::summary_csv(rows);
    std::cout << "summary: " << out_path << "\n";
  }
  return 0;
}

int cmd_synth(const std::string& preset, std::size_t n, std::string out_path) {
  const rcate::DGPSpec spec = rcate::dgp_preset(preset);
  const rcate::SyntheticData synthetic = rcate::generate(spec, n);
  const rcate::Dataset& data = synthetic.data;

  if (out_path.empty()) out_path = preset + "_" + std::to_string(n) + ".csv";
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write dataset file: " + out_path);

  for (rcate::Index c = 0; c < data.n_features(); ++c) out << "x" << c << ",";
  out << "w,y,e\n";
  char buf[64];
  for (rcate::Index i = 0; i < data.n_rows(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (rcate::Index c = 0; c < data.n_features(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.10g", data.features(row, static_cast<Eigen::Index>(c)));
      out << buf << ",";
    }
    out << static_cast<int>(data.treatment[row]) << "," << static_cast<int>(data.outcome[row])
        << ",";
    std::snprintf(buf, sizeof(buf), "%.10g", (*data.known_propensity)[row]);
    out << buf << "\n";
  }
  std::cout << "dataset: " << out_path << " (" << data.n_rows() << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ratio-scale uplift benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  int seed_count = 0;
  std::string learners;
  std::string run_out;
  CLI::App* run = app.add_subcommand("run", "run learners x seeds from a JSON config");
  run->add_option("--config", config_path, "run config path")->required();
  run->add_option("--seeds", seed_count, "override seeds with 1..N");
  run->add_option("--learners", learners, "override learner list (comma separated)");
  run->add_option("--out", run_out, "override output directory");

  std::string results_path;
  std::string summary_out;
  CLI::App* summarize = app.add_subcommand("summarize", "summarize a results.csv");
  summarize->add_option("--results", results_path, "results csv path")->required();
  summarize->add_option("--out", summary_out, "write the summary csv here too");

  std::string preset = "low_conversion";
  std::size_t synth_n = 100000;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth", "write a synthetic dataset as csv");
  synth->add_option("--preset", preset, "dgp preset name");
  synth->add_option("--n", synth_n, "row count");
  synth->add_option("--out", synth_out, "output csv path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run)) return cmd_run(config_path, seed_count, learners, run_out);
    if (app.got_subcommand(summarize)) return cmd_summarize(results_path, summary_out);
    if (app.got_subcommand(synth)) return cmd_synth(preset, synth_n, synth_out);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
