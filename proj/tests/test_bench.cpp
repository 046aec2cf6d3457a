#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "rcate/bench.hpp"
#include "rcate/metrics.hpp"

using namespace rcate;

namespace {

std::string tmp_dir(const char* leaf) {
  const auto dir = std::filesystem::temp_directory_path() / "rcate_tests" / leaf;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

const char* kSmallConfig = R"({
  "dataset": {"preset": "constant_tau2", "n": 1500},
  "learners": ["s", "q"],
  "seeds": [1, 2, 3],
  "folds": 3,
  "learner_spec": {"kind": "logistic_glm"},
  "output_dir": "PLACEHOLDER"
})";

RunConfig small_config(const std::string& out_dir) {
  std::string text = kSmallConfig;
  text.replace(text.find("PLACEHOLDER"), 11, out_dir);
  return parse_run_config(text);
}

}  // namespace

TEST_CASE("config parsing fills defaults and expands seed counts") {
  const RunConfig config = parse_run_config(R"({
    "dataset": {"preset": "null_effect", "n": 500},
    "learners": ["s"],
    "seeds": 4,
    "seed_start": 10
  })");
  CHECK(config.name == "null_effect");
  REQUIRE(config.seeds.size() == 4);
  CHECK(config.seeds.front() == 10);
  CHECK(config.seeds.back() == 13);
  CHECK(config.folds == 5);
  CHECK(config.train_fraction == doctest::Approx(0.7));
  CHECK(config.use_known_propensity);
  CHECK(config.base_spec.kind == LearnerKind::gbt);
  CHECK_FALSE(config.final_spec.has_value());
}

TEST_CASE("config parsing rejects malformed input") {
  // Unknown top-level key.
  CHECK_THROWS_AS(parse_run_config(R"({"dataset": {"preset": "null_effect"}, "learners": ["s"],
                                       "seeds": 1, "typo_key": 3})"),
                  std::invalid_argument);
  // Unknown dataset key.
  CHECK_THROWS_AS(parse_run_config(R"({"dataset": {"preset": "null_effect", "rows": 5},
                                       "learners": ["s"], "seeds": 1})"),
                  std::invalid_argument);
  // Unknown learner id.
  CHECK_THROWS_AS(parse_run_config(R"({"dataset": {"preset": "null_effect"},
                                       "learners": ["sq"], "seeds": 1})"),
                  std::invalid_argument);
  // Duplicate seeds.
  CHECK_THROWS_AS(parse_run_config(R"({"dataset": {"preset": "null_effect"},
                                       "learners": ["s"], "seeds": [1, 1]})"),
                  std::invalid_argument);
  // Both dataset sources at once.
  CHECK_THROWS_AS(parse_run_config(R"({"dataset": {"preset": "null_effect", "csv": "a.csv"},
                                       "learners": ["s"], "seeds": 1})"),
                  std::invalid_argument);
  // Neither source.
  CHECK_THROWS_AS(parse_run_config(R"({"dataset": {}, "learners": ["s"], "seeds": 1})"),
                  std::invalid_argument);
  // No learners.
  CHECK_THROWS_AS(parse_run_config(R"({"dataset": {"preset": "null_effect"}, "learners": [],
                                       "seeds": 1})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_run_config("not json at all"), std::invalid_argument);
}

TEST_CASE("the learner roster is closed and stable") {
  const auto& ids = known_learner_ids();
  CHECK(ids.size() == 16);
  CHECK(ids.front() == "s");
  for (const char* id : {"t", "q", "q_simple", "q_offset", "x", "r", "aipw", "dr_s", "dr_q_log",
                         "dr_q_simple_log"}) {
    CHECK(std::find(ids.begin(), ids.end(), id) != ids.end());
  }
}

TEST_CASE("result rows format and parse losslessly") {
  ResultRow row;
  row.dataset = "demo";
  row.learner = "q";
  row.seed = 42;
  row.qini = 0.1234567891;
  row.cal_error = std::nan("");
  row.wall_time_ms = 12.5;
  row.flags = "scoring failed: bad, thing\nnewline";

  const std::string line = result_row_csv(row);
  const std::string csv = results_csv_header() + line;
  const std::string path = tmp_dir("roundtrip") + "/results.csv";
  std::ofstream(path, std::ios::binary) << csv;

  const BenchmarkResult parsed = read_results_csv(path);
  REQUIRE(parsed.rows.size() == 1);
  CHECK(parsed.rows[0].dataset == "demo");
  CHECK(parsed.rows[0].learner == "q");
  CHECK(parsed.rows[0].seed == 42);
  CHECK(parsed.rows[0].qini == doctest::Approx(0.1234567891).epsilon(1e-9));
  CHECK(std::isnan(parsed.rows[0].cal_error));
  // Flag separators are sanitized so the row stays a single record.
  CHECK(parsed.rows[0].flags.find('\n') == std::string::npos);
  CHECK_FALSE(parsed.rows[0].flags.empty());
  CHECK(parsed.any_flagged());
}

TEST_CASE("a small benchmark runs clean and is reproducible") {
  const std::string out1 = tmp_dir("run1");
  const BenchmarkResult result = run_benchmark(small_config(out1));

  REQUIRE(result.rows.size() == 6);
  CHECK_FALSE(result.any_flagged());
  // Seed-major order, learners in config order within a seed.
  CHECK(result.rows[0].learner == "s");
  CHECK(result.rows[0].seed == 1);
  CHECK(result.rows[1].learner == "q");
  CHECK(result.rows[1].seed == 1);
  CHECK(result.rows[4].seed == 3);
  for (const ResultRow& row : result.rows) {
    CHECK(row.dataset == "constant_tau2");
    CHECK(std::isfinite(row.qini));
    CHECK(row.cal_error >= 1.0);
    CHECK(row.wall_time_ms >= 0.0);
  }

  // The file mirrors the returned rows.
  const BenchmarkResult reread = read_results_csv(out1 + "/results.csv");
  REQUIRE(reread.rows.size() == 6);
  CHECK(reread.rows[3].learner == result.rows[3].learner);
  CHECK(reread.rows[3].qini == doctest::Approx(result.rows[3].qini).epsilon(1e-9));

  // A rerun differs only in the wall-time column.
  const std::string out2 = tmp_dir("run2");
  const BenchmarkResult again = run_benchmark(small_config(out2));
  REQUIRE(again.rows.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(again.rows[i].learner == result.rows[i].learner);
    CHECK(again.rows[i].seed == result.rows[i].seed);
    CHECK(again.rows[i].qini == result.rows[i].qini);
    CHECK(again.rows[i].cal_error == result.rows[i].cal_error);
    CHECK(again.rows[i].flags == result.rows[i].flags);
  }

  // Summary artifacts land next to the results.
  CHECK(std::filesystem::exists(out1 + "/summary.csv"));
  CHECK(std::filesystem::exists(out1 + "/summary.txt"));
}

TEST_CASE("learner failures become flagged rows and spare the rest of the run") {
  // q_simple needs a design propensity; a CSV without one flags that learner
  // while s still produces clean rows.
  const std::string dir = tmp_dir("flagged");
  const std::string csv_path = dir + "/data.csv";
  {
    std::ofstream out(csv_path, std::ios::binary);
    out << "x0,x1,w,y\n";
    unsigned state = 123u;
    for (int i = 0; i < 400; ++i) {
      state = state * 1664525u + 1013904223u;
      const double x0 = static_cast<double>(state % 1000) / 1000.0;
      const int w = i % 2;
      const int y = (state >> 10) % 5 == 0 ? 1 : 0;
      out << x0 << "," << (i % 3) << "," << w << "," << y << "\n";
    }
  }

  std::string text = R"({
    "dataset": {"csv": ")" + csv_path + R"("},
    "learners": ["s", "q_simple"],
    "seeds": [7],
    "folds": 2,
    "learner_spec": {"kind": "logistic_glm"},
    "output_dir": ")" + dir + R"("
  })";
  const RunConfig config = parse_run_config(text);
  CHECK(config.name == "data");

  const BenchmarkResult result = run_benchmark(config);
  REQUIRE(result.rows.size() == 2);
  CHECK(result.rows[0].flags.empty());
  CHECK_FALSE(result.rows[1].flags.empty());
  CHECK(result.any_flagged());
  CHECK(std::isnan(result.rows[1].qini));
}

TEST_CASE("summaries aggregate per learner with the s baseline") {
  BenchmarkResult result;
  auto add = [&](const char* learner, std::uint64_t seed, double qini) {
    ResultRow row;
    row.dataset = "demo";
    row.learner = learner;
    row.seed = seed;
    row.qini = qini;
    row.cal_error = 1.1;
    result.rows.push_back(row);
  };
  add("s", 1, 0.10);
  add("s", 2, 0.20);
  add("s", 3, 0.30);
  add("q", 1, 0.20);
  add("q", 2, 0.40);
  add("q", 3, 0.60);

  const auto summary = summarize(result);
  REQUIRE(summary.size() == 2);
  CHECK(summary[0].learner == "s");
  CHECK(summary[0].seeds == 3);
  CHECK(summary[0].mean_qini == doctest::Approx(0.2).epsilon(1e-12));
  // Sample sd 0.1 over three seeds.
  CHECK(summary[0].se_qini == doctest::Approx(0.1 / std::sqrt(3.0)).epsilon(1e-9));
  REQUIRE(summary[0].qini_vs_s.has_value());
  CHECK(*summary[0].qini_vs_s == doctest::Approx(1.0));

  CHECK(summary[1].learner == "q");
  CHECK(summary[1].mean_qini == doctest::Approx(0.4).epsilon(1e-12));
  REQUIRE(summary[1].qini_vs_s.has_value());
  CHECK(*summary[1].qini_vs_s == doctest::Approx(2.0).epsilon(1e-9));
  REQUIRE(summary[1].z_vs_s.has_value());
  // Differences 0.1, 0.2, 0.3 match the paired-test hand fixture.
  const PairedTestResult expected = paired_seed_test(std::vector<double>{0.1, 0.2, 0.3});
  CHECK(*summary[1].z_vs_s == doctest::Approx(expected.z).epsilon(1e-9));
  CHECK(summary[1].significant == expected.significant);

  const std::string text = summary_text(summary);
  CHECK(text.find("demo") != std::string::npos);
  CHECK(text.find("q") != std::string::npos);
  const std::string csv = summary_csv(summary);
  CHECK(csv.find("dataset,learner") == 0);
}

TEST_CASE("flagged and non-finite rows stay out of the aggregates") {
  BenchmarkResult result;
  ResultRow clean;
  clean.dataset = "demo";
  clean.learner = "s";
  clean.seed = 1;
  clean.qini = 0.5;
  clean.cal_error = 1.0;
  result.rows.push_back(clean);
  ResultRow clean2 = clean;
  clean2.seed = 2;
  clean2.qini = 0.7;
  result.rows.push_back(clean2);
  ResultRow flagged = clean;
  flagged.seed = 3;
  flagged.flags = "scoring failed";
  flagged.qini = std::nan("");
  result.rows.push_back(flagged);

  const auto summary = summarize(result);
  REQUIRE(summary.size() == 1);
  CHECK(summary[0].seeds == 2);
  CHECK(summary[0].flagged == 1);
  CHECK(summary[0].mean_qini == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("config datasets resolve through the same loader as the cli") {
  RunConfig config;
  config.source.preset = "discrete8";
  config.source.n = 64;
  config.name = "d8";
  config.learners = {"s"};
  config.seeds = {1};
  const Dataset data = load_config_dataset(config);
  CHECK(data.n_rows() == 64);
  CHECK(data.n_features() == 3);
  REQUIRE(data.known_propensity.has_value());
}
