#include "rcate/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rcate/diff.hpp"
#include "rcate/metrics.hpp"
#include "rcate/nuisance.hpp"
#include "rcate/ratio.hpp"
#include "rcate/synthetic.hpp"

namespace rcate {

namespace {

using nlohmann::json;

// Salt so the fold shuffle is not the same stream as the split shuffle.
constexpr std::uint64_t kFoldSeedSalt = 0x9e3779b97f4a7c15ULL;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string sanitize_flag(const std::string& text) {
  std::string out = text;
  for (char& c : out) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return out;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : j.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw std::invalid_argument("unknown key '" + item.key() + "' in " + where);
    }
  }
}

LearnerSpec spec_from_json(const json& j, LearnerSpec base, const std::string& where) {
  check_keys(j,
             {"kind", "objective", "max_iterations", "tolerance", "l2_penalty", "learning_rate",
              "tree_depth", "tree_count", "min_leaf_count"},
             where);
  if (j.contains("kind")) base.kind = learner_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("objective")) {
    base.objective = gbt_objective_from_string(j.at("objective").get<std::string>());
  }
  if (j.contains("max_iterations")) base.max_iterations = j.at("max_iterations").get<int>();
  if (j.contains("tolerance")) base.tolerance = j.at("tolerance").get<double>();
  if (j.contains("l2_penalty")) base.l2_penalty = j.at("l2_penalty").get<double>();
  if (j.contains("learning_rate")) base.learning_rate = j.at("learning_rate").get<double>();
  if (j.contains("tree_depth")) base.tree_depth = j.at("tree_depth").get<int>();
  if (j.contains("tree_count")) base.tree_count = j.at("tree_count").get<int>();
  if (j.contains("min_leaf_count")) base.min_leaf_count = j.at("min_leaf_count").get<int>();
  return base;
}

ClippingConfig clipping_from_json(const json& j, ClippingConfig base) {
  check_keys(j, {"eps_e", "eps_mu", "eps_m", "eps_p", "eps_tau", "log_cap"}, "clipping");
  if (j.contains("eps_e")) base.eps_e = j.at("eps_e").get<double>();
  if (j.contains("eps_mu")) base.eps_mu = j.at("eps_mu").get<double>();
  if (j.contains("eps_m")) base.eps_m = j.at("eps_m").get<double>();
  if (j.contains("eps_p")) base.eps_p = j.at("eps_p").get<double>();
  if (j.contains("eps_tau")) base.eps_tau = j.at("eps_tau").get<double>();
  if (j.contains("log_cap")) base.log_cap = j.at("log_cap").get<double>();
  return base;
}

// Per-seed nuisance store: each component is cross-fitted at most once and
// shared by every learner that needs it.
class NuisanceCache {
 public:
  NuisanceCache(const Dataset& train, const FoldPlan& folds, const LearnerSpec& spec,
                const ClippingConfig& clip_cfg, bool use_known)
      : train_(train),
        folds_(folds),
        spec_(spec),
        clip_(clip_cfg),
        use_known_(use_known && train.known_propensity.has_value()) {}

  const Vector& e_hat() {
    if (!e_) {
      if (use_known_) {
        Vector e = *train_.known_propensity;
        for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = clip_.clip_e(e[i]);
        e_ = std::move(e);
      } else {
        NuisanceRequest request;
        request.e = true;
        e_ = fit_nuisances(train_, folds_, spec_, clip_, request).e_hat;
      }
    }
    return *e_;
  }

  NuisanceSource e_source() const {
    return use_known_ ? NuisanceSource::known_design : NuisanceSource::cross_fitted;
  }

  const std::pair<Vector, Vector>& mu_t() {
    if (!mu_t_) {
      NuisanceRequest request;
      request.mu = true;
      NuisanceBundle b = fit_nuisances(train_, folds_, spec_, clip_, request);
      mu_t_ = std::make_pair(std::move(b.mu0_hat), std::move(b.mu1_hat));
    }
    return *mu_t_;
  }

  const std::pair<Vector, Vector>& mu_s() {
    if (!mu_s_) mu_s_ = mu_via_s_learner(train_, folds_, spec_, clip_);
    return *mu_s_;
  }

  const Vector& p_hat() {
    if (!p_) {
      NuisanceRequest request;
      request.p = true;
      p_ = fit_nuisances(train_, folds_, spec_, clip_, request).p_hat;
    }
    return *p_;
  }

  const Vector& m_hat() {
    if (!m_) {
      NuisanceRequest request;
      request.m = true;
      m_ = fit_nuisances(train_, folds_, spec_, clip_, request).m_hat;
    }
    return *m_;
  }

  NuisanceBundle bundle_for(DrVariant variant) {
    NuisanceBundle bundle;
    bundle.e_hat = e_hat();
    bundle.e_source = e_source();
    switch (variant) {
      case DrVariant::dr_s: {
        const auto& mu = mu_s();
        bundle.mu0_hat = mu.first;
        bundle.mu1_hat = mu.second;
        bundle.mu_source = NuisanceSource::cross_fitted;
        break;
      }
      case DrVariant::dr_t: {
        const auto& mu = mu_t();
        bundle.mu0_hat = mu.first;
        bundle.mu1_hat = mu.second;
        bundle.mu_source = NuisanceSource::cross_fitted;
        break;
      }
      case DrVariant::dr_q:
        bundle.p_hat = p_hat();
        bundle.p_source = NuisanceSource::cross_fitted;
        bundle.m_hat = m_hat();
        bundle.m_source = NuisanceSource::cross_fitted;
        break;
      case DrVariant::dr_q_simple:
        bundle.p_hat = p_hat();
        bundle.p_source = NuisanceSource::cross_fitted;
        break;
    }
    return bundle;
  }

  NuisanceBundle bundle_for_r() {
    NuisanceBundle bundle;
    bundle.e_hat = e_hat();
    bundle.e_source = e_source();
    bundle.m_hat = m_hat();
    bundle.m_source = NuisanceSource::cross_fitted;
    return bundle;
  }

  NuisanceBundle bundle_for_aipw() {
    NuisanceBundle bundle;
    bundle.e_hat = e_hat();
    bundle.e_source = e_source();
    const auto& mu = mu_t();
    bundle.mu0_hat = mu.first;
    bundle.mu1_hat = mu.second;
    bundle.mu_source = NuisanceSource::cross_fitted;
    return bundle;
  }

 private:
  const Dataset& train_;
  const FoldPlan& folds_;
  const LearnerSpec& spec_;
  const ClippingConfig& clip_;
  bool use_known_;

  std::optional<Vector> e_;
  std::optional<std::pair<Vector, Vector>> mu_t_;
  std::optional<std::pair<Vector, Vector>> mu_s_;
  std::optional<Vector> p_;
  std::optional<Vector> m_;
};

struct DrId {
  DrVariant variant;
  PseudoScale scale;
};

std::optional<DrId> parse_dr_id(const std::string& id) {
  static const std::map<std::string, DrId> table = {
      {"dr_s", {DrVariant::dr_s, PseudoScale::direct}},
      {"dr_s_log", {DrVariant::dr_s, PseudoScale::log}},
      {"dr_t", {DrVariant::dr_t, PseudoScale::direct}},
      {"dr_t_log", {DrVariant::dr_t, PseudoScale::log}},
      {"dr_q", {DrVariant::dr_q, PseudoScale::direct}},
      {"dr_q_log", {DrVariant::dr_q, PseudoScale::log}},
      {"dr_q_simple", {DrVariant::dr_q_simple, PseudoScale::direct}},
      {"dr_q_simple_log", {DrVariant::dr_q_simple, PseudoScale::log}},
  };
  const auto it = table.find(id);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::unique_ptr<TauModel> fit_learner(const std::string& id, const Dataset& train,
                                      NuisanceCache& cache, const RunConfig& config) {
  const LearnerSpec& spec = config.base_spec;
  const ClippingConfig& clip_cfg = config.clipping;
  if (id == "s") return fit_s_learner(train, spec, clip_cfg);
  if (id == "t") return fit_t_learner(train, spec, clip_cfg);
  if (id == "q") return fit_q_learner(train, spec, clip_cfg, false);
  if (id == "q_simple") return fit_q_learner(train, spec, clip_cfg, true);
  if (id == "q_offset") return fit_q_offset_learner(train, LearnerSpec::logistic(), clip_cfg);
  if (id == "x") return as_ratio_model(fit_x_learner(train, spec, clip_cfg));
  if (id == "r") return as_ratio_model(fit_r_learner(train, cache.bundle_for_r(), spec, clip_cfg));
  if (id == "aipw") {
    return as_ratio_model(fit_aipw_learner(train, cache.bundle_for_aipw(), spec, clip_cfg));
  }
  const std::optional<DrId> dr = parse_dr_id(id);
  if (!dr) throw std::invalid_argument("unknown learner id: " + id);
  const LearnerSpec final_spec =
      config.final_spec ? *config.final_spec : default_final_spec(dr->scale);
  return fit_dr_learner_with_bundle(train, cache.bundle_for(dr->variant), final_spec, clip_cfg,
                                    dr->variant, dr->scale);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(current);
  return parts;
}

}  // namespace

void RunConfig::validate() const {
  const bool has_preset = !source.preset.empty();
  const bool has_csv = !source.csv_path.empty();
  if (has_preset == has_csv) {
    throw std::invalid_argument("config must name exactly one of a preset or a csv dataset");
  }
  if (has_preset && source.n < 10) {
    throw std::invalid_argument("synthetic dataset needs at least 10 rows");
  }
  if (name.empty()) throw std::invalid_argument("dataset label is empty");
  if (learners.empty()) throw std::invalid_argument("no learners requested");
  const auto& known = known_learner_ids();
  for (const std::string& id : learners) {
    if (std::find(known.begin(), known.end(), id) == known.end()) {
      throw std::invalid_argument("unknown learner id: " + id);
    }
  }
  if (seeds.empty()) throw std::invalid_argument("no seeds requested");
  std::set<std::uint64_t> distinct(seeds.begin(), seeds.end());
  if (distinct.size() != seeds.size()) throw std::invalid_argument("duplicate seeds");
  if (folds < 2) throw std::invalid_argument("folds must be at least 2");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  }
  base_spec.validate();
  if (final_spec) final_spec->validate();
  clipping.validate();
  if (output_dir.empty()) throw std::invalid_argument("output_dir is empty");
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& ex) {
    throw std::invalid_argument(std::string("config is not valid json: ") + ex.what());
  }
  check_keys(j,
             {"dataset", "name", "learners", "seeds", "seed_start", "folds", "train_fraction",
              "learner_spec", "final_spec", "clipping", "use_known_propensity", "output_dir"},
             "config");

  RunConfig config;
  if (!j.contains("dataset")) throw std::invalid_argument("config has no dataset entry");
  const json& d = j.at("dataset");
  check_keys(d,
             {"preset", "n", "csv", "feature_columns", "treatment_column", "outcome_column",
              "propensity_column"},
             "dataset");
  if (d.contains("preset")) {
    config.source.preset = d.at("preset").get<std::string>();
    config.source.n = d.value("n", static_cast<Index>(100000));
  }
  if (d.contains("csv")) {
    config.source.csv_path = d.at("csv").get<std::string>();
    if (d.contains("feature_columns")) {
      config.source.schema.feature_columns =
          d.at("feature_columns").get<std::vector<std::string>>();
    }
    if (d.contains("treatment_column")) {
      config.source.schema.treatment_column = d.at("treatment_column").get<std::string>();
    }
    if (d.contains("outcome_column")) {
      config.source.schema.outcome_column = d.at("outcome_column").get<std::string>();
    }
    if (d.contains("propensity_column")) {
      config.source.schema.propensity_column = d.at("propensity_column").get<std::string>();
    }
  }

  if (j.contains("name")) {
    config.name = j.at("name").get<std::string>();
  } else if (!config.source.preset.empty()) {
    config.name = config.source.preset;
  } else if (!config.source.csv_path.empty()) {
    config.name = std::filesystem::path(config.source.csv_path).stem().string();
  }

  if (!j.contains("learners")) throw std::invalid_argument("config has no learners entry");
  config.learners = j.at("learners").get<std::vector<std::string>>();

  const std::uint64_t seed_start = j.value("seed_start", static_cast<std::uint64_t>(1));
  if (j.contains("seeds")) {
    const json& s = j.at("seeds");
    if (s.is_array()) {
      config.seeds = s.get<std::vector<std::uint64_t>>();
    } else {
      const auto count = s.get<std::uint64_t>();
      for (std::uint64_t i = 0; i < count; ++i) config.seeds.push_back(seed_start + i);
    }
  } else {
    throw std::invalid_argument("config has no seeds entry");
  }

  config.folds = j.value("folds", 5);
  config.train_fraction = j.value("train_fraction", 0.7);
  if (j.contains("learner_spec")) {
    config.base_spec = spec_from_json(j.at("learner_spec"), config.base_spec, "learner_spec");
  }
  if (j.contains("final_spec")) {
    config.final_spec = spec_from_json(j.at("final_spec"), LearnerSpec{}, "final_spec");
  }
  if (j.contains("clipping")) {
    config.clipping = clipping_from_json(j.at("clipping"), config.clipping);
  }
  config.use_known_propensity = j.value("use_known_propensity", true);
  config.output_dir = j.value("output_dir", std::string("bench_out"));

  config.validate();
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

bool BenchmarkResult::any_flagged() const {
  return std::any_of(rows.begin(), rows.end(),
                     [](const ResultRow& row) { return !row.flags.empty(); });
}

const std::vector<std::string>& known_learner_ids() {
  static const std::vector<std::string> ids = {
      "s",    "t",    "q",    "q_simple", "q_offset",    "x",
      "r",    "aipw", "dr_s", "dr_s_log", "dr_t",        "dr_t_log",
      "dr_q", "dr_q_log",     "dr_q_simple", "dr_q_simple_log",
  };
  return ids;
}

Dataset load_config_dataset(const RunConfig& config) {
  if (!config.source.preset.empty()) {
    DGPSpec spec = dgp_preset(config.source.preset);
    SyntheticData synthetic = generate(spec, config.source.n);
    Dataset data = std::move(synthetic.data);
    data.name = config.name;
    return data;
  }
  LoadedDataset loaded = load_csv(config.source.csv_path, config.source.schema);
  loaded.data.name = config.name;
  return loaded.data;
}

std::string results_csv_header() {
  return "# ratio-uplift bench results v1\n"
         "dataset,learner,seed,qini,cal_error,wall_time_ms,flags\n";
}

std::string result_row_csv(const ResultRow& row) {
  std::string out;
  out += row.dataset;
  out += ',';
  out += row.learner;
  out += ',';
  out += std::to_string(row.seed);
  out += ',';
  out += format_number(row.qini);
  out += ',';
  out += format_number(row.cal_error);
  out += ',';
  out += format_number(row.wall_time_ms);
  out += ',';
  out += sanitize_flag(row.flags);
  out += '\n';
  return out;
}

BenchmarkResult run_benchmark(const RunConfig& config) {
  config.validate();
  const Dataset full = load_config_dataset(config);

  std::filesystem::create_directories(config.output_dir);
  const std::string results_path =
      (std::filesystem::path(config.output_dir) / "results.csv").string();
  std::ofstream out(results_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write results file: " + results_path);
  out << results_csv_header();
  out.flush();

  BenchmarkResult result;
  for (const std::uint64_t seed : config.seeds) {
    const SplitPlan split = make_split(full.n_rows(), seed, config.train_fraction);
    const Dataset train = subset(full, split.train_indices);
    const Dataset test = subset(full, split.test_indices);
    const FoldPlan folds = make_folds(train.n_rows(), config.folds, seed ^ kFoldSeedSalt);
    NuisanceCache cache(train, folds, config.base_spec, config.clipping,
                        config.use_known_propensity);
    const Vector* test_e =
        test.known_propensity.has_value() ? &test.known_propensity.value() : nullptr;

    for (const std::string& id : config.learners) {
      ResultRow row;
      row.dataset = config.name;
      row.learner = id;
      row.seed = seed;
      const auto started = std::chrono::steady_clock::now();
      try {
        const std::unique_ptr<TauModel> model = fit_learner(id, train, cache, config);
        const Vector scores = model->score(test.features, test_e);
        row.qini = qini_ratio_curve(scores, test.treatment, test.outcome).qini;
        row.cal_error =
            calibration_error(scores, test.treatment, test.outcome, config.clipping).cal_error;
      } catch (const std::exception& ex) {
        row.qini = std::numeric_limits<double>::quiet_NaN();
        row.cal_error = std::numeric_limits<double>::quiet_NaN();
        row.flags = sanitize_flag(ex.what());
      }
      const auto elapsed = std::chrono::steady_clock::now() - started;
      row.wall_time_ms =
          std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();
      out << result_row_csv(row);
      out.flush();
      result.rows.push_back(std::move(row));
    }
  }

  const std::vector<SummaryRow> rows = summarize(result);
  std::ofstream scsv((std::filesystem::path(config.output_dir) / "summary.csv").string(),
                     std::ios::binary | std::ios::trunc);
  scsv << summary_csv(rows);
  std::ofstream stxt((std::filesystem::path(config.output_dir) / "summary.txt").string(),
                     std::ios::binary | std::ios::trunc);
  stxt << summary_text(rows);
  return result;
}

BenchmarkResult read_results_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open results file: " + path);
  BenchmarkResult result;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "dataset,learner,seed,qini,cal_error,wall_time_ms,flags") {
        throw std::invalid_argument("unrecognized results header: " + line);
      }
      header_seen = true;
      continue;
    }
    const std::vector<std::string> parts = split_csv_line(line);
    if (parts.size() != 7) {
      throw std::invalid_argument("results row does not have 7 fields: " + line);
    }
    ResultRow row;
    row.dataset = parts[0];
    row.learner = parts[1];
    row.seed = std::stoull(parts[2]);
    row.qini = std::stod(parts[3]);
    row.cal_error = std::stod(parts[4]);
    row.wall_time_ms = std::stod(parts[5]);
    row.flags = parts[6];
    result.rows.push_back(std::move(row));
  }
  if (!header_seen) throw std::invalid_argument("results file has no header row");
  return result;
}

std::vector<SummaryRow> summarize(const BenchmarkResult& result) {
  // Group rows by (dataset, learner) in first-appearance order.
  std::vector<std::pair<std::string, std::string>> groups;
  std::map<std::pair<std::string, std::string>, std::vector<const ResultRow*>> by_group;
  for (const ResultRow& row : result.rows) {
    const auto key = std::make_pair(row.dataset, row.learner);
    auto& bucket = by_group[key];
    if (bucket.empty()) groups.push_back(key);
    bucket.push_back(&row);
  }

  // Clean per-seed qini of the S-Learner baseline, per dataset.
  std::map<std::string, std::map<std::uint64_t, double>> baseline;
  for (const ResultRow& row : result.rows) {
    if (row.learner == "s" && row.flags.empty() && std::isfinite(row.qini)) {
      baseline[row.dataset][row.seed] = row.qini;
    }
  }

  std::vector<SummaryRow> summary;
  for (const auto& key : groups) {
    const auto& rows = by_group[key];
    SummaryRow s;
    s.dataset = key.first;
    s.learner = key.second;

    std::vector<const ResultRow*> clean;
    for (const ResultRow* row : rows) {
      if (row->flags.empty() && std::isfinite(row->qini)) {
        clean.push_back(row);
      } else {
        ++s.flagged;
      }
    }
    s.seeds = clean.size();
    if (!clean.empty()) {
      double qini_sum = 0.0;
      double cal_sum = 0.0;
      for (const ResultRow* row : clean) {
        qini_sum += row->qini;
        cal_sum += row->cal_error;
      }
      s.mean_qini = qini_sum / static_cast<double>(clean.size());
      s.mean_cal_error = cal_sum / static_cast<double>(clean.size());
      if (clean.size() > 1) {
        double ss = 0.0;
        for (const ResultRow* row : clean) {
          ss += (row->qini - s.mean_qini) * (row->qini - s.mean_qini);
        }
        s.se_qini = std::sqrt(ss / static_cast<double>(clean.size() - 1)) /
                    std::sqrt(static_cast<double>(clean.size()));
      }
    }

    const auto base_it = baseline.find(s.dataset);
    if (base_it != baseline.end() && !clean.empty()) {
      if (s.learner == "s") {
        s.qini_vs_s = 1.0;
        s.qini_negative = s.mean_qini < 0.0;
      } else {
        double base_sum = 0.0;
        for (const auto& kv : base_it->second) base_sum += kv.second;
        const double base_mean = base_sum / static_cast<double>(base_it->second.size());
        if (base_mean != 0.0) {
          const QiniRatioResult r = qini_ratio_to_baseline(s.mean_qini, base_mean);
          s.qini_vs_s = r.ratio;
          s.qini_negative = r.qini_negative;
        }
        std::vector<double> diffs;
        for (const ResultRow* row : clean) {
          const auto seed_it = base_it->second.find(row->seed);
          if (seed_it != base_it->second.end()) diffs.push_back(row->qini - seed_it->second);
        }
        if (diffs.size() >= 2) {
          const PairedTestResult test = paired_seed_test(diffs);
          s.degenerate = test.degenerate;
          if (!test.degenerate) {
            s.z_vs_s = test.z;
            s.significant = test.significant;
          }
        }
      }
    }
    summary.push_back(std::move(s));
  }
  return summary;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out =
      "dataset,learner,seeds,flagged,mean_qini,se_qini,mean_cal_error,qini_vs_s,qini_negative,"
      "z_vs_s,significant\n";
  for (const SummaryRow& row : rows) {
    out += row.dataset;
    out += ',';
    out += row.learner;
    out += ',';
    out += std::to_string(row.seeds);
    out += ',';
    out += std::to_string(row.flagged);
    out += ',';
    out += format_number(row.mean_qini);
    out += ',';
    out += format_number(row.se_qini);
    out += ',';
    out += format_number(row.mean_cal_error);
    out += ',';
    if (row.qini_vs_s) out += format_number(*row.qini_vs_s);
    out += ',';
    out += row.qini_negative ? "1" : "0";
    out += ',';
    if (row.z_vs_s) out += format_number(*row.z_vs_s);
    out += ',';
    if (row.z_vs_s) out += row.significant ? "1" : "0";
    out += '\n';
  }
  return out;
}

std::string summary_text(const std::vector<SummaryRow>& rows) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof(buf), "%-18s %-16s %5s %9s %9s %8s %8s %8s %4s\n", "dataset",
                "learner", "seeds", "qini", "se", "cal", "R_vs_s", "z_vs_s", "sig");
  out += buf;
  for (const SummaryRow& row : rows) {
    std::string r_text = "-";
    if (row.qini_vs_s) {
      std::snprintf(buf, sizeof(buf), "%.3f%s", *row.qini_vs_s, row.qini_negative ? "!" : "");
      r_text = buf;
    }
    std::string z_text = row.degenerate ? "degen" : "-";
    if (row.z_vs_s) {
      std::snprintf(buf, sizeof(buf), "%.3f", *row.z_vs_s);
      z_text = buf;
    }
    const char* star = (row.z_vs_s && row.significant) ? "*" : "";
    std::snprintf(buf, sizeof(buf), "%-18s %-16s %5zu %9.4f %9.4f %8.4f %8s %8s %4s\n",
                  row.dataset.c_str(), row.learner.c_str(), row.seeds, row.mean_qini, row.se_qini,
                  row.mean_cal_error, r_text.c_str(), z_text.c_str(), star);
    out += buf;
  }
  return out;
}

}  // namespace rcate
