// Copyright 2026 The ptsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// ptsim command-line tool: simulate proximity datasets, ingest observation
// logs, evaluate classifiers, run the three ablations, and run outbreak
// drills. Tables go to stdout or --out; status and warnings go to stderr.
// Every artifact embeds its resolved configuration, config hash, and seed,
// and identical inputs always reproduce byte-identical outputs.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ptsim/classifiers.hpp"
#include "ptsim/csv.hpp"
#include "ptsim/metrics.hpp"
#include "ptsim/scenario.hpp"
#include "ptsim/sim.hpp"

namespace {

using namespace ptsim;

std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<ClassifierKind> parse_classifiers(const std::string& csv) {
  std::vector<ClassifierKind> kinds;
  for (const std::string& name : split_list(csv)) {
    ClassifierKind kind = classifier_kind_from_name(name);
    for (ClassifierKind seen : kinds) {
      if (seen == kind) {
        throw std::invalid_argument("classifier '" + name + "' listed twice");
      }
    }
    kinds.push_back(kind);
  }
  return kinds;
}

std::vector<size_t> parse_feature_order(const std::string& csv) {
  std::vector<size_t> order;
  for (const std::string& item : split_list(csv)) {
    size_t idx = 0;
    try {
      idx = std::stoul(item);
    } catch (const std::exception&) {
      throw std::invalid_argument("feature index '" + item +
                                  "' is not a number");
    }
    if (idx >= kFeatureCount) {
      throw std::invalid_argument("feature index " + std::to_string(idx) +
                                  " is out of range (0.." +
                                  std::to_string(kFeatureCount - 1) + ")");
    }
    for (size_t seen : order) {
      if (seen == idx) {
        throw std::invalid_argument("feature index " + std::to_string(idx) +
                                    " listed twice");
      }
    }
    order.push_back(idx);
  }
  if (order.empty()) throw std::invalid_argument("feature order is empty");
  return order;
}

ColumnMapping parse_mapping(const std::vector<std::string>& entries) {
  ColumnMapping mapping;
  for (const std::string& entry : entries) {
    auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("column mapping '" + entry +
                                  "' must look like canonical=actual");
    }
    std::string canonical = entry.substr(0, eq);
    std::string actual = entry.substr(eq + 1);
    if (canonical == "distance_m") mapping.distance_m = actual;
    else if (canonical == "device_name") mapping.device_name = actual;
    else if (canonical == "mac") mapping.mac = actual;
    else if (canonical == "payload_hex") mapping.payload_hex = actual;
    else if (canonical == "rss_dbm") mapping.rss_dbm = actual;
    else if (canonical == "elapsed_ms") mapping.elapsed_ms = actual;
    else if (canonical == "timestamp_ms") mapping.timestamp_ms = actual;
    else {
      throw std::invalid_argument("unknown canonical column '" + canonical +
                                  "'");
    }
  }
  mapping.validate();
  return mapping;
}

// Group a raw observation list into per-device streams and window each
// stream separately; groups are visited in name order so output rows are
// stable.
std::vector<FeatureVector> features_from_observations(
    const std::vector<Observation>& observations, const WindowingPolicy& w,
    const RiskPolicy& risk) {
  std::vector<FeatureVector> rows;
  for (const auto& [device, samples] : group_by_device(observations)) {
    std::vector<FeatureVector> part = extract_features(samples, w, risk);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

MetricsReport evaluate_kind(ClassifierKind kind,
                            const std::vector<FeatureVector>& rows,
                            const std::vector<size_t>& columns,
                            const EvalPolicy& policy) {
  auto fit_predict = [&](const std::vector<FeatureVector>& train,
                         const std::vector<FeatureVector>& test) {
    auto model = make_classifier(kind);
    model->train(make_dataset(train, columns));
    return model->predict(make_dataset(test, columns));
  };
  return evaluate_repeated(rows, fit_predict, policy);
}

void append_metric_rows(std::ostringstream& os, const std::string& name,
                        const MetricsReport& r) {
  auto row = [&](const char* metric, const MetricSummary& s) {
    os << name << ',' << metric << ',' << format_double(s.mean) << ','
       << format_double(s.ci_lo) << ',' << format_double(s.ci_hi) << '\n';
  };
  row("accuracy", r.accuracy);
  row("precision", r.precision);
  row("recall", r.recall);
  row("f1", r.f1);
}

// Empty path means stdout.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    write_text_file(out_path, text);
    std::fprintf(stderr, "wrote %s\n", out_path.c_str());
  }
}

void print_warnings(const IngestResult& ingest) {
  for (const std::string& w : ingest.warnings) {
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  }
}

struct WindowingFlags {
  WindowingPolicy policy;
  double close_threshold_m = 2.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--window-ms", policy.window_ms,
                    "Feature window length in ms")
        ->capture_default_str();
    cmd->add_option("--stride-ms", policy.stride_ms,
                    "Window stride in ms (defaults to the window length)");
    cmd->add_option("--min-samples", policy.min_samples,
                    "Minimum packets for a window to count")
        ->capture_default_str();
    cmd->add_option("--smooth-window", policy.smooth_window,
                    "Moving-average prefilter width in packets; 0 or 1 "
                    "disables it, 5 is a typical choice")
        ->capture_default_str();
    cmd->add_option("--threshold-m", close_threshold_m,
                    "Close-contact distance threshold in meters")
        ->capture_default_str();
  }

  void finalize(CLI::App* cmd) {
    if (!cmd->count("--stride-ms")) policy.stride_ms = policy.window_ms;
    policy.validate();
    RiskPolicy{close_threshold_m}.validate();
  }

  RiskPolicy risk() const { return RiskPolicy{close_threshold_m}; }

  std::vector<std::string> comments() const {
    return {"window_ms: " + std::to_string(policy.window_ms),
            "stride_ms: " + std::to_string(policy.stride_ms),
            "min_samples: " + std::to_string(policy.min_samples),
            "smooth_window: " + std::to_string(policy.smooth_window),
            "close_threshold_m: " + format_double(close_threshold_m)};
  }
};

struct EvalFlags {
  std::string classifiers = "dt,lda,nb,knn";
  size_t reps = 100;
  double train_fraction = 0.8;
  uint64_t seed = 1;

  void attach(CLI::App* cmd, size_t default_reps) {
    reps = default_reps;
    cmd->add_option("--classifiers", classifiers,
                    "Comma-separated subset of dt,lda,nb,knn")
        ->capture_default_str();
    cmd->add_option("--reps", reps, "Evaluation repetitions")
        ->capture_default_str();
    cmd->add_option("--train-frac", train_fraction,
                    "Fraction of rows used for training per repetition")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "Master random seed")
        ->capture_default_str();
  }

  EvalPolicy policy() const {
    EvalPolicy p;
    p.reps = reps;
    p.train_fraction = train_fraction;
    p.seed = seed;
    p.validate();
    return p;
  }

  std::vector<std::string> comments() const {
    return {"classifiers: " + classifiers,
            "reps: " + std::to_string(reps),
            "train_fraction: " + format_double(train_fraction),
            "seed: " + std::to_string(seed)};
  }
};

std::vector<Observation> flatten_observations(
    const std::vector<StepObservations>& groups) {
  std::vector<Observation> rows;
  for (const StepObservations& obs : groups) {
    for (size_t i = 0; i < obs.samples.size(); ++i) {
      Observation o;
      o.distance_m = obs.samples[i].true_distance_m;
      o.device_name = obs.receiver_id;
      o.mac = obs.sender_id;
      if (i < obs.payloads.size()) o.payload_hex = to_hex(obs.payloads[i]);
      o.rss_dbm = obs.samples[i].rss_dbm;
      o.elapsed_ms = obs.samples[i].timestamp_ms - obs.step_start_ms;
      o.timestamp_ms = obs.samples[i].timestamp_ms;
      rows.push_back(std::move(o));
    }
  }
  return rows;
}

void write_dataset_pair(const std::string& out_dir, const std::string& stem,
                        const std::vector<std::string>& comments,
                        const std::vector<FeatureVector>& features,
                        const std::vector<StepObservations>& groups,
                        size_t positive_rows, size_t negative_rows) {
  std::ostringstream feature_text;
  write_feature_csv(feature_text, comments, features);
  std::string feature_path = out_dir + "/" + stem + "_features.csv";
  write_text_file(feature_path, feature_text.str());

  std::vector<Observation> rows = flatten_observations(groups);
  std::ostringstream obs_text;
  write_observations_csv(obs_text, comments, rows);
  std::string obs_path = out_dir + "/" + stem + "_observations.csv";
  write_text_file(obs_path, obs_text.str());

  std::fprintf(stderr, "%s: %zu windows (%zu close, %zu far) -> %s\n",
               stem.c_str(), features.size(), positive_rows, negative_rows,
               feature_path.c_str());
  std::fprintf(stderr, "%s: %zu packets -> %s\n", stem.c_str(), rows.size(),
               obs_path.c_str());
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 uint64_t seed, bool seed_given, WindowingFlags& windows) {
  Scenario scenario = scenario_path.empty() ? make_default_replication(seed)
                                            : load_scenario(scenario_path);
  if (seed_given) {
    scenario.seed = seed;
    scenario.channel.rng_seed = seed;
  }
  for (const std::string& w : scenario.warnings()) {
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  }

  std::filesystem::create_directories(out_dir);
  std::vector<std::string> comments = {"command: simulate",
                                       "scenario: " + scenario.name};

  if (scenario.mode == ScenarioMode::Replication) {
    ReplicationResult result =
        run_replication(scenario, windows.policy, windows.risk());
    comments.push_back("config_hash: " + hash_hex(result.config_hash));
    comments.push_back("seed: " + std::to_string(result.seed));
    for (const GeometryDataset* dataset : {&result.direct, &result.crosswise}) {
      std::vector<std::string> geo_comments = comments;
      std::string geometry = geometry_name(dataset->geometry);
      geo_comments.push_back("geometry: " + geometry);
      for (const std::string& c : windows.comments()) geo_comments.push_back(c);
      write_dataset_pair(out_dir, geometry, geo_comments, dataset->features,
                         dataset->observations, dataset->positive_rows,
                         dataset->negative_rows);
    }
  } else {
    FreeformResult result =
        run_freeform(scenario, windows.policy, windows.risk());
    comments.push_back("config_hash: " + hash_hex(result.config_hash));
    comments.push_back("seed: " + std::to_string(result.seed));
    for (const std::string& c : windows.comments()) comments.push_back(c);
    write_dataset_pair(out_dir, "freeform", comments, result.features,
                       result.observations, result.positive_rows,
                       result.negative_rows);
  }
  return 0;
}

int cmd_evaluate(const std::string& data_path, const EvalFlags& eval,
                 const std::string& out_path) {
  std::string raw = read_text_file(data_path);
  std::istringstream in(raw);
  std::vector<FeatureVector> rows = read_feature_csv(in);

  std::vector<std::string> comments = {
      "command: evaluate", "input: " + data_path,
      "input_hash: " + hash_hex(fnv1a64(raw))};
  for (const std::string& c : eval.comments()) comments.push_back(c);

  std::ostringstream os;
  for (const std::string& c : comments) os << "# " << c << "\n";
  os << "classifier,metric,mean,ci_lo,ci_hi\n";
  for (ClassifierKind kind : parse_classifiers(eval.classifiers)) {
    MetricsReport report =
        evaluate_kind(kind, rows, all_feature_columns(), eval.policy());
    append_metric_rows(os, classifier_kind_name(kind), report);
  }
  emit(out_path, os.str());
  return 0;
}

int cmd_ablate_features(const std::string& data_path, const EvalFlags& eval,
                        const std::string& order_csv,
                        const std::string& out_path) {
  std::string raw = read_text_file(data_path);
  std::istringstream in(raw);
  std::vector<FeatureVector> rows = read_feature_csv(in);
  std::vector<size_t> order = parse_feature_order(order_csv);

  std::ostringstream os;
  os << "# command: ablate-features\n";
  os << "# input: " << data_path << "\n";
  os << "# input_hash: " << hash_hex(fnv1a64(raw)) << "\n";
  os << "# feature_order: " << order_csv << "\n";
  for (const std::string& c : eval.comments()) os << "# " << c << "\n";
  os << "classifier,n_features,features,accuracy,ci_lo,ci_hi\n";

  for (ClassifierKind kind : parse_classifiers(eval.classifiers)) {
    for (size_t count = 1; count <= order.size(); ++count) {
      std::vector<size_t> columns(order.begin(), order.begin() + count);
      MetricsReport report = evaluate_kind(kind, rows, columns, eval.policy());
      std::string names;
      for (size_t c : columns) {
        if (!names.empty()) names.push_back('+');
        names += kFeatureNames[c];
      }
      os << classifier_kind_name(kind) << ',' << count << ',' << names << ','
         << format_double(report.accuracy.mean) << ','
         << format_double(report.accuracy.ci_lo) << ','
         << format_double(report.accuracy.ci_hi) << '\n';
    }
  }
  emit(out_path, os.str());
  return 0;
}

int cmd_ablate_samples(const std::string& data_path, const EvalFlags& eval,
                       WindowingFlags& windows, const std::string& caps_csv,
                       const ColumnMapping& mapping,
                       const std::string& out_path) {
  std::vector<size_t> caps;
  for (const std::string& item : split_list(caps_csv)) {
    long long v = 0;
    try {
      v = std::stoll(item);
    } catch (const std::exception&) {
      throw std::invalid_argument("cap '" + item + "' is not a number");
    }
    if (v <= 0) throw std::invalid_argument("caps must be positive");
    if (!caps.empty() && size_t(v) <= caps.back()) {
      throw std::invalid_argument("caps must be strictly ascending");
    }
    caps.push_back(size_t(v));
  }

  std::string raw = read_text_file(data_path);
  std::istringstream in(raw);
  IngestResult ingest = ingest_observations(in, mapping);
  print_warnings(ingest);

  std::ostringstream os;
  os << "# command: ablate-samples\n";
  os << "# input: " << data_path << "\n";
  os << "# input_hash: " << hash_hex(fnv1a64(raw)) << "\n";
  os << "# caps: " << caps_csv << "\n";
  os << "# skipped_rows: " << ingest.skipped_rows << "\n";
  for (const std::string& c : windows.comments()) os << "# " << c << "\n";
  for (const std::string& c : eval.comments()) os << "# " << c << "\n";
  os << "classifier,cap,accuracy,ci_lo,ci_hi\n";

  std::vector<ClassifierKind> kinds = parse_classifiers(eval.classifiers);
  for (size_t cap : caps) {
    WindowingPolicy capped = windows.policy;
    capped.max_samples_per_window = cap;
    std::vector<FeatureVector> rows =
        features_from_observations(ingest.observations, capped, windows.risk());
    for (ClassifierKind kind : kinds) {
      MetricsReport report =
          evaluate_kind(kind, rows, all_feature_columns(), eval.policy());
      os << classifier_kind_name(kind) << ',' << cap << ','
         << format_double(report.accuracy.mean) << ','
         << format_double(report.accuracy.ci_lo) << ','
         << format_double(report.accuracy.ci_hi) << '\n';
    }
  }
  emit(out_path, os.str());
  return 0;
}

int cmd_ablate_threshold(const std::string& data_path, const EvalFlags& eval,
                         WindowingFlags& windows,
                         const std::string& thresholds_csv,
                         const ColumnMapping& mapping,
                         const std::string& out_path) {
  std::vector<double> thresholds;
  for (const std::string& item : split_list(thresholds_csv)) {
    double v = 0.0;
    if (!detail::parse_double(item, v) || v <= 0.0) {
      throw std::invalid_argument("threshold '" + item +
                                  "' is not a positive number");
    }
    thresholds.push_back(v);
  }

  std::string raw = read_text_file(data_path);
  std::istringstream in(raw);
  IngestResult ingest = ingest_observations(in, mapping);
  print_warnings(ingest);

  std::ostringstream os;
  os << "# command: ablate-threshold\n";
  os << "# input: " << data_path << "\n";
  os << "# input_hash: " << hash_hex(fnv1a64(raw)) << "\n";
  os << "# thresholds_m: " << thresholds_csv << "\n";
  os << "# skipped_rows: " << ingest.skipped_rows << "\n";
  for (const std::string& c : windows.comments()) os << "# " << c << "\n";
  for (const std::string& c : eval.comments()) os << "# " << c << "\n";
  os << "classifier,threshold_m,accuracy,ci_lo,ci_hi\n";

  std::vector<ClassifierKind> kinds = parse_classifiers(eval.classifiers);
  for (double threshold : thresholds) {
    std::vector<FeatureVector> rows = features_from_observations(
        ingest.observations, windows.policy, RiskPolicy{threshold});
    size_t pos = 0, neg = 0;
    for (const FeatureVector& f : rows) (f.label == 1 ? pos : neg)++;
    if (pos == 0 || neg == 0) {
      throw degenerate_data_error(
          "threshold " + format_double(threshold) +
          " m labels every window the same way; evaluation is impossible");
    }
    for (ClassifierKind kind : kinds) {
      MetricsReport report =
          evaluate_kind(kind, rows, all_feature_columns(), eval.policy());
      os << classifier_kind_name(kind) << ',' << format_double(threshold)
         << ',' << format_double(report.accuracy.mean) << ','
         << format_double(report.accuracy.ci_lo) << ','
         << format_double(report.accuracy.ci_hi) << '\n';
    }
  }
  emit(out_path, os.str());
  return 0;
}

int cmd_drill(const std::string& scenario_path, const std::string& infected,
              const std::string& out_path) {
  Scenario scenario = load_scenario(scenario_path);
  DrillReport report = run_outbreak_drill(scenario, infected);

  std::ostringstream os;
  os << "# command: drill\n";
  os << "# scenario: " << scenario.name << "\n";
  os << "# config_hash: " << hash_hex(report.config_hash) << "\n";
  os << "# seed: " << report.seed << "\n";
  os << "# infected: " << report.infected_id << "\n";
  os << "device_id,matched_signatures,matched_samples,first_seen_ms,"
        "last_seen_ms\n";
  for (const DrillMatch& agent : report.agents) {
    size_t samples = 0;
    int64_t first = 0, last = 0;
    for (const ExposureMatch& m : agent.matches) {
      samples += m.sample_count;
      last = std::max(last, m.last_seen_ms);
    }
    os << agent.device_id << ',' << agent.matches.size() << ',' << samples
       << ',';
    if (!agent.matches.empty()) {
      first = agent.matches.front().first_seen_ms;
      os << first << ',' << last << '\n';
    } else {
      os << ",\n";
    }
  }
  emit(out_path, os.str());
  return 0;
}

int cmd_ingest(const std::string& data_path, WindowingFlags& windows,
               const ColumnMapping& mapping, const std::string& out_path) {
  std::string raw = read_text_file(data_path);
  std::istringstream in(raw);
  IngestResult ingest = ingest_observations(in, mapping);
  print_warnings(ingest);

  std::vector<FeatureVector> rows =
      features_from_observations(ingest.observations, windows.policy,
                                 windows.risk());

  std::vector<std::string> comments = {
      "command: ingest", "input: " + data_path,
      "input_hash: " + hash_hex(fnv1a64(raw)),
      "rows_read: " + std::to_string(ingest.observations.size()),
      "skipped_rows: " + std::to_string(ingest.skipped_rows)};
  for (const std::string& c : windows.comments()) comments.push_back(c);

  std::ostringstream os;
  write_feature_csv(os, comments, rows);
  emit(out_path, os.str());
  std::fprintf(stderr, "%zu observations -> %zu windows (%zu skipped rows)\n",
               ingest.observations.size(), rows.size(), ingest.skipped_rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Proximity-tracing simulator and classifier workbench: generates "
      "BLE-style proximity datasets, extracts windowed features, and "
      "evaluates close-contact classifiers."};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "Run the stepped-distance study and write datasets");
  std::string sim_scenario, sim_out = "out";
  uint64_t sim_seed = 1;
  simulate->add_option("--scenario", sim_scenario,
                       "Scenario JSON (omit for the built-in default study)");
  simulate->add_option("--out", sim_out, "Output directory")
      ->capture_default_str();
  simulate->add_option("--seed", sim_seed,
                       "Master seed (overrides the scenario's seed)");
  WindowingFlags sim_windows;
  sim_windows.attach(simulate);

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "Train and score classifiers on a feature table");
  std::string eval_data, eval_out;
  evaluate->add_option("--data", eval_data, "Feature CSV")->required();
  evaluate->add_option("--out", eval_out, "Output CSV (default stdout)");
  EvalFlags eval_flags;
  eval_flags.attach(evaluate, 100);

  // ablate-features
  auto* ablate_features = app.add_subcommand(
      "ablate-features", "Accuracy as the feature set grows");
  std::string af_data, af_out, af_order = "1,0,2,3,4";
  ablate_features->add_option("--data", af_data, "Feature CSV")->required();
  ablate_features->add_option("--out", af_out, "Output CSV (default stdout)");
  ablate_features
      ->add_option("--order", af_order,
                   "Feature column indices, best first (0=n_samples, "
                   "1=mean_rss, 2=max_rss, 3=min_rss, 4=rss_range)")
      ->capture_default_str();
  EvalFlags af_flags;
  af_flags.attach(ablate_features, 50);

  // ablate-samples
  auto* ablate_samples = app.add_subcommand(
      "ablate-samples", "Accuracy as the per-window packet cap grows");
  std::string as_data, as_out, as_caps = "5,25,50,100,200";
  std::vector<std::string> as_map;
  ablate_samples->add_option("--data", as_data, "Raw observation CSV")
      ->required();
  ablate_samples->add_option("--out", as_out, "Output CSV (default stdout)");
  ablate_samples
      ->add_option("--caps", as_caps,
                   "Strictly ascending per-window sample caps")
      ->capture_default_str();
  ablate_samples
      ->add_option("--map", as_map,
                   "Column mapping canonical=actual (comma-separated or "
                   "repeatable)")
      ->delimiter(',');
  WindowingFlags as_windows;
  as_windows.attach(ablate_samples);
  EvalFlags as_flags;
  as_flags.attach(ablate_samples, 50);

  // ablate-threshold
  auto* ablate_threshold = app.add_subcommand(
      "ablate-threshold", "Accuracy across close-contact thresholds");
  std::string at_data, at_out, at_thresholds = "1,1.25,1.5,1.75,2";
  std::vector<std::string> at_map;
  ablate_threshold->add_option("--data", at_data, "Raw observation CSV")
      ->required();
  ablate_threshold->add_option("--out", at_out, "Output CSV (default stdout)");
  ablate_threshold
      ->add_option("--thresholds", at_thresholds,
                   "Close-contact thresholds in meters")
      ->capture_default_str();
  ablate_threshold
      ->add_option("--map", at_map,
                   "Column mapping canonical=actual (comma-separated or "
                   "repeatable)")
      ->delimiter(',');
  WindowingFlags at_windows;
  at_windows.attach(ablate_threshold);
  EvalFlags at_flags;
  at_flags.attach(ablate_threshold, 50);

  // drill
  auto* drill = app.add_subcommand(
      "drill", "Outbreak drill: publish one agent's signatures, match the rest");
  std::string drill_scenario, drill_infected, drill_out;
  drill->add_option("--scenario", drill_scenario, "Freeform scenario JSON")
      ->required();
  drill->add_option("--infected", drill_infected, "Agent id to mark infected")
      ->required();
  drill->add_option("--out", drill_out, "Output CSV (default stdout)");

  // ingest
  auto* ingest = app.add_subcommand(
      "ingest", "Convert a raw observation CSV into a feature table");
  std::string in_data, in_out;
  std::vector<std::string> in_map;
  ingest->add_option("--data", in_data, "Raw observation CSV")->required();
  ingest->add_option("--out", in_out, "Feature CSV (default stdout)");
  ingest
      ->add_option("--map", in_map,
                   "Column mapping canonical=actual (comma-separated or "
                   "repeatable)")
      ->delimiter(',');
  WindowingFlags in_windows;
  in_windows.attach(ingest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*simulate) {
      sim_windows.finalize(simulate);
      return cmd_simulate(sim_scenario, sim_out, sim_seed,
                          simulate->count("--seed") > 0, sim_windows);
    }
    if (*evaluate) {
      return cmd_evaluate(eval_data, eval_flags, eval_out);
    }
    if (*ablate_features) {
      return cmd_ablate_features(af_data, af_flags, af_order, af_out);
    }
    if (*ablate_samples) {
      as_windows.finalize(ablate_samples);
      return cmd_ablate_samples(as_data, as_flags, as_windows, as_caps,
                                parse_mapping(as_map), as_out);
    }
    if (*ablate_threshold) {
      at_windows.finalize(ablate_threshold);
      return cmd_ablate_threshold(at_data, at_flags, at_windows,
                                  at_thresholds, parse_mapping(at_map),
                                  at_out);
    }
    if (*drill) {
      return cmd_drill(drill_scenario, drill_infected, drill_out);
    }
    if (*ingest) {
      in_windows.finalize(ingest);
      return cmd_ingest(in_data, in_windows, parse_mapping(in_map), in_out);
    }
  } catch (const format_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const degenerate_data_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
