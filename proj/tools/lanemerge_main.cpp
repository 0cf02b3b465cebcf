#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lanemerge/crossval.hpp"
#include "lanemerge/dataset.hpp"
#include "lanemerge/labeler.hpp"
#include "lanemerge/metrics.hpp"
#include "lanemerge/model.hpp"
#include "lanemerge/model_io.hpp"
#include "lanemerge/replay.hpp"
#include "lanemerge/scenario.hpp"
#include "lanemerge/server.hpp"
#include "lanemerge/service_config.hpp"
#include "lanemerge/synth.hpp"
#include "lanemerge/trajectory.hpp"
#include "lanemerge/window_io.hpp"

namespace {

using namespace lanemerge;

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

void require_readable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read input file: " + path);
}

ml::LabelColumn label_column_from(const std::string& name) {
  if (name == "merge") return ml::LabelColumn::merge;
  if (name == "accel") return ml::LabelColumn::accel;
  if (name == "heading") return ml::LabelColumn::heading;
  throw std::runtime_error("unknown label column: " + name + " (expected merge, accel or heading)");
}

ml::Task task_for_column(ml::LabelColumn column) {
  return column == ml::LabelColumn::merge ? ml::Task::classification : ml::Task::regression;
}

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon + 1 >= text.size()) {
    throw std::runtime_error("endpoint must look like host:port, got: " + text);
  }
  Endpoint ep;
  ep.host = text.substr(0, colon);
  const long port = std::stol(text.substr(colon + 1));
  if (port <= 0 || port > 65535) throw std::runtime_error("endpoint port out of range: " + text);
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

std::string format_pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", fraction * 100.0);
  return buf;
}

// ---------------------------------------------------------------------------
// extract

int cmd_extract(const std::vector<std::string>& inputs, const std::string& output, bool dry_run) {
  for (const auto& path : inputs) require_readable(path);

  std::vector<traj::ScenarioWindow> all_windows;
  for (const auto& path : inputs) {
    const auto tracks = traj::parse_trajectory_file(path, traj::TrajectoryFormat::ngsim);
    std::size_t events = 0;
    std::size_t kept = 0;
    std::map<std::string, std::size_t> skipped;
    for (const auto& track : tracks) {
      for (const auto& event : traj::detect_lane_changes(track)) {
        ++events;
        auto result = traj::extract_window(track, event);
        if (auto* skip = std::get_if<traj::WindowSkip>(&result)) {
          ++skipped[traj::to_string(*skip)];
          continue;
        }
        ++kept;
        all_windows.push_back(
            traj::assign_neighbors(tracks, std::move(std::get<traj::ScenarioWindow>(result))));
      }
    }
    std::cout << path << ": " << tracks.size() << " vehicles, " << events << " lane changes, "
              << kept << " windows kept";
    for (const auto& [reason, count] : skipped) std::cout << ", " << count << " " << reason;
    std::cout << "\n";
  }

  std::cout << "total windows: " << all_windows.size() << "\n";
  if (dry_run) {
    std::cout << "dry run, nothing written\n";
    return 0;
  }
  traj::write_windows_file(output, all_windows);
  std::cout << "wrote " << output << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// label

int cmd_label(const std::string& input, const std::string& output, double clearance_factor) {
  require_readable(input);
  const auto windows = traj::read_windows_file(input);
  if (windows.empty()) std::cerr << "warning: no windows in " << input << ", dataset is empty\n";

  labeler::LabelerConfig config;
  config.clearance_factor = clearance_factor;
  const auto rows = labeler::build_dataset(windows, config);

  std::size_t positives = 0;
  for (const auto& row : rows) positives += row.merge ? 1 : 0;
  labeler::write_dataset_csv_file(output, rows);

  std::cout << windows.size() << " windows -> " << rows.size() << " samples\n";
  if (!rows.empty()) {
    std::cout << "merge labels: " << positives << " true ("
              << format_pct(static_cast<double>(positives) / rows.size()) << "%), "
              << rows.size() - positives << " false\n";
  }
  std::cout << "wrote " << output << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train / evaluate / sweep

struct TrainFlags {
  std::string input;
  std::string label = "merge";
  std::string algorithm = "random-forest";
  std::string model_out;
  std::string metrics_out;
  int max_depth = -1;
  int estimators = -1;
  int k = -1;
  double learning_rate = -1.0;
  double tolerance = 1.0;
  int cv_folds = 0;
  std::uint64_t seed = 42;
};

ml::ModelSpec spec_from(const TrainFlags& flags, ml::Algorithm algorithm, ml::LabelColumn column) {
  ml::ModelSpec spec;
  spec.algorithm = algorithm;
  spec.task = task_for_column(column);
  spec.hp.max_depth = flags.max_depth;
  spec.hp.n_estimators = flags.estimators;
  spec.hp.k_neighbors = flags.k;
  spec.hp.learning_rate = flags.learning_rate;
  spec.hp.seed = flags.seed;
  spec.tolerance = flags.tolerance;
  spec.angular = column == ml::LabelColumn::heading;
  return spec;
}

struct ScoredModel {
  ml::Algorithm algorithm;
  double train = 0.0;
  double validation = 0.0;
  double test = 0.0;
  std::unique_ptr<ml::Model> model;
};

ScoredModel train_one(const ml::ModelSpec& spec, const ml::DatasetSplit& split) {
  ScoredModel out;
  out.algorithm = spec.algorithm;
  out.model = ml::fit_model(spec, split.train);
  out.train = ml::score_model(*out.model, split.train, spec);
  out.validation = ml::score_model(*out.model, split.validation, spec);
  out.test = ml::score_model(*out.model, split.test, spec);
  return out;
}

int cmd_train(const TrainFlags& flags) {
  require_readable(flags.input);
  const auto column = label_column_from(flags.label);
  const auto task = task_for_column(column);
  const auto table = ml::load_dataset_csv_file(flags.input);
  const auto dataset = ml::to_dataset(table, column);
  const auto split = ml::split_dataset(dataset, {}, task, flags.seed);

  std::vector<ml::Algorithm> algorithms;
  if (flags.algorithm == "all") {
    for (int a = 0; a <= static_cast<int>(ml::Algorithm::linear_regression); ++a) {
      const auto algorithm = static_cast<ml::Algorithm>(a);
      if (ml::supports_task(algorithm, task)) algorithms.push_back(algorithm);
    }
  } else {
    const auto algorithm = ml::algorithm_from_string(flags.algorithm);
    if (!algorithm) throw std::runtime_error("unknown algorithm: " + flags.algorithm);
    if (!ml::supports_task(*algorithm, task)) {
      throw std::runtime_error(std::string(ml::to_string(*algorithm)) + " does not support " +
                               ml::to_string(task));
    }
    algorithms.push_back(*algorithm);
  }

  std::vector<ScoredModel> scored;
  for (const auto algorithm : algorithms) {
    scored.push_back(train_one(spec_from(flags, algorithm, column), split));
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredModel& a, const ScoredModel& b) { return a.test > b.test; });

  std::cout << "label=" << flags.label << " rows=" << dataset.size()
            << " train/val/test=" << split.train.size() << "/" << split.validation.size() << "/"
            << split.test.size() << "\n";
  std::cout << "algorithm,train_accuracy,validation_accuracy,test_accuracy\n";
  std::ostringstream csv;
  csv << "algorithm,train_accuracy,validation_accuracy,test_accuracy\n";
  for (const auto& s : scored) {
    std::ostringstream line;
    line << ml::to_string(s.algorithm) << "," << format_pct(s.train) << ","
         << format_pct(s.validation) << "," << format_pct(s.test) << "\n";
    std::cout << line.str();
    csv << line.str();
  }

  if (flags.cv_folds > 1) {
    for (const auto algorithm : algorithms) {
      const auto spec = spec_from(flags, algorithm, column);
      const auto cv = ml::cross_validate(spec, dataset, flags.cv_folds, flags.seed);
      std::cout << ml::to_string(algorithm) << " " << flags.cv_folds
                << "-fold cv: " << format_pct(cv.mean) << "% +/- " << format_pct(cv.stddev)
                << "\n";
    }
  }

  if (!flags.metrics_out.empty()) {
    std::ofstream out(flags.metrics_out);
    if (!out) throw std::runtime_error("cannot write metrics file: " + flags.metrics_out);
    out << csv.str();
    std::cout << "wrote " << flags.metrics_out << "\n";
  }
  if (!flags.model_out.empty()) {
    if (scored.size() > 1) {
      throw std::runtime_error("--model expects a single --algorithm, not all");
    }
    ml::save_model_file(flags.model_out, *scored.front().model);
    std::cout << "wrote " << flags.model_out << "\n";
  }
  return 0;
}

int cmd_train_bundle(const std::string& input, const std::string& model_out, std::uint64_t seed) {
  require_readable(input);
  const auto table = ml::load_dataset_csv_file(input);

  auto fit_role = [&](ml::LabelColumn column, ml::Algorithm algorithm, int depth) {
    ml::ModelSpec spec;
    spec.algorithm = algorithm;
    spec.task = task_for_column(column);
    spec.hp.max_depth = depth;
    spec.hp.seed = seed;
    spec.angular = column == ml::LabelColumn::heading;
    const auto dataset = ml::to_dataset(table, column);
    const auto split = ml::split_dataset(dataset, {}, spec.task, seed);
    auto model = ml::fit_model(spec, split.train);
    std::cout << (column == ml::LabelColumn::merge    ? "merge"
                  : column == ml::LabelColumn::accel ? "accel"
                                                     : "heading")
              << ": " << ml::to_string(algorithm)
              << " validation=" << format_pct(ml::score_model(*model, split.validation, spec))
              << "%\n";
    return model;
  };

  ml::ModelBundle bundle;
  bundle.merge = fit_role(ml::LabelColumn::merge, ml::Algorithm::random_forest, 16);
  bundle.accel = fit_role(ml::LabelColumn::accel, ml::Algorithm::gradient_boosting, 11);
  bundle.heading = fit_role(ml::LabelColumn::heading, ml::Algorithm::gradient_boosting, 6);
  ml::save_bundle_file(model_out, bundle);
  std::cout << "wrote " << model_out << "\n";
  return 0;
}

int cmd_evaluate(const std::string& input, const std::string& model_path, const std::string& label,
                 double tolerance, const std::string& output) {
  require_readable(input);
  require_readable(model_path);
  const auto column = label_column_from(label);
  const auto table = ml::load_dataset_csv_file(input);
  const auto dataset = ml::to_dataset(table, column);
  const auto model = ml::load_model_file(model_path);
  if (model->task() != task_for_column(column)) {
    throw std::runtime_error("model task does not match label column " + label);
  }

  const auto predictions = ml::predict_all(*model, dataset);
  std::ostringstream report;
  report << "metric,value\n";
  if (model->task() == ml::Task::classification) {
    report << "exact_match_accuracy," << format_pct(ml::exact_match_accuracy(predictions, dataset.y))
           << "\n";
  } else {
    const bool angular = column == ml::LabelColumn::heading;
    report << "tolerance_accuracy,"
           << format_pct(ml::tolerance_accuracy(predictions, dataset.y, tolerance, angular))
           << "\n";
    char mse[32];
    std::snprintf(mse, sizeof mse, "%.6g", ml::mean_squared_error(predictions, dataset.y));
    report << "mean_squared_error," << mse << "\n";
  }
  std::cout << ml::to_string(model->algorithm()) << " on " << dataset.size() << " rows\n"
            << report.str();
  if (!output.empty()) {
    std::ofstream out(output);
    if (!out) throw std::runtime_error("cannot write metrics file: " + output);
    out << report.str();
    std::cout << "wrote " << output << "\n";
  }
  return 0;
}

int cmd_sweep(const TrainFlags& flags, const std::string& parameter, int sweep_max,
              const std::string& output) {
  require_readable(flags.input);
  const auto column = label_column_from(flags.label);
  const auto task = task_for_column(column);
  const auto table = ml::load_dataset_csv_file(flags.input);
  const auto dataset = ml::to_dataset(table, column);
  const auto split = ml::split_dataset(dataset, {}, task, flags.seed);

  const auto algorithm = ml::algorithm_from_string(flags.algorithm);
  if (!algorithm) throw std::runtime_error("unknown algorithm: " + flags.algorithm);
  const auto base = spec_from(flags, *algorithm, column);

  ml::SweepResult result;
  if (parameter == "depth") {
    if (!ml::sweeps_depth(*algorithm)) {
      throw std::runtime_error(std::string(ml::to_string(*algorithm)) +
                               " has no depth-style parameter to sweep");
    }
    std::vector<int> values;
    for (int v = 1; v <= sweep_max; ++v) values.push_back(v);
    result = ml::sweep_max_depth(base, split.train, split.validation, values,
                                 ml::default_gap_points(*algorithm));
  } else if (parameter == "estimators") {
    if (!ml::sweeps_estimators(*algorithm)) {
      throw std::runtime_error(std::string(ml::to_string(*algorithm)) +
                               " has no ensemble size to sweep");
    }
    std::vector<int> values;
    for (int v = 10; v <= sweep_max; v += 10) values.push_back(v);
    if (values.empty()) values.push_back(sweep_max);
    result = ml::sweep_estimators(base, split.train, split.validation, values);
  } else {
    throw std::runtime_error("unknown sweep parameter: " + parameter +
                             " (expected depth or estimators)");
  }

  std::ofstream out(output);
  if (!out) throw std::runtime_error("cannot write sweep file: " + output);
  ml::write_sweep_csv(out, result);
  std::cout << result.points.size() << " " << result.parameter << " values, chose "
            << result.chosen << (result.fallback ? " (best validation fallback)" : "") << "\n";
  std::cout << "wrote " << output << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// serve / replay

int cmd_serve(const std::string& config_path, int listen_override,
              const std::string& model_override, double clearance_override) {
  orch::ServiceConfig config;
  if (!config_path.empty()) config = orch::load_service_config(config_path);
  orch::apply_env_overrides(config);
  if (listen_override >= 0) config.listen_port = static_cast<std::uint16_t>(listen_override);
  if (!model_override.empty()) config.model_path = model_override;
  if (clearance_override > 0) config.clearance_factor = clearance_override;

  if (config.model_path.empty()) {
    throw std::runtime_error("serve needs a trained model bundle (--model or config model_path)");
  }
  auto bundle = ml::load_bundle_file(config.model_path);

  orch::PlannerConfig planner;
  planner.target_lane = config.target_lane;
  planner.lane_center_x = config.lane_center_x;
  planner.clearance_factor = config.clearance_factor;

  orch::OrchestratorCore core(std::move(bundle), planner, config.staleness_ms);
  orch::OrchestratorServer server(core, config.listen_port);
  server.start();
  std::cout << "listening on 127.0.0.1:" << server.port() << "\n" << std::flush;

  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  while (!g_stop.load() && server.running()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  server.stop();

  const auto times = core.processing_times_ms();
  std::cout << "shut down after " << core.recommendations_issued() << " recommendations\n";
  if (!times.empty()) {
    char line[160];
    std::snprintf(line, sizeof line,
                  "planning ms: p50=%.3f p99=%.3f max=%.3f (budget %.1f ms)\n",
                  replay::percentile(times, 50.0), replay::percentile(times, 99.0),
                  *std::max_element(times.begin(), times.end()), config.budget_ms);
    std::cout << line;
  }
  return 0;
}

int cmd_replay(const std::string& input, const std::string& endpoint, double speed_factor,
               double budget_ms, const std::string& output, int target_lane,
               double clearance_factor, bool dry_run) {
  require_readable(input);
  const auto trace = replay::read_trace_file(input);
  std::cout << "trace " << trace.meta.name << ": " << trace.updates.size() << " updates at "
            << trace.meta.rate_hz << " Hz\n";

  if (dry_run) {
    const auto bitrate = replay::bitrate_check(trace);
    char line[200];
    std::snprintf(line, sizeof line,
                  "channel load: %.1f bytes/message, %.0f bps per vehicle (low rate %s, high rate "
                  "%s)\n",
                  bitrate.mean_message_bytes, bitrate.bits_per_second_per_vehicle,
                  bitrate.fits_low_rate ? "ok" : "exceeded",
                  bitrate.fits_high_rate ? "ok" : "exceeded");
    std::cout << line;
    return 0;
  }

  replay::ReplayOptions options;
  const auto ep = parse_endpoint(endpoint);
  options.host = ep.host;
  options.port = ep.port;
  options.speed_factor = speed_factor;
  options.budget_ms = budget_ms;

  const auto result = replay::replay(trace, options);
  std::cout << replay::summarize(result);

  const auto violations =
      replay::oracle_check(trace, result.recommendations, target_lane, clearance_factor);
  if (violations.empty()) {
    std::cout << "safety check: every merge waypoint clear\n";
  } else {
    std::cout << "safety check: " << violations.size() << " violations\n";
    for (const auto& v : violations) {
      std::cout << "  recommendation " << v.recommendation_index << " waypoint "
                << v.waypoint_index << ": " << v.reason << "\n";
    }
  }

  if (!output.empty()) {
    std::ofstream out(output);
    if (!out) throw std::runtime_error("cannot write latency file: " + output);
    replay::write_latency_csv(out, result);
    std::cout << "wrote " << output << "\n";
  }
  return violations.empty() && result.processing_within_budget ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane merge coordination toolkit"};
  app.require_subcommand(1);

  // synth-raw
  auto* synth_raw = app.add_subcommand("synth-raw", "Generate a raw trajectory fixture");
  std::string sr_output;
  int sr_events = 50;
  std::uint64_t sr_seed = 42;
  synth_raw->add_option("--output", sr_output, "Fixture file to write")->required();
  synth_raw->add_option("--events", sr_events, "Lane change events to generate");
  synth_raw->add_option("--seed", sr_seed, "Random seed");

  // synth-trace
  auto* synth_trace = app.add_subcommand("synth-trace", "Generate a replayable scenario trace");
  std::string st_output;
  std::uint64_t st_seed = 42;
  double st_duration = 7.0;
  double st_rate = 10.0;
  synth_trace->add_option("--output", st_output, "Trace file to write")->required();
  synth_trace->add_option("--seed", st_seed, "Random seed");
  synth_trace->add_option("--duration", st_duration, "Scenario length in seconds");
  synth_trace->add_option("--rate", st_rate, "Report rate in Hz");

  // extract
  auto* extract = app.add_subcommand("extract", "Raw trajectories to scenario windows");
  std::vector<std::string> ex_inputs;
  std::string ex_output;
  bool ex_dry_run = false;
  extract->add_option("--input", ex_inputs, "Raw trajectory file (repeatable)")->required();
  extract->add_option("--output", ex_output, "Window file to write");
  extract->add_flag("--dry-run", ex_dry_run, "Count windows without writing");

  // label
  auto* label = app.add_subcommand("label", "Scenario windows to a labeled dataset");
  std::string lb_input;
  std::string lb_output;
  double lb_clearance = safety::kDefaultClearanceFactor;
  label->add_option("--input", lb_input, "Window file")->required();
  label->add_option("--output", lb_output, "Dataset file to write")->required();
  label->add_option("--clearance-factor", lb_clearance, "Speed-proportional clearance factor");

  // train
  auto* train = app.add_subcommand("train", "Fit a model on a labeled dataset");
  TrainFlags tr;
  train->add_option("--input", tr.input, "Dataset file")->required();
  train->add_option("--label", tr.label, "Label column: merge, accel or heading");
  train->add_option("--algorithm", tr.algorithm, "Algorithm name, or all");
  train->add_option("--model", tr.model_out, "Model file to write");
  train->add_option("--output", tr.metrics_out, "Metrics file to write");
  train->add_option("--max-depth", tr.max_depth, "Tree depth cap");
  train->add_option("--estimators", tr.estimators, "Ensemble size");
  train->add_option("--k", tr.k, "Neighbour count");
  train->add_option("--learning-rate", tr.learning_rate, "Boosting shrinkage");
  train->add_option("--tolerance", tr.tolerance, "Regression scoring band");
  train->add_option("--cv-folds", tr.cv_folds, "Also cross-validate with this many folds");
  train->add_option("--seed", tr.seed, "Random seed");

  // train-bundle
  auto* bundle = app.add_subcommand("train-bundle", "Fit the three models the service uses");
  std::string tb_input;
  std::string tb_model;
  std::uint64_t tb_seed = 42;
  bundle->add_option("--input", tb_input, "Dataset file")->required();
  bundle->add_option("--model", tb_model, "Bundle file to write")->required();
  bundle->add_option("--seed", tb_seed, "Random seed");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a trained model on a dataset");
  std::string ev_input;
  std::string ev_model;
  std::string ev_label = "merge";
  std::string ev_output;
  double ev_tolerance = 1.0;
  evaluate->add_option("--input", ev_input, "Dataset file")->required();
  evaluate->add_option("--model", ev_model, "Trained model file")->required();
  evaluate->add_option("--label", ev_label, "Label column: merge, accel or heading");
  evaluate->add_option("--tolerance", ev_tolerance, "Regression scoring band");
  evaluate->add_option("--output", ev_output, "Metrics file to write");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Capacity sweep with train/validation scores");
  TrainFlags sw;
  std::string sw_parameter = "depth";
  int sw_max = 30;
  std::string sw_output;
  sweep->add_option("--input", sw.input, "Dataset file")->required();
  sweep->add_option("--label", sw.label, "Label column: merge, accel or heading");
  sweep->add_option("--algorithm", sw.algorithm, "Algorithm name")->required();
  sweep->add_option("--parameter", sw_parameter, "depth or estimators");
  sweep->add_option("--max", sw_max, "Largest value to try");
  sweep->add_option("--estimators", sw.estimators, "Ensemble size while sweeping depth");
  sweep->add_option("--k", sw.k, "Neighbour count");
  sweep->add_option("--tolerance", sw.tolerance, "Regression scoring band");
  sweep->add_option("--seed", sw.seed, "Random seed");
  sweep->add_option("--output", sw_output, "Sweep file to write")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the merge coordination service");
  std::string sv_config;
  int sv_listen = -1;
  std::string sv_model;
  double sv_clearance = 0.0;
  serve->add_option("--config", sv_config, "Service config file");
  serve->add_option("--listen", sv_listen, "TCP port (0 picks a free one)");
  serve->add_option("--model", sv_model, "Trained model bundle");
  serve->add_option("--clearance-factor", sv_clearance, "Speed-proportional clearance factor");

  // replay
  auto* rp = app.add_subcommand("replay", "Feed a trace to a running service");
  std::string rp_input;
  std::string rp_endpoint = "127.0.0.1:40990";
  double rp_speed = 1.0;
  double rp_budget = 30.0;
  std::string rp_output;
  int rp_lane = 1;
  double rp_clearance = safety::kDefaultClearanceFactor;
  bool rp_dry_run = false;
  rp->add_option("--input", rp_input, "Trace file")->required();
  rp->add_option("--endpoint", rp_endpoint, "Service address as host:port");
  rp->add_option("--speed-factor", rp_speed, "Pace multiplier; 0 sends flat out");
  rp->add_option("--budget", rp_budget, "Planning budget in ms the report grades against");
  rp->add_option("--output", rp_output, "Latency file to write");
  rp->add_option("--target-lane", rp_lane, "Lane the safety check assumes");
  rp->add_option("--clearance-factor", rp_clearance, "Speed-proportional clearance factor");
  rp->add_flag("--dry-run", rp_dry_run, "Analytic channel-load check only, no network");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth_raw->parsed()) {
      synth::write_raw_fixture(sr_output, sr_events, sr_seed);
      std::cout << "wrote " << sr_output << " (" << sr_events << " events)\n";
      return 0;
    }
    if (synth_trace->parsed()) {
      replay::ScenarioParams params;
      params.seed = st_seed;
      params.duration_s = st_duration;
      params.rate_hz = st_rate;
      const auto trace = replay::synth_scenario(params);
      replay::write_trace_file(st_output, trace);
      std::cout << "wrote " << st_output << " (" << trace.updates.size() << " messages)\n";
      return 0;
    }
    if (extract->parsed()) {
      if (!ex_dry_run && ex_output.empty()) {
        throw std::runtime_error("extract needs --output (or --dry-run)");
      }
      return cmd_extract(ex_inputs, ex_output, ex_dry_run);
    }
    if (label->parsed()) return cmd_label(lb_input, lb_output, lb_clearance);
    if (train->parsed()) return cmd_train(tr);
    if (bundle->parsed()) return cmd_train_bundle(tb_input, tb_model, tb_seed);
    if (evaluate->parsed()) return cmd_evaluate(ev_input, ev_model, ev_label, ev_tolerance, ev_output);
    if (sweep->parsed()) return cmd_sweep(sw, sw_parameter, sw_max, sw_output);
    if (serve->parsed()) return cmd_serve(sv_config, sv_listen, sv_model, sv_clearance);
    if (rp->parsed()) {
      return cmd_replay(rp_input, rp_endpoint, rp_speed, rp_budget, rp_output, rp_lane,
                        rp_clearance, rp_dry_run);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
