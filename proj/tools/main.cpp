// driftlab command line: detect drifts in event logs, generate synthetic
// drifting logs, inject noise, and run scored evaluation sweeps.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "driftlab/csv.hpp"
#include "driftlab/detector.hpp"
#include "driftlab/evaluation.hpp"
#include "driftlab/model_io.hpp"
#include "driftlab/report_io.hpp"
#include "driftlab/synthlab.hpp"
#include "driftlab/timestamp.hpp"
#include "driftlab/version.hpp"
#include "driftlab/xes.hpp"

namespace fs = std::filesystem;
using namespace driftlab;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LogFormat { autodetect, xes, csv };

LogFormat format_from_name(const std::string& name) {
  if (name == "xes") return LogFormat::xes;
  if (name == "csv") return LogFormat::csv;
  return LogFormat::autodetect;
}

LogFormat resolve_format(LogFormat requested, const fs::path& path) {
  if (requested != LogFormat::autodetect) return requested;
  const std::string ext = path.extension().string();
  if (ext == ".xes") return LogFormat::xes;
  if (ext == ".csv") return LogFormat::csv;
  throw InputError("cannot infer log format from '" + path.string() +
                   "'; pass --format xes|csv");
}

EventLog load_log(const fs::path& path, LogFormat format, const CsvMapping& mapping) {
  if (!fs::exists(path)) throw InputError("input file not found: " + path.string());
  try {
    switch (resolve_format(format, path)) {
      case LogFormat::xes:
        return parse_xes_file(path);
      case LogFormat::csv:
        return parse_csv_file(path, mapping);
      default:
        break;
    }
  } catch (const XesParseError& e) {
    throw InputError(path.string() + ": " + e.what());
  } catch (const CsvError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  throw InputError("unreachable format state");
}

void save_log(const EventLog& log, const fs::path& path, LogFormat format,
              const CsvMapping& mapping) {
  if (resolve_format(format, path) == LogFormat::xes)
    write_xes_file(log, path);
  else
    write_csv_file(log, path, mapping);
}

bool log_fully_timestamped(const EventLog& log) {
  for (const auto& t : log.traces)
    for (const auto& e : t.events)
      if (!e.timestamp) return false;
  return !log.traces.empty();
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch());
  return format_iso8601(ms.count());
}

void write_manifest(const fs::path& out_dir, const std::string& subcommand,
                    const nlohmann::json& args, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs,
                    const nlohmann::json& timing) {
  nlohmann::json manifest;
  manifest["tool"] = "driftlab";
  manifest["version"] = std::string(kVersion);
  manifest["subcommand"] = subcommand;
  manifest["args"] = args;
  manifest["inputs"] = inputs;
  manifest["outputs"] = outputs;
  manifest["timing"] = timing;  // excluded from reproducibility guarantees
  manifest["created"] = now_iso8601();
  std::ofstream out(out_dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest.json under " + out_dir.string());
  out << manifest.dump(2) << '\n';
}

const char* ordering_name(StreamOrdering o) {
  return o == StreamOrdering::trace_major ? "trace" : "timestamp";
}

// ---------------------------------------------------------------------------
// detect

struct DetectArgs {
  std::string input;
  std::string format = "auto";
  std::string ordering = "auto";
  int window = 0;
  std::optional<int> consecutive_tests;
  double p_threshold = 0.05;
  double asr_threshold = 1.96;
  std::string out_dir = ".";
  CsvMapping mapping;
};

int run_detect(const DetectArgs& a) {
  DetectorConfig cfg;
  cfg.window_size = a.window;
  cfg.consecutive_tests = a.consecutive_tests;
  cfg.p_threshold = a.p_threshold;
  cfg.asr_threshold = a.asr_threshold;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "driftlab detect: " << e.what() << "\n";
    return kExitUsage;
  }

  const EventLog log = load_log(a.input, format_from_name(a.format), a.mapping);

  if (a.ordering == "trace") {
    cfg.ordering = StreamOrdering::trace_major;
  } else if (a.ordering == "timestamp") {
    cfg.ordering = StreamOrdering::timestamp;
  } else {
    // Real logs usually interleave traces; honor timestamps when every
    // event carries one, fall back to trace order otherwise.
    cfg.ordering = log_fully_timestamped(log) ? StreamOrdering::timestamp
                                              : StreamOrdering::trace_major;
  }

  EventStream stream;
  try {
    stream = to_event_stream(log, cfg.ordering);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (stream.size() < minimum_stream_length(cfg)) {
    std::cerr << "driftlab detect: stream has " << stream.size()
              << " events; this window size needs at least "
              << minimum_stream_length(cfg) << "\n";
    return kExitUsage;
  }

  const DriftReport report = detect(stream, cfg);

  const fs::path out_dir(a.out_dir);
  fs::create_directories(out_dir);
  write_report_files(report, out_dir);
  write_manifest(out_dir, "detect",
                 {{"input", a.input},
                  {"format", a.format},
                  {"ordering", ordering_name(cfg.ordering)},
                  {"window", cfg.window_size},
                  {"consecutive_tests", cfg.resolved_consecutive_tests()},
                  {"p_threshold", cfg.p_threshold},
                  {"asr_threshold", cfg.asr_threshold}},
                 {a.input},
                 {(out_dir / "report.json").string(), (out_dir / "report.csv").string()},
                 {{"wall_seconds", report.stats.wall_seconds},
                  {"per_event_ms", report.stats.per_event_ms}});

  std::printf("%zu events (%s order), window %d, %d consecutive tests\n",
              report.stats.events, ordering_name(cfg.ordering), cfg.window_size,
              cfg.resolved_consecutive_tests());
  std::printf("%zu drift point(s) after merging %zu forward + %zu backward\n",
              report.points.size(), report.forward.size(), report.backward.size());
  for (const auto& p : report.points) {
    const std::string when = p.timestamp ? "  at " + format_iso8601(*p.timestamp) : "";
    std::printf("  event %zu  trace %d (%s)  %s  %s>%s%s\n", p.event_index, p.trace_index,
                stream.trace_id(p.trace_index).c_str(),
                p.direction == Direction::forward ? "forward" : "backward",
                p.trigger.source.c_str(), p.trigger.target.c_str(), when.c_str());
  }
  std::printf("%.6f ms per event (%.3f s total)\n", report.stats.per_event_ms,
              report.stats.wall_seconds);
  std::printf("report written to %s\n", (out_dir / "report.json").string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string out_dir;
  std::vector<std::string> patterns = {"serial_insert"};
  std::string model_file;
  int traces = 100;
  int segments = 10;
  std::uint64_t seed = 1;
  std::string log_format = "csv";
  double pattern_probability = -1.0;  // <0: keep pattern defaults
};

int run_generate(const GenerateArgs& a) {
  if (a.segments < 2) {
    std::cerr << "driftlab generate: --segments must be at least 2\n";
    return kExitUsage;
  }
  ProcessModel base;
  if (a.model_file.empty()) {
    base = default_base_model();
  } else {
    if (!fs::exists(a.model_file))
      throw InputError("model file not found: " + a.model_file);
    try {
      base = load_model_file(a.model_file);
    } catch (const std::exception& e) {
      throw InputError(std::string("model file: ") + e.what());
    }
  }

  ProcessModel altered = base;
  std::vector<std::string> applied;
  try {
    for (const auto& name : a.patterns) {
      ChangePattern p = make_default_pattern(altered, pattern_from_name(name));
      if (a.pattern_probability > 0) p.probability = a.pattern_probability;
      altered = apply_change_pattern(altered, p);
      applied.push_back(name);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "driftlab generate: " << e.what() << "\n";
    return kExitUsage;
  }

  std::vector<ProcessModel> segment_models;
  for (int k = 0; k < a.segments; ++k)
    segment_models.push_back(k % 2 == 0 ? base : altered);
  auto [log, truth] = generate_drift_log(segment_models, a.traces, a.seed);
  for (std::size_t k = 0; k < truth.segment_descriptions.size(); ++k)
    truth.segment_descriptions[k] =
        k % 2 == 0 ? "base model" : "altered model (" + a.patterns[0] +
                                        (a.patterns.size() > 1 ? " +..." : "") + ")";

  const fs::path out_dir(a.out_dir);
  fs::create_directories(out_dir);
  const std::string log_name = a.log_format == "xes" ? "log.xes" : "log.csv";
  save_log(log, out_dir / log_name, format_from_name(a.log_format), CsvMapping{});
  save_ground_truth_file(truth, out_dir / "ground_truth.json");
  save_model_file(base, out_dir / "model_base.json");
  save_model_file(altered, out_dir / "model_altered.json");
  write_manifest(out_dir, "generate",
                 {{"patterns", a.patterns},
                  {"model", a.model_file.empty() ? "built-in" : a.model_file},
                  {"traces_per_segment", a.traces},
                  {"segments", a.segments},
                  {"seed", a.seed},
                  {"log_format", a.log_format}},
                 a.model_file.empty() ? std::vector<std::string>{}
                                      : std::vector<std::string>{a.model_file},
                 {(out_dir / log_name).string(), (out_dir / "ground_truth.json").string(),
                  (out_dir / "model_base.json").string(),
                  (out_dir / "model_altered.json").string()},
                 {});

  std::printf("generated %zu traces / %zu events, %zu drift(s) at:", log.traces.size(),
              log.total_events(), truth.drift_trace_indexes.size());
  for (auto i : truth.drift_trace_indexes) std::printf(" %lld", (long long)i);
  std::printf("\nwritten to %s\n", out_dir.string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// noise

struct NoiseArgs {
  std::string input;
  std::string format = "auto";
  double add = 0.0;
  double remove = 0.0;
  std::string mode = "random";
  std::uint64_t seed = 1;
  std::string ground_truth;
  std::string out_dir;
  CsvMapping mapping;
};

int run_noise(const NoiseArgs& a) {
  if (a.add < 0 || a.add >= 1 || a.remove < 0 || a.remove >= 1) {
    std::cerr << "driftlab noise: fractions must lie in [0, 1)\n";
    return kExitUsage;
  }
  const EventLog log = load_log(a.input, format_from_name(a.format), a.mapping);
  const NoiseMode mode =
      a.mode == "duplicate" ? NoiseMode::duplicate_event : NoiseMode::random_activity;
  const EventLog noised = inject_noise(log, a.add, a.remove, a.seed, mode);

  const fs::path out_dir(a.out_dir);
  fs::create_directories(out_dir);
  const fs::path in_path(a.input);
  const std::string out_name = in_path.stem().string() + "_noised" +
                               (resolve_format(format_from_name(a.format), in_path) ==
                                        LogFormat::xes
                                    ? ".xes"
                                    : ".csv");
  save_log(noised, out_dir / out_name, format_from_name(a.format), a.mapping);

  std::vector<std::string> outputs = {(out_dir / out_name).string()};
  std::vector<std::string> inputs = {a.input};
  if (!a.ground_truth.empty()) {
    // Noise never moves trace boundaries; the ground truth passes through.
    if (!fs::exists(a.ground_truth))
      throw InputError("ground truth file not found: " + a.ground_truth);
    fs::copy_file(a.ground_truth, out_dir / "ground_truth.json",
                  fs::copy_options::overwrite_existing);
    inputs.push_back(a.ground_truth);
    outputs.push_back((out_dir / "ground_truth.json").string());
  }
  write_manifest(out_dir, "noise",
                 {{"input", a.input},
                  {"add", a.add},
                  {"remove", a.remove},
                  {"mode", a.mode},
                  {"seed", a.seed}},
                 inputs, outputs, {});
  std::printf("noised log: %zu -> %zu events, written to %s\n", log.total_events(),
              noised.total_events(), (out_dir / out_name).string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::vector<std::string> patterns = {"serial_insert", "conditional_insert",
                                       "remove_fragment", "swap_fragments",
                                       "loop_fragment"};
  std::string model_file;
  int seeds = 2;
  int traces = 100;
  int segments = 10;
  double noise_add = 0.0;
  double noise_remove = 0.0;
  std::string noise_mode = "random";
  int window = 150;
  std::optional<int> consecutive_tests;
  std::vector<std::int64_t> ets;
  int jobs = 0;
  std::string out_dir;
};

int run_evaluate(const EvaluateArgs& a) {
  if (a.patterns.empty() || a.seeds < 1) {
    std::cerr << "driftlab evaluate: need at least one pattern and one seed\n";
    return kExitUsage;
  }
  ProcessModel base;
  if (a.model_file.empty()) {
    base = default_base_model();
  } else {
    if (!fs::exists(a.model_file))
      throw InputError("model file not found: " + a.model_file);
    base = load_model_file(a.model_file);
  }

  DetectorConfig cfg;
  cfg.window_size = a.window;
  cfg.consecutive_tests = a.consecutive_tests;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "driftlab evaluate: " << e.what() << "\n";
    return kExitUsage;
  }

  std::vector<EvalJob> jobs;
  try {
    for (const auto& name : a.patterns) {
      const ChangePattern pattern = make_default_pattern(base, pattern_from_name(name));
      for (int seed = 1; seed <= a.seeds; ++seed) {
        EvalJob job;
        job.label = name;
        job.base = base;
        job.patterns = {pattern};
        job.seed = std::uint64_t(seed);
        job.traces_per_segment = a.traces;
        job.segments = a.segments;
        job.noise_add = a.noise_add;
        job.noise_remove = a.noise_remove;
        job.noise_mode = a.noise_mode == "duplicate" ? NoiseMode::duplicate_event
                                                     : NoiseMode::random_activity;
        job.config = cfg;
        job.error_tolerances = a.ets.empty() ? std::vector<std::int64_t>{10, 50} : a.ets;
        jobs.push_back(job);
      }
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "driftlab evaluate: " << e.what() << "\n";
    return kExitUsage;
  }

  const int parallelism =
      a.jobs > 0 ? a.jobs : int(std::max(1u, std::thread::hardware_concurrency()));
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<EvalResult> results = run_evaluation(jobs, parallelism);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string csv = evaluation_csv(jobs, results);
  const fs::path out_dir(a.out_dir);
  fs::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "results.csv");
    if (!out) throw std::runtime_error("cannot write results.csv");
    out << csv;
  }
  write_manifest(out_dir, "evaluate",
                 {{"patterns", a.patterns},
                  {"model", a.model_file.empty() ? "built-in" : a.model_file},
                  {"seeds", a.seeds},
                  {"traces_per_segment", a.traces},
                  {"segments", a.segments},
                  {"noise_add", a.noise_add},
                  {"noise_remove", a.noise_remove},
                  {"window", cfg.window_size},
                  {"consecutive_tests", cfg.resolved_consecutive_tests()},
                  {"error_tolerances", jobs.front().error_tolerances}},
                 {}, {(out_dir / "results.csv").string()},
                 {{"wall_seconds", elapsed}});

  // Console summary: the per-pattern mean rows.
  std::istringstream lines(csv);
  std::string line;
  while (std::getline(lines, line))
    if (line.rfind("scope,", 0) == 0 || line.rfind("pattern_mean,", 0) == 0 ||
        line.rfind("overall_mean,", 0) == 0)
      std::printf("%s\n", line.c_str());
  std::printf("%zu runs in %.2f s; results written to %s\n", results.size(), elapsed,
              (out_dir / "results.csv").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driftlab: control-flow drift detection on event streams"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  DetectArgs detect_args;
  auto* detect_cmd = app.add_subcommand(
      "detect", "Locate drift points in an event log (XES or CSV)");
  detect_cmd->add_option("--input", detect_args.input, "event log file")->required();
  detect_cmd->add_option("--format", detect_args.format, "xes|csv (default: by extension)")
      ->check(CLI::IsMember({"auto", "xes", "csv"}));
  detect_cmd->add_option("--ordering", detect_args.ordering,
                         "trace|timestamp (default: timestamp when fully timestamped)")
      ->check(CLI::IsMember({"auto", "trace", "timestamp"}));
  detect_cmd->add_option("--window", detect_args.window, "window size in events")
      ->required();
  detect_cmd->add_option("--consecutive-tests", detect_args.consecutive_tests,
                         "tests per side (default: window/2)");
  detect_cmd->add_option("--p-threshold", detect_args.p_threshold, "G-test p threshold");
  detect_cmd->add_option("--asr-threshold", detect_args.asr_threshold,
                         "adjusted-standardized-residual threshold");
  detect_cmd->add_option("--out-dir", detect_args.out_dir, "output directory");
  detect_cmd->add_option("--csv-trace-col", detect_args.mapping.trace_id,
                         "CSV trace id column");
  detect_cmd->add_option("--csv-activity-col", detect_args.mapping.activity,
                         "CSV activity column");
  detect_cmd->add_option("--csv-timestamp-col", detect_args.mapping.timestamp,
                         "CSV timestamp column");

  GenerateArgs generate_args;
  auto* generate_cmd =
      app.add_subcommand("generate", "Generate a synthetic drifting log");
  generate_cmd->add_option("--out-dir", generate_args.out_dir, "output directory")
      ->required();
  generate_cmd->add_option("--pattern", generate_args.patterns,
                           "change pattern(s) forming the altered model");
  generate_cmd->add_option("--model", generate_args.model_file,
                           "base model JSON (default: built-in)");
  generate_cmd->add_option("--traces", generate_args.traces, "traces per segment");
  generate_cmd->add_option("--segments", generate_args.segments,
                           "alternating base/altered segments");
  generate_cmd->add_option("--seed", generate_args.seed, "generation seed");
  generate_cmd->add_option("--log-format", generate_args.log_format, "csv|xes")
      ->check(CLI::IsMember({"csv", "xes"}));
  generate_cmd->add_option("--pattern-probability", generate_args.pattern_probability,
                           "override conditional/loop/skip probability");

  NoiseArgs noise_args;
  auto* noise_cmd = app.add_subcommand("noise", "Add random event noise to a log");
  noise_cmd->add_option("--input", noise_args.input, "event log file")->required();
  noise_cmd->add_option("--format", noise_args.format, "xes|csv")
      ->check(CLI::IsMember({"auto", "xes", "csv"}));
  noise_cmd->add_option("--add", noise_args.add, "fraction of events to add");
  noise_cmd->add_option("--remove", noise_args.remove, "fraction of events to remove");
  noise_cmd->add_option("--mode", noise_args.mode, "random|duplicate insertion mode")
      ->check(CLI::IsMember({"random", "duplicate"}));
  noise_cmd->add_option("--seed", noise_args.seed, "noise seed");
  noise_cmd->add_option("--ground-truth", noise_args.ground_truth,
                        "ground truth JSON to pass through");
  noise_cmd->add_option("--out-dir", noise_args.out_dir, "output directory")->required();
  noise_cmd->add_option("--csv-trace-col", noise_args.mapping.trace_id, "CSV trace id column");
  noise_cmd->add_option("--csv-activity-col", noise_args.mapping.activity,
                        "CSV activity column");
  noise_cmd->add_option("--csv-timestamp-col", noise_args.mapping.timestamp,
                        "CSV timestamp column");

  EvaluateArgs evaluate_args;
  auto* evaluate_cmd = app.add_subcommand(
      "evaluate", "Scored sweep: generate, noise, detect over patterns and seeds");
  evaluate_cmd->add_option("--pattern", evaluate_args.patterns, "pattern(s) to evaluate");
  evaluate_cmd->add_option("--model", evaluate_args.model_file, "base model JSON");
  evaluate_cmd->add_option("--seeds", evaluate_args.seeds, "seeds per pattern");
  evaluate_cmd->add_option("--traces", evaluate_args.traces, "traces per segment");
  evaluate_cmd->add_option("--segments", evaluate_args.segments, "segments per log");
  evaluate_cmd->add_option("--noise-add", evaluate_args.noise_add, "noise add fraction");
  evaluate_cmd->add_option("--noise-remove", evaluate_args.noise_remove,
                           "noise remove fraction");
  evaluate_cmd->add_option("--noise-mode", evaluate_args.noise_mode, "random|duplicate")
      ->check(CLI::IsMember({"random", "duplicate"}));
  evaluate_cmd->add_option("--window", evaluate_args.window, "window size in events");
  evaluate_cmd->add_option("--consecutive-tests", evaluate_args.consecutive_tests,
                           "tests per side (default: window/2)");
  evaluate_cmd->add_option("--et", evaluate_args.ets,
                           "error tolerance in traces (repeatable; default 10 50)");
  evaluate_cmd->add_option("--jobs", evaluate_args.jobs,
                           "parallel jobs (default: hardware)");
  evaluate_cmd->add_option("--out-dir", evaluate_args.out_dir, "output directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (*detect_cmd) return run_detect(detect_args);
    if (*generate_cmd) return run_generate(generate_args);
    if (*noise_cmd) return run_noise(noise_args);
    if (*evaluate_cmd) return run_evaluate(evaluate_args);
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "driftlab: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "driftlab: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
