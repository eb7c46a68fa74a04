#include "driftlab/report_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "driftlab/timestamp.hpp"

namespace driftlab {

namespace {

const char* direction_name(Direction d) {
  return d == Direction::forward ? "forward" : "backward";
}

const char* ordering_name(StreamOrdering o) {
  return o == StreamOrdering::trace_major ? "trace" : "timestamp";
}

nlohmann::json point_to_json(const DriftPoint& p) {
  nlohmann::json j;
  j["event_index"] = p.event_index;
  j["trace_index"] = p.trace_index;
  j["timestamp"] = p.timestamp ? nlohmann::json(format_iso8601(*p.timestamp))
                               : nlohmann::json(nullptr);
  j["direction"] = direction_name(p.direction);
  j["trigger_relation"] = {{"source", p.trigger.source}, {"target", p.trigger.target}};
  j["p_values"] = p.battery_p_values;
  if (p.collapsed_event_index) {
    j["collapsed"] = {{"event_index", *p.collapsed_event_index},
                      {"direction", direction_name(*p.collapsed_direction)}};
  }
  return j;
}

}  // namespace

nlohmann::json report_to_json(const DriftReport& report) {
  nlohmann::json j;
  j["config"] = {{"window_size", report.config.window_size},
                 {"consecutive_tests", report.config.resolved_consecutive_tests()},
                 {"p_threshold", report.config.p_threshold},
                 {"asr_threshold", report.config.asr_threshold},
                 {"ordering", ordering_name(report.config.ordering)}};
  j["points"] = nlohmann::json::array();
  for (const auto& p : report.points) j["points"].push_back(point_to_json(p));
  j["forward"] = nlohmann::json::array();
  for (const auto& p : report.forward) j["forward"].push_back(point_to_json(p));
  j["backward"] = nlohmann::json::array();
  for (const auto& p : report.backward) j["backward"].push_back(point_to_json(p));
  j["stats"] = {{"events", report.stats.events},
                {"wall_seconds", report.stats.wall_seconds},
                {"per_event_ms", report.stats.per_event_ms},
                {"tests_computed_forward", report.stats.tests_computed_forward},
                {"tests_computed_backward", report.stats.tests_computed_backward},
                {"candidates_forward", report.stats.candidates_forward},
                {"candidates_backward", report.stats.candidates_backward},
                {"cache_entries_forward", report.stats.cache_entries_forward},
                {"cache_entries_backward", report.stats.cache_entries_backward},
                {"peak_tracked_relations", report.stats.peak_tracked_relations},
                {"peak_active_traces", report.stats.peak_active_traces}};
  return j;
}

std::string report_to_csv(const DriftReport& report) {
  std::ostringstream out;
  out << "event_index,trace_index,timestamp,direction,trigger_source,trigger_target\n";
  for (const auto& p : report.points) {
    out << p.event_index << ',' << p.trace_index << ',';
    if (p.timestamp) out << format_iso8601(*p.timestamp);
    out << ',' << direction_name(p.direction) << ',' << p.trigger.source << ','
        << p.trigger.target << '\n';
  }
  return out.str();
}

void write_report_files(const DriftReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "report.json");
    if (!out) throw std::runtime_error("cannot write report.json under " + out_dir.string());
    out << report_to_json(report).dump(2) << '\n';
  }
  {
    std::ofstream out(out_dir / "report.csv");
    if (!out) throw std::runtime_error("cannot write report.csv under " + out_dir.string());
    out << report_to_csv(report);
  }
}

}  // namespace driftlab
