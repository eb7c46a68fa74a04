#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "driftlab/detector.hpp"

namespace driftlab {

/// Schema: {config, points[{event_index, trace_index, timestamp, direction,
/// trigger_relation, p_values}], forward, backward, stats}.
nlohmann::json report_to_json(const DriftReport& report);

/// One row per merged point.
std::string report_to_csv(const DriftReport& report);

/// Writes report.json and report.csv under out_dir.
void write_report_files(const DriftReport& report, const std::filesystem::path& out_dir);

}  // namespace driftlab
