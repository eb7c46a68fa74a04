#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "driftlab/event_model.hpp"

namespace driftlab {

struct CsvError : std::runtime_error {
  explicit CsvError(const std::string& message) : std::runtime_error(message) {}
};

/// Column names mapping log fields onto a CSV header. An empty timestamp
/// name means the file carries no timestamps.
struct CsvMapping {
  std::string trace_id = "trace_id";
  std::string activity = "activity";
  std::string timestamp = "timestamp";
};

/**
 * @brief Parse an RFC 4180 CSV (header row required) into a log.
 *
 * Rows are grouped by the trace-id column preserving file order; traces are
 * ordered by first appearance. A missing mapped column is a configuration
 * error; an unparseable timestamp names the offending row.
 */
EventLog parse_csv(std::string_view text, const CsvMapping& mapping = {});
EventLog parse_csv_file(const std::filesystem::path& path, const CsvMapping& mapping = {});

/// Write one row per event in stream order of the log, RFC 4180 quoting.
/// Timestamp column is emitted only when the mapping names one.
void write_csv(const EventLog& log, std::ostream& out, const CsvMapping& mapping = {});
void write_csv_file(const EventLog& log, const std::filesystem::path& path,
                    const CsvMapping& mapping = {});

}  // namespace driftlab
