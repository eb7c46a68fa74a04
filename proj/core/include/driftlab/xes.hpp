#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "driftlab/event_model.hpp"

namespace driftlab {

struct XesParseError : std::runtime_error {
  XesParseError(std::string message, int line, int column);
  int line;
  int column;
};

/**
 * @brief Read the IEEE 1849 XES subset used for control-flow analysis.
 *
 * Handled structure: log > trace > event, with string attributes for
 * concept:name and date attributes for time:timestamp. Everything else
 * (extensions, classifiers, globals, nested containers, other attribute
 * types) is skipped. Malformed XML raises XesParseError with line/column;
 * an event without concept:name raises one naming its trace.
 */
EventLog parse_xes(std::string_view xml);
EventLog parse_xes_file(const std::filesystem::path& path);

/// Minimal XES writer: concept:name on traces/events, time:timestamp when
/// present.
void write_xes(const EventLog& log, std::ostream& out);
void write_xes_file(const EventLog& log, const std::filesystem::path& path);

}  // namespace driftlab
