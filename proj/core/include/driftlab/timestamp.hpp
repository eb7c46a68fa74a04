#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "driftlab/event_model.hpp"

namespace driftlab {

/**
 * @brief Parse an ISO-8601 date-time into UTC milliseconds.
 *
 * Accepts YYYY-MM-DD['T'|' ']HH:MM:SS[.fff][Z|+HH:MM|-HH:MM]; fractional
 * seconds beyond milliseconds are truncated, a missing offset means UTC.
 * Returns nullopt when the text does not parse.
 */
std::optional<TimestampMs> parse_iso8601(std::string_view text);

/// Format as YYYY-MM-DDTHH:MM:SS.fffZ (always UTC).
std::string format_iso8601(TimestampMs ms);

}  // namespace driftlab
