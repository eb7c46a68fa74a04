#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace driftlab {

/// Milliseconds since the Unix epoch, UTC.
using TimestampMs = std::int64_t;

struct LogEvent {
  std::string activity;
  std::optional<TimestampMs> timestamp;

  bool operator==(const LogEvent&) const = default;
};

struct Trace {
  std::string id;
  std::vector<LogEvent> events;

  bool operator==(const Trace&) const = default;
};

/**
 * @brief An ordered collection of traces, each an ordered event sequence.
 *
 * Trace ids are unique within a log. Timestamps are optional; when present
 * they are non-decreasing within each trace.
 */
struct EventLog {
  std::vector<Trace> traces;

  std::size_t total_events() const;
  /// Distinct activity labels, sorted.
  std::vector<std::string> alphabet() const;
  /// Throws std::invalid_argument on duplicate trace ids, empty activity
  /// labels, or decreasing within-trace timestamps.
  void validate() const;

  bool operator==(const EventLog&) const = default;
};

enum class StreamOrdering {
  trace_major,  // all events of trace i before all events of trace i+1
  timestamp,    // global timestamp order, stable on (trace order, position)
};

/// One event inside an indexed stream. Labels and trace ids are interned.
struct StreamEvent {
  std::int32_t trace = -1;     // ordinal of the containing trace in the log
  std::int32_t activity = -1;  // interned label id
  std::optional<TimestampMs> timestamp;
};

/**
 * @brief Immutable indexed view of a log as one event sequence.
 *
 * Reversal is an O(1) view: event i of the reversed stream is event n-1-i
 * of the forward one, so reversing twice restores the original exactly.
 * Safe to read from multiple threads.
 */
class EventStream {
 public:
  EventStream() = default;

  std::size_t size() const { return data_ ? data_->events.size() : 0; }
  bool empty() const { return size() == 0; }

  const StreamEvent& operator[](std::size_t i) const {
    return data_->events[reversed_ ? data_->events.size() - 1 - i : i];
  }

  bool reversed() const { return reversed_; }
  StreamOrdering ordering() const { return data_->ordering; }

  std::int32_t activity_count() const {
    return data_ ? std::int32_t(data_->labels.size()) : 0;
  }
  const std::string& label(std::int32_t activity) const {
    return data_->labels[std::size_t(activity)];
  }
  const std::vector<std::string>& labels() const { return data_->labels; }

  std::size_t trace_count() const { return data_ ? data_->trace_ids.size() : 0; }
  const std::string& trace_id(std::int32_t ord) const {
    return data_->trace_ids[std::size_t(ord)];
  }

  friend EventStream to_event_stream(const EventLog& log, StreamOrdering ordering);
  friend EventStream reverse_stream(const EventStream& s);

 private:
  struct Data {
    std::vector<StreamEvent> events;
    std::vector<std::string> labels;
    std::vector<std::string> trace_ids;
    StreamOrdering ordering = StreamOrdering::trace_major;
  };

  std::shared_ptr<const Data> data_;
  bool reversed_ = false;
};

/**
 * @brief Index a log as a stream, assigning positions 0..n-1.
 *
 * Timestamp ordering requires every event to carry a timestamp; ties keep
 * (trace order, within-trace position). Throws std::invalid_argument when
 * the log is invalid or timestamps are missing for timestamp ordering.
 */
EventStream to_event_stream(const EventLog& log, StreamOrdering ordering);

EventStream reverse_stream(const EventStream& s);

/// Regroup a stream by trace; inverse of to_event_stream for trace-major
/// streams.
EventLog stream_to_log(const EventStream& s);

/**
 * @brief Cut a log in two at a stream index boundary.
 *
 * Traces entirely below the boundary go left, entirely at-or-above go
 * right; straddling traces go to the side holding the majority of their
 * events (ties left). 0 <= boundary <= total events.
 */
std::pair<EventLog, EventLog> split_log(
    const EventLog& log, std::size_t boundary,
    StreamOrdering ordering = StreamOrdering::trace_major);

}  // namespace driftlab
