#include "driftlab/event_model.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace driftlab {

std::size_t EventLog::total_events() const {
  std::size_t n = 0;
  for (const auto& t : traces) n += t.events.size();
  return n;
}

std::vector<std::string> EventLog::alphabet() const {
  std::unordered_set<std::string> seen;
  for (const auto& t : traces)
    for (const auto& e : t.events) seen.insert(e.activity);
  std::vector<std::string> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

void EventLog::validate() const {
  std::unordered_set<std::string> ids;
  for (const auto& t : traces) {
    if (!ids.insert(t.id).second)
      throw std::invalid_argument("duplicate trace id: " + t.id);
    std::optional<TimestampMs> prev;
    for (const auto& e : t.events) {
      if (e.activity.empty())
        throw std::invalid_argument("empty activity label in trace " + t.id);
      if (e.timestamp && prev && *e.timestamp < *prev)
        throw std::invalid_argument("decreasing timestamps in trace " + t.id);
      if (e.timestamp) prev = e.timestamp;
    }
  }
}

EventStream to_event_stream(const EventLog& log, StreamOrdering ordering) {
  log.validate();

  auto data = std::make_shared<EventStream::Data>();
  data->ordering = ordering;
  data->trace_ids.reserve(log.traces.size());

  std::unordered_map<std::string, std::int32_t> label_ids;
  data->events.reserve(log.total_events());

  for (const auto& trace : log.traces) {
    const auto trace_ord = std::int32_t(data->trace_ids.size());
    data->trace_ids.push_back(trace.id);
    for (const auto& e : trace.events) {
      auto [it, inserted] = label_ids.emplace(e.activity, std::int32_t(data->labels.size()));
      if (inserted) data->labels.push_back(e.activity);
      data->events.push_back(StreamEvent{trace_ord, it->second, e.timestamp});
    }
  }

  if (ordering == StreamOrdering::timestamp) {
    for (std::size_t i = 0; i < data->events.size(); ++i) {
      if (!data->events[i].timestamp) {
        const auto& ev = data->events[i];
        throw std::invalid_argument(
            "timestamp ordering requires timestamps on every event; trace " +
            data->trace_ids[std::size_t(ev.trace)] + " has an event without one");
      }
    }
    // Stable sort keeps (trace order, within-trace order) on ties.
    std::stable_sort(data->events.begin(), data->events.end(),
                     [](const StreamEvent& a, const StreamEvent& b) {
                       return *a.timestamp < *b.timestamp;
                     });
  }

  EventStream s;
  s.data_ = std::move(data);
  s.reversed_ = false;
  return s;
}

EventStream reverse_stream(const EventStream& s) {
  EventStream r = s;
  r.reversed_ = !r.reversed_;
  return r;
}

EventLog stream_to_log(const EventStream& s) {
  EventLog log;
  log.traces.resize(s.trace_count());
  for (std::size_t t = 0; t < s.trace_count(); ++t)
    log.traces[t].id = s.trace_id(std::int32_t(t));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& e = s[i];
    log.traces[std::size_t(e.trace)].events.push_back(
        LogEvent{s.label(e.activity), e.timestamp});
  }
  return log;
}

std::pair<EventLog, EventLog> split_log(const EventLog& log, std::size_t boundary,
                                        StreamOrdering ordering) {
  const std::size_t n = log.total_events();
  if (boundary > n)
    throw std::out_of_range("split boundary " + std::to_string(boundary) +
                            " exceeds event count " + std::to_string(n));

  EventStream s = to_event_stream(log, ordering);
  // Events with stream index < boundary, per trace.
  std::vector<std::size_t> below(log.traces.size(), 0);
  std::vector<std::size_t> total(log.traces.size(), 0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    ++total[std::size_t(s[i].trace)];
    if (i < boundary) ++below[std::size_t(s[i].trace)];
  }

  EventLog left, right;
  for (std::size_t t = 0; t < log.traces.size(); ++t) {
    const std::size_t above = total[t] - below[t];
    if (below[t] >= above)
      left.traces.push_back(log.traces[t]);
    else
      right.traces.push_back(log.traces[t]);
  }
  return {std::move(left), std::move(right)};
}

}  // namespace driftlab
