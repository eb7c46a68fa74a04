#include "driftlab/csv.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "driftlab/timestamp.hpp"

namespace driftlab {

namespace {

// RFC 4180 record reader; quoted fields may contain commas, quotes ("")
// and newlines. Returns false at end of input.
bool read_record(std::string_view text, std::size_t& pos, std::vector<std::string>& fields) {
  fields.clear();
  if (pos >= text.size()) return false;

  std::string field;
  bool quoted = false;
  for (;;) {
    if (pos >= text.size()) {
      fields.push_back(std::move(field));
      return true;
    }
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
        } else {
          quoted = false;
          ++pos;
        }
      } else {
        field.push_back(c);
        ++pos;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        ++pos;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        ++pos;
        break;
      case '\r':
        if (pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
        [[fallthrough]];
      case '\n':
        ++pos;
        fields.push_back(std::move(field));
        return true;
      default:
        field.push_back(c);
        ++pos;
    }
  }
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

}  // namespace

EventLog parse_csv(std::string_view text, const CsvMapping& mapping) {
  std::size_t pos = 0;
  std::vector<std::string> fields;
  if (!read_record(text, pos, fields))
    return EventLog{};  // empty input: no header, no rows

  auto column_of = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (fields[i] == name) return i;
    throw CsvError("mapped column '" + name + "' not found in header");
  };

  const std::size_t trace_col = column_of(mapping.trace_id);
  const std::size_t activity_col = column_of(mapping.activity);
  std::optional<std::size_t> ts_col;
  if (!mapping.timestamp.empty()) {
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (fields[i] == mapping.timestamp) ts_col = i;
  }

  EventLog log;
  std::unordered_map<std::string, std::size_t> trace_index;
  std::size_t row = 1;  // header is row 1
  while (read_record(text, pos, fields)) {
    ++row;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    const std::size_t needed = std::max(trace_col, activity_col) + 1;
    if (fields.size() < needed)
      throw CsvError("row " + std::to_string(row) + " has " +
                     std::to_string(fields.size()) + " fields, need at least " +
                     std::to_string(needed));

    LogEvent event;
    event.activity = fields[activity_col];
    if (ts_col && *ts_col < fields.size() && !fields[*ts_col].empty()) {
      auto ts = parse_iso8601(fields[*ts_col]);
      if (!ts)
        throw CsvError("row " + std::to_string(row) + ": unparseable timestamp '" +
                       fields[*ts_col] + "'");
      event.timestamp = ts;
    }

    const std::string& trace_id = fields[trace_col];
    auto [it, inserted] = trace_index.emplace(trace_id, log.traces.size());
    if (inserted) log.traces.push_back(Trace{trace_id, {}});
    log.traces[it->second].events.push_back(std::move(event));
  }
  return log;
}

EventLog parse_csv_file(const std::filesystem::path& path, const CsvMapping& mapping) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), mapping);
}

void write_csv(const EventLog& log, std::ostream& out, const CsvMapping& mapping) {
  const bool with_ts = !mapping.timestamp.empty();
  out << csv_quote(mapping.trace_id) << ',' << csv_quote(mapping.activity);
  if (with_ts) out << ',' << csv_quote(mapping.timestamp);
  out << '\n';
  for (const auto& trace : log.traces) {
    for (const auto& e : trace.events) {
      out << csv_quote(trace.id) << ',' << csv_quote(e.activity);
      if (with_ts) {
        out << ',';
        if (e.timestamp) out << format_iso8601(*e.timestamp);
      }
      out << '\n';
    }
  }
}

void write_csv_file(const EventLog& log, const std::filesystem::path& path,
                    const CsvMapping& mapping) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(log, out, mapping);
}

}  // namespace driftlab
