#include "driftlab/xes.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "driftlab/timestamp.hpp"

namespace driftlab {

XesParseError::XesParseError(std::string message, int line_, int column_)
    : std::runtime_error(message + " (line " + std::to_string(line_) + ", column " +
                         std::to_string(column_) + ")"),
      line(line_),
      column(column_) {}

namespace {

// Non-validating scanner for the XML subset XES files use: elements,
// attributes, comments, processing instructions, CDATA. Text content is
// skipped; XES carries data in attributes.
class XmlScanner {
 public:
  struct Attribute {
    std::string name;
    std::string value;
  };

  enum class TokenKind { start_element, end_element, eof };

  struct Token {
    TokenKind kind = TokenKind::eof;
    std::string name;
    std::vector<Attribute> attributes;
    bool self_closing = false;

    const std::string* attr(std::string_view key) const {
      for (const auto& a : attributes)
        if (a.name == key) return &a.value;
      return nullptr;
    }
  };

  explicit XmlScanner(std::string_view text) : text_(text) {}

  int line() const { return line_; }
  int column() const { return column_; }

  [[noreturn]] void fail(const std::string& message) const {
    throw XesParseError(message, line_, column_);
  }

  Token next() {
    for (;;) {
      skip_until('<');
      if (eof()) return Token{};
      const int tag_line = line_, tag_col = column_;
      consume();  // '<'
      if (eof()) fail("unexpected end of input inside markup");
      const char c = peek();
      if (c == '?') {
        skip_past("?>");
        continue;
      }
      if (c == '!') {
        consume();
        if (starts_with("--")) {
          skip_past("-->");
        } else if (starts_with("[CDATA[")) {
          skip_past("]]>");
        } else {
          skip_until('>');  // DOCTYPE and friends
          if (eof()) fail("unterminated declaration");
          consume();
        }
        continue;
      }
      if (c == '/') {
        consume();
        Token t;
        t.kind = TokenKind::end_element;
        t.name = read_name();
        skip_spaces();
        if (eof() || peek() != '>') fail("malformed closing tag </" + t.name);
        consume();
        return t;
      }
      Token t;
      t.kind = TokenKind::start_element;
      t.name = read_name();
      if (t.name.empty())
        throw XesParseError("expected element name after '<'", tag_line, tag_col);
      for (;;) {
        skip_spaces();
        if (eof()) fail("unexpected end of input inside tag <" + t.name);
        if (peek() == '>') {
          consume();
          break;
        }
        if (peek() == '/') {
          consume();
          if (eof() || peek() != '>') fail("malformed self-closing tag <" + t.name);
          consume();
          t.self_closing = true;
          break;
        }
        Attribute a;
        a.name = read_name();
        if (a.name.empty()) fail("expected attribute name in <" + t.name);
        skip_spaces();
        if (eof() || peek() != '=') fail("expected '=' after attribute " + a.name);
        consume();
        skip_spaces();
        if (eof() || (peek() != '"' && peek() != '\''))
          fail("expected quoted value for attribute " + a.name);
        const char quote = peek();
        consume();
        a.value = read_attr_value(quote);
        t.attributes.push_back(std::move(a));
      }
      return t;
    }
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void consume() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  bool starts_with(std::string_view s) {
    if (text_.substr(pos_, s.size()) != s) return false;
    for (std::size_t i = 0; i < s.size(); ++i) consume();
    return true;
  }

  void skip_until(char stop) {
    while (!eof() && peek() != stop) consume();
  }

  void skip_past(std::string_view end) {
    while (!eof()) {
      if (text_.substr(pos_, end.size()) == end) {
        for (std::size_t i = 0; i < end.size(); ++i) consume();
        return;
      }
      consume();
    }
    fail("unterminated '" + std::string(end) + "' construct");
  }

  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n'))
      consume();
  }

  static bool is_name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == ':' || c == '_' || c == '-' || c == '.';
  }

  std::string read_name() {
    std::string out;
    while (!eof() && is_name_char(peek())) {
      out.push_back(peek());
      consume();
    }
    return out;
  }

  std::string read_attr_value(char quote) {
    std::string out;
    for (;;) {
      if (eof()) fail("unterminated attribute value");
      const char c = peek();
      if (c == quote) {
        consume();
        return out;
      }
      if (c == '&') {
        out.push_back(read_entity());
        continue;
      }
      out.push_back(c);
      consume();
    }
  }

  char read_entity() {
    consume();  // '&'
    std::string name;
    while (!eof() && peek() != ';' && name.size() < 12) {
      name.push_back(peek());
      consume();
    }
    if (eof() || peek() != ';') fail("malformed entity reference &" + name);
    consume();
    if (name == "amp") return '&';
    if (name == "lt") return '<';
    if (name == "gt") return '>';
    if (name == "quot") return '"';
    if (name == "apos") return '\'';
    if (!name.empty() && name[0] == '#') {
      const int base = name.size() > 1 && (name[1] == 'x' || name[1] == 'X') ? 16 : 10;
      const char* digits = name.c_str() + (base == 16 ? 2 : 1);
      char* end = nullptr;
      const long code = std::strtol(digits, &end, base);
      if (end && *end == '\0' && code > 0 && code < 128) return char(code);
    }
    fail("unsupported entity &" + name + ";");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

using Token = XmlScanner::Token;

void skip_subtree(XmlScanner& scanner, const std::string& name) {
  int depth = 1;
  while (depth > 0) {
    Token t = scanner.next();
    switch (t.kind) {
      case XmlScanner::TokenKind::start_element:
        if (!t.self_closing) ++depth;
        break;
      case XmlScanner::TokenKind::end_element:
        --depth;
        break;
      case XmlScanner::TokenKind::eof:
        scanner.fail("unexpected end of input inside <" + name + ">");
    }
  }
}

// Reads one <event>; returns false at </trace>.
bool parse_event_or_end(XmlScanner& scanner, Trace& trace, std::size_t trace_ordinal,
                        bool& saw_trace_name) {
  for (;;) {
    Token t = scanner.next();
    if (t.kind == XmlScanner::TokenKind::eof)
      scanner.fail("unexpected end of input inside <trace>");
    if (t.kind == XmlScanner::TokenKind::end_element) {
      if (t.name != "trace") scanner.fail("mismatched closing tag </" + t.name + ">");
      return false;
    }
    if (t.name == "string") {
      const std::string* key = t.attr("key");
      const std::string* value = t.attr("value");
      if (key && value && *key == "concept:name") {
        trace.id = *value;
        saw_trace_name = true;
      }
      if (!t.self_closing) skip_subtree(scanner, t.name);
      continue;
    }
    if (t.name != "event") {
      if (!t.self_closing) skip_subtree(scanner, t.name);
      continue;
    }

    LogEvent event;
    bool saw_activity = false;
    if (!t.self_closing) {
      for (;;) {
        Token a = scanner.next();
        if (a.kind == XmlScanner::TokenKind::eof)
          scanner.fail("unexpected end of input inside <event>");
        if (a.kind == XmlScanner::TokenKind::end_element) {
          if (a.name != "event") scanner.fail("mismatched closing tag </" + a.name + ">");
          break;
        }
        const std::string* key = a.attr("key");
        const std::string* value = a.attr("value");
        if (a.name == "string" && key && value && *key == "concept:name") {
          event.activity = *value;
          saw_activity = true;
        } else if (a.name == "date" && key && value && *key == "time:timestamp") {
          auto ts = parse_iso8601(*value);
          if (!ts) scanner.fail("unparseable time:timestamp '" + *value + "'");
          event.timestamp = ts;
        }
        if (!a.self_closing) skip_subtree(scanner, a.name);
      }
    }
    if (!saw_activity) {
      const std::string which =
          saw_trace_name ? "'" + trace.id + "'" : "#" + std::to_string(trace_ordinal);
      scanner.fail("event without concept:name in trace " + which);
    }
    trace.events.push_back(std::move(event));
    return true;
  }
}

}  // namespace

EventLog parse_xes(std::string_view xml) {
  XmlScanner scanner(xml);

  Token root = scanner.next();
  if (root.kind == XmlScanner::TokenKind::eof)
    scanner.fail("document contains no elements");
  if (root.kind != XmlScanner::TokenKind::start_element || root.name != "log")
    scanner.fail("expected <log> root element, found <" + root.name + ">");

  EventLog log;
  if (root.self_closing) return log;

  for (;;) {
    Token t = scanner.next();
    if (t.kind == XmlScanner::TokenKind::eof)
      scanner.fail("unexpected end of input inside <log>");
    if (t.kind == XmlScanner::TokenKind::end_element) {
      if (t.name != "log") scanner.fail("mismatched closing tag </" + t.name + ">");
      break;
    }
    if (t.name != "trace") {
      if (!t.self_closing) skip_subtree(scanner, t.name);
      continue;
    }

    Trace trace;
    const std::size_t ordinal = log.traces.size();
    bool saw_name = false;
    if (!t.self_closing) {
      while (parse_event_or_end(scanner, trace, ordinal, saw_name)) {
      }
    }
    if (!saw_name) trace.id = "trace_" + std::to_string(ordinal);
    log.traces.push_back(std::move(trace));
  }
  return log;
}

EventLog parse_xes_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_xes(buffer.str());
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

void write_xes(const EventLog& log, std::ostream& out) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<log xes.version=\"1.0\" xes.features=\"\">\n";
  for (const auto& trace : log.traces) {
    out << "  <trace>\n";
    out << "    <string key=\"concept:name\" value=\"" << xml_escape(trace.id) << "\"/>\n";
    for (const auto& e : trace.events) {
      out << "    <event>\n";
      out << "      <string key=\"concept:name\" value=\"" << xml_escape(e.activity)
          << "\"/>\n";
      if (e.timestamp)
        out << "      <date key=\"time:timestamp\" value=\"" << format_iso8601(*e.timestamp)
            << "\"/>\n";
      out << "    </event>\n";
    }
    out << "  </trace>\n";
  }
  out << "</log>\n";
}

void write_xes_file(const EventLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_xes(log, out);
}

}  // namespace driftlab
