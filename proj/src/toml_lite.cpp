#include "rotcool/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "rotcool/errors.hpp"

namespace rotcool::toml {

bool Value::is_number() const noexcept {
  return std::holds_alternative<std::int64_t>(data_) || std::holds_alternative<double>(data_);
}

std::string_view Value::type_name() const noexcept {
  switch (data_.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "float";
    case 3: return "string";
    default: return "array";
  }
}

const Value* Document::find(std::string_view table, std::string_view key) const {
  const auto t = tables.find(std::string(table));
  if (t == tables.end()) return nullptr;
  const auto v = t->second.find(std::string(key));
  return v == t->second.end() ? nullptr : &v->second;
}

const Value* Document::find(std::string_view dotted) const {
  const auto dot = dotted.rfind('.');
  if (dot == std::string_view::npos) return find("", dotted);
  return find(dotted.substr(0, dot), dotted.substr(dot + 1));
}

void Document::set(std::string_view dotted, Value v) {
  const auto dot = dotted.rfind('.');
  if (dot == std::string_view::npos) {
    tables[""][std::string(dotted)] = std::move(v);
  } else {
    tables[std::string(dotted.substr(0, dot))][std::string(dotted.substr(dot + 1))] = std::move(v);
  }
}

namespace {

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class Parser {
public:
  Parser(std::string_view text, std::string_view source) : s_(text), source_(source) {}

  Document run() {
    Document doc;
    doc.tables[""];
    std::string table;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        ++pos_;
        skip_inline_space();
        table = key();
        skip_inline_space();
        expect(']');
        if (doc.tables.count(table) && !doc.tables[table].empty()) fail("table [" + table + "] defined twice");
        doc.tables[table];
      } else {
        const std::string k = key();
        skip_inline_space();
        expect('=');
        skip_inline_space();
        Value v = value();
        auto& t = doc.tables[table];
        if (t.count(k)) fail("key '" + k + "' defined twice");
        t.emplace(k, std::move(v));
      }
      end_of_line();
    }
    return doc;
  }

private:
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError(fmt::format("{}:{}", source_, line_), what);
  }

  void expect(char c) {
    if (peek() != c) fail(fmt::format("expected '{}'", c));
    ++pos_;
  }

  void skip_inline_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!at_end() && peek() != '\n') ++pos_;
    }
  }

  void newline() {
    if (peek() == '\r') ++pos_;
    if (peek() == '\n') {
      ++pos_;
      ++line_;
    }
  }

  void skip_blank_lines() {
    while (!at_end()) {
      skip_inline_space();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        newline();
      } else {
        break;
      }
    }
  }

  // Whitespace, comments and newlines inside arrays.
  void skip_array_space() {
    while (!at_end()) {
      skip_inline_space();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        newline();
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_inline_space();
    skip_comment();
    if (at_end()) return;
    if (peek() != '\n' && peek() != '\r') fail("unexpected trailing characters");
    newline();
  }

  std::string key() {
    std::string out;
    while (true) {
      const std::size_t start = pos_;
      while (!at_end() && is_bare_key_char(peek())) ++pos_;
      if (pos_ == start) fail("expected a bare key");
      out.append(s_.substr(start, pos_ - start));
      if (peek() != '.') break;
      out.push_back('.');
      ++pos_;
    }
    return out;
  }

  Value value() {
    const char c = peek();
    if (c == '"') return string();
    if (c == '[') return array();
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return Value(true);
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return Value(false);
    }
    return number();
  }

  Value string() {
    expect('"');
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      const char e = at_end() ? '\0' : s_[pos_++];
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: fail(fmt::format("unsupported escape '\\{}'", e));
      }
    }
    return Value(std::move(out));
  }

  Value array() {
    expect('[');
    Value::Array items;
    skip_array_space();
    while (peek() != ']') {
      items.push_back(value());
      skip_array_space();
      if (peek() == ',') {
        ++pos_;
        skip_array_space();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
    ++pos_;
    return Value(std::move(items));
  }

  Value number() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' ||
                         peek() == '-' || peek() == '.' || peek() == '_')) {
      ++pos_;
    }
    std::string token;
    for (const char c : s_.substr(start, pos_ - start)) {
      if (c != '_') token.push_back(c);
    }
    if (token.empty()) fail("expected a value");
    if (token == "inf" || token == "+inf" || token == "-inf" || token == "nan") {
      fail("non-finite numbers are not accepted");
    }
    const bool is_float = token.find_first_of(".eE") != std::string::npos;
    const char* first = token.data() + (token[0] == '+' ? 1 : 0);
    const char* last = token.data() + token.size();
    if (is_float) {
      double d = 0.0;
      const auto r = std::from_chars(first, last, d);
      if (r.ec != std::errc() || r.ptr != last) fail("malformed float '" + token + "'");
      return Value(d);
    }
    std::int64_t i = 0;
    const auto r = std::from_chars(first, last, i);
    if (r.ec != std::errc() || r.ptr != last) fail("malformed value '" + token + "'");
    return Value(i);
  }

  std::string_view s_;
  std::string_view source_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

std::string format_value(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return fmt::format("{}", x);
        } else if constexpr (std::is_same_v<T, double>) {
          std::string s = fmt::format("{}", x);  // shortest round-trip form
          if (s.find_first_of(".eE") == std::string::npos) s += ".0";
          return s;
        } else if constexpr (std::is_same_v<T, std::string>) {
          std::string out = "\"";
          for (const char c : x) {
            switch (c) {
              case '"': out += "\\\""; break;
              case '\\': out += "\\\\"; break;
              case '\n': out += "\\n"; break;
              case '\t': out += "\\t"; break;
              default: out.push_back(c);
            }
          }
          return out + "\"";
        } else {
          std::string out = "[";
          for (std::size_t i = 0; i < x.size(); ++i) {
            if (i) out += ", ";
            out += format_value(x[i]);
          }
          return out + "]";
        }
      },
      v.data());
}

}  // namespace

Document parse(std::string_view text, std::string_view source) { return Parser(text, source).run(); }

std::string serialize(const Document& doc) {
  std::string out;
  if (const auto root = doc.tables.find(""); root != doc.tables.end()) {
    for (const auto& [k, v] : root->second) out += fmt::format("{} = {}\n", k, format_value(v));
  }
  for (const auto& [name, table] : doc.tables) {
    if (name.empty() || table.empty()) continue;
    out += fmt::format("\n[{}]\n", name);
    for (const auto& [k, v] : table) out += fmt::format("{} = {}\n", k, format_value(v));
  }
  return out;
}

}  // namespace rotcool::toml
