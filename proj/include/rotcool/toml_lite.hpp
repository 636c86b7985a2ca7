#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Reader and writer for the TOML subset used by run configurations: [table]
// headers, bare keys, booleans, integers, floats, basic strings, arrays of
// those (may span lines), and # comments.
namespace rotcool::toml {

class Value {
public:
  using Array = std::vector<Value>;
  using Storage = std::variant<bool, std::int64_t, double, std::string, Array>;

  Value() = default;
  Value(bool b) : data_(b) {}
  Value(std::int64_t i) : data_(i) {}
  Value(int i) : data_(static_cast<std::int64_t>(i)) {}
  Value(double d) : data_(d) {}
  Value(std::string s) : data_(std::move(s)) {}
  Value(const char* s) : data_(std::string(s)) {}
  Value(Array a) : data_(std::move(a)) {}

  const Storage& data() const noexcept { return data_; }
  bool is_number() const noexcept;
  std::string_view type_name() const noexcept;

  friend bool operator==(const Value&, const Value&) = default;

private:
  Storage data_;
};

using Table = std::map<std::string, Value>;

// Tables keyed by name; "" holds the top-level keys.
struct Document {
  std::map<std::string, Table> tables;

  const Value* find(std::string_view table, std::string_view key) const;
  // "table.key" or "key"
  const Value* find(std::string_view dotted) const;
  void set(std::string_view dotted, Value v);

  friend bool operator==(const Document&, const Document&) = default;
};

// Throws ValidationError naming the source and line on malformed input.
Document parse(std::string_view text, std::string_view source = "config");
std::string serialize(const Document& doc);

}  // namespace rotcool::toml
