#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace torusfio {

/// One flat structured record; keys keep insertion order.
class Record {
 public:
  using Value = std::variant<std::string, double, std::int64_t, std::uint64_t, bool, std::vector<double>>;

  Record() = default;
  explicit Record(std::string schema) { set("schema", std::move(schema)); }

  Record& set(const std::string& key, Value v);
  Record& set(const std::string& key, const char* v) { return set(key, Value(std::string(v))); }
  Record& set(const std::string& key, int v) { return set(key, Value(static_cast<std::int64_t>(v))); }
  Record& set(const std::string& key, double v) { return set(key, Value(v)); }
  Record& set(const std::string& key, bool v) { return set(key, Value(v)); }
  Record& set(const std::string& key, std::int64_t v) { return set(key, Value(v)); }
  Record& set(const std::string& key, std::uint64_t v) { return set(key, Value(v)); }
  Record& set(const std::string& key, const std::string& v) { return set(key, Value(v)); }

  const std::vector<std::pair<std::string, Value>>& fields() const { return fields_; }
  const Value* find(const std::string& key) const;

  /// Single-line JSON object; reals use 17 significant digits, non-finite reals
  /// become null.
  std::string to_json() const;

 private:
  std::vector<std::pair<std::string, Value>> fields_;
};

std::string to_jsonl(const std::vector<Record>& records);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
};

/// %.17g, "inf"/"-inf"/"nan" for non-finite values.
std::string csv_real(double v);

}  // namespace torusfio
