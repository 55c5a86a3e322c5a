#include "torusfio/records.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

namespace torusfio {

Record& Record::set(const std::string& key, Value v) {
  for (auto& [k, old] : fields_)
    if (k == key) {
      old = std::move(v);
      return *this;
    }
  fields_.emplace_back(key, std::move(v));
  return *this;
}

const Record::Value* Record::find(const std::string& key) const {
  for (const auto& [k, v] : fields_)
    if (k == key) return &v;
  return nullptr;
}

namespace {

// nlohmann prints doubles with the shortest round-trip form; we want %.17g, so
// reals are spliced in as raw text.
std::string real_json(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

std::string Record::to_json() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : fields_) {
    if (!first) out += ',';
    first = false;
    out += nlohmann::json(k).dump();
    out += ':';
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, double>) {
            out += real_json(x);
          } else if constexpr (std::is_same_v<T, std::vector<double>>) {
            out += '[';
            for (std::size_t i = 0; i < x.size(); ++i) {
              if (i) out += ',';
              out += real_json(x[i]);
            }
            out += ']';
          } else {
            out += nlohmann::json(x).dump();
          }
        },
        v);
  }
  out += '}';
  return out;
}

std::string to_jsonl(const std::vector<Record>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.to_json();
    out += '\n';
  }
  return out;
}

std::string csv_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string CsvTable::to_string() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cells[i]);
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

}  // namespace torusfio
