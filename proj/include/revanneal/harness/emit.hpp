#pragma once

// Column-ordered result tables and their CSV / JSON-lines serialization.

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "revanneal/errors.hpp"

namespace revanneal::harness {

using Cell = std::variant<double, long long, std::string, bool>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
      throw std::logic_error("table " + name + ": row width " + std::to_string(row.size()) + " != " +
                             std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
  }
};

enum class Format { csv, jsonl };

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "jsonl") return Format::jsonl;
  throw ConfigError("config key 'format' must be csv or jsonl, got " + s);
}

/// 17 significant digits; non-finite values as inf, -inf and nan.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const Cell& c) {
  struct {
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const {
      if (v.find_first_of(",\"\n") == std::string::npos) return v;
      std::string q = "\"";
      for (char ch : v) {
        if (ch == '"') q += '"';
        q += ch;
      }
      return q + "\"";
    }
  } visitor;
  return std::visit(visitor, c);
}

inline std::string json_field(const Cell& c) {
  struct {
    std::string operator()(double v) const { return std::isfinite(v) ? format_double(v) : "null"; }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const { return nlohmann::json(v).dump(); }
  } visitor;
  return std::visit(visitor, c);
}

inline std::string render(const Table& t, Format format) {
  std::string out;
  if (format == Format::csv) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
      out += '\n';
    }
    return out;
  }
  for (const auto& row : t.rows) {
    out += '{';
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += (i ? "," : "") + nlohmann::json(t.columns[i]).dump() + ":" + json_field(row[i]);
    }
    out += "}\n";
  }
  return out;
}

inline std::string file_name(const Table& t, Format format) {
  return t.name + (format == Format::csv ? ".csv" : ".jsonl");
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace revanneal::harness
