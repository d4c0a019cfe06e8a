/**
 * This code is part of iondet.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "iondet/core.hpp"

namespace iondet::harness {

/// Doubles are emitted with 17 significant digits so that output is
/// bit-exact round-trippable and byte-identical across runs.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Ordered key-value block echoed at the top of every output file.
class Metadata {
public:
  void add(std::string key, std::string value) {
    entries_.emplace_back(std::move(key), std::move(value));
  }
  void add(std::string key, double value) {
    add(std::move(key), format_double(value));
  }
  void add(std::string key, std::int64_t value) {
    add(std::move(key), std::to_string(value));
  }
  void add(std::string key, std::uint64_t value) {
    add(std::move(key), std::to_string(value));
  }
  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

inline std::string format_cell(const Cell& cell) {
  if (std::holds_alternative<double>(cell))
    return format_double(std::get<double>(cell));
  if (std::holds_alternative<std::int64_t>(cell))
    return std::to_string(std::get<std::int64_t>(cell));
  return std::get<std::string>(cell);
}

/// CSV with a leading '#'-prefixed metadata block, comma separators and
/// '\n' line endings.
inline void write_csv(std::ostream& os, const Metadata& meta,
                      const Table& table) {
  for (const auto& [k, v] : meta.entries())
    os << "# " << k << "=" << v << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    os << (c ? "," : "") << table.columns[c];
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      os << (c ? "," : "") << format_cell(row[c]);
    os << "\n";
  }
}

inline std::string csv_string(const Metadata& meta, const Table& table) {
  std::ostringstream os;
  write_csv(os, meta, table);
  return os.str();
}

inline nlohmann::ordered_json metadata_json(const Metadata& meta) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : meta.entries())
    j[k] = v;
  return j;
}

inline nlohmann::ordered_json table_json(const Metadata& meta,
                                         const Table& table) {
  nlohmann::ordered_json j;
  j["metadata"] = metadata_json(meta);
  j["columns"] = table.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& cell : row) {
      if (std::holds_alternative<double>(cell))
        r.push_back(std::get<double>(cell));
      else if (std::holds_alternative<std::int64_t>(cell))
        r.push_back(std::get<std::int64_t>(cell));
      else
        r.push_back(std::get<std::string>(cell));
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline void write_json(std::ostream& os, const nlohmann::ordered_json& j) {
  os << j.dump(2) << "\n";
}

/// Complex matrix as nested arrays of [re, im] pairs.
inline nlohmann::ordered_json matrix_json(const CMatrix& m) {
  auto rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace iondet::harness
