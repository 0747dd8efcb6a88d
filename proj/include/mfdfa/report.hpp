#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mfdfa/config.hpp"

namespace mfdfa {

// ============================================================================
// Deterministic report assembly
// ============================================================================

// Shortest round-trip decimal form; deterministic for a given binary.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// FNV-1a 64-bit, used to fingerprint input files in report headers
// (identification, not cryptography).
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// A report is a config-stamped bundle of named tables with pre-stringified
// cells. Everything except the generated_at line is deterministic for a
// given (input bytes, config, seed).
struct Report {
  std::string command;
  std::string input;
  std::string input_digest;   // "fnv1a64:<hex>" or "-"
  std::string generated_at;   // RFC 3339 UTC; excluded from determinism checks
  AnalysisConfig config;
  std::vector<std::string> notes;

  struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
  };
  std::vector<Table> tables;

  Table& add_table(std::string name, std::vector<std::string> columns) {
    tables.push_back({std::move(name), std::move(columns), {}});
    return tables.back();
  }
};

inline std::string render_csv(const Report& r) {
  std::string out;
  out += "# mfdfa-report v1\n";
  out += "# command: " + r.command + "\n";
  out += "# generated_at: " + r.generated_at + "\n";
  out += "# input: " + (r.input.empty() ? "-" : r.input) + "\n";
  out += "# input_digest: " + r.input_digest + "\n";
  out += "# config: " + r.config.echo() + "\n";
  for (const auto& n : r.notes) out += "# note: " + n + "\n";
  for (const auto& t : r.tables) {
    out += "# table: " + t.name + "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      if (c) out += ',';
      out += t.columns[c];
    }
    out += '\n';
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ',';
        out += row[c];
      }
      out += '\n';
    }
  }
  return out;
}

inline std::string render_json(const Report& r) {
  nlohmann::ordered_json j;
  j["report"] = "mfdfa-report v1";
  j["command"] = r.command;
  j["generated_at"] = r.generated_at;
  j["input"] = r.input.empty() ? "-" : r.input;
  j["input_digest"] = r.input_digest;
  j["config"] = r.config.echo();
  j["notes"] = r.notes;
  nlohmann::ordered_json tables = nlohmann::ordered_json::object();
  for (const auto& t : r.tables) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t c = 0; c < t.columns.size() && c < row.size(); ++c)
        obj[t.columns[c]] = row[c];
      rows.push_back(std::move(obj));
    }
    tables[t.name] = std::move(rows);
  }
  j["tables"] = std::move(tables);
  return j.dump(2) + "\n";
}

}  // namespace mfdfa
