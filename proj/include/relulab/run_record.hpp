#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace relulab::records {

// One experiment trial: what was configured, what was measured, what passed.
struct RunRecord {
  std::string subcommand;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> measured;
  std::map<std::string, bool> verdicts;
  double wall_ms = 0.0;
  std::string version;

  bool all_pass() const;
  std::string to_json() const;
};

RunRecord record_from_json(const std::string& line);

// FNV-1a over a canonical key=value dump; stable across platforms.
std::uint64_t config_hash(const std::map<std::string, std::string>& config);

// Version string with the built-in constants, so reports are
// self-describing.
std::string version_string();

// CSV summary: header + one row per record.
std::string summary_csv_header();
std::string summary_csv_row(const RunRecord& r);

}  // namespace relulab::records
