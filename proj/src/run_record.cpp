#include "relulab/run_record.hpp"

#include <json.hpp>
#include <sstream>

#include "relulab/gaussian_stats.hpp"
#include "relulab/hermite.hpp"

namespace relulab::records {

bool RunRecord::all_pass() const {
  for (const auto& [name, ok] : verdicts)
    if (!ok) return false;
  return true;
}

std::string RunRecord::to_json() const {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["measured"] = measured;
  j["verdicts"] = verdicts;
  j["wall_ms"] = wall_ms;
  j["version"] = version;
  return j.dump();
}

RunRecord record_from_json(const std::string& line) {
  const nlohmann::json j = nlohmann::json::parse(line);
  RunRecord r;
  r.subcommand = j.at("subcommand").get<std::string>();
  r.config_hash = j.at("config_hash").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.measured = j.at("measured").get<std::map<std::string, double>>();
  r.verdicts = j.at("verdicts").get<std::map<std::string, bool>>();
  r.wall_ms = j.at("wall_ms").get<double>();
  r.version = j.at("version").get<std::string>();
  return r;
}

std::uint64_t config_hash(const std::map<std::string, std::string>& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    h ^= 0x1e;  // record separator
    h *= 0x100000001b3ull;
  };
  for (const auto& [key, value] : config) {
    feed(key);
    feed(value);
  }
  return h;
}

std::string version_string() {
  std::ostringstream out;
  out.precision(15);
  out << "relu-lab 1.0 (loss-floor=" << gstats::kOptimalRandomLabelLoss
      << ", c2=" << hermite::relu_parity_inner_product(2, 42) << ")";
  return out.str();
}

std::string summary_csv_header() {
  return "subcommand,seed,config_hash,all_pass,wall_ms";
}

std::string summary_csv_row(const RunRecord& r) {
  std::ostringstream out;
  out << r.subcommand << ',' << r.seed << ',' << r.config_hash << ','
      << (r.all_pass() ? 1 : 0) << ',' << r.wall_ms;
  return out.str();
}

}  // namespace relulab::records
