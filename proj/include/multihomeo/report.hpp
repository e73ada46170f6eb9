#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace multihomeo {

using ordered_json = nlohmann::ordered_json;

/// One named inequality (or structural property) with its measured slack.
/// `hard` checks decide the scenario's pass flag; soft checks are
/// informational.  `skipped` marks checks that could not be measured at
/// double resolution; they never count as passes.
struct CheckRecord {
  std::string name;
  double p = 0;           // 0 when not p-specific
  int n_grid = 0;         // 0 when not grid-specific
  std::int64_t index = -1;  // rank nu, frequency n, ... ; -1 when unused
  double measured = 0;
  double bound = 0;
  bool pass = false;
  bool hard = true;
  bool skipped = false;
  std::string note;

  ordered_json to_json() const {
    ordered_json j;
    j["name"] = name;
    j["p"] = p;
    j["N"] = n_grid;
    j["index"] = index;
    j["measured"] = measured;
    j["bound"] = bound;
    j["pass"] = pass;
    j["hard"] = hard;
    j["skipped"] = skipped;
    j["note"] = note;
    return j;
  }
};

struct EstimateRecord {
  std::string label;
  double p = 0;
  int n_grid = 0;
  std::int64_t index = -1;
  double lower = 0;
  double upper = 0;
  std::uint64_t seed = 0;
  std::string method_lower;
  std::string method_upper;

  ordered_json to_json() const {
    ordered_json j;
    j["label"] = label;
    j["p"] = p;
    j["N"] = n_grid;
    j["index"] = index;
    j["lower"] = lower;
    j["upper"] = upper;
    j["seed"] = seed;
    j["method_lower"] = method_lower;
    j["method_upper"] = method_upper;
    return j;
  }
};

struct RunReport {
  std::string scenario;
  ordered_json config_echo;
  std::vector<CheckRecord> checks;
  std::vector<EstimateRecord> estimates;
  ordered_json extra = ordered_json::object();
  double wall_ms = 0;

  static constexpr const char* schema = "multihomeo-report/1";

  bool pass() const {
    for (const auto& c : checks)
      if (c.hard && !c.skipped && !c.pass) return false;
    return true;
  }

  void add_check(CheckRecord c) { checks.push_back(std::move(c)); }

  ordered_json to_json(bool with_timing = true) const {
    ordered_json j;
    j["schema"] = schema;
    j["scenario"] = scenario;
    j["pass"] = pass();
    j["config"] = config_echo;
    j["checks"] = ordered_json::array();
    for (const auto& c : checks) j["checks"].push_back(c.to_json());
    j["estimates"] = ordered_json::array();
    for (const auto& e : estimates) j["estimates"].push_back(e.to_json());
    j["extra"] = extra;
    if (with_timing) j["timing_ms"] = wall_ms;
    return j;
  }

  /// Canonical byte form for reproducibility comparisons: everything except
  /// wall-clock timing.
  std::string canonical_string() const { return to_json(false).dump(); }

  std::string csv() const {
    std::ostringstream os;
    os << "kind,label,p,N,index,value,bound,pass,seed,note\n";
    auto field = [](const std::string& s) {
      std::string out = s;
      for (auto& ch : out)
        if (ch == ',') ch = ';';
      return out;
    };
    for (const auto& c : checks) {
      os << "check," << field(c.name) << "," << c.p << "," << c.n_grid << "," << c.index << ","
         << c.measured << "," << c.bound << "," << (c.skipped ? "skipped" : (c.pass ? "1" : "0"))
         << ",," << field(c.note) << "\n";
    }
    for (const auto& e : estimates) {
      os << "estimate," << field(e.label) << "," << e.p << "," << e.n_grid << "," << e.index << ","
         << e.lower << "," << e.upper << ",," << e.seed << ","
         << field(e.method_lower + "/" + e.method_upper) << "\n";
    }
    return os.str();
  }

  void write_files(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
      std::ofstream f(fs::path(dir) / "report.json");
      f << to_json(true).dump(2) << "\n";
    }
    {
      std::ofstream f(fs::path(dir) / "results.csv");
      f << csv();
    }
  }
};

}  // namespace multihomeo
