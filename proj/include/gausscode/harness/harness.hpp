#pragma once

// Experiment harness: configuration, deterministic trial execution, report
// assembly, CSV emission, schema validation, and report merging.
//
// Determinism contract: trial t draws every sample from a private substream
// seeded by derive_seed(master_seed, <experiment name>, t + trial_offset).
// Worker count and scheduling therefore never change any trial's record, and
// re-running a config reproduces trials.csv byte for byte.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gausscode/core.hpp"

namespace gausscode::harness {

using json = nlohmann::json;

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "concentration", "code-run", "iid-sweep", "uncertainty", "pgm", "typicality"};
  return names;
}

struct ChannelSpec {
  std::string family = "identity";  // identity|dephasing|depolarizing|amplitude_damping|erasure
  double param = 0.0;
  int dim = 2;     // single-copy input dimension
  int copies = 1;  // tensor-power copies of the channel
};

struct CodeSpec {
  int N = 2;            // codewords per draw
  double delta = 0.1;   // typicality radius where applicable
  double eta = 0.01;    // cross-overlap tolerance fed to the defect parameter
  int divisor = 6;      // exponent divisor in the defect parameter (6 or 4)
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t master_seed = 1;
  int trials = 1;
  int trial_offset = 0;
  int workers = 0;  // 0 = auto
  std::string out = "";
  ChannelSpec channel;
  CodeSpec code;
  json params = json::object();  // experiment-specific knobs
};

inline json to_json(const ExperimentConfig& c) {
  return json{{"experiment", c.experiment},
              {"master_seed", c.master_seed},
              {"trials", c.trials},
              {"trial_offset", c.trial_offset},
              {"workers", c.workers},
              {"out", c.out},
              {"channel", json{{"family", c.channel.family},
                               {"param", c.channel.param},
                               {"dim", c.channel.dim},
                               {"copies", c.channel.copies}}},
              {"code", json{{"N", c.code.N},
                            {"delta", c.code.delta},
                            {"eta", c.code.eta},
                            {"divisor", c.code.divisor}}},
              {"params", c.params}};
}

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.experiment = j.at("experiment").get<std::string>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    if (j.contains("trial_offset")) c.trial_offset = j.at("trial_offset").get<int>();
    if (j.contains("workers")) c.workers = j.at("workers").get<int>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("channel")) {
      const json& ch = j.at("channel");
      if (ch.contains("family")) c.channel.family = ch.at("family").get<std::string>();
      if (ch.contains("param")) c.channel.param = ch.at("param").get<double>();
      if (ch.contains("dim")) c.channel.dim = ch.at("dim").get<int>();
      if (ch.contains("copies")) c.channel.copies = ch.at("copies").get<int>();
    }
    if (j.contains("code")) {
      const json& co = j.at("code");
      if (co.contains("N")) c.code.N = co.at("N").get<int>();
      if (co.contains("delta")) c.code.delta = co.at("delta").get<double>();
      if (co.contains("eta")) c.code.eta = co.at("eta").get<double>();
      if (co.contains("divisor")) c.code.divisor = co.at("divisor").get<int>();
    }
    if (j.contains("params")) {
      if (!j.at("params").is_object()) throw config_error("'params' must be an object");
      c.params = j.at("params");
    }
  } catch (const json::exception& e) {
    throw config_error(std::string("malformed config: ") + e.what());
  }
  return c;
}

inline void validate_config(const ExperimentConfig& c) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    throw config_error("unknown experiment '" + c.experiment + "'");
  if (c.trials < 1) throw config_error("trials must be >= 1");
  if (c.trial_offset < 0) throw config_error("trial_offset must be >= 0");
  if (c.workers < 0) throw config_error("workers must be >= 0");
  if (c.code.divisor != 6 && c.code.divisor != 4)
    throw config_error("code.divisor must be 6 or 4");
  if (c.channel.dim < 1 || c.channel.copies < 1)
    throw config_error("channel.dim and channel.copies must be >= 1");
}

// Applies a `--set key=value` override with a dotted path (e.g. channel.dim=64).
// The value text is parsed as JSON when possible, else taken as a string.
inline void apply_override(json& config, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw config_error("override must look like key=value: '" + spec + "'");
  const std::string path = spec.substr(0, eq);
  const std::string text = spec.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw config_error("empty key segment in override '" + spec + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (!node->is_object() && !node->is_null())
      throw config_error("override path '" + path + "' descends into a non-object");
    start = dot + 1;
  }
}

// ---------------------------------------------------------------------------
// Trial records and reports
// ---------------------------------------------------------------------------

// One executed trial. `values` keeps insertion order so CSV rows are stable.
struct TrialRecord {
  int trial = 0;
  bool failed = false;
  std::string error;
  std::vector<std::pair<std::string, double>> values;

  void put(const std::string& name, double v) { values.emplace_back(name, v); }
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialRecord> trials;
  json aggregates = json::object();  // summary statistics over trials
  json bounds = json::object();      // theoretical quantities the run is audited against
  json flags = json::object();       // named booleans; `pass` is their conjunction
  bool pass = false;
  double wall_clock_s = 0.0;
};

inline json to_json(const TrialRecord& t) {
  json values = json::object();
  for (const auto& [name, v] : t.values) values[name] = v;
  return json{{"trial", t.trial}, {"failed", t.failed}, {"error", t.error},
              {"values", std::move(values)}};
}

inline json to_json(const ExperimentReport& r) {
  json trials = json::array();
  for (const TrialRecord& t : r.trials) trials.push_back(to_json(t));
  return json{{"config", to_json(r.config)},
              {"trials", std::move(trials)},
              {"aggregates", r.aggregates},
              {"bounds", r.bounds},
              {"flags", r.flags},
              {"pass", r.pass},
              {"wall_clock_s", r.wall_clock_s},
              {"library_version", std::string(library_version)}};
}

// ---------------------------------------------------------------------------
// Schema validation
// ---------------------------------------------------------------------------

namespace detail {

inline void require(bool ok, const std::string& what, std::string* why) {
  if (!ok && why && why->empty()) *why = what;
}

inline bool keys_exactly(const json& obj, const std::vector<std::string>& keys,
                         const std::string& where, std::string* why) {
  if (!obj.is_object()) {
    require(false, where + " is not an object", why);
    return false;
  }
  for (const auto& k : keys)
    if (!obj.contains(k)) {
      require(false, where + " is missing field '" + k + "'", why);
      return false;
    }
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
      require(false, where + " has unknown field '" + it.key() + "'", why);
      return false;
    }
  return true;
}

}  // namespace detail

// Strict structural validation of a report document: exact field sets at every
// fixed level (unknown fields are errors), correct JSON types throughout.
// Mirrors schemas/report.schema.json.
inline bool validate_report_schema(const json& r, std::string* why = nullptr) {
  using detail::keys_exactly;
  using detail::require;
  std::string local;
  std::string* w = why ? why : &local;

  if (!keys_exactly(r, {"config", "trials", "aggregates", "bounds", "flags", "pass",
                        "wall_clock_s", "library_version"}, "report", w))
    return false;
  if (!keys_exactly(r.at("config"),
                    {"experiment", "master_seed", "trials", "trial_offset", "workers",
                     "out", "channel", "code", "params"}, "config", w))
    return false;
  if (!keys_exactly(r.at("config").at("channel"), {"family", "param", "dim", "copies"},
                    "config.channel", w))
    return false;
  if (!keys_exactly(r.at("config").at("code"), {"N", "delta", "eta", "divisor"},
                    "config.code", w))
    return false;

  const json& cfg = r.at("config");
  require(cfg.at("experiment").is_string(), "config.experiment must be a string", w);
  require(cfg.at("master_seed").is_number_integer() || cfg.at("master_seed").is_number_unsigned(),
          "config.master_seed must be an integer", w);
  for (const char* k : {"trials", "trial_offset", "workers"})
    require(cfg.at(k).is_number_integer() || cfg.at(k).is_number_unsigned(),
            std::string("config.") + k + " must be an integer", w);
  require(cfg.at("out").is_string(), "config.out must be a string", w);
  require(cfg.at("params").is_object(), "config.params must be an object", w);
  if (!w->empty()) return false;

  if (!r.at("trials").is_array()) {
    require(false, "trials must be an array", w);
    return false;
  }
  for (const json& t : r.at("trials")) {
    if (!keys_exactly(t, {"trial", "failed", "error", "values"}, "trial record", w)) return false;
    require(t.at("trial").is_number_integer() || t.at("trial").is_number_unsigned(),
            "trial.trial must be an integer", w);
    require(t.at("failed").is_boolean(), "trial.failed must be a boolean", w);
    require(t.at("error").is_string(), "trial.error must be a string", w);
    if (!t.at("values").is_object()) {
      require(false, "trial.values must be an object", w);
      return false;
    }
    for (auto it = t.at("values").begin(); it != t.at("values").end(); ++it)
      require(it.value().is_number(), "trial value '" + it.key() + "' must be a number", w);
    if (!w->empty()) return false;
  }

  require(r.at("aggregates").is_object(), "aggregates must be an object", w);
  require(r.at("bounds").is_object(), "bounds must be an object", w);
  if (!r.at("flags").is_object()) {
    require(false, "flags must be an object", w);
    return false;
  }
  for (auto it = r.at("flags").begin(); it != r.at("flags").end(); ++it)
    require(it.value().is_boolean(), "flag '" + it.key() + "' must be a boolean", w);
  require(r.at("pass").is_boolean(), "pass must be a boolean", w);
  require(r.at("wall_clock_s").is_number(), "wall_clock_s must be a number", w);
  require(r.at("library_version").is_string(), "library_version must be a string", w);
  return w->empty();
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

// Long-format rows (trial, metric, value), trials ascending, metrics in each
// record's insertion order. %.17g round-trips doubles exactly, so equal runs
// produce byte-identical files.
inline std::string trials_csv(const std::vector<TrialRecord>& trials) {
  std::string out = "trial,metric,value\n";
  char buf[64];
  for (const TrialRecord& t : trials) {
    if (t.failed) {
      out += std::to_string(t.trial);
      out += ",failed,1\n";
      continue;
    }
    for (const auto& [name, v] : t.values) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out += std::to_string(t.trial);
      out += ',';
      out += name;
      out += ',';
      out += buf;
      out += '\n';
    }
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Parallel trial execution
// ---------------------------------------------------------------------------

// Runs `fn(trial_index)` for trial_offset <= t < trial_offset + trials on a
// fixed pool. Exceptions inside a trial mark that record failed; other trials
// proceed (crash isolation).
template <typename Fn>
std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg, Fn&& fn) {
  const int n = cfg.trials;
  std::vector<TrialRecord> records(static_cast<std::size_t>(n));
  int workers = cfg.workers > 0 ? cfg.workers
                                : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, 16);
  workers = std::min(workers, n);

  std::atomic<int> next{0};
  auto body = [&]() {
    while (true) {
      const int slot = next.fetch_add(1);
      if (slot >= n) return;
      const int t = cfg.trial_offset + slot;
      TrialRecord rec;
      rec.trial = t;
      try {
        fn(t, rec);
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
        rec.values.clear();
      } catch (...) {
        rec.failed = true;
        rec.error = "unknown error";
        rec.values.clear();
      }
      records[static_cast<std::size_t>(slot)] = std::move(rec);
    }
  };

  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(body);
    for (std::thread& th : pool) th.join();
  }
  return records;
}

// ---------------------------------------------------------------------------
// Aggregation helpers
// ---------------------------------------------------------------------------

namespace detail {

inline std::optional<double> value_of(const TrialRecord& t, const std::string& name) {
  for (const auto& [k, v] : t.values)
    if (k == name) return v;
  return std::nullopt;
}

inline std::vector<double> collect(const std::vector<TrialRecord>& trials,
                                   const std::string& name) {
  std::vector<double> out;
  for (const TrialRecord& t : trials) {
    if (t.failed) continue;
    if (auto v = value_of(t, name)) out.push_back(*v);
  }
  return out;
}

inline int count_failed(const std::vector<TrialRecord>& trials) {
  int n = 0;
  for (const TrialRecord& t : trials) n += t.failed ? 1 : 0;
  return n;
}

}  // namespace detail

}  // namespace gausscode::harness
