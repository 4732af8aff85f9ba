#pragma once

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <fcntl.h>
#include <unistd.h>

#include "json.hpp"
#include "qmis/common.hpp"

namespace qmis {

using Json = nlohmann::ordered_json;

// One experiment = one flat key/value document. Unknown keys are rejected so
// a typo never silently changes an experiment.
struct ExperimentConfig {
  std::string kind;
  std::uint64_t seed = 0;
  std::string out_dir = "runs";
  Json params = Json::object();
};

namespace schema {

enum class KeyType { U64, F64, Str, Bool, NumArray };

struct KeySpec {
  const char* name;
  KeyType type;
  bool required;
};

struct KindSpec {
  const char* kind;
  std::vector<KeySpec> keys;
};

inline const std::vector<KindSpec>& kinds() {
  static const std::vector<KindSpec> specs = {
      {"sample-graph",
       {{"n", KeyType::U64, true},
        {"d", KeyType::F64, true},
        {"model", KeyType::Str, false},
        {"out_file", KeyType::Str, false}}},
      {"qaoa-expect",
       {{"n", KeyType::U64, false},
        {"d", KeyType::F64, false},
        {"model", KeyType::Str, false},
        {"graph_file", KeyType::Str, false},
        {"gammas", KeyType::NumArray, true},
        {"betas", KeyType::NumArray, true},
        {"theta", KeyType::F64, false},
        {"initial", KeyType::Str, true},
        {"cost", KeyType::Str, false},
        {"engine", KeyType::Str, false}}},
      {"qaoa-plus-sample",
       {{"n", KeyType::U64, false},
        {"d", KeyType::F64, false},
        {"model", KeyType::Str, false},
        {"graph_file", KeyType::Str, false},
        {"gammas", KeyType::NumArray, true},
        {"betas", KeyType::NumArray, true},
        {"theta", KeyType::F64, false},
        {"initial", KeyType::Str, true},
        {"shots", KeyType::U64, true}}},
      {"p15-optimize",
       {{"d", KeyType::F64, true},
        {"gamma_zero", KeyType::Bool, false},
        {"degree_cut", KeyType::U64, false},
        {"starts", KeyType::U64, false}}},
      {"p15-scan", {{"ds", KeyType::NumArray, true}}},
      {"ogp-scan",
       {{"n", KeyType::U64, true},
        {"d", KeyType::F64, true},
        {"eta", KeyType::F64, true},
        {"t_count", KeyType::U64, false},
        {"alpha", KeyType::Str, false},
        {"cap", KeyType::U64, false}}},
      {"far-lemma",
       {{"n", KeyType::U64, true},
        {"d", KeyType::F64, true},
        {"gammas", KeyType::NumArray, true},
        {"betas", KeyType::NumArray, true},
        {"theta", KeyType::F64, false},
        {"initial", KeyType::Str, true},
        {"triples", KeyType::U64, false}}},
      {"lightcone-check",
       {{"n", KeyType::U64, true},
        {"d", KeyType::F64, true},
        {"p", KeyType::U64, true},
        {"cases", KeyType::U64, false}}},
      {"branching",
       {{"d", KeyType::F64, true},
        {"k", KeyType::U64, true},
        {"replicates", KeyType::U64, true},
        {"u_grid", KeyType::NumArray, false}}},
      {"neighborhood-tail",
       {{"n", KeyType::U64, true},
        {"d", KeyType::F64, true},
        {"w", KeyType::F64, true},
        {"trials", KeyType::U64, true},
        {"s", KeyType::F64, false}}},
      {"concentration",
       {{"mode", KeyType::Str, true},
        {"n", KeyType::U64, false},
        {"d", KeyType::F64, false},
        {"model", KeyType::Str, false},
        {"graph_file", KeyType::Str, false},
        {"gammas", KeyType::NumArray, true},
        {"betas", KeyType::NumArray, true},
        {"theta", KeyType::F64, false},
        {"initial", KeyType::Str, true},
        {"shots", KeyType::U64, false}}},
      {"count-mvg", {{"t", KeyType::U64, true}}},
      {"reproduce-paper", {}},
  };
  return specs;
}

inline const KindSpec* find_kind(const std::string& kind) {
  for (const KindSpec& k : kinds())
    if (kind == k.kind) return &k;
  return nullptr;
}

inline bool type_matches(const Json& v, KeyType t) {
  switch (t) {
    case KeyType::U64:
      return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    case KeyType::F64:
      return v.is_number();
    case KeyType::Str:
      return v.is_string();
    case KeyType::Bool:
      return v.is_boolean();
    case KeyType::NumArray:
      if (!v.is_array()) return false;
      for (const auto& e : v)
        if (!e.is_number()) return false;
      return true;
  }
  return false;
}

}  // namespace schema

// Collects every problem instead of stopping at the first bad key.
inline void validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> issues;
  const schema::KindSpec* spec = schema::find_kind(cfg.kind);
  if (spec == nullptr) {
    issues.push_back("unknown experiment kind '" + cfg.kind + "'");
    throw validation_error(std::move(issues));
  }
  if (!cfg.params.is_object()) {
    issues.push_back("params must be an object");
    throw validation_error(std::move(issues));
  }
  for (auto it = cfg.params.begin(); it != cfg.params.end(); ++it) {
    const schema::KeySpec* found = nullptr;
    for (const schema::KeySpec& k : spec->keys)
      if (it.key() == k.name) found = &k;
    if (found == nullptr)
      issues.push_back("unknown key '" + it.key() + "' for kind '" + cfg.kind + "'");
    else if (!schema::type_matches(it.value(), found->type))
      issues.push_back("key '" + it.key() + "' has the wrong type");
  }
  for (const schema::KeySpec& k : spec->keys)
    if (k.required && !cfg.params.contains(k.name))
      issues.push_back("missing required key '" + std::string(k.name) + "'");
  if (!issues.empty()) throw validation_error(std::move(issues));
}

inline Json config_to_json(const ExperimentConfig& cfg) {
  Json j;
  j["kind"] = cfg.kind;
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  j["params"] = cfg.params;
  return j;
}

inline ExperimentConfig config_from_json(const Json& j) {
  std::vector<std::string> issues;
  ExperimentConfig cfg;
  if (!j.is_object()) throw validation_error({"config must be a JSON object"});
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string key = it.key();
    if (key != "kind" && key != "seed" && key != "out_dir" && key != "params")
      issues.push_back("unknown top-level key '" + key + "'");
  }
  if (!j.contains("kind") || !j["kind"].is_string())
    issues.push_back("missing or non-string 'kind'");
  else
    cfg.kind = j["kind"].get<std::string>();
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      issues.push_back("'seed' must be an integer");
    else
      cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string())
      issues.push_back("'out_dir' must be a string");
    else
      cfg.out_dir = j["out_dir"].get<std::string>();
  }
  if (j.contains("params")) {
    if (!j["params"].is_object())
      issues.push_back("'params' must be an object");
    else
      cfg.params = j["params"];
  }
  if (!issues.empty()) throw validation_error(std::move(issues));
  validate_config(cfg);
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw io_error(path + ": JSON parse error: " + e.what());
  }
  return config_from_json(j);
}

// Test hook: called between writing the temp file and the rename. Lets tests
// simulate a crash mid-write and assert that no partial final file appears.
inline std::function<void()>& atomic_write_test_hook() {
  static std::function<void()> hook;
  return hook;
}

inline void atomic_write_file(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + tmp);
    out << content;
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw io_error("write failed: " + tmp);
    }
  }
  if (atomic_write_test_hook()) {
    try {
      atomic_write_test_hook()();
    } catch (...) {
      std::remove(tmp.c_str());
      throw;
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw io_error("rename failed: " + tmp + " -> " + path);
  }
}

// One experiment process at a time per output directory.
class DirLock {
 public:
  explicit DirLock(const std::string& dir) {
    std::filesystem::create_directories(dir);
    path_ = dir + "/.qmis.lock";
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      if (errno == EEXIST)
        throw io_error("output directory is locked by another run: " + path_);
      throw io_error("cannot create lock file: " + path_);
    }
  }
  ~DirLock() {
    if (fd_ >= 0) {
      ::close(fd_);
      std::remove(path_.c_str());
    }
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  std::string path_;
  int fd_ = -1;
};

struct RunRecord {
  ExperimentConfig config;
  std::string artifact_version = kArtifactVersion;
  double wall_seconds = 0.0;
  Json task_seeds = Json::object();
  Json payload = Json::object();
};

inline Json record_to_json(const RunRecord& r) {
  Json j;
  j["config"] = config_to_json(r.config);
  j["artifact_version"] = r.artifact_version;
  j["wall_seconds"] = r.wall_seconds;
  j["task_seeds"] = r.task_seeds;
  j["payload"] = r.payload;
  return j;
}

inline void write_record(const RunRecord& r) {
  std::filesystem::create_directories(r.config.out_dir);
  std::string path = r.config.out_dir + "/record-" + r.config.kind + "-" +
                     std::to_string(r.config.seed) + ".json";
  atomic_write_file(path, record_to_json(r).dump(2) + "\n");
}

}  // namespace qmis
