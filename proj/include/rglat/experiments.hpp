#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rglat/io.hpp"

namespace rglat {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kOutdirEnvVar = "RG_LATTICE_OUT";

// One registry entry per reproducible experiment. `desk` and `paper` are
// complete default configurations; a preset's keys are also the set of keys a
// config file may override (anything else is rejected).
struct ExperimentInfo {
  std::string name;
  std::string module;
  std::string description;
  std::string runtime_desk;
  std::string runtime_paper;
  KvMap desk;
  KvMap paper;
};

const std::vector<ExperimentInfo>& experiment_registry();
const ExperimentInfo& find_experiment(const std::string& name);

// Human-readable and JSON registry listings; `module_filter` selects a subset.
std::string list_experiments_text(const std::string& module_filter = "");
nlohmann::json list_experiments_json(const std::string& module_filter = "");

struct RunRequest {
  std::string name;
  std::string preset = "desk";
  KvMap file_config;  // from --config, applied over the preset defaults
  std::optional<std::uint64_t> seed_override;
  std::optional<int> threads_override;
  std::filesystem::path outdir;
  bool overwrite = false;
};

struct RunReport {
  std::filesystem::path outdir;
  nlohmann::json metadata;
  std::vector<std::string> files;
};

// Resolve the configuration (defaults <- file <- flag overrides), run the
// experiment, and emit its data files plus metadata.json. Throws on unknown
// experiment, invalid config, or refused overwrite.
RunReport run_experiment(const RunRequest& request);

// Initial condition selector: "staircase", "powerlaw:<h>", "vector:v0,v1,...".
std::vector<double> make_initial_condition(const std::string& init, int n_cap);

// Standalone trajectory run for the `simulate` CLI verb.
RunReport run_simulate(const KvMap& config, std::optional<std::uint64_t> seed_override,
                       const std::filesystem::path& outdir, bool overwrite);

}  // namespace rglat
