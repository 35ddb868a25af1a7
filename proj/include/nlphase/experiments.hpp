#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nlphase/config.hpp"

namespace nlphase {

inline constexpr const char* kVersion = "1.0.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitCertification = 4;

enum class ValueType { Real, Integer, RealList, Text };

struct KeySpec {
  std::string key;
  ValueType type = ValueType::Real;
  bool required = false;
  std::string default_value;
  std::string help;
};

struct ExperimentInfo {
  std::string name;
  std::string verifies;  // the result the experiment checks
  std::vector<KeySpec> keys;
};

const std::vector<ExperimentInfo>& experiment_catalog();
const ExperimentInfo& find_experiment(const std::string& name);

// Fills defaults and checks key names, value types and per-experiment
// constraints. Errors carry the file and line of the offending key.
Config resolve_config(const Config& raw);

struct RunOptions {
  std::filesystem::path output_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides run.seed
  int threads = 1;                    // 0: one per hardware thread
};

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;
  std::vector<std::pair<std::string, std::string>> summary;
};

// Validates, runs, and writes `<prefix>.csv` and `<prefix>.manifest` (plus any
// experiment-specific files) into the output directory.
RunResult run_experiment(const Config& raw, const RunOptions& opts);

}  // namespace nlphase
