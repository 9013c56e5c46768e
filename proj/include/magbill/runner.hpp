#pragma once

// Experiment orchestration: executes the configured experiment, evaluates its
// property checks and writes deterministic artifacts plus a run manifest.

#include <cstdint>
#include <string>
#include <vector>

#include "magbill/config.hpp"

namespace magbill {

inline constexpr const char* kVersion = "1.0.0";

struct RunOptions {
  std::string out_dir;  // overrides [output] directory when non-empty
  int threads = 0;      // 0 = hardware default
  std::uint64_t seed = 12345;
  bool dump_grid = false;
  bool dump_links = false;
  bool dump_matrix = false;
};

struct RunManifest {
  bool ok = true;
  std::vector<std::pair<std::string, std::string>> entries;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void check(const std::string& name, bool pass, const std::string& detail);
  std::string text() const;
};

// returns the process exit status (0 iff every property check passed);
// the manifest is written to <out>/manifest.txt even on failure
int run_experiment(const ExperimentConfig& cfg, const RunOptions& opt,
                   RunManifest* manifest_out = nullptr);

}  // namespace magbill
