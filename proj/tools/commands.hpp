#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace netreplica::cli {

inline constexpr int kOk = 0;
inline constexpr int kValidationError = 1;
inline constexpr int kIoError = 2;

// Falls back to NETREPLICA_SEED, then 0, when the flag was not given.
uint64_t resolve_seed(const std::optional<uint64_t>& flag_seed);

// Flat key = value configuration for the end-to-end pipeline; '#' starts a
// comment. CLI flags override file keys.
struct RunConfig {
  std::map<std::string, std::string> values;

  static RunConfig load(const std::string& path);
  std::string get(const std::string& key, const std::string& fallback = "") const;
  bool has(const std::string& key) const;
};

struct RunOptions {
  std::string config_path;
  std::string out_dir;          // overrides config "out_dir"
  std::optional<unsigned> jobs; // overrides config "jobs"
};

int cmd_run(const RunOptions& opts);

}  // namespace netreplica::cli
