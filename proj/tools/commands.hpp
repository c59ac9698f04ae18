#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

namespace pinnfp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitDiverged = 2;

struct Options {
  std::filesystem::path manifest;
  std::optional<std::filesystem::path> out;  // overrides the manifest's "output"
  std::optional<std::uint64_t> seed;         // overrides the manifest's "seed"
  std::optional<std::int64_t> max_epochs;    // caps every training run (smoke runs)
  unsigned threads = 1;
  int verbosity = 0;
  bool force = false;
};

/// Parsed manifest plus the resolved output directory.
struct Manifest {
  std::string experiment;
  nlohmann::json body;  // the command section after seed / epoch overrides
  std::filesystem::path base_dir;  // directory of the manifest file; relative paths resolve here
  std::filesystem::path out_dir;   // <output>/<experiment>-<hash>
};

/// Reads the manifest, checks that it holds the section for `command` and applies overrides.
/// Throws ConfigError (missing file, bad JSON, unknown keys).
Manifest load_manifest(const std::string& command, const Options& options);

int cmd_train(const Options& options);
int cmd_sweep(const Options& options);
int cmd_landscape(const Options& options);
int cmd_oracle(const Options& options);

/// Runs `fn`, mapping library exceptions to exit codes with a diagnostic on stderr.
int guarded(const char* command, int (*fn)(const Options&), const Options& options);

}  // namespace pinnfp::cli
