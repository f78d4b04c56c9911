#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace gpderiv::cli {

/// Parsed command line. `run` reads the config, executes the command and
/// writes every artifact (CSV outputs, a config echo that re-parses to an
/// equivalent config, and a JSON metadata record) under `output_dir`.
struct CliConfig {
  std::string command;      // fit | table | rates | bands | spectra
  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed_override;
  int threads = 0;          // 0 = hardware concurrency
};

/// Exit status: 0 success, 2 config error, 3 numerical failure, 4 I/O failure.
/// Failures also emit a machine-readable error record on stderr.
int run(const CliConfig& config);

}  // namespace gpderiv::cli
