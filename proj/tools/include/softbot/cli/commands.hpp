#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "softbot/cli/config.hpp"
#include "softbot/report.hpp"

namespace softbot::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputRootEnv = "SOFTBOT_OUTPUT_ROOT";

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kUsageError = 2 };

/// Bad invocation or missing input; exits with kUsageError.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relative output paths resolve against $SOFTBOT_OUTPUT_ROOT when set,
/// otherwise against the working directory.
std::filesystem::path resolve_output(const std::filesystem::path& path);

/// Header line for every artifact of an experiment run.
std::string run_header(const ExperimentConfig& config, int run, std::uint64_t run_seed);

/// Seed of run `run` of an experiment.
std::uint64_t run_seed(const ExperimentConfig& config, int run);

/// Loads one experiment directory (manifest.json plus run_NNN/ folders).
struct Experiment {
  std::filesystem::path dir;
  ExperimentConfig config;
  std::string config_hash;
  std::string comparable_hash;
  std::vector<RunData> runs;
};
Experiment load_experiment(const std::filesystem::path& dir);

/// Runs the command line and returns the process exit code. Normal output
/// goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace softbot::cli
