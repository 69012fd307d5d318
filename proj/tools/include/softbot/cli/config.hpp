#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "softbot/evolution.hpp"

namespace softbot::cli {

/// Everything one command needs. Loaded from an INI-style file with
/// sections [experiment], [mutation], [sim], [random_search] and [sweep];
/// keys are addressed as "section.key" for overrides.
struct ExperimentConfig {
  Mode mode = Mode::EvoDevo;
  int population_size = 30;
  int generations = 2000;
  int runs = 30;
  std::uint64_t seed = 1;
  std::string output_dir = "softbot_runs";
  int jobs = 1;
  MutationConfig mutation;
  SimConfig sim;
  int random_n = 1000;
  int histogram_bins = 50;
  std::vector<double> sweep_rates{0.05, 0.1, 0.25, 0.5, 0.75, 1.0};
  int sweep_runs = 1;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  EvolutionSettings evolution_settings() const;
};

/// Parses `path`. Throws ConfigError for unknown keys or bad values and
/// std::runtime_error (naming the path) when the file cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Sets "section.key" from text. Throws ConfigError.
void set_field(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Every field as "section.key" -> text, in canonical order.
std::vector<std::pair<std::string, std::string>> config_fields(const ExperimentConfig& config);

/// INI text that load_config reads back to an equal config.
std::string canonical_config(const ExperimentConfig& config);

/// FNV-1a over the canonical text, minus fields that cannot change data
/// (jobs, output_dir, runs). 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// As config_hash but also ignoring the mode and seed; equal for
/// experiments that are meant to be compared.
std::string comparable_hash(const ExperimentConfig& config);

std::string fnv1a_hex(const std::string& text);

}  // namespace softbot::cli
