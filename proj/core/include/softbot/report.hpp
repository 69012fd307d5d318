#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "softbot/analysis.hpp"
#include "softbot/records.hpp"

namespace softbot {

/// One persisted evolution run, as read back for analysis.
struct RunData {
  std::string source;  // experiment directory name
  std::string config_hash;
  Mode mode = Mode::Evo;
  int run = 0;
  std::uint64_t seed = 0;
  std::vector<GenerationStats> generations;
  std::vector<LineageEntry> lineage;
  std::vector<FrozenRow> frozen;  // empty unless reevaluated

  double champion_fitness() const;
  std::int64_t champion_id() const;
};

struct ModeComparison {
  std::vector<double> evo;
  std::vector<double> evo_devo;
  std::optional<double> median_evo;
  std::optional<double> median_evo_devo;
  std::optional<MannWhitneyResult> test;  // evo-devo as sample a
};

/// Final-generation champion fitness per run, grouped by mode.
ModeComparison champion_comparison(std::span<const RunData> runs);

/// Best fitness at `generation` per run, grouped by mode.
ModeComparison generation_comparison(std::span<const RunData> runs, int generation);

struct CorrelationResult {
  std::size_t n = 0;
  std::optional<double> rho;
};

/// Spearman correlation between W and F over individuals of `mode` whose
/// fitness exceeds the median fitness of their own run.
CorrelationResult window_fitness_correlation(std::span<const RunData> runs, Mode mode);

struct AsymmetryResult {
  EarlyLateSplit split;
  std::optional<MannWhitneyResult> test;  // late as sample a, early as b
};

/// Pooled early/late mutation impacts over all runs of `mode`.
AsymmetryResult early_late_asymmetry(std::span<const RunData> runs, Mode mode);

struct RandomSummary {
  std::size_t n_evo = 0;
  std::size_t n_evo_devo = 0;
  double small_evo = 0.0;  // fraction with |F| < epsilon
  double small_evo_devo = 0.0;
  std::optional<MannWhitneyResult> abs_test;  // |F|, evo-devo as sample a
  Histogram histogram;
  bool mode_bin_has_zero_evo = false;
  bool mode_bin_has_zero_evo_devo = false;
};

RandomSummary summarize_random(std::span<const RandomSample> samples, double epsilon, std::size_t bins);

struct ReportInputs {
  std::vector<RunData> runs;
  std::vector<RandomSample> random;
  std::vector<SweepRow> sweep;
  std::string header;            // first line of every output file
  std::vector<std::string> notes;  // extra comment lines, e.g. config mismatches
  std::size_t bins = 50;
  double small_epsilon = 0.01;
  std::size_t bootstrap_resamples = 1000;
  std::uint64_t bootstrap_seed = 1;
};

/// Writes fig3_random.csv .. fig8_sweep.csv, an SVG plot of each and
/// summary.txt into `out_dir`, which must already exist. Figures without
/// input data get a header-only CSV.
void write_report(const ReportInputs& inputs, const std::filesystem::path& out_dir);

/// Names of the files write_report produces.
std::vector<std::string> report_files();

}  // namespace softbot
