#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "softbot/genome.hpp"
#include "softbot/physics.hpp"
#include "softbot/records.hpp"

namespace softbot {

struct EvolutionSettings;

/// Sum over all 48 voxels of |s1 - s0|.
double total_window(const Genome& genome);

/// F_child / F_parent - 1, defined only when both fitnesses are positive.
std::optional<double> mutation_impact(double parent_fitness, double child_fitness);

struct MutationFlags {
  bool early = false;  // some starting length changed
  bool late = false;   // some final length changed
};

/// Which developmental parameters differ between parent and child.
MutationFlags mutation_flags(const Genome& parent, const Genome& child);

struct MutationImpact {
  std::int64_t parent_id = 0;
  std::int64_t child_id = 0;
  double parent_fitness = 0.0;
  double child_fitness = 0.0;
  double impact = 0.0;
  bool early = false;
  bool late = false;
};

/// Every parent-child pair in the lineage with both fitnesses positive.
/// Throws std::runtime_error when a parent id is missing.
std::vector<MutationImpact> mutation_impacts(std::span<const LineageEntry> lineage);

struct EarlyLateSplit {
  std::vector<double> early;  // impacts of mutations touching any start length
  std::vector<double> late;   // impacts of mutations touching only final lengths
  std::optional<double> early_mean;
  std::optional<double> late_mean;
};

EarlyLateSplit early_late_split(std::span<const MutationImpact> impacts);
EarlyLateSplit early_late_split(std::span<const LineageEntry> lineage);

/// Average ranks (1-based), ties share their midrank.
std::vector<double> midranks(std::span<const double> values);

struct MannWhitneyResult {
  double u_a = 0.0;  // pairs with a > b, ties counted one half
  double u_b = 0.0;
  double p = 1.0;    // two-sided
  bool exact = false;
};

/// Two-sided Mann-Whitney U test. Tie-free samples with both sizes <= 8 use
/// the exact null distribution; otherwise the normal approximation with tie
/// and continuity correction. Throws std::invalid_argument on empty input.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Normal-approximation p-value for U, regardless of sample size.
double mann_whitney_normal_p(double u_a, std::span<const double> a, std::span<const double> b);

double spearman_correlation(std::span<const double> x, std::span<const double> y);
double median(std::vector<double> values);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts_a;
  std::vector<std::size_t> counts_b;
};

/// Equal-width bins over the pooled range of both samples.
Histogram pooled_histogram(std::span<const double> a, std::span<const double> b, std::size_t bins);

/// Fitness of n random genomes of the given mode.
std::vector<double> random_search(std::size_t n, Mode mode, const SimConfig& config, std::uint64_t seed,
                                  int jobs = 1);

struct LineageStep {
  std::int64_t id = 0;
  int birth_generation = 0;
  double fitness = 0.0;
  double window = 0.0;
};

/// Ancestors of the champion, oldest first, ending at the champion.
std::vector<LineageStep> lineage_extract(std::span<const LineageEntry> lineage, std::int64_t champion_id);

/// Bootstrap percentile interval for the mean.
struct MeanInterval {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};
MeanInterval bootstrap_mean(std::span<const double> values, double level, std::size_t resamples,
                            std::uint64_t seed);

/// Deterministic child seed for (base, a, b).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

struct SweepSettings {
  std::vector<double> rates{0.05, 0.1, 0.25, 0.5, 0.75, 1.0};
  int runs_per_rate = 1;
  std::vector<Mode> modes{Mode::Evo, Mode::EvoDevo};
  std::uint64_t seed = 1;
};

struct SweepRow {
  double rate = 0.0;
  Mode mode = Mode::Evo;
  int run = 0;
  std::uint64_t seed = 0;
  double champion_fitness = 0.0;
};

/// One evolution run per (rate, mode, run) cell. Runs with the same rate
/// and run index share a seed across modes.
std::vector<SweepRow> sweep(const SweepSettings& sweep, const EvolutionSettings& base);

/// Columns: rate,mode,run,seed,champion_fitness
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, const std::string& header);
std::vector<SweepRow> read_sweep_csv(std::istream& in, const std::string& name);

}  // namespace softbot
