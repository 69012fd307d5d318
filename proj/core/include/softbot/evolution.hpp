#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "softbot/genome.hpp"
#include "softbot/physics.hpp"
#include "softbot/records.hpp"

namespace softbot {

struct MutationConfig {
  double sigma = 0.75;
  double per_voxel_prob = 0.5;

  void validate() const;
};

struct Individual {
  std::int64_t id = 0;
  std::optional<std::int64_t> parent_id;
  Genome genome;
  int age = 0;
  std::optional<double> fitness;
  int birth_generation = 0;
  bool evaluation_failed = false;
};

struct Population {
  std::vector<Individual> members;
  int generation = 0;
  std::uint64_t rng_seed = 0;
};

/// Which developmental parameters one Evo-Devo mutation may touch.
enum class ParameterSet { Start, Final, Both };

/// Fair coin per parameter; if neither comes up, one more coin picks one.
/// Yields Both 25%, Start 37.5%, Final 37.5%.
ParameterSet choose_parameter_set(std::mt19937_64& rng);

/// Gaussian perturbation of a random subset of genes, clamped to the gene
/// bounds. The child inherits the parent's age and records it as parent.
Individual mutate(const Individual& parent, std::int64_t child_id, int generation,
                  const MutationConfig& config, std::mt19937_64& rng);

/// Fitness is maximized and age minimized. Throws std::logic_error when
/// either individual is unevaluated.
bool pareto_dominates(const Individual& a, const Individual& b);

/// Successive nondominated fronts, each in ascending index order.
std::vector<std::vector<std::size_t>> nondominated_fronts(std::span<const Individual> candidates);

/// Iterated nondominated filtering down to `size` survivors. A front that
/// would overflow is truncated by fitness (desc), then age (asc), then id.
/// Survivors are returned in ascending id order.
std::vector<Individual> select_survivors(std::span<const Individual> candidates, std::size_t size);

struct Evaluation {
  double fitness = 0.0;
  bool failed = false;
};

using Evaluator = std::function<Evaluation(const Genome&)>;

/// Evaluator running the physics for the full lifetime.
Evaluator physics_evaluator(const SimConfig& config);

/// Evaluates every unevaluated individual, in parallel on `jobs` threads.
/// Exceptions from the evaluator count as failed evaluations with fitness 0.
void evaluate_population(std::span<Individual> individuals, const Evaluator& evaluator, int jobs);

struct EvolutionSettings {
  Mode mode = Mode::EvoDevo;
  int population_size = 30;
  int generations = 2000;
  MutationConfig mutation;
  SimConfig sim;
  int jobs = 1;

  void validate() const;
};

struct StepOutcome {
  Population next;
  std::vector<Individual> born;       // children and the injected individual
  std::vector<Individual> discarded;  // candidates not selected
};

/// One AFPO generation: a mutated child per member, one random injection at
/// age 0, evaluation of the newcomers, Pareto selection back to size, then
/// survivors age by one.
StepOutcome generation_step(const Population& population, const Evaluator& evaluator,
                            const EvolutionSettings& settings, std::mt19937_64& rng, std::int64_t& next_id);

/// Full run; the record holds per-generation stats (generation 0 is the
/// initial population) and every individual ever created.
RunRecord run_evolution(const EvolutionSettings& settings, std::uint64_t seed);
RunRecord run_evolution(const EvolutionSettings& settings, std::uint64_t seed, const Evaluator& evaluator);

}  // namespace softbot
