#include "softbot/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "softbot/analysis.hpp"
#include "softbot/fitness.hpp"
#include "softbot/parallel.hpp"

namespace softbot {

namespace {

bool coin(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.5; }

double perturb(double value, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, sigma);
  return std::clamp(value + noise(rng), kMinLength, kMaxLength);
}

double fitness_of(const Individual& ind) {
  if (!ind.fitness) throw std::logic_error("individual " + std::to_string(ind.id) + " is unevaluated");
  return *ind.fitness;
}

GenerationStats summarize(const Population& pop) {
  GenerationStats stats;
  stats.generation = pop.generation;
  double sum = 0.0;
  const Individual* best = nullptr;
  for (const auto& ind : pop.members) {
    const double f = fitness_of(ind);
    sum += f;
    if (!best || f > *best->fitness || (f == *best->fitness && ind.id < best->id)) best = &ind;
  }
  stats.mean_fitness = sum / static_cast<double>(pop.members.size());
  stats.best_fitness = *best->fitness;
  stats.best_id = best->id;
  stats.best_window = total_window(best->genome);
  return stats;
}

LineageEntry to_entry(const Individual& ind) {
  LineageEntry e;
  e.id = ind.id;
  e.parent_id = ind.parent_id;
  e.birth_generation = ind.birth_generation;
  e.age = ind.age;
  e.fitness = ind.fitness.value_or(0.0);
  e.window = total_window(ind.genome);
  e.genome = ind.genome;
  return e;
}

}  // namespace

void MutationConfig::validate() const {
  if (!(sigma > 0.0 && std::isfinite(sigma))) throw ConfigError("sigma", "must be positive");
  if (!(per_voxel_prob >= 0.0 && per_voxel_prob <= 1.0)) throw ConfigError("per_voxel_prob", "must lie in [0, 1]");
}

void EvolutionSettings::validate() const {
  if (population_size < 1) throw ConfigError("population_size", "must be >= 1");
  if (generations < 1) throw ConfigError("generations", "must be >= 1");
  if (jobs < 1) throw ConfigError("jobs", "must be >= 1");
  mutation.validate();
  sim.validate();
}

ParameterSet choose_parameter_set(std::mt19937_64& rng) {
  const bool start = coin(rng);
  const bool final = coin(rng);
  if (start && final) return ParameterSet::Both;
  if (start) return ParameterSet::Start;
  if (final) return ParameterSet::Final;
  return coin(rng) ? ParameterSet::Start : ParameterSet::Final;
}

Individual mutate(const Individual& parent, std::int64_t child_id, int generation, const MutationConfig& config,
                  std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GeneArray genes = parent.genome.genes();
  const Mode mode = parent.genome.mode();

  if (mode == Mode::Evo) {
    for (auto& g : genes) {
      if (unit(rng) < config.per_voxel_prob) {
        g.s0 = perturb(g.s0, config.sigma, rng);
        g.s1 = g.s0;
      }
    }
  } else {
    const ParameterSet set = choose_parameter_set(rng);
    const bool start = set != ParameterSet::Final;
    const bool final = set != ParameterSet::Start;
    for (auto& g : genes) {
      if (unit(rng) < config.per_voxel_prob) {
        if (start) g.s0 = perturb(g.s0, config.sigma, rng);
        if (final) g.s1 = perturb(g.s1, config.sigma, rng);
      }
    }
  }

  Individual child;
  child.id = child_id;
  child.parent_id = parent.id;
  child.genome = Genome(mode, genes);
  child.age = parent.age;
  child.birth_generation = generation;
  return child;
}

bool pareto_dominates(const Individual& a, const Individual& b) {
  const double fa = fitness_of(a);
  const double fb = fitness_of(b);
  return fa >= fb && a.age <= b.age && (fa > fb || a.age < b.age);
}

std::vector<std::vector<std::size_t>> nondominated_fronts(std::span<const Individual> candidates) {
  const std::size_t n = candidates.size();
  std::vector<int> dominated_by(n, 0);
  std::vector<std::vector<std::size_t>> dominates(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && pareto_dominates(candidates[i], candidates[j])) {
        dominates[i].push_back(j);
        ++dominated_by[j];
      }
    }
  }
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i)
    if (dominated_by[i] == 0) current.push_back(i);
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (auto i : current)
      for (auto j : dominates[i])
        if (--dominated_by[j] == 0) next.push_back(j);
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<Individual> select_survivors(std::span<const Individual> candidates, std::size_t size) {
  std::vector<Individual> survivors;
  survivors.reserve(size);
  for (auto& front : nondominated_fronts(candidates)) {
    if (survivors.size() == size) break;
    if (survivors.size() + front.size() > size) {
      std::sort(front.begin(), front.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = candidates[a];
        const auto& y = candidates[b];
        if (*x.fitness != *y.fitness) return *x.fitness > *y.fitness;
        if (x.age != y.age) return x.age < y.age;
        return x.id < y.id;
      });
      front.resize(size - survivors.size());
    }
    for (auto i : front) survivors.push_back(candidates[i]);
  }
  std::sort(survivors.begin(), survivors.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return survivors;
}

Evaluator physics_evaluator(const SimConfig& config) {
  return [config](const Genome& genome) {
    const FitnessTrace trace = evaluate(genome, config);
    if (trace.blowup) std::clog << "softbot: evaluation failed: " << trace.failure << '\n';
    return Evaluation{trace.fitness, trace.blowup};
  };
}

void evaluate_population(std::span<Individual> individuals, const Evaluator& evaluator, int jobs) {
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < individuals.size(); ++i)
    if (!individuals[i].fitness) pending.push_back(i);
  parallel_for(pending.size(), jobs, [&](std::size_t k) {
    Individual& ind = individuals[pending[k]];
    try {
      const Evaluation e = evaluator(ind.genome);
      ind.fitness = std::isfinite(e.fitness) ? e.fitness : 0.0;
      ind.evaluation_failed = e.failed || !std::isfinite(e.fitness);
    } catch (const std::exception& e) {
      std::clog << "softbot: evaluation of individual " << ind.id << " failed: " << e.what() << '\n';
      ind.fitness = 0.0;
      ind.evaluation_failed = true;
    }
  });
}

StepOutcome generation_step(const Population& population, const Evaluator& evaluator,
                            const EvolutionSettings& settings, std::mt19937_64& rng, std::int64_t& next_id) {
  for (const auto& m : population.members) fitness_of(m);
  const int generation = population.generation + 1;

  std::vector<Individual> candidates = population.members;
  std::vector<Individual> born;
  born.reserve(population.members.size() + 1);
  for (const auto& parent : population.members)
    born.push_back(mutate(parent, next_id++, generation, settings.mutation, rng));

  Individual fresh;
  fresh.id = next_id++;
  fresh.genome = random_genome(settings.mode, rng);
  fresh.age = 0;
  fresh.birth_generation = generation;
  born.push_back(std::move(fresh));

  evaluate_population(born, evaluator, settings.jobs);
  candidates.insert(candidates.end(), born.begin(), born.end());

  StepOutcome outcome;
  outcome.next.members = select_survivors(candidates, population.members.size());
  outcome.next.generation = generation;
  outcome.next.rng_seed = population.rng_seed;

  std::vector<std::int64_t> kept;
  for (const auto& s : outcome.next.members) kept.push_back(s.id);
  for (const auto& c : candidates)
    if (!std::binary_search(kept.begin(), kept.end(), c.id)) outcome.discarded.push_back(c);

  for (auto& s : outcome.next.members) ++s.age;
  outcome.born = std::move(born);
  return outcome;
}

RunRecord run_evolution(const EvolutionSettings& settings, std::uint64_t seed) {
  return run_evolution(settings, seed, physics_evaluator(settings.sim));
}

RunRecord run_evolution(const EvolutionSettings& settings, std::uint64_t seed, const Evaluator& evaluator) {
  settings.validate();
  std::mt19937_64 rng(seed);
  std::int64_t next_id = 0;

  Population pop;
  pop.rng_seed = seed;
  for (int i = 0; i < settings.population_size; ++i) {
    Individual ind;
    ind.id = next_id++;
    ind.genome = random_genome(settings.mode, rng);
    pop.members.push_back(std::move(ind));
  }
  evaluate_population(pop.members, evaluator, settings.jobs);

  RunRecord record;
  record.seed = seed;
  record.mode = settings.mode;
  std::map<std::int64_t, LineageEntry> lineage;
  for (const auto& m : pop.members) lineage.emplace(m.id, to_entry(m));
  record.generations.push_back(summarize(pop));

  for (int g = 1; g <= settings.generations; ++g) {
    StepOutcome outcome = generation_step(pop, evaluator, settings, rng, next_id);
    for (const auto& b : outcome.born) lineage.emplace(b.id, to_entry(b));
    for (const auto& d : outcome.discarded) lineage.at(d.id).age = d.age;
    pop = std::move(outcome.next);
    record.generations.push_back(summarize(pop));
  }
  for (const auto& m : pop.members) lineage.at(m.id).age = m.age;

  record.lineage.reserve(lineage.size());
  for (auto& [id, entry] : lineage) record.lineage.push_back(std::move(entry));
  return record;
}

}  // namespace softbot
