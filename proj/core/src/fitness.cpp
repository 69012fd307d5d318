#include "softbot/fitness.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

namespace softbot {

double total_volume(const Genome& genome, double t, double tau, const ActuationParams& params) {
  double sum = 0.0;
  for (const Gene& gene : genome.genes()) {
    const double length = current_length(gene, t, tau, params);
    sum += length * length * length;
  }
  return 2.0 * sum;
}

double volume_normalized_displacement(std::span<const FitnessSample> samples) {
  double f = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i)
    f += (samples[i].y - samples[i - 1].y) / (samples[i].q + samples[i - 1].q);
  return 2.0 * f;
}

Genome frozen_midlife_genome(const Genome& genome, double tau) {
  GeneArray genes;
  for (std::size_t k = 0; k < kGeneCount; ++k) {
    const double mid = rest_length(genome.genes()[k], 0.5 * tau, tau);
    genes[k] = Gene{mid, mid};
  }
  return Genome(Mode::Evo, genes);
}

FitnessTrace evaluate(const Genome& genome, const SimConfig& config, EvalMode mode,
                      const FrameObserver& observer) {
  config.validate();
  if (mode == EvalMode::FrozenMidlife) {
    SimConfig frozen = config;
    frozen.duration = kFrozenDuration;
    return evaluate(frozen_midlife_genome(genome, config.duration), frozen, EvalMode::Full, observer);
  }

  const double tau = config.duration;
  const ActuationParams params = config.actuation();
  const std::int64_t intervals = config.sample_intervals();
  const std::int64_t steps_per_sample = config.steps_per_sample();

  FitnessTrace trace;
  trace.samples.reserve(static_cast<std::size_t>(intervals) + 1);

  VoxelLengths lengths = voxel_rest_lengths(genome, 0.0, tau);
  PhysicsState state = build_lattice(lengths, config);
  trace.samples.push_back({0.0, center_of_mass_y(state), total_volume(genome, 0.0, tau, params)});
  if (observer) observer(state);

  try {
    for (std::int64_t s = 1; s <= intervals; ++s) {
      for (std::int64_t k = 0; k < steps_per_sample; ++k) {
        const double t = std::min(state.time(), tau);
        lengths = voxel_rest_lengths(genome, t, tau);
        step_in_place(state, lengths, config);
      }
      if (state.terminated_rollover) {
        trace.terminated_rollover = true;
        trace.fitness = 0.0;
        return trace;
      }
      const double t = std::min(static_cast<double>(s) / config.sample_rate, tau);
      trace.samples.push_back({t, center_of_mass_y(state), total_volume(genome, t, tau, params)});
      if (observer) observer(state);
    }
  } catch (const NumericalBlowup& e) {
    trace.blowup = true;
    trace.failure = e.what();
    trace.fitness = 0.0;
    return trace;
  }

  trace.fitness = volume_normalized_displacement(trace.samples);
  return trace;
}

void write_trace_csv(std::ostream& out, const FitnessTrace& trace) {
  out << std::setprecision(17);
  out << "t,y,Q\n";
  for (const auto& s : trace.samples) out << s.t << ',' << s.y << ',' << s.q << '\n';
  out << "# fitness=" << trace.fitness << " terminated_rollover=" << (trace.terminated_rollover ? 1 : 0)
      << " blowup=" << (trace.blowup ? 1 : 0) << '\n';
}

}  // namespace softbot
