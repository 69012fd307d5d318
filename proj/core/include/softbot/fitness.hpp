#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "softbot/genome.hpp"
#include "softbot/physics.hpp"

namespace softbot {

enum class EvalMode { Full, FrozenMidlife };

/// Length of a frozen-development reevaluation, in seconds.
inline constexpr double kFrozenDuration = 2.0;

struct FitnessSample {
  double t = 0.0;
  double y = 0.0;  // center-of-mass y
  double q = 0.0;  // total volume
};

struct FitnessTrace {
  std::vector<FitnessSample> samples;
  bool terminated_rollover = false;
  bool blowup = false;
  std::string failure;  // blowup message, empty otherwise
  double fitness = 0.0;
};

/// Twice the sum over the 24 genes of the actuated voxel volume.
double total_volume(const Genome& genome, double t, double tau, const ActuationParams& params);

/// Volume-normalized displacement:
///   F = 2 sum_i (y_i - y_{i-1}) / (Q_i + Q_{i-1}).
double volume_normalized_displacement(std::span<const FitnessSample> samples);

/// Evo genome whose fixed lengths are the developmental rest lengths at tau / 2.
Genome frozen_midlife_genome(const Genome& genome, double tau);

/// Called after build and at every sampling instant.
using FrameObserver = std::function<void(const PhysicsState&)>;

/// Simulates one lifetime. Rollover zeroes the fitness and truncates the
/// trace; a numerical blowup zeroes the fitness and sets `blowup`.
FitnessTrace evaluate(const Genome& genome, const SimConfig& config, EvalMode mode = EvalMode::Full,
                      const FrameObserver& observer = {});

/// CSV rows "t,y,Q" followed by a footer row "# fitness=<F> terminated_rollover=<0|1> blowup=<0|1>".
void write_trace_csv(std::ostream& out, const FitnessTrace& trace);

}  // namespace softbot
