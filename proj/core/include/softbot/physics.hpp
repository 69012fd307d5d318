#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "softbot/genome.hpp"

namespace softbot {

// Corner-node lattice: (kGridX + 1) x (kGridY + 1) x (kGridZ + 1) point masses.
inline constexpr int kNodesX = kGridX + 1;
inline constexpr int kNodesY = kGridY + 1;
inline constexpr int kNodesZ = kGridZ + 1;
inline constexpr std::size_t kNodeCount = kNodesX * kNodesY * kNodesZ;

constexpr int node_index(int i, int j, int k) { return i + kNodesX * (j + kNodesY * k); }

/// Raised for invalid simulation settings; names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(field), message_(message) {}
  const std::string& field() const { return field_; }
  const std::string& message() const { return message_; }

 private:
  std::string field_;
  std::string message_;
};

/// Raised when a node exceeds the configured speed bound (dt too large).
class NumericalBlowup : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Physics and evaluation constants. Lengths are in voxel lengths, time in
/// seconds; gravity is given in m/s^2 and converted through voxel_size.
struct SimConfig {
  double dt = 5e-4;
  double duration = 8.0;  // evaluation length tau
  double actuation_amplitude = 0.20;
  double actuation_period = 0.25;
  double sample_rate = 100.0;
  double gravity = -9.81;
  double voxel_size = 0.01;
  double stiffness = 2.0e4;  // per voxel spring, force per voxel length
  double damping_ratio = 0.2;
  double ground_stiffness = 1.0e5;
  double ground_damping_ratio = 0.5;
  double ground_friction = 1.0;   // static Coulomb coefficient
  double kinetic_friction = 1.0;  // sliding coefficient, <= ground_friction
  double rollover_margin = 0.1;
  double max_node_speed = 1.0e3;  // voxel lengths per second

  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  ActuationParams actuation() const { return {actuation_amplitude, actuation_period}; }
  double gravity_acceleration() const { return gravity / voxel_size; }
  std::int64_t steps_per_sample() const;
  /// Number of sample intervals in one evaluation (tau * sample_rate).
  std::int64_t sample_intervals() const;
};

/// Uniform node mass: a unit voxel carries mass 1.
inline constexpr double kNodeMass = static_cast<double>(kVoxelCount) / static_cast<double>(kNodeCount);

struct LatticeNode {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  double mass = kNodeMass;
};

struct VoxelElement {
  std::array<std::uint16_t, 8> node_indices{};
  double current_rest_length = 1.0;
};

struct PhysicsState {
  std::vector<LatticeNode> nodes;
  std::array<VoxelElement, kVoxelCount> voxels{};
  std::int64_t step_count = 0;
  double dt = 0.0;
  bool terminated_rollover = false;

  double time() const { return static_cast<double>(step_count) * dt; }
};

/// One structural spring; its target length is `factor` times the mean
/// current length of the voxels that share it.
struct Spring {
  std::uint16_t a = 0;
  std::uint16_t b = 0;
  std::array<std::uint8_t, 4> voxels{};
  std::uint8_t voxel_count = 0;
  double factor = 1.0;  // 1, sqrt(2) or sqrt(3)
};

/// Immutable lattice connectivity shared by every simulation.
struct LatticeTopology {
  std::vector<Spring> springs;
  std::array<std::array<std::uint16_t, 8>, kVoxelCount> voxel_nodes{};
  std::vector<std::uint16_t> top_layer;
  std::vector<std::uint16_t> bottom_layer;
};

const LatticeTopology& lattice_topology();

/// Builds a resting lattice for the given per-voxel lengths: edge lengths
/// follow the mean of adjacent voxels, centered at x = y = 0 with the bottom
/// layer on z = 0 and all velocities zero.
PhysicsState build_lattice(std::span<const double> rest_lengths, const SimConfig& config);

/// Advances one timestep with semi-implicit Euler. Spring targets follow the
/// actuated voxel lengths r + a(t) d(r) at the start of the step. Rollover
/// is tested only when the new time falls on a fitness sampling instant.
void step_in_place(PhysicsState& state, std::span<const double> rest_lengths, const SimConfig& config);
PhysicsState step(PhysicsState state, std::span<const double> rest_lengths, const SimConfig& config);

double center_of_mass_y(const PhysicsState& state);
Eigen::Vector3d center_of_mass(const PhysicsState& state);
double kinetic_energy(const PhysicsState& state);

/// True when the top layer's mean height sits at least rollover_margin below
/// the bottom layer's mean height.
bool check_rollover(const PhysicsState& state, const SimConfig& config);

// Trajectory dump: a header line "# nodes N dims X Y Z" followed by one
// line per frame "t x0 y0 z0 x1 y1 z1 ...".
void write_trajectory_header(std::ostream& out);
void write_trajectory_frame(std::ostream& out, const PhysicsState& state);

}  // namespace softbot
