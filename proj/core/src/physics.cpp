#include "softbot/physics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

namespace softbot {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

std::int64_t exact_ratio(double numerator, double denominator, const char* field) {
  const double ratio = numerator / denominator;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError(field, "must divide the sampling interval exactly");
  return static_cast<std::int64_t>(rounded);
}

LatticeTopology make_topology() {
  LatticeTopology topo;
  struct Pending {
    std::vector<std::uint8_t> voxels;
    int bits = 0;
  };
  std::map<std::pair<int, int>, Pending> pending;

  for (int z = 0; z < kGridZ; ++z) {
    for (int y = 0; y < kGridY; ++y) {
      for (int x = 0; x < kGridX; ++x) {
        const int v = voxel_index(x, y, z);
        std::array<int, 8> corner{};
        for (int c = 0; c < 8; ++c)
          corner[c] = node_index(x + (c & 1), y + ((c >> 1) & 1), z + ((c >> 2) & 1));
        for (int c = 0; c < 8; ++c) topo.voxel_nodes[v][c] = static_cast<std::uint16_t>(corner[c]);

        for (int c0 = 0; c0 < 8; ++c0) {
          for (int c1 = c0 + 1; c1 < 8; ++c1) {
            const int bits = std::popcount(static_cast<unsigned>(c0 ^ c1));
            auto& p = pending[{corner[c0], corner[c1]}];
            p.voxels.push_back(static_cast<std::uint8_t>(v));
            p.bits = bits;
          }
        }
      }
    }
  }

  topo.springs.reserve(pending.size());
  for (const auto& [key, p] : pending) {
    Spring s;
    s.a = static_cast<std::uint16_t>(key.first);
    s.b = static_cast<std::uint16_t>(key.second);
    s.voxel_count = static_cast<std::uint8_t>(p.voxels.size());
    std::copy(p.voxels.begin(), p.voxels.end(), s.voxels.begin());
    s.factor = std::sqrt(static_cast<double>(p.bits));
    topo.springs.push_back(s);
  }

  for (int j = 0; j < kNodesY; ++j) {
    for (int i = 0; i < kNodesX; ++i) {
      topo.bottom_layer.push_back(static_cast<std::uint16_t>(node_index(i, j, 0)));
      topo.top_layer.push_back(static_cast<std::uint16_t>(node_index(i, j, kNodesZ - 1)));
    }
  }
  return topo;
}

void check_lengths(std::span<const double> rest_lengths) {
  if (rest_lengths.size() != kVoxelCount)
    throw std::invalid_argument("expected " + std::to_string(kVoxelCount) + " rest lengths, got " +
                                std::to_string(rest_lengths.size()));
  for (std::size_t v = 0; v < rest_lengths.size(); ++v) {
    if (!within_bounds(rest_lengths[v])) {
      std::ostringstream msg;
      msg << "rest length " << rest_lengths[v] << " of voxel " << v << " outside [" << kMinLength << ", "
          << kMaxLength << "]";
      throw std::invalid_argument(msg.str());
    }
  }
}

// Mean length of the voxels adjacent to the axis-aligned edge starting at
// node (i, j, k) and running along `axis`.
double edge_length(std::span<const double> lengths, int axis, int i, int j, int k) {
  double sum = 0.0;
  int count = 0;
  const int n[3] = {i, j, k};
  const int grid[3] = {kGridX, kGridY, kGridZ};
  const int u = (axis + 1) % 3;
  const int w = (axis + 2) % 3;
  for (int du = -1; du <= 0; ++du) {
    for (int dw = -1; dw <= 0; ++dw) {
      int c[3];
      c[axis] = n[axis];
      c[u] = n[u] + du;
      c[w] = n[w] + dw;
      if (c[u] < 0 || c[u] >= grid[u] || c[w] < 0 || c[w] >= grid[w]) continue;
      sum += lengths[voxel_index(c[0], c[1], c[2])];
      ++count;
    }
  }
  return sum / count;
}

}  // namespace

void SimConfig::validate() const {
  if (!finite_positive(dt)) throw ConfigError("dt", "must be positive");
  if (!finite_positive(duration)) throw ConfigError("duration", "must be positive");
  if (!(actuation_amplitude >= 0.0 && actuation_amplitude <= 0.2))
    throw ConfigError("actuation_amplitude", "must lie in [0, 0.2]");
  if (!finite_positive(actuation_period)) throw ConfigError("actuation_period", "must be positive");
  if (!finite_positive(sample_rate)) throw ConfigError("sample_rate", "must be positive");
  if (!std::isfinite(gravity)) throw ConfigError("gravity", "must be finite");
  if (!finite_positive(voxel_size)) throw ConfigError("voxel_size", "must be positive");
  if (!finite_positive(stiffness)) throw ConfigError("stiffness", "must be positive");
  if (!(damping_ratio >= 0.0 && std::isfinite(damping_ratio))) throw ConfigError("damping_ratio", "must be >= 0");
  if (!finite_positive(ground_stiffness)) throw ConfigError("ground_stiffness", "must be positive");
  if (!(ground_damping_ratio >= 0.0 && std::isfinite(ground_damping_ratio)))
    throw ConfigError("ground_damping_ratio", "must be >= 0");
  if (!(ground_friction >= 0.0 && std::isfinite(ground_friction)))
    throw ConfigError("ground_friction", "must be >= 0");
  if (!(kinetic_friction >= 0.0 && kinetic_friction <= ground_friction))
    throw ConfigError("kinetic_friction", "must lie in [0, ground_friction]");
  if (!(rollover_margin >= 0.0 && std::isfinite(rollover_margin)))
    throw ConfigError("rollover_margin", "must be >= 0");
  if (!finite_positive(max_node_speed)) throw ConfigError("max_node_speed", "must be positive");
  steps_per_sample();
  sample_intervals();
}

std::int64_t SimConfig::steps_per_sample() const { return exact_ratio(1.0 / sample_rate, dt, "dt"); }

std::int64_t SimConfig::sample_intervals() const {
  return exact_ratio(duration, 1.0 / sample_rate, "duration");
}

const LatticeTopology& lattice_topology() {
  static const LatticeTopology topo = make_topology();
  return topo;
}

PhysicsState build_lattice(std::span<const double> rest_lengths, const SimConfig& config) {
  check_lengths(rest_lengths);
  const auto& topo = lattice_topology();

  PhysicsState state;
  state.dt = config.dt;
  state.nodes.resize(kNodeCount);

  for (int k = 0; k < kNodesZ; ++k) {
    for (int j = 0; j < kNodesY; ++j) {
      double row = 0.0;
      for (int i = 0; i < kGridX; ++i) row += edge_length(rest_lengths, 0, i, j, k);
      double x = -0.5 * row;
      for (int i = 0; i < kNodesX; ++i) {
        state.nodes[node_index(i, j, k)].position.x() = x;
        if (i < kGridX) x += edge_length(rest_lengths, 0, i, j, k);
      }
    }
  }
  for (int k = 0; k < kNodesZ; ++k) {
    for (int i = 0; i < kNodesX; ++i) {
      double column = 0.0;
      for (int j = 0; j < kGridY; ++j) column += edge_length(rest_lengths, 1, i, j, k);
      double y = -0.5 * column;
      for (int j = 0; j < kNodesY; ++j) {
        state.nodes[node_index(i, j, k)].position.y() = y;
        if (j < kGridY) y += edge_length(rest_lengths, 1, i, j, k);
      }
    }
  }
  for (int j = 0; j < kNodesY; ++j) {
    for (int i = 0; i < kNodesX; ++i) {
      double z = 0.0;
      for (int k = 0; k < kNodesZ; ++k) {
        state.nodes[node_index(i, j, k)].position.z() = z;
        if (k < kGridZ) z += edge_length(rest_lengths, 2, i, j, k);
      }
    }
  }

  for (std::size_t v = 0; v < kVoxelCount; ++v) {
    state.voxels[v].node_indices = topo.voxel_nodes[v];
    state.voxels[v].current_rest_length = rest_lengths[v];
  }
  return state;
}

void step_in_place(PhysicsState& state, std::span<const double> rest_lengths, const SimConfig& config) {
  if (state.terminated_rollover) throw std::logic_error("step on a terminated simulation");
  check_lengths(rest_lengths);
  const auto& topo = lattice_topology();
  const double dt = config.dt;
  auto& nodes = state.nodes;

  const double a = actuation(state.time(), config.actuation());
  std::array<double, kVoxelCount> actuated;
  for (std::size_t v = 0; v < kVoxelCount; ++v)
    actuated[v] = rest_lengths[v] + a * damping_factor(rest_lengths[v]);

  std::array<double, kNodeCount> fx{}, fy{}, fz{};
  std::array<double, kNodeCount> px, py, pz, vx, vy, vz;
  for (std::size_t n = 0; n < kNodeCount; ++n) {
    px[n] = nodes[n].position.x();
    py[n] = nodes[n].position.y();
    pz[n] = nodes[n].position.z();
    vx[n] = nodes[n].velocity.x();
    vy[n] = nodes[n].velocity.y();
    vz[n] = nodes[n].velocity.z();
  }
  fz.fill(kNodeMass * config.gravity_acceleration());

  const double k = config.stiffness;
  const double c = 2.0 * config.damping_ratio * std::sqrt(config.stiffness * kNodeMass);
  for (const Spring& s : topo.springs) {
    double sum = 0.0;
    for (int m = 0; m < s.voxel_count; ++m) sum += actuated[s.voxels[m]];
    const double target = s.factor * sum / s.voxel_count;

    const double dx = px[s.b] - px[s.a];
    const double dy = py[s.b] - py[s.a];
    const double dz = pz[s.b] - pz[s.a];
    const double length = std::sqrt(dx * dx + dy * dy + dz * dz);
    const double inv = 1.0 / length;
    const double closing = ((vx[s.b] - vx[s.a]) * dx + (vy[s.b] - vy[s.a]) * dy + (vz[s.b] - vz[s.a]) * dz) * inv;
    // Shared springs act as parallel copies, one per adjacent voxel.
    const double scale = s.voxel_count * (k * (length - target) + c * closing) * inv;
    fx[s.a] += scale * dx;
    fy[s.a] += scale * dy;
    fz[s.a] += scale * dz;
    fx[s.b] -= scale * dx;
    fy[s.b] -= scale * dy;
    fz[s.b] -= scale * dz;
  }

  const double ground_damping =
      2.0 * config.ground_damping_ratio * std::sqrt(config.ground_stiffness * kNodeMass);
  const double inv_mass = 1.0 / kNodeMass;
  double max_speed_sq = 0.0;
  for (std::size_t n = 0; n < kNodeCount; ++n) {
    double normal = 0.0;
    if (pz[n] < 0.0) {
      normal = std::max(0.0, -config.ground_stiffness * pz[n] - ground_damping * vz[n]);
      fz[n] += normal;
    }
    double ux = vx[n] + dt * inv_mass * fx[n];
    double uy = vy[n] + dt * inv_mass * fy[n];
    const double uz = vz[n] + dt * inv_mass * fz[n];
    if (normal > 0.0) {
      // Coulomb friction as a bounded tangential impulse: the node sticks
      // when the static bound can cancel its sliding velocity, otherwise it
      // slides against kinetic friction.
      const double impulse = normal * dt * inv_mass;
      const double slip = std::sqrt(ux * ux + uy * uy);
      if (slip <= config.ground_friction * impulse) {
        ux = 0.0;
        uy = 0.0;
      } else {
        const double scale = (slip - config.kinetic_friction * impulse) / slip;
        ux *= scale;
        uy *= scale;
      }
    }
    auto& node = nodes[n];
    node.velocity = Eigen::Vector3d(ux, uy, uz);
    node.position += dt * node.velocity;
    max_speed_sq = std::max(max_speed_sq, ux * ux + uy * uy + uz * uz);
  }

  ++state.step_count;
  for (std::size_t v = 0; v < kVoxelCount; ++v) state.voxels[v].current_rest_length = rest_lengths[v];

  if (!(max_speed_sq <= config.max_node_speed * config.max_node_speed)) {
    std::ostringstream msg;
    msg << "node speed " << std::sqrt(max_speed_sq) << " exceeds " << config.max_node_speed << " at t="
        << state.time() << " (dt too large?)";
    throw NumericalBlowup(msg.str());
  }

  if (state.step_count % config.steps_per_sample() == 0 && check_rollover(state, config))
    state.terminated_rollover = true;
}

PhysicsState step(PhysicsState state, std::span<const double> rest_lengths, const SimConfig& config) {
  step_in_place(state, rest_lengths, config);
  return state;
}

Eigen::Vector3d center_of_mass(const PhysicsState& state) {
  Eigen::Vector3d weighted = Eigen::Vector3d::Zero();
  double mass = 0.0;
  for (const auto& node : state.nodes) {
    weighted += node.mass * node.position;
    mass += node.mass;
  }
  return weighted / mass;
}

double center_of_mass_y(const PhysicsState& state) {
  double weighted = 0.0;
  double mass = 0.0;
  for (const auto& node : state.nodes) {
    weighted += node.mass * node.position.y();
    mass += node.mass;
  }
  return weighted / mass;
}

double kinetic_energy(const PhysicsState& state) {
  double energy = 0.0;
  for (const auto& node : state.nodes) energy += 0.5 * node.mass * node.velocity.squaredNorm();
  return energy;
}

bool check_rollover(const PhysicsState& state, const SimConfig& config) {
  const auto& topo = lattice_topology();
  auto mean_z = [&](const std::vector<std::uint16_t>& layer) {
    double sum = 0.0;
    for (auto n : layer) sum += state.nodes[n].position.z();
    return sum / static_cast<double>(layer.size());
  };
  return mean_z(topo.top_layer) <= mean_z(topo.bottom_layer) - config.rollover_margin;
}

void write_trajectory_header(std::ostream& out) {
  out << "# nodes " << kNodeCount << " dims " << kGridX << ' ' << kGridY << ' ' << kGridZ << '\n';
}

void write_trajectory_frame(std::ostream& out, const PhysicsState& state) {
  out << state.time();
  for (const auto& node : state.nodes)
    out << ' ' << node.position.x() << ' ' << node.position.y() << ' ' << node.position.z();
  out << '\n';
}

}  // namespace softbot
