#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>

namespace softbot {

// Grid of voxels: 4 (x) by 4 (y) by 3 (z), bilaterally symmetric about x.
inline constexpr int kGridX = 4;
inline constexpr int kGridY = 4;
inline constexpr int kGridZ = 3;
inline constexpr std::size_t kVoxelCount = kGridX * kGridY * kGridZ;
inline constexpr std::size_t kGeneCount = kVoxelCount / 2;

inline constexpr double kMinLength = 0.25;
inline constexpr double kMaxLength = 1.75;

enum class Mode { Evo, EvoDevo };

std::string_view to_string(Mode mode);
// Accepts "evo", "evo-devo" (also "evodevo", "evo_devo").
Mode parse_mode(std::string_view text);

/// Starting and final resting length of one voxel (and its mirror twin).
struct Gene {
  double s0 = 1.0;
  double s1 = 1.0;

  friend bool operator==(const Gene&, const Gene&) = default;
};

struct ActuationParams {
  double amplitude = 0.20;  // fraction of the resting length
  double period = 0.25;     // seconds
};

using GeneArray = std::array<Gene, kGeneCount>;
using VoxelLengths = std::array<double, kVoxelCount>;

/// Voxel index for grid coordinates; x varies fastest.
constexpr int voxel_index(int x, int y, int z) { return x + kGridX * (y + kGridY * z); }

/// Gene index driving the voxel at (x, y, z). Genes enumerate mirror pairs in
/// row-major (y, z, half-x) order, where half-x counts outward from the
/// midplane: x = 2 and its mirror x = 1 map to half-x 0.
constexpr int gene_for_voxel(int x, int y, int z) {
  const int half = x >= kGridX / 2 ? x - kGridX / 2 : kGridX / 2 - 1 - x;
  return (y * kGridZ + z) * (kGridX / 2) + half;
}

/// Lookup table voxel index -> gene index.
const std::array<int, kVoxelCount>& voxel_gene_map();

/// A bilaterally symmetric direct encoding. Evo genomes carry s0 == s1 for
/// every gene; the invariant is enforced at construction.
class Genome {
 public:
  Genome();  // all genes (1, 1), Evo
  Genome(Mode mode, const GeneArray& genes);

  static Genome uniform(Mode mode, double length);

  Mode mode() const { return mode_; }
  const GeneArray& genes() const { return genes_; }
  const Gene& gene(std::size_t k) const { return genes_.at(k); }

  /// Same morphology reinterpreted as a developing genome.
  Genome as_evo_devo() const { return Genome(Mode::EvoDevo, genes_); }

  friend bool operator==(const Genome&, const Genome&) = default;

 private:
  Mode mode_ = Mode::Evo;
  GeneArray genes_{};
};

bool within_bounds(double length);

/// Developmental resting length: s0 + (t / tau) (s1 - s0). Throws
/// std::domain_error when t lies outside [0, tau].
double rest_length(const Gene& gene, double t, double tau);

/// Actuation limiter: 1 for s >= 1, otherwise (4 s - 1) / 3.
double damping_factor(double s);

/// Global sinusoidal actuation u sin(2 pi t / w).
double actuation(double t, const ActuationParams& params);

/// Actuated length r + a(t) d(r) with r the developmental resting length.
double current_length(const Gene& gene, double t, double tau, const ActuationParams& params);

/// Gene per voxel slot after mirror expansion.
std::array<Gene, kVoxelCount> expand_symmetric(const Genome& genome);

/// Resting (unactuated) lengths of all 48 voxels at time t.
VoxelLengths voxel_rest_lengths(const Genome& genome, double t, double tau);

/// Actuated lengths of all 48 voxels at time t.
VoxelLengths voxel_current_lengths(const Genome& genome, double t, double tau,
                                   const ActuationParams& params);

/// Each endpoint uniform on [0.25, 1.75]; Evo genomes copy s0 into s1.
Genome random_genome(Mode mode, std::mt19937_64& rng);

// Text form: "mode <evo|evo-devo>" followed by 24 lines "index s0 s1" with
// 17 significant digits. Lines starting with '#' are ignored on read.
void write_genome(std::ostream& out, const Genome& genome);
Genome read_genome(std::istream& in);
std::string genome_to_string(const Genome& genome);
Genome genome_from_string(const std::string& text);

}  // namespace softbot
