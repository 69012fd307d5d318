#include "softbot/genome.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace softbot {

std::string_view to_string(Mode mode) { return mode == Mode::Evo ? "evo" : "evo-devo"; }

Mode parse_mode(std::string_view text) {
  if (text == "evo") return Mode::Evo;
  if (text == "evo-devo" || text == "evodevo" || text == "evo_devo") return Mode::EvoDevo;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "' (expected evo or evo-devo)");
}

const std::array<int, kVoxelCount>& voxel_gene_map() {
  static const std::array<int, kVoxelCount> map = [] {
    std::array<int, kVoxelCount> m{};
    for (int z = 0; z < kGridZ; ++z)
      for (int y = 0; y < kGridY; ++y)
        for (int x = 0; x < kGridX; ++x) m[voxel_index(x, y, z)] = gene_for_voxel(x, y, z);
    return m;
  }();
  return map;
}

bool within_bounds(double length) { return length >= kMinLength && length <= kMaxLength; }

Genome::Genome() { genes_.fill(Gene{1.0, 1.0}); }

Genome::Genome(Mode mode, const GeneArray& genes) : mode_(mode), genes_(genes) {
  for (std::size_t k = 0; k < genes_.size(); ++k) {
    const Gene& g = genes_[k];
    if (!within_bounds(g.s0) || !within_bounds(g.s1)) {
      std::ostringstream msg;
      msg << "gene " << k << " (" << g.s0 << ", " << g.s1 << ") outside [" << kMinLength << ", "
          << kMaxLength << "]";
      throw std::invalid_argument(msg.str());
    }
    if (mode_ == Mode::Evo && g.s0 != g.s1)
      throw std::invalid_argument("gene " + std::to_string(k) + " develops in an Evo genome");
  }
}

Genome Genome::uniform(Mode mode, double length) {
  GeneArray genes;
  genes.fill(Gene{length, length});
  return Genome(mode, genes);
}

double rest_length(const Gene& gene, double t, double tau) {
  if (!(t >= 0.0 && t <= tau)) {
    std::ostringstream msg;
    msg << "time " << t << " outside lifetime [0, " << tau << "]";
    throw std::domain_error(msg.str());
  }
  // std::lerp is exact at both endpoints and returns s0 unchanged when s0 == s1
  return std::lerp(gene.s0, gene.s1, t / tau);
}

double damping_factor(double s) { return s >= 1.0 ? 1.0 : (4.0 * s - 1.0) / 3.0; }

double actuation(double t, const ActuationParams& params) {
  return params.amplitude * std::sin(2.0 * std::numbers::pi * t / params.period);
}

double current_length(const Gene& gene, double t, double tau, const ActuationParams& params) {
  const double r = rest_length(gene, t, tau);
  return r + actuation(t, params) * damping_factor(r);
}

std::array<Gene, kVoxelCount> expand_symmetric(const Genome& genome) {
  std::array<Gene, kVoxelCount> out;
  const auto& map = voxel_gene_map();
  for (std::size_t v = 0; v < kVoxelCount; ++v) out[v] = genome.genes()[map[v]];
  return out;
}

VoxelLengths voxel_rest_lengths(const Genome& genome, double t, double tau) {
  std::array<double, kGeneCount> per_gene;
  for (std::size_t k = 0; k < kGeneCount; ++k) per_gene[k] = rest_length(genome.genes()[k], t, tau);
  VoxelLengths out;
  const auto& map = voxel_gene_map();
  for (std::size_t v = 0; v < kVoxelCount; ++v) out[v] = per_gene[map[v]];
  return out;
}

VoxelLengths voxel_current_lengths(const Genome& genome, double t, double tau,
                                   const ActuationParams& params) {
  const double a = actuation(t, params);
  std::array<double, kGeneCount> per_gene;
  for (std::size_t k = 0; k < kGeneCount; ++k) {
    const double r = rest_length(genome.genes()[k], t, tau);
    per_gene[k] = r + a * damping_factor(r);
  }
  VoxelLengths out;
  const auto& map = voxel_gene_map();
  for (std::size_t v = 0; v < kVoxelCount; ++v) out[v] = per_gene[map[v]];
  return out;
}

Genome random_genome(Mode mode, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> length(kMinLength, kMaxLength);
  GeneArray genes;
  for (auto& g : genes) {
    g.s0 = length(rng);
    g.s1 = mode == Mode::Evo ? g.s0 : length(rng);
  }
  return Genome(mode, genes);
}

void write_genome(std::ostream& out, const Genome& genome) {
  out << "mode " << to_string(genome.mode()) << '\n';
  out << std::setprecision(17);
  for (std::size_t k = 0; k < kGeneCount; ++k)
    out << k << ' ' << genome.genes()[k].s0 << ' ' << genome.genes()[k].s1 << '\n';
}

Genome read_genome(std::istream& in) {
  std::string line;
  std::optional<Mode> mode;
  GeneArray genes;
  std::array<bool, kGeneCount> seen{};
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    if (!mode) {
      std::string key, value;
      if (!(fields >> key >> value) || key != "mode")
        throw std::runtime_error("genome line " + std::to_string(line_no) + ": expected 'mode <evo|evo-devo>'");
      mode = parse_mode(value);
      continue;
    }
    std::size_t index = 0;
    Gene g;
    if (!(fields >> index >> g.s0 >> g.s1) || index >= kGeneCount)
      throw std::runtime_error("genome line " + std::to_string(line_no) + ": expected 'index s0 s1'");
    if (seen[index]) throw std::runtime_error("genome line " + std::to_string(line_no) + ": duplicate gene index");
    seen[index] = true;
    genes[index] = g;
  }
  if (!mode) throw std::runtime_error("genome: missing mode header");
  for (std::size_t k = 0; k < kGeneCount; ++k)
    if (!seen[k]) throw std::runtime_error("genome: missing gene " + std::to_string(k));
  return Genome(*mode, genes);
}

std::string genome_to_string(const Genome& genome) {
  std::ostringstream out;
  write_genome(out, genome);
  return out.str();
}

Genome genome_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_genome(in);
}

}  // namespace softbot
