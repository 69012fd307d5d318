#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "softbot/genome.hpp"

namespace softbot {

struct GenerationStats {
  int generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  std::int64_t best_id = 0;
  double best_window = 0.0;
};

/// One individual ever created during a run.
struct LineageEntry {
  std::int64_t id = 0;
  std::optional<std::int64_t> parent_id;
  int birth_generation = 0;
  int age = 0;  // at removal, or at the end of the run for survivors
  double fitness = 0.0;
  double window = 0.0;
  Genome genome;
};

struct RunRecord {
  std::uint64_t seed = 0;
  Mode mode = Mode::Evo;
  std::vector<GenerationStats> generations;
  std::vector<LineageEntry> lineage;  // ascending id
};

/// Malformed CSV input; the message names the file and line.
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& file, int line, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + message) {}
};

/// Header comment written as the first line of every artifact.
std::string artifact_header(const std::string& config_hash, std::uint64_t seed);

// Generations CSV columns:
//   generation,best_fitness,mean_fitness,best_id,best_W
// Lineage CSV columns:
//   id,parent_id,birth_generation,age,fitness,W,mode,s0_0,s1_0,...,s0_23,s1_23
// parent_id is -1 for randomly created individuals. Floating-point values
// carry 17 significant digits so files round-trip exactly.
void write_generations_csv(std::ostream& out, const std::vector<GenerationStats>& rows, const std::string& header);
void write_lineage_csv(std::ostream& out, const std::vector<LineageEntry>& rows, const std::string& header);

std::vector<GenerationStats> read_generations_csv(std::istream& in, const std::string& name);
std::vector<LineageEntry> read_lineage_csv(std::istream& in, const std::string& name);
std::vector<GenerationStats> read_generations_csv(const std::filesystem::path& path);
std::vector<LineageEntry> read_lineage_csv(const std::filesystem::path& path);

/// Frozen-development reevaluation of one generation champion.
struct FrozenRow {
  int generation = 0;
  std::int64_t id = 0;
  double fitness = 0.0;         // as evaluated during evolution
  double frozen_fitness = 0.0;  // development frozen at midlife, 2 s
};

/// One random-search sample.
struct RandomSample {
  Mode mode = Mode::Evo;
  std::int64_t index = 0;
  double fitness = 0.0;
};

// Frozen CSV columns: generation,id,fitness,frozen_fitness
// Random-search CSV columns: mode,index,fitness
void write_frozen_csv(std::ostream& out, const std::vector<FrozenRow>& rows, const std::string& header);
std::vector<FrozenRow> read_frozen_csv(std::istream& in, const std::string& name);
std::vector<FrozenRow> read_frozen_csv(const std::filesystem::path& path);
void write_random_csv(std::ostream& out, const std::vector<RandomSample>& rows, const std::string& header);
std::vector<RandomSample> read_random_csv(std::istream& in, const std::string& name);
std::vector<RandomSample> read_random_csv(const std::filesystem::path& path);

/// Reads the "# softbot config_hash=<h> seed=<s>" line, if it is the first line.
struct ArtifactHeader {
  std::string config_hash;
  std::uint64_t seed = 0;
};
std::optional<ArtifactHeader> parse_artifact_header(const std::string& line);

/// Splits one CSV line on commas (no quoting).
std::vector<std::string> split_csv(const std::string& line);
/// Strict numeric parsing; throws std::invalid_argument on trailing junk.
double parse_double(const std::string& text);
std::int64_t parse_int(const std::string& text);

}  // namespace softbot
