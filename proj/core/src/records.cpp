#include "softbot/records.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace softbot {

namespace {

constexpr const char* kGenerationColumns = "generation,best_fitness,mean_fitness,best_id,best_W";
constexpr const char* kFrozenColumns = "generation,id,fitness,frozen_fitness";
constexpr const char* kRandomColumns = "mode,index,fitness";

std::string lineage_columns() {
  std::string cols = "id,parent_id,birth_generation,age,fitness,W,mode";
  for (std::size_t k = 0; k < kGeneCount; ++k)
    cols += ",s0_" + std::to_string(k) + ",s1_" + std::to_string(k);
  return cols;
}

bool skip_line(const std::string& line) { return line.empty() || line[0] == '#' || line == "\r"; }

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

template <typename Row, typename Parse>
std::vector<Row> read_rows(std::istream& in, const std::string& name, const std::string& columns, Parse parse) {
  std::vector<Row> rows;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (skip_line(line)) continue;
    if (!header_seen) {
      if (line != columns) throw CsvError(name, line_no, "unexpected column header");
      header_seen = true;
      continue;
    }
    try {
      rows.push_back(parse(split_csv(line)));
    } catch (const std::exception& e) {
      throw CsvError(name, line_no, e.what());
    }
  }
  if (!header_seen) throw CsvError(name, line_no, "missing column header");
  return rows;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

}  // namespace

std::string artifact_header(const std::string& config_hash, std::uint64_t seed) {
  return "# softbot config_hash=" + config_hash + " seed=" + std::to_string(seed);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("bad number '" + text + "'");
  return value;
}

std::int64_t parse_int(const std::string& text) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("bad integer '" + text + "'");
  return value;
}

void write_generations_csv(std::ostream& out, const std::vector<GenerationStats>& rows,
                           const std::string& header) {
  out << header << '\n' << kGenerationColumns << '\n' << std::setprecision(17);
  for (const auto& r : rows)
    out << r.generation << ',' << r.best_fitness << ',' << r.mean_fitness << ',' << r.best_id << ','
        << r.best_window << '\n';
}

void write_lineage_csv(std::ostream& out, const std::vector<LineageEntry>& rows, const std::string& header) {
  out << header << '\n' << lineage_columns() << '\n' << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.id << ',' << r.parent_id.value_or(-1) << ',' << r.birth_generation << ',' << r.age << ','
        << r.fitness << ',' << r.window << ',' << to_string(r.genome.mode());
    for (const Gene& g : r.genome.genes()) out << ',' << g.s0 << ',' << g.s1;
    out << '\n';
  }
}

std::vector<GenerationStats> read_generations_csv(std::istream& in, const std::string& name) {
  return read_rows<GenerationStats>(in, name, kGenerationColumns, [](const std::vector<std::string>& f) {
    if (f.size() != 5) throw std::invalid_argument("expected 5 fields, got " + std::to_string(f.size()));
    GenerationStats r;
    r.generation = static_cast<int>(parse_int(f[0]));
    r.best_fitness = parse_double(f[1]);
    r.mean_fitness = parse_double(f[2]);
    r.best_id = parse_int(f[3]);
    r.best_window = parse_double(f[4]);
    return r;
  });
}

std::vector<LineageEntry> read_lineage_csv(std::istream& in, const std::string& name) {
  constexpr std::size_t kFields = 7 + 2 * kGeneCount;
  return read_rows<LineageEntry>(in, name, lineage_columns(), [](const std::vector<std::string>& f) {
    if (f.size() != kFields)
      throw std::invalid_argument("expected " + std::to_string(kFields) + " fields, got " + std::to_string(f.size()));
    LineageEntry r;
    r.id = parse_int(f[0]);
    const auto parent = parse_int(f[1]);
    if (parent >= 0) r.parent_id = parent;
    r.birth_generation = static_cast<int>(parse_int(f[2]));
    r.age = static_cast<int>(parse_int(f[3]));
    r.fitness = parse_double(f[4]);
    r.window = parse_double(f[5]);
    const Mode mode = parse_mode(f[6]);
    GeneArray genes;
    for (std::size_t k = 0; k < kGeneCount; ++k) {
      genes[k].s0 = parse_double(f[7 + 2 * k]);
      genes[k].s1 = parse_double(f[8 + 2 * k]);
    }
    r.genome = Genome(mode, genes);
    return r;
  });
}

std::vector<GenerationStats> read_generations_csv(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_generations_csv(in, path.string());
}

std::vector<LineageEntry> read_lineage_csv(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_lineage_csv(in, path.string());
}

void write_frozen_csv(std::ostream& out, const std::vector<FrozenRow>& rows, const std::string& header) {
  out << header << '\n' << kFrozenColumns << '\n' << std::setprecision(17);
  for (const auto& r : rows) out << r.generation << ',' << r.id << ',' << r.fitness << ',' << r.frozen_fitness << '\n';
}

std::vector<FrozenRow> read_frozen_csv(std::istream& in, const std::string& name) {
  return read_rows<FrozenRow>(in, name, kFrozenColumns, [](const std::vector<std::string>& f) {
    if (f.size() != 4) throw std::invalid_argument("expected 4 fields, got " + std::to_string(f.size()));
    FrozenRow r;
    r.generation = static_cast<int>(parse_int(f[0]));
    r.id = parse_int(f[1]);
    r.fitness = parse_double(f[2]);
    r.frozen_fitness = parse_double(f[3]);
    return r;
  });
}

std::vector<FrozenRow> read_frozen_csv(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_frozen_csv(in, path.string());
}

void write_random_csv(std::ostream& out, const std::vector<RandomSample>& rows, const std::string& header) {
  out << header << '\n' << kRandomColumns << '\n' << std::setprecision(17);
  for (const auto& r : rows) out << to_string(r.mode) << ',' << r.index << ',' << r.fitness << '\n';
}

std::vector<RandomSample> read_random_csv(std::istream& in, const std::string& name) {
  return read_rows<RandomSample>(in, name, kRandomColumns, [](const std::vector<std::string>& f) {
    if (f.size() != 3) throw std::invalid_argument("expected 3 fields, got " + std::to_string(f.size()));
    RandomSample r;
    r.mode = parse_mode(f[0]);
    r.index = parse_int(f[1]);
    r.fitness = parse_double(f[2]);
    return r;
  });
}

std::vector<RandomSample> read_random_csv(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_random_csv(in, path.string());
}

std::optional<ArtifactHeader> parse_artifact_header(const std::string& line) {
  static const std::string prefix = "# softbot config_hash=";
  if (line.rfind(prefix, 0) != 0) return std::nullopt;
  const auto space = line.find(" seed=", prefix.size());
  if (space == std::string::npos) return std::nullopt;
  ArtifactHeader h;
  h.config_hash = line.substr(prefix.size(), space - prefix.size());
  std::string seed = line.substr(space + 6);
  const auto end = seed.find(' ');
  if (end != std::string::npos) seed.resize(end);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(seed.data(), seed.data() + seed.size(), value);
  if (ec != std::errc() || ptr != seed.data() + seed.size()) return std::nullopt;
  h.seed = value;
  return h;
}

}  // namespace softbot
