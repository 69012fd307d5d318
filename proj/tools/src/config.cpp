#include "softbot/cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>

#include "softbot/records.hpp"

namespace softbot::cli {

namespace {

struct Field {
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

std::string text(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string text(std::int64_t v) { return std::to_string(v); }

int to_int(const std::string& value) {
  const auto v = parse_int(value);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw std::invalid_argument("integer out of range");
  return static_cast<int>(v);
}

std::uint64_t to_u64(const std::string& value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw std::invalid_argument("bad unsigned integer '" + value + "'");
  return v;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + text(values[i]);
  return out;
}

std::vector<double> split_doubles(const std::string& value) {
  std::vector<double> out;
  for (auto& part : split_csv(value)) {
    const auto b = part.find_first_not_of(' ');
    const auto e = part.find_last_not_of(' ');
    if (b == std::string::npos) throw std::invalid_argument("empty list entry");
    out.push_back(parse_double(part.substr(b, e - b + 1)));
  }
  return out;
}

#define SOFTBOT_DOUBLE(name, member)                                                  \
  Field {                                                                             \
    name, [](const ExperimentConfig& c) { return text(c.member); },                  \
        [](ExperimentConfig& c, const std::string& v) { c.member = parse_double(v); } \
  }
#define SOFTBOT_INT(name, member)                                                     \
  Field {                                                                             \
    name, [](const ExperimentConfig& c) { return text(std::int64_t{c.member}); },    \
        [](ExperimentConfig& c, const std::string& v) { c.member = to_int(v); }       \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      Field{"experiment.mode", [](const ExperimentConfig& c) { return std::string(to_string(c.mode)); },
            [](ExperimentConfig& c, const std::string& v) { c.mode = parse_mode(v); }},
      SOFTBOT_INT("experiment.population_size", population_size),
      SOFTBOT_INT("experiment.generations", generations),
      SOFTBOT_INT("experiment.runs", runs),
      Field{"experiment.seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
            [](ExperimentConfig& c, const std::string& v) { c.seed = to_u64(v); }},
      Field{"experiment.output_dir", [](const ExperimentConfig& c) { return c.output_dir; },
            [](ExperimentConfig& c, const std::string& v) {
              if (v.empty()) throw std::invalid_argument("must not be empty");
              c.output_dir = v;
            }},
      SOFTBOT_INT("experiment.jobs", jobs),
      SOFTBOT_DOUBLE("mutation.sigma", mutation.sigma),
      SOFTBOT_DOUBLE("mutation.per_voxel_prob", mutation.per_voxel_prob),
      SOFTBOT_DOUBLE("sim.dt", sim.dt),
      SOFTBOT_DOUBLE("sim.duration", sim.duration),
      SOFTBOT_DOUBLE("sim.actuation_amplitude", sim.actuation_amplitude),
      SOFTBOT_DOUBLE("sim.actuation_period", sim.actuation_period),
      SOFTBOT_DOUBLE("sim.sample_rate", sim.sample_rate),
      SOFTBOT_DOUBLE("sim.gravity", sim.gravity),
      SOFTBOT_DOUBLE("sim.voxel_size", sim.voxel_size),
      SOFTBOT_DOUBLE("sim.stiffness", sim.stiffness),
      SOFTBOT_DOUBLE("sim.damping_ratio", sim.damping_ratio),
      SOFTBOT_DOUBLE("sim.ground_stiffness", sim.ground_stiffness),
      SOFTBOT_DOUBLE("sim.ground_damping_ratio", sim.ground_damping_ratio),
      SOFTBOT_DOUBLE("sim.ground_friction", sim.ground_friction),
      SOFTBOT_DOUBLE("sim.kinetic_friction", sim.kinetic_friction),
      SOFTBOT_DOUBLE("sim.rollover_margin", sim.rollover_margin),
      SOFTBOT_DOUBLE("sim.max_node_speed", sim.max_node_speed),
      SOFTBOT_INT("random_search.n", random_n),
      SOFTBOT_INT("random_search.bins", histogram_bins),
      Field{"sweep.rates", [](const ExperimentConfig& c) { return join(c.sweep_rates); },
            [](ExperimentConfig& c, const std::string& v) { c.sweep_rates = split_doubles(v); }},
      SOFTBOT_INT("sweep.runs_per_rate", sweep_runs),
  };
  return table;
}

#undef SOFTBOT_DOUBLE
#undef SOFTBOT_INT

std::string canonical_without(const ExperimentConfig& config, std::initializer_list<std::string_view> skip) {
  std::string out;
  std::string section;
  for (const auto& [key, value] : config_fields(config)) {
    if (std::find(skip.begin(), skip.end(), key) != skip.end()) continue;
    const auto dot = key.find('.');
    if (key.substr(0, dot) != section) {
      section = key.substr(0, dot);
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += key.substr(dot + 1) + " = " + value + "\n";
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (population_size < 1) throw ConfigError("experiment.population_size", "must be >= 1");
  if (generations < 1) throw ConfigError("experiment.generations", "must be >= 1");
  if (runs < 1) throw ConfigError("experiment.runs", "must be >= 1");
  if (jobs < 1) throw ConfigError("experiment.jobs", "must be >= 1");
  if (random_n < 1) throw ConfigError("random_search.n", "must be >= 1");
  if (histogram_bins < 1) throw ConfigError("random_search.bins", "must be >= 1");
  if (sweep_rates.empty()) throw ConfigError("sweep.rates", "must list at least one rate");
  for (double r : sweep_rates)
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("sweep.rates", "rates must lie in [0, 1]");
  if (sweep_runs < 1) throw ConfigError("sweep.runs_per_rate", "must be >= 1");
  try {
    mutation.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("mutation." + e.field(), e.message());
  }
  try {
    sim.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("sim." + e.field(), e.message());
  }
}

EvolutionSettings ExperimentConfig::evolution_settings() const {
  EvolutionSettings s;
  s.mode = mode;
  s.population_size = population_size;
  s.generations = generations;
  s.mutation = mutation;
  s.sim = sim;
  s.jobs = jobs;
  return s;
}

void set_field(ExperimentConfig& config, const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (key != f.key) continue;
    try {
      f.set(config, value);
    } catch (const std::exception& e) {
      throw ConfigError(key, std::string("invalid value '") + value + "': " + e.what());
    }
    return;
  }
  throw ConfigError(key, "unknown key");
}

std::vector<std::pair<std::string, std::string>> config_fields(const ExperimentConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(config));
  return out;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("file", path.string() + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(section, "key outside of a section");
    for (const auto& [key, value] : body) set_field(config, section + "." + key, value.data());
  }
  return config;
}

std::string canonical_config(const ExperimentConfig& config) { return canonical_without(config, {}); }

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const ExperimentConfig& config) {
  return fnv1a_hex(canonical_without(config, {"experiment.jobs", "experiment.output_dir", "experiment.runs"}));
}

std::string comparable_hash(const ExperimentConfig& config) {
  return fnv1a_hex(canonical_without(
      config, {"experiment.jobs", "experiment.output_dir", "experiment.runs", "experiment.mode", "experiment.seed"}));
}

}  // namespace softbot::cli
