#include "softbot/cli/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "softbot/analysis.hpp"
#include "softbot/fitness.hpp"
#include "softbot/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace softbot::cli {

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kGenerationsFile = "generations.csv";
constexpr const char* kLineageFile = "lineage.csv";
constexpr const char* kFrozenFile = "frozen_midlife.csv";
constexpr const char* kSweepFile = "sweep.csv";
constexpr std::uint64_t kRandomStream = 0x72616e646f6dULL;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string run_name(int run) {
  std::ostringstream s;
  s << "run_" << std::setw(3) << std::setfill('0') << run;
  return s.str();
}

std::string random_file(Mode mode) { return "random_search_" + std::string(to_string(mode)) + ".csv"; }

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

void refuse_existing(const fs::path& path) {
  if (fs::exists(path)) throw std::runtime_error("refusing to overwrite existing output " + path.string());
}

std::string first_line(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

// Options shared by the commands that take an experiment config.
struct ConfigOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::string> mode;
  std::optional<int> generations;
  std::optional<int> population;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
  std::optional<double> mutation_rate;
  std::optional<double> duration;

  void attach(CLI::App& app, bool evolution) {
    app.add_option("--config", config_path, "Experiment config file (INI sections)");
    app.add_option("--set", sets, "Override any config key, as section.key=value");
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--jobs", jobs, "Worker threads");
    app.add_option("--out", out, "Output directory (relative paths resolve against $SOFTBOT_OUTPUT_ROOT)");
    app.add_option("--duration", duration, "Evaluation length in seconds");
    if (evolution) {
      app.add_option("--mode", mode, "evo or evo-devo");
      app.add_option("--generations", generations, "Generations per run");
      app.add_option("--population", population, "Population size");
      app.add_option("--runs", runs, "Independent runs");
      app.add_option("--mutation-rate", mutation_rate, "Per-gene mutation probability");
    }
  }

  ExperimentConfig build() const {
    ExperimentConfig c;
    if (!config_path.empty()) {
      if (!fs::is_regular_file(config_path)) throw UsageError("config file not found: " + config_path);
      c = load_config(config_path);
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects section.key=value, got '" + s + "'");
      set_field(c, s.substr(0, eq), s.substr(eq + 1));
    }
    if (mode) set_field(c, "experiment.mode", *mode);
    if (generations) c.generations = *generations;
    if (population) c.population_size = *population;
    if (runs) c.runs = *runs;
    if (seed) c.seed = *seed;
    if (jobs) c.jobs = *jobs;
    if (out) c.output_dir = *out;
    if (mutation_rate) c.mutation.per_voxel_prob = *mutation_rate;
    if (duration) c.sim.duration = *duration;
    c.validate();
    return c;
  }
};

json config_json(const ExperimentConfig& config) {
  json j = json::object();
  for (const auto& [key, value] : config_fields(config)) j[key] = value;
  return j;
}

ExperimentConfig config_from_json(const json& j, const fs::path& where) {
  if (!j.is_object()) throw std::runtime_error(where.string() + ": manifest has no config object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) set_field(c, key, value.get<std::string>());
  return c;
}

json read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": malformed manifest: " + e.what());
  }
}

struct RunInfo {
  int run = 0;
  std::uint64_t seed = 0;
  double champion_fitness = 0.0;
  double wall_seconds = 0.0;
};

json manifest_json(const ExperimentConfig& config, const std::string& command, std::vector<RunInfo> done,
                   double wall_seconds) {
  std::sort(done.begin(), done.end(), [](const auto& a, const auto& b) { return a.run < b.run; });
  json runs = json::array();
  for (const auto& r : done)
    runs.push_back({{"run", r.run},
                    {"seed", r.seed},
                    {"champion_fitness", r.champion_fitness},
                    {"wall_seconds", r.wall_seconds}});
  return {{"tool", "softbot"},
          {"version", kVersion},
          {"command", command},
          {"config_hash", config_hash(config)},
          {"comparable_hash", comparable_hash(config)},
          {"config", config_json(config)},
          {"runs_total", config.runs},
          {"completed_runs", runs},
          {"wall_seconds", wall_seconds}};
}

// evolve ---------------------------------------------------------------

int cmd_evolve(const ConfigOptions& opts, std::ostream& out) {
  const auto start = Clock::now();
  const ExperimentConfig config = opts.build();
  const fs::path dir = resolve_output(config.output_dir) / std::string(to_string(config.mode));
  fs::create_directories(dir);
  const fs::path manifest_path = dir / kManifest;
  const std::string hash = config_hash(config);

  std::vector<RunInfo> done;
  double previous_wall = 0.0;
  if (fs::exists(manifest_path)) {
    const json m = read_manifest(manifest_path);
    if (m.value("config_hash", "") != hash)
      throw UsageError(dir.string() + " holds an experiment with a different configuration (config_hash " +
                       m.value("config_hash", "?") + ", requested " + hash + ")");
    for (const auto& r : m.at("completed_runs"))
      done.push_back({r.at("run").get<int>(), r.at("seed").get<std::uint64_t>(),
                      r.at("champion_fitness").get<double>(), r.at("wall_seconds").get<double>()});
    previous_wall = m.value("wall_seconds", 0.0);
  }

  // A run whose files were renamed into place but not yet recorded still counts.
  std::set<int> complete;
  for (const auto& r : done) complete.insert(r.run);
  std::vector<int> pending;
  for (int run = 0; run < config.runs; ++run) {
    if (complete.count(run)) continue;
    const fs::path rd = dir / run_name(run);
    const fs::path gens = rd / kGenerationsFile;
    if (fs::exists(gens) && fs::exists(rd / kLineageFile)) {
      const auto header = parse_artifact_header(first_line(gens));
      if (!header || header->config_hash != hash)
        throw std::runtime_error(gens.string() + " was written with a different configuration");
      const auto stats = read_generations_csv(gens);
      done.push_back({run, run_seed(config, run), stats.empty() ? 0.0 : stats.back().best_fitness, 0.0});
      continue;
    }
    pending.push_back(run);
  }
  if (pending.empty()) {
    write_atomic(manifest_path, manifest_json(config, "evolve", done, previous_wall).dump(2) + "\n");
    out << "all " << config.runs << " runs already complete in " << dir.string() << '\n';
    return kOk;
  }

  const int workers = std::min<int>(config.jobs, static_cast<int>(pending.size()));
  EvolutionSettings settings = config.evolution_settings();
  settings.jobs = std::max(1, config.jobs / workers);

  std::mutex lock;
  parallel_for(pending.size(), workers, [&](std::size_t k) {
    const int run = pending[k];
    const auto run_start = Clock::now();
    const std::uint64_t seed = run_seed(config, run);
    const RunRecord record = run_evolution(settings, seed);

    const fs::path rd = dir / run_name(run);
    fs::create_directories(rd);
    const std::string header = run_header(config, run, seed);
    std::ostringstream gens, lineage;
    write_generations_csv(gens, record.generations, header);
    write_lineage_csv(lineage, record.lineage, header);
    write_atomic(rd / kLineageFile, lineage.str());
    write_atomic(rd / kGenerationsFile, gens.str());

    std::lock_guard guard(lock);
    done.push_back({run, seed, record.generations.back().best_fitness, seconds_since(run_start)});
    write_atomic(manifest_path,
                 manifest_json(config, "evolve", done, previous_wall + seconds_since(start)).dump(2) + "\n");
    out << run_name(run) << " seed=" << seed << " champion_fitness=" << std::setprecision(6)
        << record.generations.back().best_fitness << '\n';
  });
  out << "wrote " << pending.size() << " run(s) to " << dir.string() << '\n';
  return kOk;
}

// random-search --------------------------------------------------------

int cmd_random_search(const ConfigOptions& opts, std::optional<int> n, const std::string& modes, std::ostream& out) {
  ExperimentConfig config = opts.build();
  if (n) {
    if (*n < 1) throw ConfigError("random_search.n", "must be >= 1");
    config.random_n = *n;
  }
  std::vector<Mode> selected;
  if (modes == "both")
    selected = {Mode::Evo, Mode::EvoDevo};
  else
    selected = {parse_mode(modes)};

  const fs::path dir = resolve_output(config.output_dir);
  for (Mode m : selected) refuse_existing(dir / random_file(m));
  fs::create_directories(dir);

  for (Mode m : selected) {
    const std::uint64_t seed = derive_seed(config.seed, kRandomStream, m == Mode::Evo ? 0 : 1);
    const auto fitness = random_search(static_cast<std::size_t>(config.random_n), m, config.sim, seed, config.jobs);
    std::vector<RandomSample> rows;
    for (std::size_t i = 0; i < fitness.size(); ++i) rows.push_back({m, static_cast<std::int64_t>(i), fitness[i]});
    std::ostringstream csv;
    write_random_csv(csv, rows,
                     artifact_header(config_hash(config), config.seed) + " mode=" + std::string(to_string(m)) +
                         " mode_seed=" + std::to_string(seed));
    write_atomic(dir / random_file(m), csv.str());
    const auto small = std::count_if(fitness.begin(), fitness.end(), [](double f) { return std::abs(f) < 0.01; });
    out << to_string(m) << ": n=" << fitness.size() << " |F|<0.01: " << small << " median="
        << std::setprecision(6) << median(fitness) << '\n';
  }
  out << "wrote random search to " << dir.string() << '\n';
  return kOk;
}

// reevaluate-frozen ----------------------------------------------------

std::vector<fs::path> run_dirs_of(const fs::path& experiment) {
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(experiment)) {
    const auto name = entry.path().filename().string();
    if (entry.is_directory() && name.rfind("run_", 0) == 0 && fs::exists(entry.path() / kGenerationsFile))
      dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

int cmd_reevaluate_frozen(const std::string& target, std::optional<int> jobs, std::ostream& out) {
  const fs::path dir = resolve_output(target);
  if (!fs::is_directory(dir)) throw UsageError("run directory not found: " + dir.string());

  fs::path experiment;
  std::vector<fs::path> runs;
  if (fs::exists(dir / kManifest)) {
    experiment = dir;
    runs = run_dirs_of(dir);
  } else if (fs::exists(dir / kGenerationsFile) && fs::exists(dir.parent_path() / kManifest)) {
    experiment = dir.parent_path();
    runs = {dir};
  }
  if (runs.empty()) throw UsageError("no run artifacts in " + dir.string());
  for (const auto& r : runs) refuse_existing(r / kFrozenFile);

  const json manifest = read_manifest(experiment / kManifest);
  const ExperimentConfig config = config_from_json(manifest.at("config"), experiment / kManifest);
  const int workers = jobs.value_or(config.jobs);
  if (workers < 1) throw ConfigError("jobs", "must be >= 1");
  const std::string hash = config_hash(config);

  for (const auto& rd : runs) {
    const auto gens = read_generations_csv(rd / kGenerationsFile);
    const auto lineage = read_lineage_csv(rd / kLineageFile);
    std::unordered_map<std::int64_t, const LineageEntry*> by_id;
    for (const auto& e : lineage) by_id.emplace(e.id, &e);

    std::vector<std::int64_t> ids;
    for (const auto& g : gens) ids.push_back(g.best_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (auto id : ids)
      if (!by_id.count(id))
        throw std::runtime_error(rd.string() + ": champion " + std::to_string(id) + " missing from lineage");

    std::vector<double> frozen(ids.size());
    parallel_for(ids.size(), workers, [&](std::size_t i) {
      frozen[i] = evaluate(by_id.at(ids[i])->genome, config.sim, EvalMode::FrozenMidlife).fitness;
    });
    std::map<std::int64_t, double> frozen_of;
    for (std::size_t i = 0; i < ids.size(); ++i) frozen_of[ids[i]] = frozen[i];

    std::vector<FrozenRow> rows;
    for (const auto& g : gens) rows.push_back({g.generation, g.best_id, g.best_fitness, frozen_of.at(g.best_id)});

    std::string line = first_line(rd / kGenerationsFile);
    if (!parse_artifact_header(line)) line = artifact_header(hash, config.seed);
    line += " frozen_duration=2";
    std::ostringstream csv;
    write_frozen_csv(csv, rows, line);
    write_atomic(rd / kFrozenFile, csv.str());
    out << "wrote " << rows.size() << " frozen reevaluations to " << (rd / kFrozenFile).string() << '\n';
  }
  return kOk;
}

// analyze --------------------------------------------------------------

int cmd_analyze(const std::vector<std::string>& dirs, const std::vector<std::string>& random_files,
                const std::optional<std::string>& sweep_file, const std::string& out_dir, int bins,
                std::uint64_t seed, std::ostream& out) {
  if (dirs.empty() && random_files.empty() && !sweep_file)
    throw UsageError("analyze needs at least one run directory, --random or --sweep input");
  if (bins < 1) throw ConfigError("bins", "must be >= 1");

  std::vector<Experiment> experiments;
  for (const auto& d : dirs) {
    const fs::path p = resolve_output(d);
    if (!fs::is_directory(p)) throw UsageError("run directory not found: " + p.string());
    if (fs::exists(p / kManifest)) {
      experiments.push_back(load_experiment(p));
      continue;
    }
    std::vector<fs::path> subs;
    for (const auto& entry : fs::directory_iterator(p))
      if (entry.is_directory() && fs::exists(entry.path() / kManifest)) subs.push_back(entry.path());
    if (subs.empty()) throw UsageError("no experiment manifest in " + p.string());
    std::sort(subs.begin(), subs.end());
    for (const auto& s : subs) experiments.push_back(load_experiment(s));
  }

  ReportInputs inputs;
  inputs.bins = static_cast<std::size_t>(bins);
  inputs.bootstrap_seed = seed;
  std::string hashes;
  std::set<std::string> comparable;
  std::optional<std::uint64_t> first_seed;
  for (const auto& e : experiments) {
    hashes += e.config_hash + ";";
    comparable.insert(e.comparable_hash);
    if (!first_seed) first_seed = e.config.seed;
    inputs.notes.push_back("input " + e.dir.filename().string() + " mode=" + std::string(to_string(e.config.mode)) +
                           " config_hash=" + e.config_hash + " seed=" + std::to_string(e.config.seed) +
                           " runs=" + std::to_string(e.runs.size()));
    inputs.runs.insert(inputs.runs.end(), e.runs.begin(), e.runs.end());
  }
  if (comparable.size() > 1)
    inputs.notes.push_back("warning: input experiments differ in configuration beyond mode and seed");

  for (const auto& f : random_files) {
    const fs::path p = resolve_output(f);
    if (!fs::is_regular_file(p)) throw UsageError("random-search file not found: " + p.string());
    const auto rows = read_random_csv(p);
    const auto header = parse_artifact_header(first_line(p));
    hashes += (header ? header->config_hash : std::string("unknown")) + ";";
    inputs.notes.push_back("random input " + p.filename().string() + " rows=" + std::to_string(rows.size()) +
                           " config_hash=" + (header ? header->config_hash : std::string("unknown")));
    inputs.random.insert(inputs.random.end(), rows.begin(), rows.end());
  }
  if (sweep_file) {
    const fs::path p = resolve_output(*sweep_file);
    if (!fs::is_regular_file(p)) throw UsageError("sweep file not found: " + p.string());
    std::ifstream in(p);
    inputs.sweep = read_sweep_csv(in, p.string());
    const auto header = parse_artifact_header(first_line(p));
    hashes += (header ? header->config_hash : std::string("unknown")) + ";";
    inputs.notes.push_back("sweep input " + p.filename().string() + " rows=" + std::to_string(inputs.sweep.size()));
  }
  inputs.header = artifact_header(fnv1a_hex(hashes), first_seed.value_or(0));

  const fs::path dir = resolve_output(out_dir);
  for (const auto& f : report_files()) refuse_existing(dir / f);
  fs::create_directories(dir);
  write_report(inputs, dir);

  std::ifstream summary(dir / "summary.txt");
  out << summary.rdbuf();
  out << "wrote analysis to " << dir.string() << '\n';
  return kOk;
}

// sweep ----------------------------------------------------------------

int cmd_sweep(const ConfigOptions& opts, const std::optional<std::string>& rates, std::optional<int> runs_per_rate,
              std::ostream& out) {
  ConfigOptions o = opts;
  if (rates) o.sets.push_back("sweep.rates=" + *rates);
  if (runs_per_rate) o.sets.push_back("sweep.runs_per_rate=" + std::to_string(*runs_per_rate));
  const ExperimentConfig config = o.build();

  const fs::path dir = resolve_output(config.output_dir);
  refuse_existing(dir / kSweepFile);
  fs::create_directories(dir);

  SweepSettings s;
  s.rates = config.sweep_rates;
  s.runs_per_rate = config.sweep_runs;
  s.seed = config.seed;
  const auto rows = sweep(s, config.evolution_settings());
  std::ostringstream csv;
  write_sweep_csv(csv, rows, artifact_header(config_hash(config), config.seed));
  write_atomic(dir / kSweepFile, csv.str());
  out << "wrote " << rows.size() << " sweep cells to " << (dir / kSweepFile).string() << '\n';
  return kOk;
}

// dump-trajectory ------------------------------------------------------

int cmd_dump_trajectory(const ConfigOptions& opts, const std::string& genome_file, const std::string& out_file,
                        const std::optional<std::string>& trace_file, bool frozen, std::ostream& out) {
  const ExperimentConfig config = opts.build();
  std::ifstream gin(genome_file);
  if (!gin) throw UsageError("genome file not found: " + genome_file);
  Genome genome;
  try {
    genome = read_genome(gin);
  } catch (const std::exception& e) {
    throw std::runtime_error(genome_file + ": " + e.what());
  }

  const fs::path path = resolve_output(out_file);
  refuse_existing(path);
  std::optional<fs::path> trace_path;
  if (trace_file) {
    trace_path = resolve_output(*trace_file);
    refuse_existing(*trace_path);
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());

  std::ostringstream frames;
  write_trajectory_header(frames);
  const FitnessTrace trace = evaluate(genome, config.sim, frozen ? EvalMode::FrozenMidlife : EvalMode::Full,
                                      [&](const PhysicsState& s) { write_trajectory_frame(frames, s); });
  write_atomic(path, frames.str());
  if (trace_path) {
    if (trace_path->has_parent_path()) fs::create_directories(trace_path->parent_path());
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    write_atomic(*trace_path, csv.str());
  }
  out << "fitness=" << std::setprecision(17) << trace.fitness << " frames=" << trace.samples.size()
      << " terminated_rollover=" << trace.terminated_rollover << " blowup=" << trace.blowup << '\n';
  return kOk;
}

// export-genome --------------------------------------------------------

int cmd_export_genome(const std::string& run_dir, std::optional<std::int64_t> id, const std::string& out_file,
                      std::ostream& out) {
  const fs::path dir = resolve_output(run_dir);
  if (!fs::exists(dir / kGenerationsFile)) throw UsageError("no run artifacts in " + dir.string());
  const auto gens = read_generations_csv(dir / kGenerationsFile);
  if (gens.empty()) throw std::runtime_error((dir / kGenerationsFile).string() + ": no generations");
  const std::int64_t wanted = id.value_or(gens.back().best_id);
  for (const auto& e : read_lineage_csv(dir / kLineageFile)) {
    if (e.id != wanted) continue;
    const fs::path path = resolve_output(out_file);
    refuse_existing(path);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_atomic(path, genome_to_string(e.genome));
    out << "wrote genome " << wanted << " (fitness " << std::setprecision(6) << e.fitness << ") to "
        << path.string() << '\n';
    return kOk;
  }
  throw UsageError("individual " + std::to_string(wanted) + " not found in " + dir.string());
}

}  // namespace

fs::path resolve_output(const fs::path& path) {
  if (path.is_absolute()) return path;
  if (const char* root = std::getenv(kOutputRootEnv); root && *root) return fs::path(root) / path;
  return path;
}

std::uint64_t run_seed(const ExperimentConfig& config, int run) {
  return derive_seed(config.seed, static_cast<std::uint64_t>(run));
}

std::string run_header(const ExperimentConfig& config, int run, std::uint64_t seed) {
  return artifact_header(config_hash(config), config.seed) + " run=" + std::to_string(run) +
         " run_seed=" + std::to_string(seed);
}

Experiment load_experiment(const fs::path& dir) {
  Experiment e;
  e.dir = dir;
  const json manifest = read_manifest(dir / kManifest);
  e.config = config_from_json(manifest.at("config"), dir / kManifest);
  e.config_hash = config_hash(e.config);
  e.comparable_hash = comparable_hash(e.config);

  std::map<int, std::uint64_t> seeds;
  for (const auto& r : manifest.at("completed_runs")) seeds[r.at("run").get<int>()] = r.at("seed").get<std::uint64_t>();

  for (const auto& rd : run_dirs_of(dir)) {
    RunData run;
    run.source = dir.filename().string();
    run.config_hash = e.config_hash;
    run.mode = e.config.mode;
    const std::string name = rd.filename().string();
    try {
      run.run = static_cast<int>(parse_int(name.substr(4)));
    } catch (const std::exception&) {
      continue;
    }
    if (!seeds.count(run.run) || !fs::exists(rd / kLineageFile)) continue;  // incomplete
    run.seed = seeds.at(run.run);
    const auto header = parse_artifact_header(first_line(rd / kGenerationsFile));
    if (!header || header->config_hash != e.config_hash)
      throw std::runtime_error((rd / kGenerationsFile).string() + ": config_hash does not match the manifest");
    run.generations = read_generations_csv(rd / kGenerationsFile);
    run.lineage = read_lineage_csv(rd / kLineageFile);
    if (run.generations.empty())
      throw std::runtime_error((rd / kGenerationsFile).string() + ": no generation rows");
    if (fs::exists(rd / kFrozenFile)) run.frozen = read_frozen_csv(rd / kFrozenFile);
    e.runs.push_back(std::move(run));
  }
  return e;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Soft-voxel robot evolution with ballistic development"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  ConfigOptions evolve_opts;
  auto* evolve = app.add_subcommand("evolve", "Run AFPO evolution and write per-run CSVs plus a manifest");
  evolve_opts.attach(*evolve, true);

  ConfigOptions random_opts;
  std::optional<int> random_n;
  std::string random_modes = "both";
  auto* random = app.add_subcommand("random-search", "Evaluate random genomes of each mode");
  random_opts.attach(*random, false);
  random->add_option("--n", random_n, "Genomes per mode (default 1000)");
  random->add_option("--modes", random_modes, "both, evo or evo-devo");

  std::string frozen_dir;
  std::optional<int> frozen_jobs;
  auto* frozen = app.add_subcommand("reevaluate-frozen", "Reevaluate generation champions with development frozen");
  frozen->add_option("run_dir", frozen_dir, "Experiment or run directory")->required();
  frozen->add_option("--jobs", frozen_jobs, "Worker threads");

  std::vector<std::string> analyze_dirs;
  std::vector<std::string> analyze_random;
  std::optional<std::string> analyze_sweep;
  std::string analyze_out = "analysis";
  int analyze_bins = 50;
  std::uint64_t analyze_seed = 1;
  auto* analyze = app.add_subcommand("analyze", "Write figure CSVs, plots and summary statistics");
  analyze->add_option("run_dirs", analyze_dirs, "Experiment directories (or parents of them)");
  analyze->add_option("--random", analyze_random, "random-search CSVs");
  analyze->add_option("--sweep", analyze_sweep, "sweep CSV");
  analyze->add_option("--out", analyze_out, "Output directory");
  analyze->add_option("--bins", analyze_bins, "Histogram bins for the random-search figure");
  analyze->add_option("--seed", analyze_seed, "Bootstrap seed");

  ConfigOptions sweep_opts;
  std::optional<std::string> sweep_rates;
  std::optional<int> sweep_runs;
  auto* sweep_cmd = app.add_subcommand("sweep", "Champion fitness over a grid of mutation rates");
  sweep_opts.attach(*sweep_cmd, true);
  sweep_cmd->add_option("--rates", sweep_rates, "Comma-separated per-gene mutation rates");
  sweep_cmd->add_option("--runs-per-rate", sweep_runs, "Runs per rate and mode");

  ConfigOptions dump_opts;
  std::string dump_genome;
  std::string dump_out = "trajectory.txt";
  std::optional<std::string> dump_trace;
  bool dump_frozen = false;
  auto* dump = app.add_subcommand("dump-trajectory", "Simulate a genome file and write node positions per frame");
  dump_opts.attach(*dump, false);
  dump->add_option("genome", dump_genome, "Genome file")->required();
  dump->add_option("--trajectory", dump_out, "Trajectory output file");
  dump->add_option("--trace", dump_trace, "Also write the t,y,Q trace CSV");
  dump->add_flag("--frozen", dump_frozen, "Freeze development at midlife and simulate 2 s");

  std::string export_dir;
  std::optional<std::int64_t> export_id;
  std::string export_out;
  auto* export_cmd = app.add_subcommand("export-genome", "Write one logged genome (default: final champion)");
  export_cmd->add_option("run_dir", export_dir, "Run directory")->required();
  export_cmd->add_option("--id", export_id, "Individual id");
  export_cmd->add_option("--out", export_out, "Genome file")->required();

  std::vector<const char*> argv{"softbot"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (evolve->parsed()) return cmd_evolve(evolve_opts, out);
    if (random->parsed()) return cmd_random_search(random_opts, random_n, random_modes, out);
    if (frozen->parsed()) return cmd_reevaluate_frozen(frozen_dir, frozen_jobs, out);
    if (analyze->parsed())
      return cmd_analyze(analyze_dirs, analyze_random, analyze_sweep, analyze_out, analyze_bins, analyze_seed, out);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts, sweep_rates, sweep_runs, out);
    if (dump->parsed())
      return cmd_dump_trajectory(dump_opts, dump_genome, dump_out, dump_trace, dump_frozen, out);
    if (export_cmd->parsed()) return cmd_export_genome(export_dir, export_id, export_out, out);
  } catch (const UsageError& e) {
    err << "softbot: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "softbot: config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "softbot: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsageError;
}

}  // namespace softbot::cli
