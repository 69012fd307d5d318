#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "softbot/cli/commands.hpp"
#include "softbot/cli/config.hpp"
#include "softbot/fitness.hpp"

using namespace softbot;
using namespace softbot::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("softbot_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> tiny_evolve(const fs::path& out, const std::string& mode, int jobs) {
  return {"evolve",       "--mode", mode,      "--population", "3",   "--generations", "2", "--runs", "2",
          "--duration",   "0.5",    "--seed",  "5",            "--jobs", std::to_string(jobs), "--out", out.string()};
}

}  // namespace

TEST_CASE("desk preset loads") {
  const ExperimentConfig c = load_config(SOFTBOT_CONFIG_DIR "/desk.cfg");
  CHECK(c.population_size == 12);
  CHECK(c.generations == 100);
  CHECK(c.sim.duration == 4.0);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config errors name the field") {
  const fs::path dir = fresh_dir("config");
  {
    std::ofstream(dir / "bad.cfg") << "[sim]\nwobble = 3\n";
  }
  try {
    load_config(dir / "bad.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("sim.wobble") != std::string::npos);
  }
  ExperimentConfig c;
  CHECK_THROWS_AS(set_field(c, "sim.dt", "fast"), ConfigError);
  CHECK_THROWS_AS(set_field(c, "experiment.mode", "devo"), ConfigError);
  c.sim.dt = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS(load_config(dir / "missing.cfg"));
}

TEST_CASE("canonical config round trip") {
  ExperimentConfig c;
  set_field(c, "sim.duration", "2.5");
  set_field(c, "mutation.per_voxel_prob", "0.25");
  set_field(c, "sweep.rates", "0.1,0.2");
  const fs::path dir = fresh_dir("canonical");
  {
    std::ofstream(dir / "c.cfg") << canonical_config(c);
  }
  const ExperimentConfig back = load_config(dir / "c.cfg");
  CHECK(canonical_config(back) == canonical_config(c));
  CHECK(config_hash(back) == config_hash(c));

  ExperimentConfig other = c;
  other.jobs = 7;
  other.output_dir = "elsewhere";
  other.runs = 99;
  CHECK(config_hash(other) == config_hash(c));
  other.mode = Mode::Evo;
  other.seed = 4;
  CHECK(config_hash(other) != config_hash(c));
  CHECK(comparable_hash(other) == comparable_hash(c));
  other.sim.dt = 2e-4;
  CHECK(comparable_hash(other) != comparable_hash(c));
}

TEST_CASE("exit codes for bad invocations") {
  CHECK(run({}).code == kUsageError);
  CHECK(run({"frobnicate"}).code == kUsageError);
  CHECK(run({"--help"}).code == kOk);
  CHECK(run({"evolve", "--config", "/nonexistent/x.cfg"}).code == kUsageError);
  CHECK(run({"evolve", "--set", "sim.dt=0"}).code == kUsageError);
  CHECK(run({"evolve", "--set", "nokey"}).code == kUsageError);
  const fs::path dir = fresh_dir("codes");
  CHECK(run({"reevaluate-frozen", (dir / "nothing").string()}).code == kUsageError);
  CHECK(run({"reevaluate-frozen", dir.string()}).code == kUsageError);
  CHECK(run({"analyze", (dir / "nothing").string()}).code == kUsageError);
}

TEST_CASE("tiny evolve is reproducible, resumable and guarded") {
  const fs::path root = fresh_dir("evolve");
  REQUIRE(run(tiny_evolve(root / "a", "evo-devo", 1)).code == kOk);
  REQUIRE(run(tiny_evolve(root / "b", "evo-devo", 3)).code == kOk);
  for (const char* f : {"run_000/generations.csv", "run_000/lineage.csv", "run_001/generations.csv",
                        "run_001/lineage.csv"}) {
    const std::string a = slurp(root / "a" / "evo-devo" / f);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(root / "b" / "evo-devo" / f));
  }
  REQUIRE(fs::exists(root / "a" / "evo-devo" / "manifest.json"));
  const std::string manifest = slurp(root / "a" / "evo-devo" / "manifest.json");
  CHECK(manifest.find("\"completed_runs\"") != std::string::npos);
  CHECK(manifest.find("\"config_hash\"") != std::string::npos);

  // rerun is a no-op; extending runs later matches a single invocation
  const std::string before = slurp(root / "a" / "evo-devo" / "run_001" / "lineage.csv");
  CHECK(run(tiny_evolve(root / "a", "evo-devo", 1)).out.find("already complete") != std::string::npos);
  {
    auto args = tiny_evolve(root / "c", "evo-devo", 1);
    args[8] = "1";  // --runs 1
    REQUIRE(run(args).code == kOk);
    args[8] = "2";
    REQUIRE(run(args).code == kOk);
    CHECK(slurp(root / "c" / "evo-devo" / "run_001" / "lineage.csv") == before);
  }

  auto mismatched = tiny_evolve(root / "a", "evo-devo", 1);
  mismatched.push_back("--set");
  mismatched.push_back("mutation.sigma=0.5");
  const Result r = run(mismatched);
  CHECK(r.code == kUsageError);
  CHECK(r.err.find("different configuration") != std::string::npos);
}

TEST_CASE("reevaluate-frozen and analyze") {
  const fs::path root = fresh_dir("analyze");
  REQUIRE(run(tiny_evolve(root / "x", "evo", 1)).code == kOk);
  REQUIRE(run(tiny_evolve(root / "x", "evo-devo", 1)).code == kOk);

  REQUIRE(run({"reevaluate-frozen", (root / "x" / "evo").string()}).code == kOk);
  CHECK(run({"reevaluate-frozen", (root / "x" / "evo").string()}).code == kRuntimeFailure);

  const Experiment e = load_experiment(root / "x" / "evo");
  REQUIRE(e.runs.size() == 2);
  SimConfig two = e.config.sim;
  two.duration = 2.0;
  for (const RunData& run : e.runs) {
    REQUIRE(run.frozen.size() == run.generations.size());
    for (const FrozenRow& row : run.frozen) {
      const auto it = std::find_if(run.lineage.begin(), run.lineage.end(),
                                   [&](const LineageEntry& l) { return l.id == row.id; });
      REQUIRE(it != run.lineage.end());
      CHECK(row.frozen_fitness == evaluate(it->genome, two).fitness);
    }
  }

  REQUIRE(run({"random-search", "--n", "10", "--duration", "0.5", "--out", (root / "rs").string()}).code == kOk);
  const auto samples = read_random_csv(root / "rs" / "random_search_evo.csv");
  CHECK(samples.size() == 10);
  CHECK(run({"random-search", "--n", "10", "--duration", "0.5", "--out", (root / "rs").string()}).code ==
        kRuntimeFailure);
  REQUIRE(run({"random-search", "--n", "10", "--duration", "0.5", "--out", (root / "rs2").string()}).code == kOk);
  CHECK(slurp(root / "rs" / "random_search_evo-devo.csv") == slurp(root / "rs2" / "random_search_evo-devo.csv"));

  const Result both = run({"analyze", (root / "x").string(), "--random", (root / "rs" / "random_search_evo.csv").string(),
                           (root / "rs" / "random_search_evo-devo.csv").string(), "--out", (root / "report").string()});
  REQUIRE(both.code == kOk);
  const std::string fig4 = slurp(root / "report" / "fig4_trajectories.csv");
  CHECK(fig4.find("\nevo,best,") != std::string::npos);
  CHECK(fig4.find("\nevo-devo,best,") != std::string::npos);
  CHECK(fig4.find("\nevo,frozen,") != std::string::npos);
  CHECK(both.out.find("champion.p=") != std::string::npos);

  CHECK(run({"analyze", (root / "x" / "evo").string(), "--out", (root / "single").string()}).code == kOk);
  CHECK(fs::exists(root / "single" / "summary.txt"));

  // a corrupt row is a runtime failure naming the file and line
  {
    std::ofstream app(root / "x" / "evo" / "run_000" / "generations.csv", std::ios::app);
    app << "3,zzz,0,0,0\n";
  }
  const Result bad = run({"analyze", (root / "x" / "evo").string(), "--out", (root / "bad").string()});
  CHECK(bad.code == kRuntimeFailure);
  CHECK(bad.err.find("generations.csv:6") != std::string::npos);
}

TEST_CASE("dump-trajectory and the output root override") {
  const fs::path root = fresh_dir("dump");
  ::setenv(kOutputRootEnv, root.string().c_str(), 1);
  const Result r = run({"dump-trajectory", SOFTBOT_TEST_DATA "/rollover_genome.txt", "--duration", "0.5",
                        "--trajectory", "t/frames.txt", "--trace", "t/trace.csv"});
  ::unsetenv(kOutputRootEnv);
  REQUIRE(r.code == kOk);
  REQUIRE(fs::exists(root / "t" / "frames.txt"));
  REQUIRE(fs::exists(root / "t" / "trace.csv"));
  std::ifstream in(root / "t" / "trace.csv");
  std::string line;
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#' && line[0] != 't') ++rows;
  CHECK(rows == 51);
  CHECK(r.out.find("frames=51") != std::string::npos);
  CHECK(run({"dump-trajectory", "/nonexistent/genome.txt"}).code == kUsageError);
}
