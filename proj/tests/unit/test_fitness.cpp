#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "softbot/fitness.hpp"

using namespace softbot;

namespace {

bool close_rel(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

std::vector<FitnessSample> constant_volume_trace(const std::vector<double>& ys, double q) {
  std::vector<FitnessSample> out;
  for (std::size_t i = 0; i < ys.size(); ++i) out.push_back({i * 0.01, ys[i], q});
  return out;
}

Genome rollover_genome() {
  std::ifstream in(SOFTBOT_TEST_DATA "/rollover_genome.txt");
  REQUIRE(in);
  return read_genome(in);
}

}  // namespace

TEST_CASE("total volume") {
  const ActuationParams p{0.2, 0.25};
  CHECK(close_rel(total_volume(Genome::uniform(Mode::Evo, 1.0), 0.0, 8.0, p), 48.0));
  CHECK(close_rel(total_volume(Genome::uniform(Mode::Evo, 0.5), 0.0, 8.0, p), 6.0));
  CHECK(close_rel(total_volume(Genome::uniform(Mode::Evo, 1.0), p.period / 4, 8.0, p), 82.944));
}

TEST_CASE("volume-normalized displacement") {
  CHECK(close_rel(volume_normalized_displacement(constant_volume_trace({0, 1, 2}, 10.0)), 0.2));

  // a volume-48 robot moving 48 in 800 equal steps
  std::vector<double> ys;
  for (int i = 0; i <= 800; ++i) ys.push_back(48.0 * i / 800.0);
  CHECK(close_rel(volume_normalized_displacement(constant_volume_trace(ys, 48.0)), 1.0));

  std::mt19937_64 rng(1);
  std::normal_distribution<double> step(0.0, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> y{0.0};
    for (int i = 0; i < 200; ++i) y.push_back(y.back() + step(rng));
    const double q = 5.0 + trial;
    const auto trace = constant_volume_trace(y, q);
    const double f = volume_normalized_displacement(trace);
    CHECK(close_rel(f, (y.back() - y.front()) / q, 1e-10));

    // reversal negates
    std::vector<double> rev(y.rbegin(), y.rend());
    CHECK(close_rel(volume_normalized_displacement(constant_volume_trace(rev, q)), -f, 1e-10));

    // scaling displacement and volume together leaves F unchanged
    std::vector<FitnessSample> scaled = trace;
    for (auto& s : scaled) {
      s.y *= 3.0;
      s.q *= 3.0;
    }
    CHECK(close_rel(volume_normalized_displacement(scaled), f, 1e-10));
  }
}

TEST_CASE("evaluation samples the lifetime at the sampling rate") {
  SimConfig c;
  c.duration = 2.0;
  std::mt19937_64 rng(3);
  const Genome g = random_genome(Mode::EvoDevo, rng);
  const FitnessTrace t = evaluate(g, c);
  if (!t.terminated_rollover) {
    REQUIRE(t.samples.size() == 201);
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
      CHECK(t.samples[i].t == static_cast<double>(i) / 100.0);
      CHECK(t.samples[i].q > 0.0);
    }
    CHECK(t.fitness == volume_normalized_displacement(t.samples));
  }
}

TEST_CASE("uniform robot does not move") {
  const SimConfig c;
  const FitnessTrace t = evaluate(Genome::uniform(Mode::Evo, 1.0), c);
  CHECK(std::abs(t.fitness) < 0.05);
  CHECK(std::abs(t.samples.back().y - t.samples.front().y) < 0.05);
  CHECK_FALSE(t.terminated_rollover);
}

TEST_CASE("frozen midlife of an evo genome equals a plain 2 s evaluation") {
  SimConfig c;
  std::mt19937_64 rng(4);
  SimConfig two = c;
  two.duration = 2.0;
  for (int i = 0; i < 3; ++i) {
    const Genome g = random_genome(Mode::Evo, rng);
    const FitnessTrace frozen = evaluate(g, c, EvalMode::FrozenMidlife);
    const FitnessTrace plain = evaluate(g, two);
    CHECK(frozen.fitness == plain.fitness);
    CHECK(frozen.samples.size() == plain.samples.size());
    if (!plain.terminated_rollover) CHECK(frozen.samples.size() == 201);
  }
}

TEST_CASE("frozen midlife genome uses the developmental midpoint") {
  GeneArray genes;
  genes.fill({0.5, 1.5});
  const Genome f = frozen_midlife_genome(Genome(Mode::EvoDevo, genes), 8.0);
  CHECK(f.mode() == Mode::Evo);
  for (const Gene& g : f.genes()) CHECK(g == Gene{1.0, 1.0});
}

TEST_CASE("rollover zeroes the fitness and truncates the trace") {
  const SimConfig c;
  const FitnessTrace t = evaluate(rollover_genome(), c);
  CHECK(t.terminated_rollover);
  CHECK(t.fitness == 0.0);
  CHECK(t.samples.size() < 801);
  // it had travelled before falling over
  CHECK(std::abs(t.samples.back().y - t.samples.front().y) > 0.5);
}

TEST_CASE("blowup zeroes the fitness and is flagged") {
  SimConfig c;
  c.duration = 1.0;
  c.max_node_speed = 1e-2;
  std::mt19937_64 rng(5);
  const FitnessTrace t = evaluate(random_genome(Mode::EvoDevo, rng), c);
  CHECK(t.blowup);
  CHECK(t.fitness == 0.0);
  CHECK_FALSE(t.failure.empty());
}

TEST_CASE("evo embedding yields identical traces") {
  SimConfig c;
  c.duration = 1.0;
  std::mt19937_64 rng(6);
  for (int i = 0; i < 3; ++i) {
    const Genome g = random_genome(Mode::Evo, rng);
    const FitnessTrace a = evaluate(g, c);
    const FitnessTrace b = evaluate(g.as_evo_devo(), c);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
      CHECK(a.samples[k].y == b.samples[k].y);
      CHECK(a.samples[k].q == b.samples[k].q);
    }
    CHECK(a.fitness == b.fitness);
  }
}

TEST_CASE("trace csv") {
  FitnessTrace t;
  t.samples = constant_volume_trace({0, 1, 2}, 10.0);
  t.fitness = 0.2;
  std::ostringstream out;
  write_trace_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "t,y,Q");
  CHECK(lines[1] == "0,0,10");
  CHECK(lines[4] == "# fitness=0.20000000000000001 terminated_rollover=0 blowup=0");
}
