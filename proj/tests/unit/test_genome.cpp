#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "softbot/genome.hpp"

using namespace softbot;

namespace {

bool close_rel(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

GeneArray filled(Gene g) {
  GeneArray genes;
  genes.fill(g);
  return genes;
}

}  // namespace

TEST_CASE("damping factor") {
  CHECK(damping_factor(1.0) == 1.0);
  CHECK(damping_factor(1.75) == 1.0);
  CHECK(damping_factor(0.25) == 0.0);
  CHECK(close_rel(damping_factor(0.625), 0.5));
  // continuous at 1 from below
  CHECK(std::abs(damping_factor(1.0 - 1e-12) - 1.0) < 1e-11);
}

TEST_CASE("actuation law") {
  const ActuationParams p{0.2, 0.25};
  CHECK(actuation(0.0, p) == 0.0);
  CHECK(close_rel(actuation(p.period / 4, p), 0.2));
  CHECK(std::abs(actuation(p.period / 2, p)) < 1e-15);
  for (double t = 0.0; t < 2.0; t += 0.0137) CHECK(std::abs(actuation(t, p)) <= 0.2);
}

TEST_CASE("rest length interpolates and rejects times outside the lifetime") {
  const double tau = 8.0;
  for (double t : {0.0, 1.0, 3.3, 8.0}) CHECK(rest_length({1.0, 1.0}, t, tau) == 1.0);
  CHECK(close_rel(rest_length({0.5, 1.5}, tau / 2, tau), 1.0));
  CHECK(rest_length({1.5, 0.5}, tau, tau) == 0.5);
  CHECK(rest_length({1.5, 0.5}, 0.0, tau) == 1.5);
  CHECK_THROWS_AS(rest_length({1.0, 1.0}, -1e-9, tau), std::domain_error);
  CHECK_THROWS_AS(rest_length({1.0, 1.0}, tau + 1e-9, tau), std::domain_error);
}

TEST_CASE("current length") {
  const ActuationParams p{0.2, 0.25};
  CHECK(current_length({1.0, 1.0}, 0.0, 8.0, p) == 1.0);
  for (double t : {0.0, 0.0625, 0.1, 5.0}) CHECK(current_length({0.25, 0.25}, t, 8.0, p) == 0.25);
  CHECK(close_rel(current_length({1.0, 1.0}, p.period / 4, 8.0, p), 1.2));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> len(kMinLength, kMaxLength), time(0.0, 8.0);
  for (int i = 0; i < 10000; ++i) {
    const Gene g{len(rng), len(rng)};
    const double c = current_length(g, time(rng), 8.0, p);
    CHECK(c > 0.0);
    CHECK(c <= 1.75 * 1.2 + 1e-12);
  }
}

TEST_CASE("development is monotone without actuation") {
  const ActuationParams still{0.0, 0.25};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> len(kMinLength, kMaxLength);
  for (int i = 0; i < 200; ++i) {
    const Gene g{len(rng), len(rng)};
    const double sign = g.s1 >= g.s0 ? 1.0 : -1.0;
    double prev = current_length(g, 0.0, 8.0, still);
    for (double t = 0.05; t <= 8.0; t += 0.05) {
      const double c = current_length(g, t, 8.0, still);
      CHECK(sign * (c - prev) >= -1e-15);
      prev = c;
    }
  }
}

TEST_CASE("endpoint identity") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Genome g = random_genome(Mode::EvoDevo, rng);
    for (const Gene& gene : g.genes()) {
      CHECK(rest_length(gene, 0.0, 8.0) == gene.s0);
      CHECK(rest_length(gene, 8.0, 8.0) == gene.s1);
    }
  }
}

TEST_CASE("mirror expansion") {
  // Every gene drives exactly one mirror pair (x, y, z) and (3 - x, y, z).
  std::map<int, int> uses;
  for (int z = 0; z < kGridZ; ++z)
    for (int y = 0; y < kGridY; ++y)
      for (int x = 0; x < kGridX; ++x) {
        const int g = voxel_gene_map()[voxel_index(x, y, z)];
        CHECK(g == voxel_gene_map()[voxel_index(kGridX - 1 - x, y, z)]);
        CHECK(g >= 0);
        CHECK(g < static_cast<int>(kGeneCount));
        ++uses[g];
      }
  CHECK(uses.size() == kGeneCount);
  for (const auto& [g, n] : uses) CHECK(n == 2);

  GeneArray genes = filled({1.0, 1.0});
  genes[7] = {1.5, 1.5};
  const auto lengths = voxel_rest_lengths(Genome(Mode::Evo, genes), 0.0, 8.0);
  CHECK(std::count(lengths.begin(), lengths.end(), 1.5) == 2);

  const auto all = expand_symmetric(Genome::uniform(Mode::EvoDevo, 0.7));
  for (const Gene& g : all) CHECK(g == Gene{0.7, 0.7});

  std::mt19937_64 rng(9);
  const Genome r = random_genome(Mode::EvoDevo, rng);
  double genes_sum = 0.0, voxels_sum = 0.0;
  for (const Gene& g : r.genes()) genes_sum += g.s0 * g.s0 * g.s0;
  for (double s : voxel_rest_lengths(r, 0.0, 8.0)) voxels_sum += s * s * s;
  CHECK(close_rel(voxels_sum, 2.0 * genes_sum));
}

TEST_CASE("random genome") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    const Genome g = random_genome(Mode::Evo, rng);
    for (const Gene& gene : g.genes()) CHECK(gene.s0 == gene.s1);
  }
  double sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Genome g = random_genome(Mode::EvoDevo, rng);
    sum += g.gene(0).s0;
    for (const Gene& gene : g.genes()) {
      CHECK(within_bounds(gene.s0));
      CHECK(within_bounds(gene.s1));
    }
  }
  CHECK(std::abs(sum / n - 1.0) < 0.02);

  std::mt19937_64 a(42), b(42);
  CHECK(random_genome(Mode::EvoDevo, a) == random_genome(Mode::EvoDevo, b));
}

TEST_CASE("evo embedding gives identical lengths") {
  std::mt19937_64 rng(1);
  const ActuationParams p{0.2, 0.25};
  for (int i = 0; i < 50; ++i) {
    const Genome evo = random_genome(Mode::Evo, rng);
    const Genome devo = evo.as_evo_devo();
    for (double t = 0.0; t <= 8.0; t += 0.01) CHECK(voxel_current_lengths(evo, t, 8.0, p) == voxel_current_lengths(devo, t, 8.0, p));
  }
}

TEST_CASE("genome invariants are enforced") {
  CHECK_THROWS_AS(Genome(Mode::Evo, filled({1.0, 1.2})), std::invalid_argument);
  CHECK_THROWS_AS(Genome(Mode::EvoDevo, filled({0.2, 1.0})), std::invalid_argument);
  CHECK_THROWS_AS(Genome(Mode::EvoDevo, filled({1.0, 1.76})), std::invalid_argument);
  CHECK_NOTHROW(Genome(Mode::EvoDevo, filled({0.25, 1.75})));
}

TEST_CASE("genome text round trip") {
  std::mt19937_64 rng(8);
  for (Mode mode : {Mode::Evo, Mode::EvoDevo}) {
    const Genome g = random_genome(mode, rng);
    CHECK(genome_from_string(genome_to_string(g)) == g);
  }
  std::string text = genome_to_string(Genome::uniform(Mode::EvoDevo, 1.0));
  CHECK(genome_from_string("# comment\n" + text) == Genome::uniform(Mode::EvoDevo, 1.0));
  const auto cut = text.rfind("23 ");
  CHECK_THROWS(genome_from_string(text.substr(0, cut)));
  CHECK_THROWS(genome_from_string(text + "3 1 1\n"));
  CHECK_THROWS(genome_from_string("mode sideways\n"));
}

TEST_CASE("mode names") {
  CHECK(parse_mode("evo") == Mode::Evo);
  CHECK(parse_mode("evo-devo") == Mode::EvoDevo);
  CHECK(to_string(Mode::EvoDevo) == "evo-devo");
  CHECK_THROWS(parse_mode("devo"));
}
