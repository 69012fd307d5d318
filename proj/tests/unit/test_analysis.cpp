#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "softbot/analysis.hpp"
#include "softbot/evolution.hpp"

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

LineageEntry entry(std::int64_t id, std::optional<std::int64_t> parent, double fitness, const Genome& g,
                   int birth = 0) {
  LineageEntry e;
  e.id = id;
  e.parent_id = parent;
  e.fitness = fitness;
  e.genome = g;
  e.window = total_window(g);
  e.birth_generation = birth;
  return e;
}

// Pairs (x in a, y in b) with x > y, ties counting one half.
double brute_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  return u;
}

}  // namespace

TEST_CASE("total window") {
  std::mt19937_64 rng(1);
  CHECK(total_window(random_genome(Mode::Evo, rng)) == 0.0);
  GeneArray genes = filled({1.0, 1.0});
  genes[4] = {0.5, 1.5};
  CHECK(close_rel(total_window(Genome(Mode::EvoDevo, genes)), 2.0));
  CHECK(close_rel(total_window(Genome(Mode::EvoDevo, filled({0.25, 1.75}))), 72.0));

  // same value summed over the 48 expanded voxels
  const Genome g = random_genome(Mode::EvoDevo, rng);
  double expanded = 0.0;
  for (const Gene& v : expand_symmetric(g)) expanded += std::abs(v.s1 - v.s0);
  CHECK(close_rel(total_window(g), expanded));
}

TEST_CASE("mutation impact") {
  CHECK(*mutation_impact(2.0, 2.0) == 0.0);
  CHECK(close_rel(*mutation_impact(4.0, 2.0), -0.5));
  CHECK(close_rel(*mutation_impact(2.0, 3.0), 0.5));
  CHECK_FALSE(mutation_impact(0.0, 1.0).has_value());
  CHECK_FALSE(mutation_impact(1.0, -1.0).has_value());
  for (double c : {0.01, 3.0, 1e6}) CHECK(close_rel(*mutation_impact(2.0 * c, 3.0 * c), 0.5));
}

TEST_CASE("mutation flags follow genome differences") {
  const Genome p = Genome::uniform(Mode::EvoDevo, 1.0);
  GeneArray g = p.genes();
  g[3].s1 = 1.2;
  auto f = mutation_flags(p, Genome(Mode::EvoDevo, g));
  CHECK_FALSE(f.early);
  CHECK(f.late);
  g[5].s0 = 0.9;
  f = mutation_flags(p, Genome(Mode::EvoDevo, g));
  CHECK(f.early);
  CHECK(f.late);
}

TEST_CASE("early and late split") {
  const Genome base = Genome::uniform(Mode::EvoDevo, 1.0);
  GeneArray early_genes = base.genes();
  early_genes[0].s0 = 1.1;
  GeneArray late_genes = base.genes();
  late_genes[0].s1 = 1.1;
  const Genome early(Mode::EvoDevo, early_genes), late(Mode::EvoDevo, late_genes);

  SUBCASE("neutral") {
    std::vector<LineageEntry> l{entry(0, {}, 2.0, base), entry(1, 0, 2.0, early), entry(2, 0, 2.0, late)};
    const auto s = early_late_split(l);
    CHECK(*s.early_mean == 0.0);
    CHECK(*s.late_mean == 0.0);
  }
  SUBCASE("single early mutation") {
    std::vector<LineageEntry> l{entry(0, {}, 1.0, base), entry(1, 0, 0.71, early)};
    const auto s = early_late_split(l);
    CHECK(close_rel(*s.early_mean, -0.29));
    CHECK_FALSE(s.late_mean.has_value());
    CHECK(s.early.size() == 1);
  }
  SUBCASE("no positive pairs") {
    std::vector<LineageEntry> l{entry(0, {}, -1.0, base), entry(1, 0, 0.5, early), entry(2, 1, 0.0, late)};
    const auto s = early_late_split(l);
    CHECK_FALSE(s.early_mean.has_value());
    CHECK_FALSE(s.late_mean.has_value());
  }
  SUBCASE("missing parent") {
    std::vector<LineageEntry> l{entry(1, 7, 0.5, early)};
    CHECK_THROWS_WITH(mutation_impacts(l), doctest::Contains("7"));
  }
}

TEST_CASE("midranks") {
  const std::vector<double> v{3.0, 1.0, 3.0, 2.0};
  CHECK(midranks(v) == std::vector<double>{3.5, 1.0, 3.5, 2.0});
}

TEST_CASE("mann whitney examples") {
  const std::vector<double> a{1, 2, 3}, b{10, 11, 12};
  const auto r = mann_whitney_u(a, b);
  CHECK(r.u_a == 0.0);
  CHECK(r.u_b == 9.0);

  const std::vector<double> c{1, 2}, d{1, 2};
  CHECK(mann_whitney_u(c, d).u_a == 2.0);
  CHECK(mann_whitney_u(c, d).p > 0.99);

  std::vector<double> same(20);
  std::iota(same.begin(), same.end(), 0.0);
  CHECK(mann_whitney_u(same, same).p > 0.95);

  const std::vector<double> empty;
  CHECK_THROWS_AS(mann_whitney_u(empty, a), std::invalid_argument);
}

TEST_CASE("mann whitney against reference values") {
  // scipy.stats.mannwhitneyu, asymptotic with continuity correction
  const std::vector<double> a{1.5, 2.25, 3.0, 4.5, 5.25, 6.0, 7.5, 8.0, 9.0, 10.5};
  const std::vector<double> b{3.5, 5.0, 6.5, 8.5, 9.5, 11.0, 12.0, 13.5, 14.0};
  auto r = mann_whitney_u(a, b);
  CHECK(r.u_a == 20.0);
  CHECK_FALSE(r.exact);
  CHECK(std::abs(r.p - 0.04545529484905846) < 1e-12);

  const std::vector<double> a2{1, 2, 2, 3, 4, 4, 4, 5, 6, 7};
  const std::vector<double> b2{2, 3, 4, 5, 5, 6, 7, 7, 8, 9, 9};
  r = mann_whitney_u(a2, b2);
  CHECK(r.u_a == 26.5);
  CHECK(std::abs(r.p - 0.04682250687805345) < 1e-12);

  // exact method
  const std::vector<double> a3{0.3, 1.1, 2.4, 3.9}, b3{0.5, 2.0, 4.4, 5.1, 6.2};
  r = mann_whitney_u(a3, b3);
  CHECK(r.u_a == 5.0);
  CHECK(r.exact);
  CHECK(std::abs(r.p - 0.2857142857142857) < 1e-12);
}

TEST_CASE("mann whitney brute force oracle for small samples") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> value(0, 5);
  std::normal_distribution<double> noise;
  for (int na = 1; na <= 6; ++na) {
    for (int nb = 1; nb <= 6; ++nb) {
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a, b;
        const bool ties = trial % 2;
        for (int i = 0; i < na; ++i) a.push_back(ties ? value(rng) : noise(rng));
        for (int i = 0; i < nb; ++i) b.push_back(ties ? value(rng) : noise(rng));
        const auto ab = mann_whitney_u(a, b);
        const auto ba = mann_whitney_u(b, a);
        CHECK(ab.u_a == brute_u(a, b));
        CHECK(ab.u_a + ab.u_b == double(na * nb));
        CHECK(ab.u_a == ba.u_b);
        CHECK(std::abs(ab.p - ba.p) < 1e-12);
        CHECK(ab.p >= 0.0);
        CHECK(ab.p <= 1.0);
      }
    }
  }
}

TEST_CASE("spearman") {
  const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8}, y{2, 1, 4, 3, 7, 8, 6, 5};
  CHECK(close_rel(spearman_correlation(x, y), 0.7380952380952381, 1e-12));
  const std::vector<double> x2{1, 2, 2, 3, 5}, y2{5, 6, 7, 7, 1};
  CHECK(close_rel(spearman_correlation(x2, y2), -0.13157894736842107, 1e-12));
  std::vector<double> rev(x.rbegin(), x.rend());
  CHECK(close_rel(spearman_correlation(x, rev), -1.0));
  CHECK(close_rel(spearman_correlation(x, x), 1.0));
}

TEST_CASE("median and histogram") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK_THROWS(median({}));
  const std::vector<double> a{-1, 0, 0.1, 2}, b{0.5, 1.5};
  const Histogram h = pooled_histogram(a, b, 3);
  CHECK(h.lo == -1.0);
  CHECK(h.hi == 2.0);
  CHECK(h.counts_a == std::vector<std::size_t>{1, 2, 1});
  CHECK(h.counts_b == std::vector<std::size_t>{0, 1, 1});
}

TEST_CASE("lineage extraction") {
  const Genome g = Genome::uniform(Mode::Evo, 1.0);
  std::vector<LineageEntry> l{entry(0, {}, 1.0, g, 0), entry(3, 0, 1.0, g, 1), entry(5, 3, 1.0, g, 2),
                              entry(8, 5, 1.0, g, 3), entry(9, 8, 1.0, g, 4), entry(11, {}, 1.0, g, 4)};
  CHECK(lineage_extract(l, 11).size() == 1);
  const auto chain = lineage_extract(l, 9);
  REQUIRE(chain.size() == 5);
  std::set<std::int64_t> ids;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    CHECK(chain[i].birth_generation == static_cast<int>(i));
    CHECK(chain[i].window == 0.0);
    ids.insert(chain[i].id);
  }
  CHECK(ids.size() == 5);
  CHECK(chain.front().id == 0);
  CHECK(chain.back().id == 9);

  l[2].parent_id = 42;
  CHECK_THROWS_WITH(lineage_extract(l, 9), doctest::Contains("42"));
  l[2].parent_id = 9;
  CHECK_THROWS_WITH(lineage_extract(l, 9), doctest::Contains("cycle"));
  CHECK_THROWS(lineage_extract(l, 1234));
}

TEST_CASE("bootstrap interval") {
  std::vector<double> v;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(5.0, 1.0);
  for (int i = 0; i < 40; ++i) v.push_back(n(rng));
  const auto a = bootstrap_mean(v, 0.95, 1000, 7);
  const auto b = bootstrap_mean(v, 0.95, 1000, 7);
  CHECK(a.lo <= a.mean);
  CHECK(a.mean <= a.hi);
  CHECK(a.lo == b.lo);
  CHECK(a.hi == b.hi);
  CHECK(a.hi - a.lo < 1.5);
}

TEST_CASE("derived seeds") {
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 10; ++a)
    for (std::uint64_t b = 0; b < 10; ++b) seen.insert(derive_seed(1, a, b));
  CHECK(seen.size() == 100);
}

TEST_CASE("random search is deterministic") {
  SimConfig c;
  c.duration = 0.25;
  const auto a = random_search(6, Mode::EvoDevo, c, 5, 1);
  const auto b = random_search(6, Mode::EvoDevo, c, 5, 3);
  CHECK(a.size() == 6);
  CHECK(a == b);
  CHECK_THROWS(random_search(0, Mode::Evo, c, 5));
}

TEST_CASE("sweep grid and rate zero") {
  EvolutionSettings base;
  base.population_size = 3;
  base.generations = 2;
  base.sim.duration = 0.25;
  SweepSettings s;
  s.rates = {0.5};
  s.runs_per_rate = 1;
  const auto rows = sweep(s, base);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].mode != rows[1].mode);
  CHECK(rows[0].seed == rows[1].seed);

  std::ostringstream out;
  write_sweep_csv(out, rows, "# header");
  std::istringstream in(out.str());
  const auto back = read_sweep_csv(in, "sweep.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[1].champion_fitness == rows[1].champion_fitness);
  CHECK(back[1].seed == rows[1].seed);

  s.rates = {1.5};
  CHECK_THROWS(sweep(s, base));

  // With mutation disabled, children are clones: the champion is the best
  // randomly created individual (initial population or injection).
  base.mutation.per_voxel_prob = 0.0;
  base.generations = 3;
  const RunRecord r = run_evolution(base, derive_seed(1, 0, 0));
  double best_random = -1e300;
  for (const auto& e : r.lineage)
    if (!e.parent_id) best_random = std::max(best_random, e.fitness);
  CHECK(r.generations.back().best_fitness == best_random);
  for (const auto& e : r.lineage) {
    if (!e.parent_id) continue;
    const auto parent = std::find_if(r.lineage.begin(), r.lineage.end(), [&](const auto& p) { return p.id == *e.parent_id; });
    CHECK(parent->genome == e.genome);
    CHECK(parent->fitness == e.fitness);
  }
}
