#include "softbot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "softbot/evolution.hpp"
#include "softbot/fitness.hpp"
#include "softbot/parallel.hpp"

namespace softbot {

double total_window(const Genome& genome) {
  double sum = 0.0;
  for (const Gene& g : genome.genes()) sum += std::abs(g.s1 - g.s0);
  return 2.0 * sum;
}

std::optional<double> mutation_impact(double parent_fitness, double child_fitness) {
  if (!(parent_fitness > 0.0) || !(child_fitness > 0.0)) return std::nullopt;
  return child_fitness / parent_fitness - 1.0;
}

MutationFlags mutation_flags(const Genome& parent, const Genome& child) {
  MutationFlags flags;
  for (std::size_t k = 0; k < kGeneCount; ++k) {
    flags.early = flags.early || parent.genes()[k].s0 != child.genes()[k].s0;
    flags.late = flags.late || parent.genes()[k].s1 != child.genes()[k].s1;
  }
  return flags;
}

std::vector<MutationImpact> mutation_impacts(std::span<const LineageEntry> lineage) {
  std::unordered_map<std::int64_t, const LineageEntry*> by_id;
  for (const auto& e : lineage) by_id.emplace(e.id, &e);

  std::vector<MutationImpact> out;
  for (const auto& child : lineage) {
    if (!child.parent_id) continue;
    const auto it = by_id.find(*child.parent_id);
    if (it == by_id.end())
      throw std::runtime_error("individual " + std::to_string(child.id) + " names missing parent " +
                               std::to_string(*child.parent_id));
    const LineageEntry& parent = *it->second;
    const auto m = mutation_impact(parent.fitness, child.fitness);
    if (!m) continue;
    const MutationFlags flags = mutation_flags(parent.genome, child.genome);
    out.push_back({parent.id, child.id, parent.fitness, child.fitness, *m, flags.early, flags.late});
  }
  return out;
}

EarlyLateSplit early_late_split(std::span<const MutationImpact> impacts) {
  EarlyLateSplit split;
  for (const auto& m : impacts) {
    if (m.early)
      split.early.push_back(m.impact);
    else if (m.late)
      split.late.push_back(m.impact);
  }
  auto mean = [](const std::vector<double>& v) -> std::optional<double> {
    if (v.empty()) return std::nullopt;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  split.early_mean = mean(split.early);
  split.late_mean = mean(split.late);
  return split;
}

EarlyLateSplit early_late_split(std::span<const LineageEntry> lineage) {
  const auto impacts = mutation_impacts(lineage);
  return early_late_split(impacts);
}

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

std::vector<double> pooled(std::span<const double> a, std::span<const double> b) {
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  return all;
}

bool has_ties(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return std::adjacent_find(values.begin(), values.end()) != values.end();
}

// Number of arrangements of m a-values and n b-values yielding each U,
// via the recursion c(u; m, n) = c(u - n; m - 1, n) + c(u; m, n - 1).
std::vector<double> exact_u_counts(std::size_t m, std::size_t n) {
  const std::size_t max_u = m * n;
  // table[i][j] is the count vector for sizes (i, j).
  std::vector<std::vector<std::vector<double>>> table(m + 1, std::vector<std::vector<double>>(n + 1));
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      auto& counts = table[i][j];
      counts.assign(i * j + 1, 0.0);
      if (i == 0 || j == 0) {
        counts[0] = 1.0;
        continue;
      }
      const auto& drop_a = table[i - 1][j];
      const auto& drop_b = table[i][j - 1];
      for (std::size_t u = 0; u < drop_a.size(); ++u) counts[u + j] += drop_a[u];
      for (std::size_t u = 0; u < drop_b.size(); ++u) counts[u] += drop_b[u];
    }
  }
  auto out = table[m][n];
  out.resize(max_u + 1, 0.0);
  return out;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

double mann_whitney_normal_p(double u_a, std::span<const double> a, std::span<const double> b) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;
  std::vector<double> all = pooled(a, b);
  std::sort(all.begin(), all.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j + 1 < all.size() && all[j + 1] == all[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double mean = 0.5 * na * nb;
  const double variance = na * nb / 12.0 * ((n + 1.0) - (n > 1.0 ? tie_term / (n * (n - 1.0)) : 0.0));
  if (!(variance > 0.0)) return 1.0;
  const double z = std::max(0.0, std::abs(u_a - mean) - 0.5) / std::sqrt(variance);
  return std::min(1.0, 2.0 * normal_sf(z));
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
  const std::vector<double> all = pooled(a, b);
  const std::vector<double> ranks = midranks(all);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);

  MannWhitneyResult result;
  result.u_a = rank_sum_a - na * (na + 1.0) / 2.0;
  result.u_b = na * nb - result.u_a;

  if (a.size() <= 8 && b.size() <= 8 && !has_ties(all)) {
    const auto counts = exact_u_counts(a.size(), b.size());
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const auto u = static_cast<std::size_t>(std::llround(result.u_a));
    double le = 0.0;
    double ge = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (k <= u) le += counts[k];
      if (k >= u) ge += counts[k];
    }
    result.p = std::min(1.0, 2.0 * std::min(le, ge) / total);
    result.exact = true;
  } else {
    result.p = mann_whitney_normal_p(result.u_a, a, b);
  }
  return result;
}

double spearman_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal samples of size >= 2");
  const auto rx = midranks(x);
  const auto ry = midranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Histogram pooled_histogram(std::span<const double> a, std::span<const double> b, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  Histogram h;
  h.counts_a.assign(bins, 0);
  h.counts_b.assign(bins, 0);
  const auto all = pooled(a, b);
  if (all.empty()) return h;
  const auto [lo, hi] = std::minmax_element(all.begin(), all.end());
  h.lo = *lo;
  h.hi = *hi;
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  auto bin_of = [&](double v) {
    if (width <= 0.0) return std::size_t{0};
    return std::min(bins - 1, static_cast<std::size_t>((v - h.lo) / width));
  };
  for (double v : a) ++h.counts_a[bin_of(v)];
  for (double v : b) ++h.counts_b[bin_of(v)];
  return h;
}

std::vector<double> random_search(std::size_t n, Mode mode, const SimConfig& config, std::uint64_t seed,
                                  int jobs) {
  if (n == 0) throw std::invalid_argument("random_search: n must be positive");
  config.validate();
  std::mt19937_64 rng(seed);
  std::vector<Genome> genomes;
  genomes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) genomes.push_back(random_genome(mode, rng));
  std::vector<double> fitness(n, 0.0);
  parallel_for(n, jobs, [&](std::size_t i) { fitness[i] = evaluate(genomes[i], config).fitness; });
  return fitness;
}

std::vector<LineageStep> lineage_extract(std::span<const LineageEntry> lineage, std::int64_t champion_id) {
  std::unordered_map<std::int64_t, const LineageEntry*> by_id;
  for (const auto& e : lineage) by_id.emplace(e.id, &e);

  std::vector<LineageStep> path;
  std::unordered_set<std::int64_t> visited;
  std::optional<std::int64_t> current = champion_id;
  while (current) {
    const auto it = by_id.find(*current);
    if (it == by_id.end()) throw std::runtime_error("lineage: missing individual " + std::to_string(*current));
    if (!visited.insert(*current).second)
      throw std::runtime_error("lineage: cycle through individual " + std::to_string(*current));
    const LineageEntry& e = *it->second;
    path.push_back({e.id, e.birth_generation, e.fitness, e.window});
    current = e.parent_id;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

MeanInterval bootstrap_mean(std::span<const double> values, double level, std::size_t resamples,
                            std::uint64_t seed) {
  if (values.empty()) throw std::invalid_argument("bootstrap of empty sample");
  MeanInterval out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) sum += values[pick(rng)];
    m = sum / static_cast<double>(values.size());
  }
  std::sort(means.begin(), means.end());
  const double tail = 0.5 * (1.0 - level);
  auto at = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(resamples - 1) + 0.5));
    return means[std::min(idx, resamples - 1)];
  };
  out.lo = at(tail);
  out.hi = at(1.0 - tail);
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a simple combination.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ b);
}

std::vector<SweepRow> sweep(const SweepSettings& settings, const EvolutionSettings& base) {
  for (double r : settings.rates)
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("sweep: mutation rate outside [0, 1]");
  if (settings.runs_per_rate < 1) throw std::invalid_argument("sweep: runs_per_rate must be >= 1");

  std::vector<SweepRow> rows;
  for (std::size_t r = 0; r < settings.rates.size(); ++r) {
    for (Mode mode : settings.modes) {
      for (int run = 0; run < settings.runs_per_rate; ++run) {
        EvolutionSettings cell = base;
        cell.mode = mode;
        cell.mutation.per_voxel_prob = settings.rates[r];
        const std::uint64_t seed = derive_seed(settings.seed, r, static_cast<std::uint64_t>(run));
        const RunRecord record = run_evolution(cell, seed);
        rows.push_back({settings.rates[r], mode, run, seed, record.generations.back().best_fitness});
      }
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, const std::string& header) {
  out << header << '\n' << "rate,mode,run,seed,champion_fitness\n" << std::setprecision(17);
  for (const auto& r : rows)
    out << r.rate << ',' << to_string(r.mode) << ',' << r.run << ',' << r.seed << ',' << r.champion_fitness << '\n';
}

std::vector<SweepRow> read_sweep_csv(std::istream& in, const std::string& name) {
  std::vector<SweepRow> rows;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "rate,mode,run,seed,champion_fitness") throw CsvError(name, line_no, "unexpected column header");
      header_seen = true;
      continue;
    }
    const auto f = split_csv(line);
    try {
      if (f.size() != 5) throw std::invalid_argument("expected 5 fields");
      SweepRow r;
      r.rate = parse_double(f[0]);
      r.mode = parse_mode(f[1]);
      r.run = static_cast<int>(parse_int(f[2]));
      r.seed = static_cast<std::uint64_t>(std::stoull(f[3]));
      r.champion_fitness = parse_double(f[4]);
      rows.push_back(r);
    } catch (const std::exception& e) {
      throw CsvError(name, line_no, e.what());
    }
  }
  if (!header_seen) throw CsvError(name, line_no, "missing column header");
  return rows;
}

}  // namespace softbot
