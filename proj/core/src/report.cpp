#include "softbot/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace softbot {

double RunData::champion_fitness() const {
  if (generations.empty()) throw std::runtime_error("run " + std::to_string(run) + " has no generations");
  return generations.back().best_fitness;
}

std::int64_t RunData::champion_id() const {
  if (generations.empty()) throw std::runtime_error("run " + std::to_string(run) + " has no generations");
  return generations.back().best_id;
}

namespace {

ModeComparison compare(std::vector<double> evo, std::vector<double> devo) {
  ModeComparison c;
  c.evo = std::move(evo);
  c.evo_devo = std::move(devo);
  if (!c.evo.empty()) c.median_evo = median(c.evo);
  if (!c.evo_devo.empty()) c.median_evo_devo = median(c.evo_devo);
  if (!c.evo.empty() && !c.evo_devo.empty()) c.test = mann_whitney_u(c.evo_devo, c.evo);
  return c;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

std::string opt(const std::optional<double>& v) { return v ? fmt(*v) : "missing"; }

// Minimal SVG chart: one data frame with min/max axis labels.
class SvgChart {
 public:
  SvgChart(std::string title, std::string x_label, std::string y_label)
      : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

  void line(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
    series_.push_back({pts, color, false});
    extend(pts);
  }
  void scatter(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
    series_.push_back({pts, color, true});
    extend(pts);
  }
  void legend(const std::string& label, const std::string& color) { legend_.emplace_back(label, color); }

  void write(const std::filesystem::path& path) const {
    auto out = open_out(path);
    constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
    double x0 = xmin_, x1 = xmax_, y0 = ymin_, y1 = ymax_;
    if (!(x1 > x0)) { x0 -= 1; x1 += 1; }
    if (!(y1 > y0)) { y0 -= 1; y1 += 1; }
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title_ << "</text>\n";
    out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\">" << fmt(x0) << "</text>\n";
    out << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\">" << fmt(x1) << "</text>\n";
    out << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" text-anchor=\"end\">" << fmt(y0) << "</text>\n";
    out << "<text x=\"" << L - 4 << "\" y=\"" << T + 10 << "\" text-anchor=\"end\">" << fmt(y1) << "</text>\n";
    out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << x_label_
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (T + H - B) / 2 << ")\">" << y_label_ << "</text>\n";
    if (y0 < 0 && y1 > 0)
      out << "<line x1=\"" << L << "\" y1=\"" << py(0) << "\" x2=\"" << W - R << "\" y2=\"" << py(0)
          << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";

    for (const auto& s : series_) {
      if (s.points) {
        for (const auto& [x, y] : s.pts)
          out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"1.8\" fill=\"" << s.color
              << "\" fill-opacity=\"0.5\"/>\n";
      } else if (!s.pts.empty()) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : s.pts) out << px(x) << ',' << py(y) << ' ';
        out << "\"/>\n";
      }
    }
    double ly = T + 14;
    for (const auto& [label, color] : legend_) {
      out << "<rect x=\"" << W - R - 120 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\"" << color
          << "\"/>\n";
      out << "<text x=\"" << W - R - 105 << "\" y=\"" << ly << "\">" << label << "</text>\n";
      ly += 16;
    }
    out << "</svg>\n";
  }

 private:
  struct Series {
    std::vector<std::pair<double, double>> pts;
    std::string color;
    bool points;
  };

  void extend(const std::vector<std::pair<double, double>>& pts) {
    for (const auto& [x, y] : pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      xmin_ = std::min(xmin_, x);
      xmax_ = std::max(xmax_, x);
      ymin_ = std::min(ymin_, y);
      ymax_ = std::max(ymax_, y);
    }
  }

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  std::vector<std::pair<std::string, std::string>> legend_;
  double xmin_ = std::numeric_limits<double>::infinity();
  double xmax_ = -std::numeric_limits<double>::infinity();
  double ymin_ = std::numeric_limits<double>::infinity();
  double ymax_ = -std::numeric_limits<double>::infinity();
};

const char* color_of(Mode mode) { return mode == Mode::Evo ? "#1f77b4" : "#d62728"; }

void write_preamble(std::ostream& out, const ReportInputs& in, const char* columns) {
  out << in.header << '\n';
  for (const auto& note : in.notes) out << "# " << note << '\n';
  out << columns << '\n' << std::setprecision(17);
}

void write_fig3(const ReportInputs& in, const std::filesystem::path& dir) {
  auto out = open_out(dir / "fig3_random.csv");
  write_preamble(out, in, "bin_lo,bin_hi,evo,evo_devo");
  SvgChart chart("Random search fitness", "F", "count");
  if (!in.random.empty()) {
    const RandomSummary s = summarize_random(in.random, in.small_epsilon, in.bins);
    const auto& h = s.histogram;
    const double width = (h.hi - h.lo) / static_cast<double>(in.bins);
    std::vector<std::pair<double, double>> evo, devo;
    for (std::size_t b = 0; b < in.bins; ++b) {
      const double lo = h.lo + width * static_cast<double>(b);
      out << lo << ',' << lo + width << ',' << h.counts_a[b] << ',' << h.counts_b[b] << '\n';
      evo.emplace_back(lo + 0.5 * width, static_cast<double>(h.counts_a[b]));
      devo.emplace_back(lo + 0.5 * width, static_cast<double>(h.counts_b[b]));
    }
    chart.line(evo, color_of(Mode::Evo));
    chart.line(devo, color_of(Mode::EvoDevo));
  }
  chart.legend("Evo", color_of(Mode::Evo));
  chart.legend("Evo-Devo", color_of(Mode::EvoDevo));
  chart.write(dir / "fig3_random.svg");
}

void write_fig4(const ReportInputs& in, const std::filesystem::path& dir) {
  auto out = open_out(dir / "fig4_trajectories.csv");
  write_preamble(out, in, "mode,series,generation,mean,ci_lo,ci_hi,runs");
  SvgChart chart("Best fitness per generation", "generation", "F");

  for (Mode mode : {Mode::Evo, Mode::EvoDevo}) {
    for (const char* series : {"best", "frozen"}) {
      const bool frozen = std::string(series) == "frozen";
      std::map<int, std::vector<double>> by_gen;
      for (const auto& r : in.runs) {
        if (r.mode != mode) continue;
        if (frozen)
          for (const auto& f : r.frozen) by_gen[f.generation].push_back(f.frozen_fitness);
        else
          for (const auto& g : r.generations) by_gen[g.generation].push_back(g.best_fitness);
      }
      std::vector<std::pair<double, double>> mean_pts, lo_pts, hi_pts;
      for (const auto& [gen, values] : by_gen) {
        const auto ci = bootstrap_mean(values, 0.95, in.bootstrap_resamples,
                                       derive_seed(in.bootstrap_seed, static_cast<std::uint64_t>(gen),
                                                   (mode == Mode::Evo ? 0u : 2u) + (frozen ? 1u : 0u)));
        out << to_string(mode) << ',' << series << ',' << gen << ',' << ci.mean << ',' << ci.lo << ',' << ci.hi
            << ',' << values.size() << '\n';
        mean_pts.emplace_back(gen, ci.mean);
        lo_pts.emplace_back(gen, ci.lo);
        hi_pts.emplace_back(gen, ci.hi);
      }
      const std::string color = frozen ? (mode == Mode::Evo ? "#9ecae1" : "#fc9272") : color_of(mode);
      chart.line(mean_pts, color);
      chart.line(lo_pts, color);
      chart.line(hi_pts, color);
    }
  }
  chart.legend("Evo", color_of(Mode::Evo));
  chart.legend("Evo-Devo", color_of(Mode::EvoDevo));
  chart.legend("Evo-Devo frozen", "#fc9272");
  chart.write(dir / "fig4_trajectories.svg");
}

void write_fig5(const ReportInputs& in, const std::filesystem::path& dir) {
  auto out = open_out(dir / "fig5_window_vs_fitness.csv");
  write_preamble(out, in, "mode,run,id,fitness,W");
  SvgChart chart("Development window vs fitness", "W", "F");
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : in.runs) {
    for (const auto& e : r.lineage) {
      out << to_string(r.mode) << ',' << r.run << ',' << e.id << ',' << e.fitness << ',' << e.window << '\n';
      if (r.mode == Mode::EvoDevo) pts.emplace_back(e.window, e.fitness);
    }
  }
  chart.scatter(pts, color_of(Mode::EvoDevo));
  chart.write(dir / "fig5_window_vs_fitness.svg");
}

void write_fig6(const ReportInputs& in, const std::filesystem::path& dir) {
  auto out = open_out(dir / "fig6_lineage_windows.csv");
  write_preamble(out, in, "mode,run,step,id,birth_generation,fitness,W");
  SvgChart chart("Champion lineage windows", "birth generation", "W");
  for (const auto& r : in.runs) {
    const auto path = lineage_extract(r.lineage, r.champion_id());
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const auto& s = path[i];
      out << to_string(r.mode) << ',' << r.run << ',' << i << ',' << s.id << ',' << s.birth_generation << ','
          << s.fitness << ',' << s.window << '\n';
      pts.emplace_back(s.birth_generation, s.window);
    }
    chart.line(pts, color_of(r.mode));
  }
  chart.write(dir / "fig6_lineage_windows.svg");
}

void write_fig7(const ReportInputs& in, const std::filesystem::path& dir) {
  auto out = open_out(dir / "fig7_mutation_impact.csv");
  write_preamble(out, in, "mode,run,parent_id,child_id,parent_fitness,child_fitness,M,early,late");
  SvgChart chart("Mutation impact vs parent fitness", "parent F", "M");
  std::vector<std::pair<double, double>> early, late;
  for (const auto& r : in.runs) {
    for (const auto& m : mutation_impacts(r.lineage)) {
      out << to_string(r.mode) << ',' << r.run << ',' << m.parent_id << ',' << m.child_id << ','
          << m.parent_fitness << ',' << m.child_fitness << ',' << m.impact << ',' << m.early << ',' << m.late << '\n';
      if (r.mode != Mode::EvoDevo) continue;
      if (m.early)
        early.emplace_back(m.parent_fitness, m.impact);
      else if (m.late)
        late.emplace_back(m.parent_fitness, m.impact);
    }
  }
  chart.scatter(early, "#ff7f0e");
  chart.scatter(late, "#2ca02c");
  chart.legend("early", "#ff7f0e");
  chart.legend("late only", "#2ca02c");
  chart.write(dir / "fig7_mutation_impact.svg");
}

void write_fig8(const ReportInputs& in, const std::filesystem::path& dir) {
  auto out = open_out(dir / "fig8_sweep.csv");
  write_preamble(out, in, "rate,runs_evo,runs_evo_devo,median_evo,median_evo_devo,u_evo_devo,p");
  SvgChart chart("Mutation-rate sweep", "per-gene mutation rate", "median champion F");
  std::map<double, std::pair<std::vector<double>, std::vector<double>>> by_rate;
  for (const auto& row : in.sweep)
    (row.mode == Mode::Evo ? by_rate[row.rate].first : by_rate[row.rate].second).push_back(row.champion_fitness);
  std::vector<std::pair<double, double>> evo_pts, devo_pts;
  for (const auto& [rate, samples] : by_rate) {
    const ModeComparison c = compare(samples.first, samples.second);
    out << rate << ',' << c.evo.size() << ',' << c.evo_devo.size() << ',';
    out << (c.median_evo ? fmt(*c.median_evo) : "") << ',' << (c.median_evo_devo ? fmt(*c.median_evo_devo) : "")
        << ',';
    if (c.test)
      out << c.test->u_a << ',' << c.test->p;
    else
      out << ',';
    out << '\n';
    if (c.median_evo) evo_pts.emplace_back(rate, *c.median_evo);
    if (c.median_evo_devo) devo_pts.emplace_back(rate, *c.median_evo_devo);
  }
  chart.line(evo_pts, color_of(Mode::Evo));
  chart.line(devo_pts, color_of(Mode::EvoDevo));
  chart.legend("Evo", color_of(Mode::Evo));
  chart.legend("Evo-Devo", color_of(Mode::EvoDevo));
  chart.write(dir / "fig8_sweep.svg");
}

void write_summary(const ReportInputs& in, const std::filesystem::path& dir) {
  auto out = open_out(dir / "summary.txt");
  out << in.header << '\n';
  for (const auto& note : in.notes) out << "# " << note << '\n';
  out << std::setprecision(6);

  if (!in.random.empty()) {
    const RandomSummary s = summarize_random(in.random, in.small_epsilon, in.bins);
    out << "random.n_evo=" << s.n_evo << "\nrandom.n_evo_devo=" << s.n_evo_devo << '\n';
    out << "random.small_fraction_evo=" << s.small_evo << "\nrandom.small_fraction_evo_devo=" << s.small_evo_devo
        << '\n';
    if (s.abs_test) out << "random.abs_u_evo_devo=" << s.abs_test->u_a << "\nrandom.abs_p=" << s.abs_test->p << '\n';
    out << "random.mode_bin_has_zero_evo=" << s.mode_bin_has_zero_evo
        << "\nrandom.mode_bin_has_zero_evo_devo=" << s.mode_bin_has_zero_evo_devo << '\n';
  }
  if (!in.runs.empty()) {
    const ModeComparison c = champion_comparison(in.runs);
    out << "champion.runs_evo=" << c.evo.size() << "\nchampion.runs_evo_devo=" << c.evo_devo.size() << '\n';
    out << "champion.median_evo=" << opt(c.median_evo) << "\nchampion.median_evo_devo=" << opt(c.median_evo_devo)
        << '\n';
    if (c.test) out << "champion.u_evo_devo=" << c.test->u_a << "\nchampion.p=" << c.test->p << '\n';

    int last = 0;
    for (const auto& r : in.runs) last = std::max(last, r.generations.back().generation);
    std::optional<int> first_significant;
    for (int g = 0; g <= last && !first_significant; ++g) {
      const ModeComparison gc = generation_comparison(in.runs, g);
      if (gc.test && gc.test->p < 0.05 && *gc.median_evo_devo > *gc.median_evo) first_significant = g;
    }
    out << "champion.first_significant_generation="
        << (first_significant ? std::to_string(*first_significant) : "none") << '\n';

    const auto corr = window_fitness_correlation(in.runs, Mode::EvoDevo);
    out << "window.n_above_median=" << corr.n << "\nwindow.spearman=" << opt(corr.rho) << '\n';

    const auto asym = early_late_asymmetry(in.runs, Mode::EvoDevo);
    out << "impact.n_early=" << asym.split.early.size() << "\nimpact.n_late=" << asym.split.late.size() << '\n';
    out << "impact.mean_early=" << opt(asym.split.early_mean) << "\nimpact.mean_late=" << opt(asym.split.late_mean)
        << '\n';
    if (asym.test) out << "impact.u_late=" << asym.test->u_a << "\nimpact.p=" << asym.test->p << '\n';
  }
}

}  // namespace

ModeComparison champion_comparison(std::span<const RunData> runs) {
  std::vector<double> evo, devo;
  for (const auto& r : runs) (r.mode == Mode::Evo ? evo : devo).push_back(r.champion_fitness());
  return compare(std::move(evo), std::move(devo));
}

ModeComparison generation_comparison(std::span<const RunData> runs, int generation) {
  std::vector<double> evo, devo;
  for (const auto& r : runs)
    for (const auto& g : r.generations)
      if (g.generation == generation) (r.mode == Mode::Evo ? evo : devo).push_back(g.best_fitness);
  return compare(std::move(evo), std::move(devo));
}

CorrelationResult window_fitness_correlation(std::span<const RunData> runs, Mode mode) {
  std::vector<double> w, f;
  for (const auto& r : runs) {
    if (r.mode != mode || r.lineage.empty()) continue;
    std::vector<double> fitness;
    for (const auto& e : r.lineage) fitness.push_back(e.fitness);
    const double cut = median(fitness);
    for (const auto& e : r.lineage) {
      if (e.fitness > cut) {
        w.push_back(e.window);
        f.push_back(e.fitness);
      }
    }
  }
  CorrelationResult out;
  out.n = w.size();
  if (w.size() >= 2) out.rho = spearman_correlation(w, f);
  return out;
}

AsymmetryResult early_late_asymmetry(std::span<const RunData> runs, Mode mode) {
  std::vector<MutationImpact> impacts;
  for (const auto& r : runs) {
    if (r.mode != mode) continue;
    const auto m = mutation_impacts(r.lineage);
    impacts.insert(impacts.end(), m.begin(), m.end());
  }
  AsymmetryResult out;
  out.split = early_late_split(impacts);
  if (!out.split.early.empty() && !out.split.late.empty())
    out.test = mann_whitney_u(out.split.late, out.split.early);
  return out;
}

RandomSummary summarize_random(std::span<const RandomSample> samples, double epsilon, std::size_t bins) {
  std::vector<double> evo, devo, abs_evo, abs_devo;
  for (const auto& s : samples) {
    (s.mode == Mode::Evo ? evo : devo).push_back(s.fitness);
    (s.mode == Mode::Evo ? abs_evo : abs_devo).push_back(std::abs(s.fitness));
  }
  RandomSummary out;
  out.n_evo = evo.size();
  out.n_evo_devo = devo.size();
  auto small = [&](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const auto count = std::count_if(v.begin(), v.end(), [&](double x) { return x < epsilon; });
    return static_cast<double>(count) / static_cast<double>(v.size());
  };
  out.small_evo = small(abs_evo);
  out.small_evo_devo = small(abs_devo);
  if (!evo.empty() && !devo.empty()) out.abs_test = mann_whitney_u(abs_devo, abs_evo);
  out.histogram = pooled_histogram(evo, devo, bins);

  const auto& h = out.histogram;
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  auto mode_has_zero = [&](const std::vector<std::size_t>& counts) {
    if (counts.empty() || width <= 0.0) return true;
    const auto b = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    const double lo = h.lo + width * static_cast<double>(b);
    return lo <= 0.0 && 0.0 <= lo + width;
  };
  out.mode_bin_has_zero_evo = mode_has_zero(h.counts_a);
  out.mode_bin_has_zero_evo_devo = mode_has_zero(h.counts_b);
  return out;
}

std::vector<std::string> report_files() {
  return {"fig3_random.csv",
          "fig3_random.svg",
          "fig4_trajectories.csv",
          "fig4_trajectories.svg",
          "fig5_window_vs_fitness.csv",
          "fig5_window_vs_fitness.svg",
          "fig6_lineage_windows.csv",
          "fig6_lineage_windows.svg",
          "fig7_mutation_impact.csv",
          "fig7_mutation_impact.svg",
          "fig8_sweep.csv",
          "fig8_sweep.svg",
          "summary.txt"};
}

void write_report(const ReportInputs& inputs, const std::filesystem::path& out_dir) {
  if (!std::filesystem::is_directory(out_dir)) throw std::runtime_error("not a directory: " + out_dir.string());
  write_fig3(inputs, out_dir);
  write_fig4(inputs, out_dir);
  write_fig5(inputs, out_dir);
  write_fig6(inputs, out_dir);
  write_fig7(inputs, out_dir);
  write_fig8(inputs, out_dir);
  write_summary(inputs, out_dir);
}

}  // namespace softbot
