#include "phasesync/reproduce.hpp"

#include "format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace phasesync::reproduce {

Scale parse_scale(std::string_view name) {
  if (name == "fast") return Scale::Fast;
  if (name == "full") return Scale::Full;
  throw Error(ErrorCode::InvalidArgument, "scale must be 'fast' or 'full'");
}

bool FigureOutcome::passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.passed; });
}

std::vector<double> coupling_grid() {
  std::vector<double> grid(11);
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = static_cast<double>(k) / 10.0;
  return grid;
}

std::size_t realizations(Scale scale) { return scale == Scale::Fast ? 10 : 50; }

SweepConfig mixing_sweep_config(Scale scale, std::size_t threads) {
  SweepConfig cfg;
  cfg.couplings = coupling_grid();
  cfg.mixings = {0.0, 0.1, 0.2};
  cfg.realizations = realizations(scale);
  cfg.welch = {400, 200};
  cfg.base_seed = 2019;
  cfg.threads = threads;
  return cfg;
}

SweepConfig coherence_sweep_config(Scale scale, const WelchConfig& welch, std::size_t threads) {
  SweepConfig cfg;
  cfg.couplings = coupling_grid();
  cfg.mixings = {0.0};
  cfg.realizations = realizations(scale);
  cfg.welch = welch;
  cfg.base_seed = 2019;
  cfg.threads = threads;
  return cfg;
}

bench::BenchConfig bench_config(Scale scale) {
  bench::BenchConfig cfg;
  if (scale == Scale::Fast) {
    cfg.signal_counts = {100, 250, 500};
    cfg.trial_counts = {40};
  }
  return cfg;
}

namespace {

Criterion make(std::string name, bool passed, double value, std::string threshold) {
  return {std::move(name), passed, value, std::move(threshold)};
}

std::size_t index_of(const std::vector<double>& grid, double value) {
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (std::abs(grid[k] - value) < 1e-9) return k;
  throw Error(ErrorCode::InvalidArgument, "grid value " + std::to_string(value) + " missing from sweep");
}

}  // namespace

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  return (saa > 0.0 && sbb > 0.0) ? sab / std::sqrt(saa * sbb) : 0.0;
}

std::vector<Criterion> evaluate_mixing(const SweepResult& s) {
  std::vector<Criterion> out;
  const std::size_t v0 = index_of(s.mixings, 0.0);
  const std::size_t v1 = index_of(s.mixings, 0.1);
  const std::size_t v2 = index_of(s.mixings, 0.2);
  const std::size_t nc = s.couplings.size();

  double gap = 0.0;
  for (std::size_t c = 0; c < nc; ++c) gap += std::abs(s.mean(Metric::PLV, v0, c) - s.mean(Metric::ciPLV, v0, c));
  gap /= static_cast<double>(nc);
  out.push_back(make("V=0: mean_C |PLV - ciPLV|", gap < 0.1, gap, "< 0.1"));

  double worst = 0.0;
  for (std::size_t c = 0; c < nc; ++c)
    worst = std::max(worst, std::abs(s.mean(Metric::ciPLV, v2, c) - s.mean(Metric::ciPLV, v0, c)));
  out.push_back(make("max_C |ciPLV(V=0.2) - ciPLV(V=0)|", worst < 0.1, worst, "< 0.1"));

  double smallest = INFINITY;
  for (std::size_t c = 0; c < nc; ++c) {
    if (s.couplings[c] > 0.2 + 1e-9) continue;
    smallest = std::min(smallest, s.mean(Metric::PLV, v1, c) - s.mean(Metric::PLV, v0, c));
  }
  out.push_back(make("min_{C<=0.2} PLV(V=0.1) - PLV(V=0)", smallest > 0.05, smallest, "> 0.05"));

  double margin = INFINITY;
  for (std::size_t c = 0; c < nc; ++c) {
    if (s.couplings[c] < 0.8 - 1e-9) continue;
    margin = std::min(margin, s.mean(Metric::ciPLV, v0, c) - s.mean(Metric::iPLV, v0, c));
  }
  out.push_back(make("min_{C>=0.8} ciPLV - iPLV at V=0", margin > 0.0, margin, "> 0"));
  return out;
}

std::vector<Criterion> evaluate_coherence(const SweepResult& long_window, const SweepResult& short_window) {
  std::vector<Criterion> out;
  const std::size_t c1 = index_of(short_window.couplings, 1.0);
  const double peak = short_window.mean(Metric::COH_MAX, 0, c1);
  out.push_back(make("100/50 band-max coherence at C=1", std::abs(peak - 0.85) <= 0.10, peak, "0.85 +- 0.10"));

  const double r = pearson(long_window.mean_curve(Metric::PLV, 0), long_window.mean_curve(Metric::COH_MAX, 0));
  out.push_back(make("400/200 corr(PLV, COH_MAX) over C", r > 0.9, r, "> 0.9"));

  const std::size_t c0l = index_of(long_window.couplings, 0.0);
  const std::size_t c0s = index_of(short_window.couplings, 0.0);
  const double bias_long = std::abs(long_window.mean(Metric::COH_MAX, 0, c0l) - long_window.mean(Metric::PLV, 0, c0l));
  const double bias_short =
      std::abs(short_window.mean(Metric::COH_MAX, 0, c0s) - short_window.mean(Metric::PLV, 0, c0s));
  out.push_back(make("C=0 bias |COH_MAX - PLV|: 100/50 below 400/200", bias_short < bias_long, bias_short,
                     "< " + detail::fmt_double(bias_long)));
  return out;
}

std::vector<Criterion> evaluate_bench(const std::vector<bench::BenchRecord>& records) {
  using bench::Implementation;
  std::vector<Criterion> out;
  const double vs_vec = bench::speedup(records, Implementation::Vectorized, Implementation::Matrix, 500, 40);
  out.push_back(make("matrix vs vectorized speedup @500x40", vs_vec >= 10.0, vs_vec, ">= 10"));
  const double vs_ref = bench::speedup(records, Implementation::Reference, Implementation::Matrix, 500, 40);
  out.push_back(make("matrix vs reference speedup @500x40", vs_ref >= 20.0, vs_ref, ">= 20"));
  const double vec_ref = bench::speedup(records, Implementation::Reference, Implementation::Vectorized, 500, 40);
  out.push_back(make("vectorized vs reference speedup @500x40", vec_ref > 1.5, vec_ref, "> 1.5"));

  bool monotone = true;
  for (auto impl : {Implementation::Reference, Implementation::Vectorized, Implementation::Matrix}) {
    for (std::size_t trials : {std::size_t{20}, std::size_t{40}}) {
      std::vector<std::pair<std::size_t, double>> curve;
      for (const auto& r : records)
        if (r.implementation == impl && r.n_trials == trials) curve.emplace_back(r.n_signals, r.mean_time());
      std::sort(curve.begin(), curve.end());
      for (std::size_t k = 1; k < curve.size(); ++k) monotone = monotone && curve[k].second >= curve[k - 1].second;
    }
  }
  out.push_back(make("wall time non-decreasing in signal count", monotone, monotone ? 1.0 : 0.0, "true"));
  return out;
}

std::string curve_csv(const SweepResult& s, const std::vector<Metric>& metrics) {
  std::ostringstream out;
  out << "metric,V,C,mean,std,n\n";
  for (Metric m : metrics)
    for (std::size_t v = 0; v < s.mixings.size(); ++v)
      for (std::size_t c = 0; c < s.couplings.size(); ++c)
        out << to_string(m) << ',' << detail::fmt_double(s.mixings[v]) << ',' << detail::fmt_double(s.couplings[c])
            << ',' << detail::fmt_double(s.mean(m, v, c)) << ',' << detail::fmt_double(s.stddev(m, v, c)) << ','
            << s.realizations << '\n';
  return out.str();
}

namespace {

std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream out(path);
  out << text;
  if (!out) throw Error(ErrorCode::FormatError, "cannot write " + path.string());
  return path;
}

}  // namespace

FigureOutcome reproduce_figure(std::string_view figure, Scale scale, const std::filesystem::path& out_dir,
                               std::size_t threads) {
  FigureOutcome outcome;
  if (figure == "fig1") {
    auto cfg = bench_config(scale);
    const auto records = bench::run_benchmark(cfg);
    const auto report = bench::emit_report(records);
    outcome.files.push_back(write_text(out_dir, "fig1_bench.csv", report.csv));
    outcome.files.push_back(write_text(out_dir, "fig1_summary.txt", report.summary));
    outcome.criteria = evaluate_bench(records);
  } else if (figure == "fig2") {
    const auto long_window = coupling_sweep(coherence_sweep_config(scale, {400, 200}, threads));
    const auto short_window = coupling_sweep(coherence_sweep_config(scale, {100, 50}, threads));
    const std::vector<Metric> shown{Metric::PLV, Metric::COH_MAX, Metric::COH_MEAN};
    outcome.files.push_back(write_text(out_dir, "fig2_window400_overlap200.csv", curve_csv(long_window, shown)));
    outcome.files.push_back(write_text(out_dir, "fig2_window100_overlap50.csv", curve_csv(short_window, shown)));
    outcome.criteria = evaluate_coherence(long_window, short_window);
  } else if (figure == "fig3") {
    const auto sweep = coupling_sweep(mixing_sweep_config(scale, threads));
    outcome.files.push_back(
        write_text(out_dir, "fig3_curves.csv", curve_csv(sweep, {Metric::PLV, Metric::iPLV, Metric::ciPLV})));
    outcome.files.push_back(write_text(out_dir, "fig3_sweep_long.csv", sweep.to_csv()));
    outcome.criteria = evaluate_mixing(sweep);
  } else {
    throw Error(ErrorCode::InvalidArgument, "figure must be fig1, fig2 or fig3");
  }
  return outcome;
}

}  // namespace phasesync::reproduce
