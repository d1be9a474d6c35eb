#pragma once

#include "phasesync/bench.hpp"
#include "phasesync/chaossim.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace phasesync::reproduce {

enum class Scale { Fast, Full };

Scale parse_scale(std::string_view name);  // fast | full

struct Criterion {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string threshold;
};

struct FigureOutcome {
  std::vector<std::filesystem::path> files;
  std::vector<Criterion> criteria;
  bool passed() const;
};

// C in {0, 0.1, ..., 1}.
std::vector<double> coupling_grid();
std::size_t realizations(Scale scale);  // 10 fast, 50 full

SweepConfig mixing_sweep_config(Scale scale, std::size_t threads = 1);
SweepConfig coherence_sweep_config(Scale scale, const WelchConfig& welch, std::size_t threads = 1);
bench::BenchConfig bench_config(Scale scale);

// Volume-conduction study (V in {0, 0.1, 0.2}).
std::vector<Criterion> evaluate_mixing(const SweepResult& sweep);
// Coherence-window study, 400/200 and 100/50 windows at V = 0.
std::vector<Criterion> evaluate_coherence(const SweepResult& long_window, const SweepResult& short_window);
// Speedups at 500 signals x 40 trials plus monotone growth with signal count.
std::vector<Criterion> evaluate_bench(const std::vector<bench::BenchRecord>& records);

// metric,V,C,mean,std,n for the selected metrics.
std::string curve_csv(const SweepResult& sweep, const std::vector<Metric>& metrics);

double pearson(const std::vector<double>& a, const std::vector<double>& b);

// figure: fig1 | fig2 | fig3. Writes CSVs into out_dir.
FigureOutcome reproduce_figure(std::string_view figure, Scale scale, const std::filesystem::path& out_dir,
                               std::size_t threads = 1);

}  // namespace phasesync::reproduce
