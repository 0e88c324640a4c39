#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "influence/generators.hpp"

namespace influence {

/// One benchmark row: forest-fire parameters, arc counts, recovery metrics.
struct ExperimentRecord {
  std::string model;  // "lp" | "cascade"
  int k = 0;
  double p1 = 0.0;
  double p2 = 0.0;
  double sigma_pct = 0.0;
  std::uint64_t seed = 0;
  std::int64_t e_orig = 0;
  std::int64_t e_noise = 0;
  double err = 0.0;
  bool recovered = false;  // always equals err < 1e-8
  double wall_ms = 0.0;
};

constexpr double kRecoveryThreshold = 1e-8;

std::string experiment_csv_header();
/// with_timings=false writes 0 in the wall_ms column so identical flags and
/// seed reproduce the file byte for byte.
std::string experiment_csv_row(const ExperimentRecord& rec, bool with_timings);

/// One forest-fire trial solved with the LP relaxation (table-1 style);
/// err is computed on the raw LP x over the influencer entries.
ExperimentRecord run_lp_trial(const ForestFireSpec& spec);

/// One forest-fire trial solved with the cascade relaxation and top-k
/// rounding (table-2 style); err is computed on the rounded vector. A
/// rounding tie is recorded as err = +inf, not recovered.
ExperimentRecord run_cascade_trial(const ForestFireSpec& spec, double p);

struct BenchOptions {
  std::vector<int> k_values;
  std::vector<double> p1_values;
  std::vector<double> sigma_values;
  double p2 = 0.9;
  double cascade_p = 0.9;  // table 2 arc probability
  int trials = 10;
  std::uint64_t master_seed = 0;
  int ui_multiplier = 10;  // u_i = ui_multiplier * k
  int uf_multiplier = 10;  // u_f = uf_multiplier * u_i
  bool timings = false;
};

struct BenchCellSummary {
  int k = 0;
  double p1 = 0.0;
  double sigma = 0.0;
  double mean_e_orig = 0.0;
  double mean_e_noise = 0.0;
  double mean_err = 0.0;
  int n_rec = 0;
  int trials = 0;
};

struct BenchOutput {
  std::string csv;  // header plus one row per trial
  std::vector<BenchCellSummary> cells;
};

/// Runs the (k, p1, sigma) grid; trials inside a cell run concurrently on
/// `workers` threads (0 = hardware concurrency, INFLUENCE_WORKERS overrides)
/// with one child seed per (cell, trial), so output is identical for any
/// worker count and rows appear in deterministic order.
BenchOutput run_bench(const std::string& model, const BenchOptions& opts,
                      int workers = 0);

/// Applies fn(trial) for trial in [0, trials) on the worker pool.
void parallel_trials(int trials, int workers, const std::function<void(int)>& fn);

int worker_count_from_env(int requested);

}  // namespace influence
