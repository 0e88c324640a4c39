#include "influence/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "influence/cascade.hpp"
#include "influence/lp.hpp"
#include "influence/rng.hpp"

namespace influence {

std::string experiment_csv_header() {
  return "model,k,p1,p2,sigma,seed,E_orig,E_noise,err,recovered,wall_ms\n";
}

std::string experiment_csv_row(const ExperimentRecord& rec, bool with_timings) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%d,%g,%g,%g,%llu,%lld,%lld,%.9e,%d,%.0f\n",
                rec.model.c_str(), rec.k, rec.p1, rec.p2, rec.sigma_pct,
                static_cast<unsigned long long>(rec.seed),
                static_cast<long long>(rec.e_orig),
                static_cast<long long>(rec.e_noise), rec.err,
                rec.recovered ? 1 : 0, with_timings ? rec.wall_ms : 0.0);
  return buf;
}

namespace {

ExperimentRecord base_record(const ForestFireSpec& spec, const char* model) {
  ExperimentRecord rec;
  rec.model = model;
  rec.k = spec.k;
  rec.p1 = spec.p1;
  rec.p2 = spec.p2;
  rec.sigma_pct = spec.sigma_pct;
  rec.seed = spec.seed;
  return rec;
}

}  // namespace

ExperimentRecord run_lp_trial(const ForestFireSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  const auto ff = gen_forest_fire(spec);
  ExperimentRecord rec = base_record(spec, "lp");
  rec.e_orig = ff.arcs_before_noise;
  rec.e_noise = ff.noise_arcs;

  const auto problem = build_lp(ff.instance.graph, spec.k);
  const auto sol = solve_lp(problem);
  rec.err = ff.instance.recovery_error(sol.x);
  rec.recovered = rec.err < kRecoveryThreshold;
  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return rec;
}

ExperimentRecord run_cascade_trial(const ForestFireSpec& spec, double p) {
  const auto start = std::chrono::steady_clock::now();
  const auto ff = gen_forest_fire(spec);
  ExperimentRecord rec = base_record(spec, "cascade");
  rec.e_orig = ff.arcs_before_noise;
  rec.e_noise = ff.noise_arcs;

  const CascadeProblem problem(ff.instance.graph, spec.k, p);
  const auto sol = solve_cascade(problem);
  try {
    const auto rounded = round_topk(sol.x, spec.k);
    rec.err = ff.instance.recovery_error(rounded);
  } catch (const AmbiguousRoundingError&) {
    rec.err = std::numeric_limits<double>::infinity();
  }
  rec.recovered = rec.err < kRecoveryThreshold;
  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return rec;
}

int worker_count_from_env(int requested) {
  if (const char* env = std::getenv("INFLUENCE_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_trials(int trials, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, trials));
  if (workers == 1) {
    for (int t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= trials) return;
        fn(t);
      }
    });
  for (auto& th : pool) th.join();
}

BenchOutput run_bench(const std::string& model, const BenchOptions& opts,
                      int workers) {
  workers = worker_count_from_env(workers);
  BenchOutput out;
  out.csv = experiment_csv_header();

  std::uint64_t cell_index = 0;
  for (int k : opts.k_values) {
    for (double p1 : opts.p1_values) {
      for (double sigma : opts.sigma_values) {
        // Seeds split per (cell, trial): adding cells never perturbs the
        // trials of existing ones.
        const std::uint64_t cell_seed =
            Rng::child(opts.master_seed, cell_index).next_u64();
        ++cell_index;

        std::vector<ExperimentRecord> records(opts.trials);
        parallel_trials(opts.trials, workers, [&](int trial) {
          ForestFireSpec spec;
          spec.k = k;
          spec.sender_cap = opts.ui_multiplier * k;
          spec.receiver_cap = opts.uf_multiplier * spec.sender_cap;
          spec.p1 = p1;
          spec.p2 = opts.p2;
          spec.sigma_pct = sigma;
          spec.seed = Rng::child(cell_seed, static_cast<std::uint64_t>(trial)).next_u64();
          records[trial] = (model == "lp") ? run_lp_trial(spec)
                                           : run_cascade_trial(spec, opts.cascade_p);
        });

        BenchCellSummary cell;
        cell.k = k;
        cell.p1 = p1;
        cell.sigma = sigma;
        cell.trials = opts.trials;
        for (const auto& rec : records) {
          out.csv += experiment_csv_row(rec, opts.timings);
          cell.mean_e_orig += static_cast<double>(rec.e_orig);
          cell.mean_e_noise += static_cast<double>(rec.e_noise);
          cell.mean_err += std::isfinite(rec.err) ? rec.err : 0.0;
          cell.n_rec += rec.recovered;
        }
        cell.mean_e_orig /= opts.trials;
        cell.mean_e_noise /= opts.trials;
        cell.mean_err /= opts.trials;
        out.cells.push_back(cell);
      }
    }
  }
  return out;
}

}  // namespace influence
