#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cooc/estimator.hpp"
#include "cooc/hmm.hpp"
#include "cooc/models.hpp"

namespace cooc {

struct SweepModelSpec {
  std::string family;  // "sbm", "topic", "hmm"
  int M = 0;
  int R = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<double> mixing;
  double concentration = 1.0;
  double t = 0.0;
  std::string emissions = "disjoint_uniform";  // or "uniform"
};

// One sweep: a model instance, a grid of sample sizes (sequence lengths for
// the chain experiment), a block of per-cell seeds, and the methods to run.
// All randomness derives from the single top-level seed.
struct SweepConfig {
  uint64_t seed = 0;
  std::string experiment;  // "estimator" | "hmm"
  SweepModelSpec model;
  std::vector<uint64_t> N_grid;
  int num_seeds = 1;
  std::vector<std::string> methods;  // recover/naive/scaled or hmm_learn
  SampleScheme scheme = SampleScheme::kPoisson;
  EstimatorParams est;
  HmmLearnParams hmm;
  double cell_timeout_ms = 0.0;  // 0 disables the guard
};

SweepConfig load_sweep_config(const std::string& path);

struct SweepRow {
  uint64_t N = 0;
  uint64_t seed = 0;
  std::string method;
  double l1 = 0.0;             // chain rows: min-swap emission l1
  double spec = 0.0;           // chain rows: |t_hat - t|
  double excluded_mass = 0.0;
  double runtime_ms = 0.0;
  std::string status;          // ok | degenerate | timeout | error:<tag>
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (N, seed, method)
  size_t failures = 0;         // error + timeout cells
};

SweepResult run_sweep(const SweepConfig& config);

// CSV schema: N,seed,method,l1,spec,excluded_mass,runtime_ms,status
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

// JSON summary: per (N, method) group, count plus median/quartiles of the
// two error metrics.
void write_sweep_summary(const SweepResult& result, const std::string& path);

// Plot-ready CSV: N,method,median_l1,q25,q75 over rows with a usable metric
// (ok or degenerate; errors and timeouts are dropped).
void emit_plot_data(const std::vector<SweepRow>& rows, const std::string& path);

// Order statistics used by the summaries (linear interpolation between
// ranks); exposed for tests.
double quantile(std::vector<double> values, double q);

}  // namespace cooc
