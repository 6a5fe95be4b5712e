#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cooc/models.hpp"
#include "cooc/spectral.hpp"

namespace cooc {

struct EstimatorParams {
  int R = 1;
  double eps = 0.1;
  // Lower bound on the mixing-weight row sums.  Non-positive means "unknown":
  // the 1/R heuristic is substituted and flagged in the report.
  double w_min = 0.0;
  double c0 = 1.0;              // absolute constant inside k0
  int k0_override = -1;         // >= 0 replaces the k0 formula
  double bin_prune_coeff = 20.0;
};

// Outcome of Step 1: marginal estimates and the dyadic-in-e binning.
// Bin 0 collects words with rho_hat < 1/N; bins 1..K cover
// [e^{k-1}/N, e^k/N).  rho_bar[k] is the bin ceiling e^{k+1}/N, or 0 when
// the bin is excluded (too small, or k < k0, or bin 0).
struct BinPartition {
  uint64_t N = 0;
  int K = 0;
  int k0 = 0;
  Eigen::VectorXd rho_hat;
  std::vector<double> rho_bar;               // size K+1, index 0 always 0
  std::vector<int> assignment;               // word -> bin in {0,...,K}
  std::vector<std::vector<int>> bin_members; // size K+1
  std::vector<char> pruned;                  // size K+1, size-test failures
  bool all_excluded = false;
  bool w_min_defaulted = false;
  double w_min_effective = 0.0;
};

struct BinDiagnostics {
  int k = 0;
  size_t size = 0;
  double rho_bar = 0.0;
  bool pruned = false;
  size_t zeroed_rule1 = 0;  // full-matrix marginal rule
  size_t zeroed_rule2 = 0;  // in-block row/column rule
};

struct RecoverReport {
  uint64_t N = 0;
  int M = 0;
  int K = 0;
  int k0 = 0;
  bool w_min_defaulted = false;
  bool all_excluded = false;
  std::vector<BinDiagnostics> bins;      // k = 1..K
  size_t excluded_count = 0;
  double excluded_mass = 0.0;            // third-batch marginal mass on excluded words
  std::vector<double> singular_values;   // kept spectrum of the projected matrix
  double runtime_ms = 0.0;
};

// Rank-r factorization of the scaled estimate: Bhat = D (U S V^T) D with
// D = diag(d).  Excluded words have d = 0, so their rows and columns of
// Bhat are exactly zero.
struct Estimate {
  int M = 0;
  Eigen::MatrixXd U;  // M x r
  Eigen::VectorXd S;  // r
  Eigen::MatrixXd V;  // M x r
  Eigen::VectorXd d;  // length M
  std::vector<char> excluded;
  RecoverReport report;

  int rank() const { return static_cast<int>(S.size()); }
  Eigen::MatrixXd dense() const;
};

// rho_hat_i = (row_i + col_i) / (2 N), the symmetrized empirical marginal.
Eigen::VectorXd empirical_marginals(const CountMatrix& C);

BinPartition assign_bins(const Eigen::VectorXd& rho_hat, uint64_t N,
                         const EstimatorParams& params);

// Step 2(a) for bin k: the block C2[I_k x I_k] / N with offending rows and
// columns zeroed.  Rule 1 zeroes word i when its full-matrix symmetrized
// marginal in C2 exceeds 2 rho_bar_k; rule 2 then zeroes block rows/columns
// whose in-block sum exceeds 2 |I_k| rho_bar_k^2 / w_min.  Thresholds are
// compared in integer count space (strict).  Zeroed word ids are appended
// to the optional diagnostic lists.
Eigen::MatrixXd regularize_block(const CountMatrix& C2, const BinPartition& part,
                                 int k, const EstimatorParams& params,
                                 std::vector<int>* zeroed_rule1 = nullptr,
                                 std::vector<int>* zeroed_rule2 = nullptr);

// Step 2(b): top-R left singular vectors (empty for an all-zero block).
Eigen::MatrixXd block_basis(const Eigen::MatrixXd& Bk, int R);

// Algorithm 1: bins from C1, block bases from C2, projected-and-rescaled
// rank-R truncated SVD of C3.
Estimate recover(const CountMatrix& C1, const CountMatrix& C2,
                 const CountMatrix& C3, const EstimatorParams& params);

// Rank-R truncated SVD of C/N, no scaling or regularization.
Estimate baseline_naive(const CountMatrix& C, int R);

// Variance-equalizing baseline: scale C2/N by diag(max(rho_hat, 1/N))^{-1/2}
// on both sides (rho_hat from C1), truncate to rank R, unscale.
Estimate baseline_scaled(const CountMatrix& C1, const CountMatrix& C2, int R);

// Entrywise sums |A - B| resp. the spectral norm of the difference.
double l1_error(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);
double spectral_error(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

}  // namespace cooc
