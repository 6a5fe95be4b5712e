#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cooc/estimator.hpp"
#include "cooc/models.hpp"

namespace cooc {

struct HmmLearnParams {
  double eps = 0.1;
  double w_min = 0.5;   // both chain states carry weight 1/2
  double c0 = 1.0;
  // The asymptotic k0 formula exceeds every bin at realistic sequence
  // lengths; the pipeline pins k0 = 1 (bin 0 and the size pruning still
  // exclude words) unless told otherwise.
  int k0_override = 1;
  double bin_prune_coeff = 20.0;
  double tol_sep = 1e-6;  // moment-separation floor for solve_transition
};

// delta_hat estimates sqrt(|1-2t|/4) * (p - q) up to one global sign.
struct DeltaEstimate {
  Eigen::VectorXd delta_hat;
  Eigen::VectorXd rho_hat;       // symmetrized marginals from the first batch
  std::vector<char> excluded;
  double top_eigenvalue = 0.0;   // signed; negative when t > 1/2
  double residual_asymmetry = 0.0;
  RecoverReport report;
};

struct SuperwordMoments {
  double m = 0.0;   // P(g_t in S)
  double b2 = 0.0;  // P(g_t in S, g_{t+1} in S)
  double t3 = 0.0;  // P(three consecutive in S)
};

struct TransitionSolve {
  bool degenerate = false;
  std::string note;
  double lambda = 0.0;      // 1 - 2t
  double t_hat = 0.0;
  double delta_s_sq = 0.0;  // squared anchor-set gap
};

struct HmmEstimate {
  int M = 0;
  bool degenerate = false;
  std::string failure;           // structured failure note, empty when clean
  double t_hat = 0.0;
  Eigen::VectorXd p_hat;
  Eigen::VectorXd q_hat;
  Eigen::VectorXd delta_hat;
  Eigen::VectorXd rho_hat;
  std::vector<char> anchor_set;  // {i : delta_hat_i > 0}
  SuperwordMoments moments;
  double lambda = 0.0;
  double delta_s_sq = 0.0;
  std::string warning;           // e.g. short-sequence warning
  RecoverReport report;
};

// Consecutive-pair counts, round-robin into three batches; all L-1 pairs are
// kept, so the batches share nominal_N = ceil((L-1)/3) and are tagged with
// the Poisson scheme (their exact totals differ by at most one).
std::array<CountMatrix, 3> hmm_counts(const std::vector<int>& seq, int M);

// Modified Algorithm 1 for the rank-2 chain: per-bin top singular vector of
// the centered block, rank-1 truncated SVD of the centered scaled projected
// third batch, per-bin signs stitched via cross-bin co-occurrence.
DeltaEstimate estimate_delta(const CountMatrix& C1, const CountMatrix& C2,
                             const CountMatrix& C3, const HmmLearnParams& params);

// Sign assignment (+1/-1) per bin vector.  Each vector is full-length with
// support on its own bin.  The reference is the largest-norm vector; another
// bin keeps its sign iff the second-batch co-occurrence rate of the
// reference's positive part with the bin's positive part exceeds the rate
// with its negative part (ties keep).  anti_correlated flips the comparison
// (consecutive symbols anti-correlate when t > 1/2).
std::vector<int> stitch_signs(const std::vector<Eigen::VectorXd>& per_bin_vectors,
                              const CountMatrix& C2, bool anti_correlated = false);

// Sliding-window indicator moments of membership in S over one sequence.
SuperwordMoments superword_moments(const std::vector<int>& seq,
                                   const std::vector<char>& in_S);

// Population moments of the 2-state chain whose two superword emission
// probabilities are a and b: the brute-force matrix-product oracle that the
// closed form below is validated against.
SuperwordMoments superword_population_moments(double t, double a, double b);

// Inverts m = P(S), B2 = m^2 + lambda d^2, T3 = m^3 + 2m lambda d^2
// + m lambda^2 d^2 for the stationary chain; degenerate when B2 is too close
// to m^2 (no separation on S) or m is extreme.
TransitionSolve solve_transition(double m, double b2, double t3,
                                 double tol_sep = 1e-6);

// p = rho + (p-q)/2, q = rho - (p-q)/2 with p-q = delta / sqrt(|1-2t|/4),
// clipped to the simplex.  The state owning the first positive coordinate of
// delta_hat is labeled p.
struct EmissionPair {
  bool degenerate = false;
  std::string note;
  Eigen::VectorXd p;
  Eigen::VectorXd q;
};
EmissionPair recover_emissions(const Eigen::VectorXd& rho_hat,
                               const Eigen::VectorXd& delta_hat, double t_hat);

// Full pipeline on a single observation sequence.
HmmEstimate hmm_learn(const std::vector<int>& seq, int M,
                      const HmmLearnParams& params);

// min over the state relabeling of |t swap| ... reported metrics: the
// emission l1 distance min(||p_hat-p||_1 + ||q_hat-q||_1,
// ||p_hat-q||_1 + ||q_hat-p||_1).
double min_swap_emission_l1(const Eigen::VectorXd& p_hat,
                            const Eigen::VectorXd& q_hat,
                            const Eigen::VectorXd& p, const Eigen::VectorXd& q);

}  // namespace cooc
