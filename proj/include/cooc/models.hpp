#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cooc/rng.hpp"

namespace cooc {

// Low-rank word co-occurrence model: B = P W P^T with P column-stochastic
// (M x R) and W an R x R weight matrix, entries of B summing to one.
struct Model {
  int M = 0;
  int R = 0;
  std::string family;  // "topic", "sbm", "hmm_bigram"
  Eigen::MatrixXd P;   // M x R, each column a conditional word distribution
  Eigen::MatrixXd W;   // R x R
  std::map<std::string, double> params;  // family-specific scalars

  Eigen::MatrixXd bigram() const;   // P W P^T
  Eigen::VectorXd marginal() const; // row sums of bigram()
};

// Two-state symmetric-transition hidden Markov chain over M symbols.
// States start uniform and switch with probability t per step; state 1
// emits from p, state 2 from q.
struct HmmModel {
  int M = 0;
  double t = 0.0;
  Eigen::VectorXd p;
  Eigen::VectorXd q;
};

enum class SampleScheme { kPoisson, kMultinomial };

// Sparse co-occurrence counts from one batch of (about) nominal_N pairs.
struct CountMatrix {
  int M = 0;
  uint64_t nominal_N = 0;  // Poisson mean / multinomial total per batch
  SampleScheme scheme = SampleScheme::kPoisson;
  int batch_id = 0;        // position within a batch triple (1-based), 0 = standalone

  struct Entry {
    int i;
    int j;
    uint64_t c;
  };
  std::vector<Entry> entries;  // strictly ascending (i, j), c > 0

  uint64_t total() const;
  Eigen::MatrixXd dense() const;
};

// Mixture of R topics: W = diag(mixing), P columns drawn from a symmetric
// Dirichlet(concentration) on the M-simplex.
Model generate_topic_model(int M, int R, const std::vector<double>& mixing,
                           double concentration, uint64_t seed);

// Symmetric stochastic block model with R equal communities: column r of P
// is uniform on community r, W has alpha on the diagonal and beta off it,
// normalized so that the entries of B sum to one.
Model generate_sbm_model(int M, int R, double alpha, double beta);

// Stationary consecutive-pair distribution of the chain: rank-2 model with
// P = [p q] and W = diag(1/2,1/2) * [[1-t, t], [t, 1-t]].
Model hmm_bigram_model(int M, double t, const Eigen::VectorXd& p,
                       const Eigen::VectorXd& q);
Model hmm_bigram_model(const HmmModel& h);

// One batch of pair counts from B.  Poisson scheme draws each cell
// independently as Poi(N * B_ij); multinomial draws exactly N pairs.
CountMatrix sample_counts(const Model& m, uint64_t N, SampleScheme scheme,
                          uint64_t seed, int batch_id = 0);

// Three independent batches with the same nominal size (the estimator's
// input layout); sub-seeds are derived per batch_id.
std::array<CountMatrix, 3> sample_batches(const Model& m, uint64_t N,
                                          SampleScheme scheme, uint64_t seed);

// A length-`length` emission sequence from the chain (symbols 0..M-1).
std::vector<int> hmm_sample_sequence(const HmmModel& h, uint64_t length,
                                     uint64_t seed);

}  // namespace cooc
