#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace cooc {

// Top-r singular triplets of a dense matrix.  Signs are fixed so that the
// largest-magnitude entry of each column of U is positive (first such index
// on ties), with the matching flip applied to V.
struct TruncatedSvd {
  Eigen::MatrixXd U;  // m x r, orthonormal columns
  Eigen::VectorXd S;  // r, nonincreasing and nonnegative
  Eigen::MatrixXd V;  // n x r, orthonormal columns

  Eigen::MatrixXd reconstruct() const { return U * S.asDiagonal() * V.transpose(); }
};

// rel_tol drops trailing singular values <= rel_tol * S(0); rank may come
// back smaller than requested for (numerically) low-rank input.
TruncatedSvd truncated_svd(const Eigen::MatrixXd& A, int rank,
                           double rel_tol = 1e-12);

// Spectral norm by power iteration on A^T A (tolerance 1e-10 on the value,
// at most 1e4 iterations, deterministic seeded start).
double spectral_norm(const Eigen::MatrixXd& A);

// Per-bin orthonormal bases V_k together with the word indices of each bin;
// jointly they define the block-diagonal projector P = blockdiag(V_k V_k^T)
// (zero outside the listed words).
struct ProjectionBasis {
  std::vector<std::vector<int>> bins;   // word indices per bin
  std::vector<Eigen::MatrixXd> bases;   // |I_k| x r_k, orthonormal columns; r_k may be 0
};

// P A P computed blockwise as V_k (V_k^T A_{I_k x I_l} V_l) V_l^T over all
// bin pairs; rows/columns outside the bins (or with empty bases) are zero.
Eigen::MatrixXd apply_block_projector(const ProjectionBasis& basis,
                                      const Eigen::MatrixXd& A);

// Numerical form of the projection perturbation lemma: returns
// (‖U − PU‖², ‖UU^T − (PU)(PU)^T‖) in spectral norms; the first never
// exceeds the second (up to roundoff).  P must be a symmetric idempotent.
std::pair<double, double> sqrt_perturbation_gap(const Eigen::MatrixXd& U,
                                                const Eigen::MatrixXd& P);

// Numerical form of the rank-1 Wedin bound.  vhat is the rank-1 truncated
// SVD of vv^T + E rescaled to singular-value magnitude; err is the distance
// of vhat to ±v, reported next to the two candidate bounds ‖E‖^{1/2} and
// ‖E‖/‖v‖ (the lemma's universal constant is monitored by the caller).
struct WedinGap {
  double err;
  double bound_sqrt;     // ‖E‖^{1/2}
  double bound_ratio;    // ‖E‖ / ‖v‖ (infinity when v = 0)
};
WedinGap wedin_rank1_gap(const Eigen::VectorXd& v, const Eigen::MatrixXd& E);

}  // namespace cooc
