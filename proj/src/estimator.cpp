#include "cooc/estimator.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace cooc {

namespace {

// Row and column count sums (length M each) of a sparse count matrix.
void count_sums(const CountMatrix& C, std::vector<uint64_t>& row,
                std::vector<uint64_t>& col) {
  row.assign(C.M, 0);
  col.assign(C.M, 0);
  for (const auto& e : C.entries) {
    row[e.i] += e.c;
    col[e.j] += e.c;
  }
}

void check_batch_triple(const CountMatrix& C1, const CountMatrix& C2,
                        const CountMatrix& C3) {
  if (C1.M != C2.M || C1.M != C3.M)
    throw std::invalid_argument("recover: batches disagree on M");
  if (C1.nominal_N != C2.nominal_N || C1.nominal_N != C3.nominal_N)
    throw std::invalid_argument("recover: batches disagree on nominal_N");
}

}  // namespace

Eigen::MatrixXd Estimate::dense() const {
  Eigen::MatrixXd DU = d.asDiagonal() * U;
  Eigen::MatrixXd DV = d.asDiagonal() * V;
  if (rank() == 0) return Eigen::MatrixXd::Zero(M, M);
  return DU * S.asDiagonal() * DV.transpose();
}

Eigen::VectorXd empirical_marginals(const CountMatrix& C) {
  if (C.nominal_N == 0)
    throw std::invalid_argument("empirical_marginals: nominal_N is zero");
  std::vector<uint64_t> row, col;
  count_sums(C, row, col);
  Eigen::VectorXd rho(C.M);
  const double denom = 2.0 * static_cast<double>(C.nominal_N);
  for (int i = 0; i < C.M; ++i)
    rho(i) = static_cast<double>(row[i] + col[i]) / denom;
  return rho;
}

BinPartition assign_bins(const Eigen::VectorXd& rho_hat, uint64_t N,
                         const EstimatorParams& params) {
  if (N < 2) throw std::invalid_argument("assign_bins: N must be at least 2");
  if (params.R < 1 || !(params.eps > 0.0 && params.eps <= 1.0) ||
      !(params.c0 > 0.0))
    throw std::invalid_argument("assign_bins: bad estimator params");

  BinPartition part;
  part.N = N;
  part.rho_hat = rho_hat;
  const double Nd = static_cast<double>(N);
  part.K = static_cast<int>(std::floor(std::log(Nd))) + 1;
  part.w_min_defaulted = !(params.w_min > 0.0);
  part.w_min_effective =
      part.w_min_defaulted ? 1.0 / params.R : params.w_min;
  if (part.w_min_effective > 1.0)
    throw std::invalid_argument("assign_bins: w_min must be at most 1");

  if (params.k0_override >= 0) {
    part.k0 = params.k0_override;
  } else {
    part.k0 = static_cast<int>(std::ceil(
        4.0 * std::log(params.c0 * params.R /
                       (params.eps * std::sqrt(part.w_min_effective))) +
        16.0));
  }

  // Cache e^k so membership tests agree exactly with the thresholds below.
  std::vector<double> ek(part.K + 2);
  for (int k = 0; k <= part.K + 1; ++k) ek[k] = std::exp(static_cast<double>(k));

  const int M = static_cast<int>(rho_hat.size());
  part.assignment.assign(M, 0);
  part.bin_members.assign(part.K + 1, {});
  for (int i = 0; i < M; ++i) {
    const double x = rho_hat(i) * Nd;  // marginal in units of 1/N
    int k = 0;
    if (x >= 1.0) {
      k = static_cast<int>(std::floor(std::log(x))) + 1;
      if (k < 1) k = 1;
      if (k > part.K) k = part.K;
      // log/floor can land one off right at a boundary; fix against the
      // cached powers so [e^{k-1}, e^k) membership is exact.
      while (k > 1 && x < ek[k - 1]) --k;
      while (k < part.K && x >= ek[k]) ++k;
    }
    part.assignment[i] = k;
    part.bin_members[k].push_back(i);
  }

  part.rho_bar.assign(part.K + 1, 0.0);
  part.pruned.assign(part.K + 1, 0);
  bool any = false;
  for (int k = 1; k <= part.K; ++k) {
    const double min_size =
        params.bin_prune_coeff * std::exp(-1.5 * (k + 1)) * Nd;
    if (static_cast<double>(part.bin_members[k].size()) < min_size) {
      part.pruned[k] = 1;
      continue;
    }
    if (k < part.k0) continue;
    part.rho_bar[k] = ek[k + 1] / Nd;
    if (!part.bin_members[k].empty()) any = true;
  }
  part.all_excluded = !any;
  return part;
}

Eigen::MatrixXd regularize_block(const CountMatrix& C2, const BinPartition& part,
                                 int k, const EstimatorParams& params,
                                 std::vector<int>* zeroed_rule1,
                                 std::vector<int>* zeroed_rule2) {
  if (k < 1 || k > part.K || part.rho_bar[k] == 0.0)
    throw std::invalid_argument("regularize_block: bin is excluded");
  (void)params;
  const std::vector<int>& members = part.bin_members[k];
  const size_t nk = members.size();
  const double Nd = static_cast<double>(part.N);
  const double rho_bar = part.rho_bar[k];

  std::vector<uint64_t> row, col;
  count_sums(C2, row, col);

  // Rule 1: full-matrix symmetrized marginal above 2*rho_bar, i.e.
  // row + col > 4*rho_bar*N in count space.
  const double limit1 = 4.0 * rho_bar * Nd;
  std::vector<char> dropped(nk, 0);
  std::vector<int> pos(C2.M, -1);
  for (size_t a = 0; a < nk; ++a) pos[members[a]] = static_cast<int>(a);
  for (size_t a = 0; a < nk; ++a) {
    const int i = members[a];
    if (static_cast<double>(row[i] + col[i]) > limit1) {
      dropped[a] = 1;
      if (zeroed_rule1) zeroed_rule1->push_back(i);
    }
  }

  // Assemble the surviving block counts.
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(nk, nk);
  for (const auto& e : C2.entries) {
    const int a = pos[e.i];
    const int b = pos[e.j];
    if (a < 0 || b < 0 || dropped[a] || dropped[b]) continue;
    block(a, b) = static_cast<double>(e.c);
  }

  // Rule 2: in-block row or column count sum above 2*|I_k|*rho_bar^2*N/w_min.
  const double limit2 =
      2.0 * static_cast<double>(nk) * rho_bar * rho_bar * Nd / part.w_min_effective;
  Eigen::VectorXd rsum = block.rowwise().sum();
  Eigen::VectorXd csum = block.colwise().sum();
  for (size_t a = 0; a < nk; ++a) {
    if (dropped[a]) continue;
    if (rsum(a) > limit2 || csum(a) > limit2) {
      block.row(a).setZero();
      block.col(a).setZero();
      if (zeroed_rule2) zeroed_rule2->push_back(members[a]);
    }
  }
  return block / Nd;
}

Eigen::MatrixXd block_basis(const Eigen::MatrixXd& Bk, int R) {
  const int r = std::min<int>(R, std::min(Bk.rows(), Bk.cols()));
  TruncatedSvd svd = truncated_svd(Bk, r);
  return svd.U;
}

Estimate recover(const CountMatrix& C1, const CountMatrix& C2,
                 const CountMatrix& C3, const EstimatorParams& params) {
  const auto t_start = std::chrono::steady_clock::now();
  check_batch_triple(C1, C2, C3);
  const int M = C1.M;
  const uint64_t N = C1.nominal_N;
  const double Nd = static_cast<double>(N);

  Eigen::VectorXd rho1 = empirical_marginals(C1);
  BinPartition part = assign_bins(rho1, N, params);

  // Step 2: per-bin regularized blocks and their top-R bases.
  ProjectionBasis basis;
  RecoverReport report;
  report.N = N;
  report.M = M;
  report.K = part.K;
  report.k0 = part.k0;
  report.w_min_defaulted = part.w_min_defaulted;
  report.all_excluded = part.all_excluded;
  for (int k = 1; k <= part.K; ++k) {
    BinDiagnostics diag;
    diag.k = k;
    diag.size = part.bin_members[k].size();
    diag.rho_bar = part.rho_bar[k];
    diag.pruned = part.pruned[k] != 0;
    if (part.rho_bar[k] > 0.0 && !part.bin_members[k].empty()) {
      std::vector<int> z1, z2;
      Eigen::MatrixXd block = regularize_block(C2, part, k, params, &z1, &z2);
      diag.zeroed_rule1 = z1.size();
      diag.zeroed_rule2 = z2.size();
      basis.bins.push_back(part.bin_members[k]);
      basis.bases.push_back(block_basis(block, params.R));
    }
    report.bins.push_back(diag);
  }

  // Step 3: scale the third batch, project, truncate, scale back.
  Eigen::VectorXd d = Eigen::VectorXd::Zero(M);
  Eigen::VectorXd dinv = Eigen::VectorXd::Zero(M);
  std::vector<char> excluded(M, 1);
  for (int i = 0; i < M; ++i) {
    const double rb = part.rho_bar[part.assignment[i]];
    if (rb > 0.0) {
      d(i) = std::sqrt(rb);
      dinv(i) = 1.0 / d(i);
      excluded[i] = 0;
    }
  }

  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(M, M);
  for (const auto& e : C3.entries)
    Y(e.i, e.j) = dinv(e.i) * dinv(e.j) * (static_cast<double>(e.c) / Nd);
  Eigen::MatrixXd Z = apply_block_projector(basis, Y);
  TruncatedSvd svd = truncated_svd(Z, params.R);

  Estimate est;
  est.M = M;
  est.U = svd.U;
  est.S = svd.S;
  est.V = svd.V;
  est.d = d;
  est.excluded = excluded;

  Eigen::VectorXd rho3 = empirical_marginals(C3);
  for (int i = 0; i < M; ++i) {
    if (excluded[i]) {
      ++report.excluded_count;
      report.excluded_mass += rho3(i);
    }
  }
  report.singular_values.assign(svd.S.data(), svd.S.data() + svd.S.size());
  report.runtime_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t_start)
                          .count();
  est.report = report;
  return est;
}

Estimate baseline_naive(const CountMatrix& C, int R) {
  if (C.nominal_N == 0)
    throw std::invalid_argument("baseline_naive: nominal_N is zero");
  Eigen::MatrixXd Y = C.dense() / static_cast<double>(C.nominal_N);
  TruncatedSvd svd = truncated_svd(Y, std::min<int>(R, C.M));
  Estimate est;
  est.M = C.M;
  est.U = svd.U;
  est.S = svd.S;
  est.V = svd.V;
  est.d = Eigen::VectorXd::Ones(C.M);
  est.excluded.assign(C.M, 0);
  est.report.N = C.nominal_N;
  est.report.M = C.M;
  est.report.singular_values.assign(svd.S.data(), svd.S.data() + svd.S.size());
  return est;
}

Estimate baseline_scaled(const CountMatrix& C1, const CountMatrix& C2, int R) {
  if (C1.M != C2.M || C1.nominal_N != C2.nominal_N)
    throw std::invalid_argument("baseline_scaled: batches disagree");
  const double Nd = static_cast<double>(C2.nominal_N);
  Eigen::VectorXd rho = empirical_marginals(C1);
  Eigen::VectorXd d(C1.M);
  for (int i = 0; i < C1.M; ++i)
    d(i) = std::sqrt(std::max(rho(i), 1.0 / Nd));  // floor keeps 1/sqrt finite

  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(C2.M, C2.M);
  for (const auto& e : C2.entries)
    Y(e.i, e.j) = (static_cast<double>(e.c) / Nd) / (d(e.i) * d(e.j));
  TruncatedSvd svd = truncated_svd(Y, std::min<int>(R, C2.M));

  Estimate est;
  est.M = C2.M;
  est.U = svd.U;
  est.S = svd.S;
  est.V = svd.V;
  est.d = d;
  est.excluded.assign(C2.M, 0);
  est.report.N = C2.nominal_N;
  est.report.M = C2.M;
  est.report.singular_values.assign(svd.S.data(), svd.S.data() + svd.S.size());
  return est;
}

double l1_error(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("l1_error: shape mismatch");
  return (A - B).cwiseAbs().sum();
}

double spectral_error(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("spectral_error: shape mismatch");
  return spectral_norm(A - B);
}

}  // namespace cooc
