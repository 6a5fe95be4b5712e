#include "cooc/spectral.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cooc/rng.hpp"

namespace cooc {

namespace {

// Largest-magnitude entry of each left singular vector made positive; ties
// resolved toward the first index so repeated runs agree bit for bit.
void fix_signs(Eigen::MatrixXd& U, Eigen::MatrixXd& V) {
  for (int j = 0; j < U.cols(); ++j) {
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < U.rows(); ++i) {
      const double a = std::fabs(U(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (U(arg, j) < 0.0) {
      U.col(j) = -U.col(j);
      V.col(j) = -V.col(j);
    }
  }
}

}  // namespace

TruncatedSvd truncated_svd(const Eigen::MatrixXd& A, int rank, double rel_tol) {
  if (rank < 0 || rank > std::min(A.rows(), A.cols()))
    throw std::invalid_argument("truncated_svd: rank out of range");
  if (!A.allFinite())
    throw std::invalid_argument("truncated_svd: non-finite entries");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();

  int r = std::min<int>(rank, sv.size());
  const double floor = sv.size() > 0 ? rel_tol * sv(0) : 0.0;
  while (r > 0 && sv(r - 1) <= floor) --r;

  TruncatedSvd out;
  out.U = svd.matrixU().leftCols(r);
  out.S = sv.head(r);
  out.V = svd.matrixV().leftCols(r);
  fix_signs(out.U, out.V);
  return out;
}

double spectral_norm(const Eigen::MatrixXd& A) {
  if (A.rows() == 0 || A.cols() == 0) return 0.0;
  Rng rng(0x5eedf00d, "spectral_norm",
          (static_cast<uint64_t>(A.rows()) << 32) ^ static_cast<uint64_t>(A.cols()));
  Eigen::VectorXd x(A.cols());
  for (int i = 0; i < x.size(); ++i) x(i) = rng.next_gauss();
  x.normalize();

  double sigma = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXd y = A * x;
    const double s = y.norm();
    if (s == 0.0) return 0.0;
    Eigen::VectorXd z = A.transpose() * y;
    const double zn = z.norm();
    if (zn == 0.0) return s;
    x = z / zn;
    if (std::fabs(s - sigma) <= 1e-10 * std::max(1.0, s)) return s;
    sigma = s;
  }
  return sigma;
}

Eigen::MatrixXd apply_block_projector(const ProjectionBasis& basis,
                                      const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("apply_block_projector: A must be square");
  if (basis.bins.size() != basis.bases.size())
    throw std::invalid_argument("apply_block_projector: bins/bases mismatch");
  const int M = static_cast<int>(A.rows());
  const size_t nbins = basis.bins.size();
  for (size_t k = 0; k < nbins; ++k) {
    const auto& bin = basis.bins[k];
    if (basis.bases[k].size() > 0 &&
        basis.bases[k].rows() != static_cast<Eigen::Index>(bin.size()))
      throw std::invalid_argument("apply_block_projector: basis row mismatch");
    for (int idx : bin)
      if (idx < 0 || idx >= M)
        throw std::invalid_argument("apply_block_projector: bin index out of range");
  }

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(M, M);
  for (size_t k = 0; k < nbins; ++k) {
    const auto& rows = basis.bins[k];
    const Eigen::MatrixXd& Vk = basis.bases[k];
    if (Vk.cols() == 0) continue;
    for (size_t l = 0; l < nbins; ++l) {
      const auto& cols = basis.bins[l];
      const Eigen::MatrixXd& Vl = basis.bases[l];
      if (Vl.cols() == 0) continue;
      Eigen::MatrixXd block(rows.size(), cols.size());
      for (size_t a = 0; a < rows.size(); ++a)
        for (size_t b = 0; b < cols.size(); ++b)
          block(a, b) = A(rows[a], cols[b]);
      const Eigen::MatrixXd proj = Vk * (Vk.transpose() * block * Vl) * Vl.transpose();
      for (size_t a = 0; a < rows.size(); ++a)
        for (size_t b = 0; b < cols.size(); ++b)
          out(rows[a], cols[b]) = proj(a, b);
    }
  }
  return out;
}

std::pair<double, double> sqrt_perturbation_gap(const Eigen::MatrixXd& U,
                                                const Eigen::MatrixXd& P) {
  if (P.rows() != P.cols() || P.rows() != U.rows())
    throw std::invalid_argument("sqrt_perturbation_gap: shape mismatch");
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("sqrt_perturbation_gap: P not symmetric");
  if ((P * P - P).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("sqrt_perturbation_gap: P not idempotent");

  const Eigen::MatrixXd PU = P * U;
  const double lhs = spectral_norm(U - PU);
  const double rhs =
      spectral_norm(U * U.transpose() - PU * PU.transpose());
  return {lhs * lhs, rhs};
}

WedinGap wedin_rank1_gap(const Eigen::VectorXd& v, const Eigen::MatrixXd& E) {
  if (E.rows() != E.cols() || E.rows() != v.size())
    throw std::invalid_argument("wedin_rank1_gap: shape mismatch");
  if ((E - E.transpose()).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("wedin_rank1_gap: E not symmetric");

  const Eigen::MatrixXd A = v * v.transpose() + E;
  TruncatedSvd top = truncated_svd(A, 1);
  Eigen::VectorXd vhat = Eigen::VectorXd::Zero(v.size());
  if (top.S.size() > 0) vhat = std::sqrt(top.S(0)) * top.U.col(0);

  WedinGap g;
  g.err = std::min((v - vhat).norm(), (v + vhat).norm());
  const double norm_e = spectral_norm(E);
  g.bound_sqrt = std::sqrt(norm_e);
  const double vn = v.norm();
  g.bound_ratio = vn > 0.0 ? norm_e / vn : std::numeric_limits<double>::infinity();
  return g;
}

}  // namespace cooc
