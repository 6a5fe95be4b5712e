#include "cooc/hmm.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace cooc {

namespace {

// Largest-magnitude entry made positive (first index on ties); returns the
// vector unchanged when it is identically zero.
void fix_vector_sign(Eigen::VectorXd& v) {
  int arg = -1;
  double best = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    const double a = std::fabs(v(i));
    if (a > best) {
      best = a;
      arg = i;
    }
  }
  if (arg >= 0 && v(arg) < 0.0) v = -v;
}

}  // namespace

std::array<CountMatrix, 3> hmm_counts(const std::vector<int>& seq, int M) {
  if (seq.size() < 3)
    throw std::invalid_argument("hmm_counts: sequence must have length >= 3");
  if (M < 1) throw std::invalid_argument("hmm_counts: M must be positive");
  for (int s : seq)
    if (s < 0 || s >= M)
      throw std::invalid_argument("hmm_counts: symbol out of range");

  const uint64_t L = seq.size();
  const uint64_t pairs = L - 1;
  const uint64_t nominal = (pairs + 2) / 3;

  std::array<CountMatrix, 3> out;
  for (int b = 0; b < 3; ++b) {
    out[b].M = M;
    out[b].nominal_N = nominal;
    // Totals differ by at most one across batches, so the exact-total
    // multinomial tag would be wrong; the Poissonized view matches the
    // analysis and leaves nominal_N as the common normalizer.
    out[b].scheme = SampleScheme::kPoisson;
    out[b].batch_id = b + 1;
  }

  if (static_cast<uint64_t>(M) * M <= (1u << 22)) {
    std::vector<std::vector<uint64_t>> dense(
        3, std::vector<uint64_t>(static_cast<size_t>(M) * M, 0));
    for (uint64_t n = 0; n < pairs; ++n)
      ++dense[n % 3][static_cast<size_t>(seq[n]) * M + seq[n + 1]];
    for (int b = 0; b < 3; ++b) {
      for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
          const uint64_t c = dense[b][static_cast<size_t>(i) * M + j];
          if (c > 0) out[b].entries.push_back({i, j, c});
        }
      }
    }
  } else {
    std::array<std::map<std::pair<int, int>, uint64_t>, 3> sparse;
    for (uint64_t n = 0; n < pairs; ++n)
      ++sparse[n % 3][{seq[n], seq[n + 1]}];
    for (int b = 0; b < 3; ++b)
      for (const auto& [ij, c] : sparse[b])
        out[b].entries.push_back({ij.first, ij.second, c});
  }
  return out;
}

std::vector<int> stitch_signs(const std::vector<Eigen::VectorXd>& per_bin_vectors,
                              const CountMatrix& C2, bool anti_correlated) {
  const size_t nbins = per_bin_vectors.size();
  std::vector<int> signs(nbins, 1);
  if (nbins == 0) return signs;

  int ref = -1;
  double best = 0.0;
  for (size_t k = 0; k < nbins; ++k) {
    const double n = per_bin_vectors[k].norm();
    if (n > best) {
      best = n;
      ref = static_cast<int>(k);
    }
  }
  if (ref < 0) return signs;  // all vectors zero

  const int M = C2.M;
  // part[i]: which bin word i belongs to and on which side of its vector.
  std::vector<int> owner(M, -1);
  std::vector<int> side(M, 0);  // +1 positive part, -1 rest of the support
  for (size_t k = 0; k < nbins; ++k) {
    const Eigen::VectorXd& v = per_bin_vectors[k];
    if (v.size() != M)
      throw std::invalid_argument("stitch_signs: vector length mismatch");
    for (int i = 0; i < M; ++i) {
      if (v(i) != 0.0) {
        owner[i] = static_cast<int>(k);
        side[i] = v(i) > 0.0 ? 1 : -1;
      }
    }
  }

  std::vector<bool> in_ref_pos(M, false);
  for (int i = 0; i < M; ++i)
    if (owner[i] == ref && side[i] > 0) in_ref_pos[i] = true;

  // One pass over the counts: co-occurrence of the reference positive part
  // with each signed part, plus the total co-occurrence of each part.
  std::vector<double> with_ref_pos(2 * nbins, 0.0), with_all(2 * nbins, 0.0);
  auto slot = [&](int word) {
    return 2 * owner[word] + (side[word] > 0 ? 0 : 1);
  };
  for (const auto& e : C2.entries) {
    const double c = static_cast<double>(e.c);
    if (owner[e.j] >= 0) {
      with_all[slot(e.j)] += c;
      if (in_ref_pos[e.i]) with_ref_pos[slot(e.j)] += c;
    }
    if (owner[e.i] >= 0) {
      with_all[slot(e.i)] += c;
      if (in_ref_pos[e.j]) with_ref_pos[slot(e.i)] += c;
    }
  }

  for (size_t k = 0; k < nbins; ++k) {
    if (static_cast<int>(k) == ref) continue;
    if (per_bin_vectors[k].norm() == 0.0) continue;
    const double np = with_all[2 * k];
    const double nn = with_all[2 * k + 1];
    const double rate_pos = np > 0.0 ? with_ref_pos[2 * k] / np : 0.0;
    const double rate_neg = nn > 0.0 ? with_ref_pos[2 * k + 1] / nn : 0.0;
    // Consistent signs make the reference's positive part co-occur more with
    // the bin's positive part (less, for an anti-correlated chain); ties keep.
    const bool keep =
        anti_correlated ? rate_pos <= rate_neg : rate_pos >= rate_neg;
    signs[k] = keep ? 1 : -1;
  }
  return signs;
}

DeltaEstimate estimate_delta(const CountMatrix& C1, const CountMatrix& C2,
                             const CountMatrix& C3, const HmmLearnParams& params) {
  if (C1.M != C2.M || C1.M != C3.M)
    throw std::invalid_argument("estimate_delta: batches disagree on M");
  if (C1.nominal_N != C2.nominal_N || C1.nominal_N != C3.nominal_N)
    throw std::invalid_argument("estimate_delta: batches disagree on nominal_N");

  const int M = C1.M;
  const uint64_t N = C1.nominal_N;
  const double Nd = static_cast<double>(N);

  EstimatorParams ep;
  ep.R = 1;  // each block of the centered matrix is rank 1
  ep.eps = params.eps;
  ep.w_min = params.w_min;
  ep.c0 = params.c0;
  ep.k0_override = params.k0_override;
  ep.bin_prune_coeff = params.bin_prune_coeff;

  Eigen::VectorXd rho1 = empirical_marginals(C1);
  BinPartition part = assign_bins(rho1, N, ep);

  DeltaEstimate de;
  de.rho_hat = rho1;
  de.report.N = N;
  de.report.M = M;
  de.report.K = part.K;
  de.report.k0 = part.k0;
  de.report.w_min_defaulted = part.w_min_defaulted;
  de.report.all_excluded = part.all_excluded;

  ProjectionBasis basis;
  std::vector<Eigen::VectorXd> bin_vectors;  // sqrt(sigma_1) v_k, full length
  for (int k = 1; k <= part.K; ++k) {
    BinDiagnostics diag;
    diag.k = k;
    diag.size = part.bin_members[k].size();
    diag.rho_bar = part.rho_bar[k];
    diag.pruned = part.pruned[k] != 0;
    if (part.rho_bar[k] > 0.0 && !part.bin_members[k].empty()) {
      std::vector<int> z1, z2;
      Eigen::MatrixXd block = regularize_block(C2, part, k, ep, &z1, &z2);
      diag.zeroed_rule1 = z1.size();
      diag.zeroed_rule2 = z2.size();
      const auto& members = part.bin_members[k];
      Eigen::VectorXd rho_k(members.size());
      for (size_t a = 0; a < members.size(); ++a) rho_k(a) = rho1(members[a]);
      Eigen::MatrixXd centered = block - rho_k * rho_k.transpose();
      TruncatedSvd svd = truncated_svd(centered, 1);
      basis.bins.push_back(members);
      basis.bases.push_back(svd.U);
      Eigen::VectorXd w = Eigen::VectorXd::Zero(M);
      if (svd.S.size() > 0) {
        const double scale = std::sqrt(svd.S(0));
        for (size_t a = 0; a < members.size(); ++a)
          w(members[a]) = scale * svd.U(a, 0);
      }
      bin_vectors.push_back(std::move(w));
    }
    de.report.bins.push_back(diag);
  }

  Eigen::VectorXd d = Eigen::VectorXd::Zero(M);
  Eigen::VectorXd dinv = Eigen::VectorXd::Zero(M);
  de.excluded.assign(M, 1);
  for (int i = 0; i < M; ++i) {
    const double rb = part.rho_bar[part.assignment[i]];
    if (rb > 0.0) {
      d(i) = std::sqrt(rb);
      dinv(i) = 1.0 / d(i);
      de.excluded[i] = 0;
    }
  }

  // Scaled, centered third batch restricted to included words.
  Eigen::MatrixXd Y = (C3.dense() / Nd - rho1 * rho1.transpose());
  Y = dinv.asDiagonal() * Y * dinv.asDiagonal();
  Eigen::MatrixXd Z = apply_block_projector(basis, Y);
  de.residual_asymmetry = (Z - Z.transpose()).cwiseAbs().maxCoeff();
  Eigen::MatrixXd Zs = 0.5 * (Z + Z.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Zs);
  int arg = 0;
  for (int i = 1; i < M; ++i)
    if (std::fabs(eig.eigenvalues()(i)) > std::fabs(eig.eigenvalues()(arg)))
      arg = i;
  const double lambda_top = eig.eigenvalues()(arg);
  de.top_eigenvalue = lambda_top;
  Eigen::VectorXd u = eig.eigenvectors().col(arg);
  fix_vector_sign(u);

  Eigen::VectorXd delta_scaled = Eigen::VectorXd::Zero(M);
  const double sigma = std::fabs(lambda_top);
  if (sigma > 0.0) {
    std::vector<int> signs = stitch_signs(bin_vectors, C2, lambda_top < 0.0);
    // u restricted to bin k lies exactly in span(v_k); reassemble it with the
    // stitched per-bin signs.
    for (size_t k = 0; k < basis.bins.size(); ++k) {
      if (basis.bases[k].cols() == 0) continue;
      const auto& members = basis.bins[k];
      double coef = 0.0;
      for (size_t a = 0; a < members.size(); ++a)
        coef += u(members[a]) * basis.bases[k](a, 0);
      const double mag = std::fabs(coef) * std::sqrt(sigma);
      for (size_t a = 0; a < members.size(); ++a)
        delta_scaled(members[a]) = signs[k] * mag * basis.bases[k](a, 0);
    }
    fix_vector_sign(delta_scaled);
  }

  de.delta_hat = d.asDiagonal() * delta_scaled;

  Eigen::VectorXd rho3 = empirical_marginals(C3);
  for (int i = 0; i < M; ++i) {
    if (de.excluded[i]) {
      ++de.report.excluded_count;
      de.report.excluded_mass += rho3(i);
    }
  }
  de.report.singular_values.assign(1, sigma);
  return de;
}

SuperwordMoments superword_moments(const std::vector<int>& seq,
                                   const std::vector<char>& in_S) {
  if (seq.size() < 3)
    throw std::invalid_argument("superword_moments: sequence too short");
  const uint64_t L = seq.size();
  uint64_t c1 = 0, c2 = 0, c3 = 0;
  bool a = false, b = false;  // membership of the previous two symbols
  for (uint64_t n = 0; n < L; ++n) {
    const int s = seq[n];
    if (s < 0 || static_cast<size_t>(s) >= in_S.size())
      throw std::invalid_argument("superword_moments: symbol out of range");
    const bool cur = in_S[s] != 0;
    if (cur) {
      ++c1;
      if (n >= 1 && b) {
        ++c2;
        if (n >= 2 && a) ++c3;
      }
    }
    a = b;
    b = cur;
  }
  SuperwordMoments m;
  m.m = static_cast<double>(c1) / static_cast<double>(L);
  m.b2 = static_cast<double>(c2) / static_cast<double>(L - 1);
  m.t3 = static_cast<double>(c3) / static_cast<double>(L - 2);
  return m;
}

SuperwordMoments superword_population_moments(double t, double a, double b) {
  // Direct matrix products over the 2-state stationary chain: state weights
  // (1/2, 1/2), transition T = [[1-t, t], [t, 1-t]], P(S | state) = (a, b).
  const double e[2] = {a, b};
  const double T[2][2] = {{1.0 - t, t}, {t, 1.0 - t}};
  SuperwordMoments m;
  m.m = 0.5 * (a + b);
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2) {
      m.b2 += 0.5 * e[s1] * T[s1][s2] * e[s2];
      for (int s3 = 0; s3 < 2; ++s3)
        m.t3 += 0.5 * e[s1] * T[s1][s2] * e[s2] * T[s2][s3] * e[s3];
    }
  return m;
}

TransitionSolve solve_transition(double m, double b2, double t3, double tol_sep) {
  TransitionSolve s;
  const double sep = b2 - m * m;
  const double m_tol = 1e-3;
  if (!(m > m_tol) || !(m < 1.0 - m_tol)) {
    s.degenerate = true;
    s.note = "superword marginal too extreme";
    return s;
  }
  if (std::fabs(sep) <= tol_sep) {
    s.degenerate = true;
    s.note = "rank-1 on superwords";
    return s;
  }
  // P(S)=m, P(SS)=m^2+lambda d^2, P(SSS)=m^3+2m lambda d^2+m lambda^2 d^2
  // with lambda = 1-2t and d the S-gap; eliminate d^2 to solve for lambda.
  s.lambda = (t3 - m * m * m - 2.0 * m * sep) / (m * sep);
  if (std::fabs(s.lambda) < 1e-12) {
    s.degenerate = true;
    s.note = "zero mixing gap";
    return s;
  }
  s.t_hat = std::clamp(0.5 * (1.0 - s.lambda), 1e-6, 1.0 - 1e-6);
  s.delta_s_sq = sep / s.lambda;
  return s;
}

EmissionPair recover_emissions(const Eigen::VectorXd& rho_hat,
                               const Eigen::VectorXd& delta_hat, double t_hat) {
  EmissionPair out;
  const double scale = std::sqrt(std::fabs(1.0 - 2.0 * t_hat) / 4.0);
  if (scale < 1e-6) {
    out.degenerate = true;
    out.note = "near-degenerate mixing";
    return out;
  }
  const Eigen::VectorXd diff = delta_hat / scale;  // p - q
  Eigen::VectorXd p = rho_hat + 0.5 * diff;
  Eigen::VectorXd q = rho_hat - 0.5 * diff;
  p = p.cwiseMax(0.0);
  q = q.cwiseMax(0.0);
  const double ps = p.sum(), qs = q.sum();
  if (ps <= 1e-12 || qs <= 1e-12) {
    out.degenerate = true;
    out.note = "emission collapsed after clipping";
    return out;
  }
  out.p = p / ps;
  out.q = q / qs;
  // The state owning the first positive coordinate of delta_hat is p by
  // construction: p - q = diff > 0 there.
  return out;
}

HmmEstimate hmm_learn(const std::vector<int>& seq, int M,
                      const HmmLearnParams& params) {
  HmmEstimate est;
  est.M = M;
  const uint64_t L = seq.size();
  if (L < 10 * static_cast<uint64_t>(M))
    est.warning = "sequence shorter than 10*M symbols";

  auto batches = hmm_counts(seq, M);
  DeltaEstimate de = estimate_delta(batches[0], batches[1], batches[2], params);
  est.delta_hat = de.delta_hat;
  est.rho_hat = de.rho_hat;
  est.report = de.report;

  est.anchor_set.assign(M, 0);
  size_t anchor_count = 0;
  for (int i = 0; i < M; ++i) {
    if (de.delta_hat(i) > 0.0) {
      est.anchor_set[i] = 1;
      ++anchor_count;
    }
  }
  const double rho_sum = de.rho_hat.sum();
  Eigen::VectorXd rho_norm =
      rho_sum > 0.0 ? Eigen::VectorXd(de.rho_hat / rho_sum) : de.rho_hat;
  if (anchor_count == 0) {
    est.degenerate = true;
    est.failure = "empty anchor set";
    est.t_hat = 0.5;
    est.p_hat = rho_norm;
    est.q_hat = rho_norm;
    return est;
  }

  est.moments = superword_moments(seq, est.anchor_set);
  // At finite length the separation must clear sampling noise, not just the
  // algebraic floor; a few sigmas of the window-estimate scale.
  const double tol_eff =
      std::max(params.tol_sep, 3.0 / std::sqrt(static_cast<double>(L - 1)));
  TransitionSolve ts =
      solve_transition(est.moments.m, est.moments.b2, est.moments.t3, tol_eff);
  if (ts.degenerate) {
    est.degenerate = true;
    est.failure = ts.note;
    est.t_hat = 0.5;
    est.p_hat = rho_norm;
    est.q_hat = rho_norm;
    return est;
  }
  est.t_hat = ts.t_hat;
  est.lambda = ts.lambda;
  est.delta_s_sq = ts.delta_s_sq;

  EmissionPair em = recover_emissions(de.rho_hat, de.delta_hat, ts.t_hat);
  if (em.degenerate) {
    est.degenerate = true;
    est.failure = em.note;
    est.p_hat = rho_norm;
    est.q_hat = rho_norm;
    return est;
  }
  est.p_hat = em.p;
  est.q_hat = em.q;
  return est;
}

double min_swap_emission_l1(const Eigen::VectorXd& p_hat,
                            const Eigen::VectorXd& q_hat,
                            const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  const double direct =
      (p_hat - p).cwiseAbs().sum() + (q_hat - q).cwiseAbs().sum();
  const double swapped =
      (p_hat - q).cwiseAbs().sum() + (q_hat - p).cwiseAbs().sum();
  return std::min(direct, swapped);
}

}  // namespace cooc
