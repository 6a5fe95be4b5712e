#include "cooc/models.hpp"

#include <cmath>
#include <stdexcept>

namespace cooc {

namespace {

void check_probability_vector(const Eigen::VectorXd& v, const char* what) {
  if (v.size() == 0) throw std::invalid_argument(std::string(what) + ": empty");
  if (v.minCoeff() < 0.0)
    throw std::invalid_argument(std::string(what) + ": negative entry");
  if (std::fabs(v.sum() - 1.0) > 1e-8)
    throw std::invalid_argument(std::string(what) + ": does not sum to 1");
}

}  // namespace

Eigen::MatrixXd Model::bigram() const { return P * W * P.transpose(); }

Eigen::VectorXd Model::marginal() const {
  Eigen::MatrixXd B = bigram();
  return B.rowwise().sum();
}

uint64_t CountMatrix::total() const {
  uint64_t s = 0;
  for (const Entry& e : entries) s += e.c;
  return s;
}

Eigen::MatrixXd CountMatrix::dense() const {
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(M, M);
  for (const Entry& e : entries) C(e.i, e.j) = static_cast<double>(e.c);
  return C;
}

Model generate_topic_model(int M, int R, const std::vector<double>& mixing,
                           double concentration, uint64_t seed) {
  if (M < 1 || R < 1 || R > M)
    throw std::invalid_argument("topic model: need 1 <= R <= M");
  if (static_cast<int>(mixing.size()) != R)
    throw std::invalid_argument("topic model: mixing must have R entries");
  if (!(concentration > 0.0))
    throw std::invalid_argument("topic model: concentration must be positive");
  double total = 0.0;
  for (double w : mixing) {
    if (!(w > 0.0))
      throw std::invalid_argument("topic model: mixing weights must be positive");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-8)
    throw std::invalid_argument("topic model: mixing must sum to 1");
  Model m;
  m.M = M;
  m.R = R;
  m.family = "topic";
  m.params["concentration"] = concentration;
  m.W = Eigen::MatrixXd::Zero(R, R);
  for (int r = 0; r < R; ++r) m.W(r, r) = mixing[r] / total;
  m.P = Eigen::MatrixXd::Zero(M, R);
  Rng rng(seed, "topic_model");
  for (int r = 0; r < R; ++r) {
    double colsum = 0.0;
    for (int i = 0; i < M; ++i) {
      m.P(i, r) = rng.next_gamma(concentration);
      colsum += m.P(i, r);
    }
    m.P.col(r) /= colsum;
  }
  return m;
}

Model generate_sbm_model(int M, int R, double alpha, double beta) {
  if (M < 1 || R < 1 || M % R != 0)
    throw std::invalid_argument("sbm model: M must be a positive multiple of R");
  if (!(alpha > 0.0) || !(beta >= 0.0))
    throw std::invalid_argument("sbm model: need alpha > 0, beta >= 0");
  Model m;
  m.M = M;
  m.R = R;
  m.family = "sbm";
  m.params["alpha"] = alpha;
  m.params["beta"] = beta;
  const int size = M / R;
  m.P = Eigen::MatrixXd::Zero(M, R);
  for (int r = 0; r < R; ++r)
    for (int i = 0; i < size; ++i) m.P(r * size + i, r) = 1.0 / size;
  // Normalize so the entries of B sum to one: sum(W) must equal 1.
  const double c = 1.0 / (R * alpha + R * (R - 1) * beta);
  m.W = Eigen::MatrixXd::Constant(R, R, beta * c);
  for (int r = 0; r < R; ++r) m.W(r, r) = alpha * c;
  return m;
}

Model hmm_bigram_model(int M, double t, const Eigen::VectorXd& p,
                       const Eigen::VectorXd& q) {
  if (p.size() != M || q.size() != M)
    throw std::invalid_argument("hmm bigram: p, q must have length M");
  check_probability_vector(p, "hmm bigram p");
  check_probability_vector(q, "hmm bigram q");
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("hmm bigram: t must lie in [0,1]");
  Model m;
  m.M = M;
  m.R = 2;
  m.family = "hmm_bigram";
  m.params["t"] = t;
  m.P = Eigen::MatrixXd(M, 2);
  m.P.col(0) = p;
  m.P.col(1) = q;
  // Stationary state distribution is (1/2, 1/2); W folds it into the
  // symmetric transition matrix, so B = P W P^T is the pair distribution.
  m.W = Eigen::MatrixXd(2, 2);
  m.W << 0.5 * (1.0 - t), 0.5 * t, 0.5 * t, 0.5 * (1.0 - t);
  return m;
}

Model hmm_bigram_model(const HmmModel& h) {
  return hmm_bigram_model(h.M, h.t, h.p, h.q);
}

CountMatrix sample_counts(const Model& m, uint64_t N, SampleScheme scheme,
                          uint64_t seed, int batch_id) {
  if (N == 0) throw std::invalid_argument("sample_counts: N must be positive");
  if (m.M < 1) throw std::invalid_argument("sample_counts: empty model");
  Eigen::MatrixXd B = m.bigram();
  if (std::fabs(B.sum() - 1.0) > 1e-8)
    throw std::invalid_argument("sample_counts: model entries do not sum to 1");

  CountMatrix c;
  c.M = m.M;
  c.nominal_N = N;
  c.scheme = scheme;
  c.batch_id = batch_id;
  Rng rng(seed, "sample_counts", static_cast<uint64_t>(batch_id));

  if (scheme == SampleScheme::kPoisson) {
    // Independent Poi(N * B_ij) per cell; cells below the floor contribute a
    // count with probability < 1e-18 and are skipped.
    for (int i = 0; i < m.M; ++i) {
      for (int j = 0; j < m.M; ++j) {
        const double mean = static_cast<double>(N) * B(i, j);
        if (mean < 1e-18) continue;
        const uint64_t k = rng.next_poisson(mean);
        if (k > 0) c.entries.push_back({i, j, k});
      }
    }
    return c;
  }

  // Multinomial: exactly N pairs from the flattened cell distribution.
  std::vector<double> weights;
  std::vector<std::pair<int, int>> cells;
  weights.reserve(static_cast<size_t>(m.M) * m.M);
  cells.reserve(static_cast<size_t>(m.M) * m.M);
  for (int i = 0; i < m.M; ++i) {
    for (int j = 0; j < m.M; ++j) {
      if (B(i, j) > 0.0) {
        weights.push_back(B(i, j));
        cells.emplace_back(i, j);
      }
    }
  }
  AliasTable table(weights);
  std::vector<uint64_t> hits(cells.size(), 0);
  for (uint64_t n = 0; n < N; ++n) ++hits[table.draw(rng)];
  for (size_t idx = 0; idx < cells.size(); ++idx) {
    if (hits[idx] > 0)
      c.entries.push_back({cells[idx].first, cells[idx].second, hits[idx]});
  }
  // Cells were enumerated in row-major order, so entries are already sorted.
  return c;
}

std::array<CountMatrix, 3> sample_batches(const Model& m, uint64_t N,
                                          SampleScheme scheme, uint64_t seed) {
  return {sample_counts(m, N, scheme, seed, 1),
          sample_counts(m, N, scheme, seed, 2),
          sample_counts(m, N, scheme, seed, 3)};
}

std::vector<int> hmm_sample_sequence(const HmmModel& h, uint64_t length,
                                     uint64_t seed) {
  if (h.M < 1 || h.p.size() != h.M || h.q.size() != h.M)
    throw std::invalid_argument("hmm sequence: inconsistent model");
  check_probability_vector(h.p, "hmm sequence p");
  check_probability_vector(h.q, "hmm sequence q");
  if (!(h.t >= 0.0 && h.t <= 1.0))
    throw std::invalid_argument("hmm sequence: t must lie in [0,1]");
  if (length == 0) throw std::invalid_argument("hmm sequence: empty length");

  std::vector<double> pw(h.p.data(), h.p.data() + h.M);
  std::vector<double> qw(h.q.data(), h.q.data() + h.M);
  AliasTable ep(pw), eq(qw);

  std::vector<int> seq(length);
  Rng rng(seed, "hmm_sequence");
  int state = rng.next_double() < 0.5 ? 0 : 1;
  for (uint64_t n = 0; n < length; ++n) {
    seq[n] = static_cast<int>(state == 0 ? ep.draw(rng) : eq.draw(rng));
    if (rng.next_double() < h.t) state ^= 1;
  }
  return seq;
}

}  // namespace cooc
