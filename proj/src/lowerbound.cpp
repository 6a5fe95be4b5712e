#include "cooc/lowerbound.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cooc/rng.hpp"

namespace cooc {

namespace {

void check_overlap_fraction(double p) {
  if (!(p >= -1e-12 && p <= 1.0 + 1e-12))
    throw std::invalid_argument("overlap fraction must lie in [0,1]");
}

// Exact binomial coefficient; C(64,32) still fits in a uint64.
uint64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  __uint128_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  }
  return static_cast<uint64_t>(r);
}

}  // namespace

double r_scaled_closed_form(double p, int k) {
  check_overlap_fraction(p);
  if (k < 0) throw std::invalid_argument("r: k must be nonnegative");
  if (k == 0) return 1.0;
  const double s = std::sqrt(64.0 * p * (p - 1.0) + 25.0);  // in [3, 5]
  const double g1 = (5.0 + s) / 8.0;
  const double g2 = (5.0 - s) / 8.0;
  const double ca = (1.0 + 3.0 / s) / 2.0;
  const double cb = (1.0 - 3.0 / s) / 2.0;
  // Power via logs once the direct product could overflow; g1 <= 5/4 keeps
  // everything tame below a few thousand steps.
  if (k * std::log(g1) < 600.0) {
    double out = ca * std::pow(g1, k);
    if (cb > 0.0 && g2 > 0.0) out += cb * std::pow(g2, k);
    return out;
  }
  double out = std::exp(std::log(ca) + k * std::log(g1));
  if (cb > 0.0 && g2 > 0.0) out += std::exp(std::log(cb) + k * std::log(g2));
  return out;
}

CrossMoment r_closed_form(double p, int k, int n) {
  if (n < 2) throw std::invalid_argument("r_closed_form: n must be >= 2");
  check_overlap_fraction(p);
  if (k < 0) throw std::invalid_argument("r_closed_form: k must be nonnegative");
  const double s = std::sqrt(64.0 * p * (p - 1.0) + 25.0);
  CrossMoment cm;
  cm.gamma1 = (5.0 + s) / 8.0;
  cm.gamma2 = (5.0 - s) / 8.0;
  const double log_norm = -2.0 * k * std::log(static_cast<double>(n));
  if (log_norm > -600.0) {
    cm.value = r_scaled_closed_form(p, k) * std::exp(log_norm);
    return cm;
  }
  // Deep-k regime: fold the normalization into each term's exponent.
  const double ca = (1.0 + 3.0 / s) / 2.0;
  const double cb = (1.0 - 3.0 / s) / 2.0;
  cm.value = std::exp(std::log(ca) + k * std::log(cm.gamma1) + log_norm);
  if (cb > 0.0 && cm.gamma2 > 0.0)
    cm.value += std::exp(std::log(cb) + k * std::log(cm.gamma2) + log_norm);
  return cm;
}

double r_recurrence(double p, int k, int n, double t) {
  if (n < 2) throw std::invalid_argument("r_recurrence: n must be >= 2");
  if (k < 1) throw std::invalid_argument("r_recurrence: k must be positive");
  check_overlap_fraction(p);
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("r_recurrence: t must lie in [0,1]");

  // Joint label classes of a symbol under (sigma, pi): ++, +-, -+, --.
  // Class weights are the fractions of the alphabet in each class; the
  // transfer factor is 2(1-t) for a kept label and 2t for a switch, applied
  // per labeling.
  const double w[4] = {p / 2.0, (1.0 - p) / 2.0, (1.0 - p) / 2.0, p / 2.0};
  const double same = 2.0 * (1.0 - t);
  const double diff = 2.0 * t;
  const double n2 = static_cast<double>(n) * n;

  double A[4][4];
  for (int to = 0; to < 4; ++to) {
    const int ts = to >> 1, tp = to & 1;
    for (int from = 0; from < 4; ++from) {
      const int fs = from >> 1, fp = from & 1;
      const double f_sigma = (ts == fs) ? same : diff;
      const double f_pi = (tp == fp) ? same : diff;
      A[to][from] = f_sigma * f_pi * w[from] / n2;
    }
  }

  double F[4] = {1.0 / n2, 1.0 / n2, 1.0 / n2, 1.0 / n2};
  for (int step = 1; step < k; ++step) {
    double G[4] = {0, 0, 0, 0};
    for (int to = 0; to < 4; ++to)
      for (int from = 0; from < 4; ++from) G[to] += A[to][from] * F[from];
    for (int i = 0; i < 4; ++i) F[i] = G[i];
  }
  return w[0] * F[0] + w[1] * F[1] + w[2] * F[2] + w[3] * F[3];
}

double r_bruteforce(int a, int k, int n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("r_bruteforce: n must be even and >= 2");
  if (a < 0 || a > n / 2)
    throw std::invalid_argument("r_bruteforce: overlap out of range");
  if (k < 1) throw std::invalid_argument("r_bruteforce: k must be positive");
  double seqs = std::pow(static_cast<double>(n), k);
  if (seqs > 1e7) throw std::invalid_argument("r_bruteforce: n^k guard exceeded");

  // sigma labels the first half +; pi takes a of those plus enough of the
  // second half, so |sigma+ and pi+| = a.
  const int half = n / 2;
  std::vector<int> lsig(n), lpi(n);
  for (int g = 0; g < n; ++g) {
    lsig[g] = g < half ? 1 : 0;
    lpi[g] = (g < a || (g >= half && g < n - a)) ? 1 : 0;
  }

  // t = 1/4: transfer weight 3/2 on a kept label, 1/2 on a switch.
  std::vector<int> g(k, 0);
  double sum = 0.0;
  for (;;) {
    double prod = 1.0;
    for (int i = 0; i + 1 < k; ++i) {
      prod *= (lsig[g[i]] == lsig[g[i + 1]]) ? 1.5 : 0.5;
      prod *= (lpi[g[i]] == lpi[g[i + 1]]) ? 1.5 : 0.5;
    }
    sum += prod;
    int pos = 0;
    while (pos < k && ++g[pos] == n) g[pos++] = 0;
    if (pos == k) break;
  }
  return sum / std::pow(static_cast<double>(n), 3 * k);
}

double variance_sum(int n, int k) {
  if (n < 2 || n % 2 != 0 || n > 64)
    throw std::invalid_argument("variance_sum: n must be even, 2..64");
  if (k < 0) throw std::invalid_argument("variance_sum: k must be nonnegative");
  const int half = n / 2;
  const double denom = static_cast<double>(binom(n, half));
  double total = 0.0;
  for (int a = 0; a <= half; ++a) {
    const double ca = static_cast<double>(binom(half, a));
    const double p = 2.0 * static_cast<double>(a) / n;
    total += ca * ca * r_scaled_closed_form(p, k) / denom;
  }
  return total;
}

double tv_bound(double c) {
  if (!(c >= 0.0 && c < 1.5))
    throw std::invalid_argument("tv_bound: c must lie in [0, 3/2)");
  return 0.5 * std::sqrt(std::sqrt(2.0 / (2.0 - 4.0 * c / 3.0)) - 1.0);
}

YnStats sample_Yn(int n, int k, uint64_t trials, uint64_t seed) {
  if (n < 2 || n % 2 != 0 || n > 16)
    throw std::invalid_argument("sample_Yn: n must be even, 2..16");
  if (k < 1) throw std::invalid_argument("sample_Yn: k must be positive");
  if (trials < 2) throw std::invalid_argument("sample_Yn: need at least 2 trials");

  // All balanced labelings as bitmasks (Gosper's hack).
  std::vector<uint32_t> masks;
  const uint32_t limit = 1u << n;
  uint32_t v = (1u << (n / 2)) - 1;
  while (v < limit) {
    masks.push_back(v);
    const uint32_t t = v | (v - 1);
    v = (t + 1) | (((~t & (t + 1)) - 1) >> (__builtin_ctz(v) + 1));
  }

  Rng rng(seed, "sample_yn");
  std::vector<int> g(k);
  std::vector<double> weight(masks.size());
  double mean = 0.0, m2 = 0.0;
  for (uint64_t trial = 0; trial < trials; ++trial) {
    for (int i = 0; i < k; ++i) g[i] = static_cast<int>(rng.next_below(n));
    double total = 0.0;
    for (size_t mi = 0; mi < masks.size(); ++mi) {
      const uint32_t mask = masks[mi];
      double prod = 1.0;
      for (int i = 0; i + 1 < k; ++i) {
        const int la = (mask >> g[i]) & 1;
        const int lb = (mask >> g[i + 1]) & 1;
        prod *= (la == lb) ? 1.5 : 0.5;
      }
      weight[mi] = prod;
      total += prod;
    }
    // sigma ~ P(sigma | G): inverse-CDF over the enumerated labelings.  The
    // draw is part of the sampling contract even though Y depends on G only.
    double target = rng.next_double() * total;
    for (size_t mi = 0; mi < masks.size(); ++mi) {
      target -= weight[mi];
      if (target <= 0.0) break;
    }
    const double y = total / static_cast<double>(masks.size());
    const double d = y - mean;
    mean += d / static_cast<double>(trial + 1);
    m2 += d * (y - mean);
  }

  YnStats st;
  st.trials = trials;
  st.mean = mean;
  st.variance = m2 / static_cast<double>(trials - 1);
  st.std_error = std::sqrt(st.variance / static_cast<double>(trials));
  st.ci_low = st.mean - 1.96 * st.std_error;
  st.ci_high = st.mean + 1.96 * st.std_error;
  return st;
}

}  // namespace cooc
