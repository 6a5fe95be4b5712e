#pragma once

#include <cstdint>

namespace cooc {

// E[P(G|sigma) P(G|pi)] for two balanced labelings with overlap fraction p,
// sequence length k, alphabet size n, at switch probability t = 1/4.  The
// closed form diagonalizes a 2x2 transfer matrix with eigenvalues
// gamma1 >= gamma2 (both returned for the trace/determinant identities).
struct CrossMoment {
  double value = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};
CrossMoment r_closed_form(double p, int k, int n);

// n^{2k} * r(p): the closed form without the alphabet normalization, safe
// from underflow for any k (log-domain internally when needed).
double r_scaled_closed_form(double p, int k);

// Linear-recurrence oracle over the four joint label classes
// (++, +-, -+, --); the general-t transfer entries follow the
// (1-t)^2 / t(1-t) / t^2 pattern and t = 1/4 reproduces the closed form.
double r_recurrence(double p, int k, int n, double t = 0.25);

// Exhaustive oracle: explicit labelings with overlap count a, summed over
// all n^k sequences (guarded to n^k <= 1e7).
double r_bruteforce(int a, int k, int n);

// E[Y_n^2] = sum_a C(n/2,a)^2 * n^{2k} r(2a/n) / C(n,n/2), binomials exact
// (n <= 64).
double variance_sum(int n, int k);

// Total-variation upper bound (1/2) sqrt( sqrt(2/(2-4c/3)) - 1 ), 0 <= c < 3/2.
double tv_bound(double c);

// Monte-Carlo distribution of Y_n = n^k P_n(G) under the uniform null:
// G uniform over [n]^k, sigma drawn from its exact conditional (enumerated
// over all C(n,n/2) balanced labelings; n <= 16).
struct YnStats {
  uint64_t trials = 0;
  double mean = 0.0;
  double variance = 0.0;   // unbiased sample variance
  double std_error = 0.0;
  double ci_low = 0.0;     // 95% normal interval for the mean
  double ci_high = 0.0;
};
YnStats sample_Yn(int n, int k, uint64_t trials, uint64_t seed);

}  // namespace cooc
