#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace cooc {

// Deterministic, platform-independent random stream.
//
// Every consumer derives its own stream from (seed, purpose, index), so
// batches and sweep cells are statistically independent and reproducible no
// matter what order they run in.  The generator is xoshiro256++ seeded
// through splitmix64; the distributions below are implemented here rather
// than taken from <random> so that results do not depend on the standard
// library build.
class Rng {
 public:
  Rng(uint64_t seed, std::string_view purpose, uint64_t index = 0);

  uint64_t next_u64();
  // Uniform in [0, 1), 53-bit resolution.
  double next_double();
  // Uniform over {0, ..., n-1}, rejection-free modulo bias below 2^-64*n.
  uint64_t next_below(uint64_t n);
  // Standard normal (Marsaglia polar method).
  double next_gauss();
  // Poisson(mean).  Inversion by products for small means, Hormann's PTRS
  // transformed rejection for large ones.
  uint64_t next_poisson(double mean);
  // Gamma(shape, 1), shape > 0 (Marsaglia-Tsang, with the boost trick for
  // shape < 1).  Used for Dirichlet draws.
  double next_gamma(double shape);

 private:
  uint64_t s_[4];
  bool have_gauss_ = false;
  double spare_gauss_ = 0.0;
};

// Walker alias table: O(1) draws from a fixed discrete distribution.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights);
  size_t draw(Rng& rng) const;
  size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<uint32_t> alias_;
};

}  // namespace cooc
