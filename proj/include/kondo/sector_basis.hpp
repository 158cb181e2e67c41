#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace kondo {

/// Spin configuration: bit i holds the spin of site i+1, set bit = up.
using Config = std::uint32_t;

inline constexpr int kMaxSites = 24;

std::uint64_t binomial(int n, int k);

/// Fixed-magnetization sector of an N-site spin-1/2 chain.
///
/// Configurations are the N-bit integers with exactly n_up set bits, in
/// ascending order. For fixed popcount ascending integer order coincides with
/// colexicographic order of the set-bit positions, so the ordinal of a
/// configuration is computed by the combinatorial number system without any
/// lookup table.
class SectorBasis {
 public:
  SectorBasis(int n_sites, int n_up);

  int n_sites() const { return n_sites_; }
  int n_up() const { return n_up_; }
  std::size_t size() const { return configs_.size(); }

  Config config(std::size_t k) const { return configs_[k]; }
  const std::vector<Config>& configs() const { return configs_; }

  /// Ordinal of `c`. Requires popcount(c) == n_up and c < 2^n_sites.
  std::size_t index_of(Config c) const {
    std::size_t rank = 0;
    int j = 1;
    while (c != 0) {
      const int p = __builtin_ctz(c);
      rank += binom_[p][j];
      ++j;
      c &= c - 1;
    }
    return rank;
  }

  bool contains(Config c) const;

 private:
  int n_sites_;
  int n_up_;
  std::vector<Config> configs_;
  // binom_[n][k] for 0 <= n <= kMaxSites, 0 <= k <= kMaxSites + 1
  std::vector<std::vector<std::size_t>> binom_;
};

SectorBasis enumerate_sector(int n_sites, int n_up);

/// Even-N antiferromagnetic ground states are total singlets, so Sz = 0.
int sector_of_ground_state(int n_sites);

inline bool spin_up(Config c, int site) { return (c >> (site - 1)) & 1u; }

}  // namespace kondo
