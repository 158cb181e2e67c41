#include "kondo/sector_basis.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace kondo {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

SectorBasis::SectorBasis(int n_sites, int n_up) : n_sites_(n_sites), n_up_(n_up) {
  if (n_sites < 1 || n_sites > kMaxSites)
    throw std::invalid_argument("n_sites must lie in [1, " + std::to_string(kMaxSites) + "], got " +
                                std::to_string(n_sites));
  if (n_up < 0 || n_up > n_sites)
    throw std::invalid_argument("n_up must lie in [0, n_sites], got " + std::to_string(n_up));

  binom_.assign(kMaxSites + 1, std::vector<std::size_t>(kMaxSites + 2, 0));
  for (int n = 0; n <= kMaxSites; ++n)
    for (int k = 0; k <= kMaxSites + 1; ++k) binom_[n][k] = static_cast<std::size_t>(binomial(n, k));

  configs_.reserve(binomial(n_sites, n_up));
  if (n_up == 0) {
    configs_.push_back(0);
    return;
  }
  const std::uint64_t limit = std::uint64_t{1} << n_sites;
  std::uint64_t c = (std::uint64_t{1} << n_up) - 1;
  // Gosper's hack: next integer with the same popcount.
  while (c < limit) {
    configs_.push_back(static_cast<Config>(c));
    const std::uint64_t low = c & (~c + 1);
    const std::uint64_t ripple = c + low;
    c = (((ripple ^ c) >> 2) / low) | ripple;
  }
}

bool SectorBasis::contains(Config c) const {
  if (n_sites_ < 32 && (c >> n_sites_) != 0) return false;
  return std::popcount(c) == n_up_;
}

SectorBasis enumerate_sector(int n_sites, int n_up) { return SectorBasis(n_sites, n_up); }

int sector_of_ground_state(int n_sites) {
  if (n_sites < 2 || n_sites % 2 != 0)
    throw std::invalid_argument("n_sites must be even and >= 2, got " + std::to_string(n_sites));
  return n_sites / 2;
}

}  // namespace kondo
