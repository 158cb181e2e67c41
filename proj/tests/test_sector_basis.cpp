#include <doctest.h>

#include <bit>
#include <stdexcept>

#include "kondo/sector_basis.hpp"

using namespace kondo;

TEST_CASE("enumerate_sector small cases") {
  const SectorBasis b21 = enumerate_sector(2, 1);
  REQUIRE(b21.size() == 2);
  CHECK(b21.config(0) == 0b01u);
  CHECK(b21.config(1) == 0b10u);
  CHECK(enumerate_sector(4, 2).size() == 6);
  CHECK(enumerate_sector(16, 8).size() == 12870);
  CHECK(enumerate_sector(6, 0).size() == 1);
  CHECK(enumerate_sector(6, 6).config(0) == 0b111111u);
}

TEST_CASE("sector_of_ground_state") {
  CHECK(sector_of_ground_state(4) == 2);
  CHECK(sector_of_ground_state(10) == 5);
  CHECK(sector_of_ground_state(16) == 8);
  CHECK_THROWS_AS(sector_of_ground_state(7), std::invalid_argument);
  CHECK_THROWS_AS(sector_of_ground_state(0), std::invalid_argument);
}

TEST_CASE("sector bounds are enforced") {
  CHECK_THROWS_AS(SectorBasis(25, 12), std::invalid_argument);
  CHECK_THROWS_AS(SectorBasis(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(SectorBasis(6, 7), std::invalid_argument);
  CHECK_THROWS_AS(SectorBasis(6, -1), std::invalid_argument);
}

TEST_CASE("sector sizes over all magnetizations sum to 2^n") {
  for (int n = 1; n <= 18; ++n) {
    std::uint64_t total = 0;
    for (int k = 0; k <= n; ++k) {
      const SectorBasis b(n, k);
      CHECK(b.size() == binomial(n, k));
      total += b.size();
    }
    CHECK(total == (std::uint64_t{1} << n));
  }
}

TEST_CASE("index round trip is exhaustive for n <= 12") {
  for (int n = 1; n <= 12; ++n) {
    for (int k = 0; k <= n; ++k) {
      const SectorBasis b(n, k);
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (i > 0) REQUIRE(b.config(i) > b.config(i - 1));
        REQUIRE(std::popcount(b.config(i)) == k);
        REQUIRE(b.index_of(b.config(i)) == i);
        REQUIRE(b.contains(b.config(i)));
      }
    }
  }
  const SectorBasis b(6, 3);
  CHECK_FALSE(b.contains(0b000111u << 3 | 1u));
  CHECK_FALSE(b.contains(0b1000000u));
}

TEST_CASE("spin_up reads site i from bit i-1") {
  CHECK(spin_up(0b0001u, 1));
  CHECK_FALSE(spin_up(0b0001u, 2));
  CHECK(spin_up(0b1000u, 4));
}
