#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sgdlab/rng.hpp"

using namespace sgdlab;

TEST_CASE("philox4x32-10 matches the published known-answer vectors") {
  {
    const auto out = philox4x32_10({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);
  }
  {
    const auto out = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                   {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);
  }
  {
    const auto out = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                   {0xa4093822u, 0x299f31d0u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
  }
}

TEST_CASE("equal seeds give equal streams") {
  Philox4x32 a(123456789ull);
  Philox4x32 b(123456789ull);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  Philox4x32 c(123456790ull);
  bool all_equal = true;
  Philox4x32 a2(123456789ull);
  for (int i = 0; i < 16; ++i) all_equal = all_equal && (a2.next_u32() == c.next_u32());
  CHECK_FALSE(all_equal);
}

TEST_CASE("derived seeds are collision free over a million (master, r) pairs") {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(1000000);
  for (std::uint64_t m = 0; m < 1000; ++m)
    for (std::uint64_t r = 0; r < 1000; ++r)
      seeds.push_back(derive_seed(0x1234abcd0000ull + m, r));
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
  // pure function of its arguments
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  CHECK(derive_seed(7, 3) != derive_seed(7, 4));
}

TEST_CASE("uniform_index is unbiased within binomial fluctuation") {
  Philox4x32 rng(2024);
  const std::uint64_t n = 7;
  const int draws = 1000000;
  std::vector<int> counts(n, 0);
  for (int i = 0; i < draws; ++i) ++counts[rng.uniform_index(n)];
  const double p = 1.0 / static_cast<double>(n);
  const double tol = 4.0 * std::sqrt(p * (1.0 - p) / draws);
  for (std::uint64_t k = 0; k < n; ++k) {
    const double freq = static_cast<double>(counts[k]) / draws;
    CHECK(std::abs(freq - p) <= tol);
  }
}

TEST_CASE("uniform_index degenerate and error cases") {
  Philox4x32 rng(5);
  for (int i = 0; i < 100; ++i) CHECK(rng.uniform_index(1) == 0);
  CHECK_THROWS_AS(rng.uniform_index(0), std::domain_error);
}

TEST_CASE("uniform01 lies in (0, 1]") {
  Philox4x32 rng(99);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("gaussian draws have unit-normal moments") {
  Philox4x32 rng(31337);
  const int draws = 100000;
  double sum = 0.0;
  double sumsq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double z = rng.gaussian();
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / draws;
  const double var = sumsq / draws - mean * mean;
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(static_cast<double>(draws)));
  CHECK(std::abs(var - 1.0) <= 4.0 * std::sqrt(2.0 / static_cast<double>(draws)));
}
