#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace sgdlab {

// SplitMix64 finalizer. Bijective on 64-bit words, full avalanche.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Seed for stream/replicate `index` under `master`. Pure function:
//   derive_seed(m, r) = splitmix64(m + (r + 1) * golden64).
// For a fixed master this is injective in the index.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15ull);
}

// One block of Philox4x32 with 10 rounds (Salmon et al. construction).
inline std::array<std::uint32_t, 4> philox4x32_10(
    std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) noexcept {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round != 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

// Counter-based generator. The 64-bit seed is the key; a 128-bit counter
// advances once per 4-word block. Output is a pure function of
// (seed, position), so equal seeds give equal streams regardless of
// scheduling.
//
// Consumption contract, fixed so results are reproducible bit for bit:
//   next_u64      = lo word then hi word of two consecutive u32 draws
//   uniform01     = one u64, mapped to (0, 1] with 53-bit resolution
//   gaussian      = exactly two uniform01 draws (Box-Muller, cosine branch)
//   uniform_index = rejection sampling on u64 draws, no modulo bias
class Philox4x32 {
 public:
  explicit Philox4x32(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)} {}

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return block_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  // Uniform on {0, ..., n-1}.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::domain_error("uniform_index: n must be >= 1");
    if (n == 1) return 0;
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t u = next_u64();
      if (u >= threshold) return u % n;
    }
  }

  // Uniform on (0, 1].
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // One standard normal draw.
  double gaussian() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  // Fills v with independent standard normals in coordinate order.
  template <class Vec>
  void fill_gaussian(Vec& v) {
    for (int i = 0; i < static_cast<int>(v.size()); ++i) v[i] = gaussian();
  }

 private:
  void refill() {
    block_ = philox4x32_10(counter_, key_);
    pos_ = 0;
    for (int i = 0; i < 4; ++i) {
      if (++counter_[i] != 0) break;  // 128-bit increment with carry
    }
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_{0, 0, 0, 0};
  std::array<std::uint32_t, 4> block_{};
  int pos_ = 4;
};

}  // namespace sgdlab
