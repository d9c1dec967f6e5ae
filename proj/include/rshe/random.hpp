// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random streams (Philox4x32-10, Salmon et al., SC'11).
// A stream is addressed by (master seed, trajectory, step, purpose); the
// draws never depend on how streams are scheduled across threads.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

namespace rshe {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53;
  constexpr std::uint32_t kM1 = 0xCD9E8D57;
  constexpr std::uint32_t kW0 = 0x9E3779B9;
  constexpr std::uint32_t kW1 = 0xBB67AE85;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

}  // namespace detail

/// Stream purposes keep independent uses of one (trajectory, step) apart.
enum class StreamPurpose : std::uint32_t {
  kNoise = 0,
  kInitial = 1,
  kMeasure = 2,
  kProperty = 3,
};

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t trajectory, std::uint32_t step,
            StreamPurpose purpose = StreamPurpose::kNoise)
      : trajectory_(trajectory), step_(step) {
    const std::uint64_t k =
        detail::splitmix64(master_seed ^ (static_cast<std::uint64_t>(purpose) << 56));
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  }

  std::uint32_t next_u32() {
    if (lane_ == 4) refill();
    return buffer_[lane_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by Box-Muller; the second variate of each pair is cached.
  double normal() {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return z;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return r * std::cos(theta);
  }

  // UniformRandomBitGenerator surface, for std::shuffle and friends.
  using result_type = std::uint32_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xFFFFFFFFu; }
  result_type operator()() { return next_u32(); }

 private:
  void refill() {
    const std::array<std::uint32_t, 4> ctr = {
        block_++, step_, static_cast<std::uint32_t>(trajectory_),
        static_cast<std::uint32_t>(trajectory_ >> 32)};
    buffer_ = detail::philox4x32_10(ctr, key_);
    lane_ = 0;
  }

  std::uint64_t trajectory_;
  std::uint32_t step_;
  std::array<std::uint32_t, 2> key_{};
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int lane_ = 4;
  std::optional<double> spare_;
};

}  // namespace rshe
