// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>

namespace loopbench {

/// Bijective 64-bit finalizer (splitmix64).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Counter-based stream keyed by (master seed, node, round).
///
/// Draw i is a pure function of (key, i), so the values a node sees in a
/// round do not depend on which other nodes were evaluated first or on
/// which thread. Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t master_seed, std::uint64_t node_id, std::uint64_t round_index) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 bits of resolution.
  double next_unit() noexcept;
  /// Uniform on [0, bound); bound must be positive. Unbiased.
  std::uint64_t next_below(std::uint64_t bound) noexcept;
  bool bernoulli(double p) noexcept { return next_unit() < p; }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t node_id,
                           std::uint64_t round_index) noexcept;

/// Child seed for an indexed sub-run (repeat seeds, resampling attempts).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

}  // namespace loopbench
