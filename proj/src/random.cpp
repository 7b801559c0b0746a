// SPDX-License-Identifier: Apache-2.0
#include "loopbench/random.hpp"

namespace loopbench {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kNodeSalt = 0xd6e8feb86659fd93ULL;
constexpr std::uint64_t kRoundSalt = 0xa0761d6478bd642fULL;
constexpr std::uint64_t kChildSalt = 0xe7037ed1a0b428dbULL;
}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t node_id,
                           std::uint64_t round_index) noexcept {
  // Each step is a bijection in the newly mixed component, so changing any
  // one part of the key changes the key.
  std::uint64_t k = mix64(master_seed + kGolden);
  k = mix64(k ^ mix64(node_id + kNodeSalt));
  k = mix64(k ^ mix64(round_index + kRoundSalt));
  key_ = k;
}

std::uint64_t RandomStream::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RandomStream::next_unit() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::next_below(std::uint64_t bound) noexcept {
  // Rejection on the top of the range keeps every residue equally likely.
  const std::uint64_t limit = max() - max() % bound;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % bound;
}

RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t node_id,
                           std::uint64_t round_index) noexcept {
  return RandomStream(master_seed, node_id, round_index);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return mix64(mix64(master_seed ^ kChildSalt) + mix64(index + kGolden));
}

}  // namespace loopbench
