#pragma once

#include <cstdint>
#include <string_view>

#include "r3bench/core/rng.hpp"
#include "r3bench/core/types.hpp"

namespace r3bench {

// Per-frame corruption seed:
//
//   s = mix64(global_seed)
//   s = mix64(s ^ fnv1a64(frame_id))
//   s = mix64(s ^ ((kind << 8) | severity_level))
//
// where kind is the CorruptionKind enumerator value and severity_level is 1..3.
// Parameter overrides do not enter the seed.
inline std::uint64_t derive_frame_seed(const SeedPolicy& policy, std::string_view frame_id,
                                       const CorruptionSpec& spec) {
  std::uint64_t s = mix64(policy.global_seed);
  s = mix64(s ^ fnv1a64(frame_id));
  const auto tag = (static_cast<std::uint64_t>(spec.kind) << 8) |
                   static_cast<std::uint64_t>(level(spec.severity));
  return mix64(s ^ tag);
}

// Seed for consumers that are not tied to a corruption (synthetic scenes,
// pseudo-detector draws). The 0xFF tag never collides with a corruption tag.
inline std::uint64_t derive_stream_seed(std::uint64_t global_seed, std::string_view label) {
  std::uint64_t s = mix64(global_seed);
  s = mix64(s ^ fnv1a64(label));
  return mix64(s ^ 0xFFULL);
}

}  // namespace r3bench
