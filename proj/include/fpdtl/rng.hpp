#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace fpdtl {

/**
 * PCG32 (XSH-RR 64/32) generator.
 *
 * Each (seed, stream) pair selects an independent sequence; the stream
 * selects the LCG increment. Satisfies UniformRandomBitGenerator so it can
 * be handed to <random> distributions, but the library's own samplers use
 * uniform01() so results do not depend on the standard library vendor.
 */
class Pcg32 {
 public:
  using result_type = std::uint32_t;

  explicit Pcg32(std::uint64_t seed = 0x853c49e6748fea9bULL,
                 std::uint64_t stream = 0xda3e39cb94b95bdbULL);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffu; }

  result_type operator()();

  std::uint64_t next_u64();

  /// Uniform double on [0, 1) with 53 random bits.
  double uniform01();

  /// Uniform index on [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  bool operator==(const Pcg32&) const = default;

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 0;
};

/// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x);

/// Stable 64-bit FNV-1a hash of a tag string.
std::uint64_t tag_hash(std::string_view tag);

/**
 * Derives the generator for one purpose within one repetition.
 *
 * The same (root_seed, run_id, tag) always yields the same generator, and
 * distinct triples yield distinct streams, so adding or removing a consumer
 * never shifts the numbers seen by another.
 */
Pcg32 substream(std::uint64_t root_seed, std::uint64_t run_id, std::string_view tag);

/// Inverse-CDF draw over `probs` in stored order. Zero-mass outcomes are never returned.
std::size_t sample_categorical(std::span<const double> probs, Pcg32& rng);

}  // namespace fpdtl
