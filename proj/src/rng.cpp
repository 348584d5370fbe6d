#include "fpdtl/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace fpdtl {

namespace {
constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
}

Pcg32::Pcg32(std::uint64_t seed, std::uint64_t stream) : state_(0), inc_((stream << 1u) | 1u) {
  (*this)();
  state_ += seed;
  (*this)();
}

Pcg32::result_type Pcg32::operator()() {
  const std::uint64_t old = state_;
  state_ = old * kMultiplier + inc_;
  const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
  const auto rot = static_cast<std::uint32_t>(old >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
}

std::uint64_t Pcg32::next_u64() {
  const std::uint64_t hi = (*this)();
  const std::uint64_t lo = (*this)();
  return (hi << 32u) | lo;
}

double Pcg32::uniform01() {
  return static_cast<double>(next_u64() >> 11u) * 0x1.0p-53;
}

std::size_t Pcg32::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  const auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
  return std::min(i, n - 1);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30u)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27u)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31u);
}

std::uint64_t tag_hash(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

Pcg32 substream(std::uint64_t root_seed, std::uint64_t run_id, std::string_view tag) {
  const std::uint64_t seed = mix64(mix64(root_seed) ^ run_id);
  const std::uint64_t stream = mix64(tag_hash(tag) ^ mix64(run_id + 1));
  return Pcg32(seed, stream);
}

std::size_t sample_categorical(std::span<const double> probs, Pcg32& rng) {
  if (probs.empty()) throw std::invalid_argument("sample_categorical: empty distribution");
  const double u = rng.uniform01();
  double cumulative = 0.0;
  std::size_t last_positive = probs.size();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  // Rounding left u above the final cumulative sum.
  if (last_positive == probs.size()) throw std::invalid_argument("sample_categorical: zero mass");
  return last_positive;
}

}  // namespace fpdtl
