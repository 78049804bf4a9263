#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace conehull {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit seed forms the key, the 64-bit stream id occupies the upper
/// half of the 128-bit counter and the lower half counts blocks, so each
/// (seed, stream) pair addresses an independent sequence of 2^64 blocks
/// regardless of which thread draws from it.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (index_ == 4) refill();
    return buffer_[index_++];
  }

  /// Skip `count` 32-bit outputs.
  void discard(std::uint64_t count);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Raw bijection used by the engine; exposed for known-answer tests.
  static Block bijection(Block counter, Key key);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int index_ = 4;
};

using RandomStream = Philox4x32;

/// Uniform double in the open interval (0, 1) built from 53 random bits.
inline double uniform01(RandomStream& rng) {
  const std::uint64_t a = rng() >> 5;  // 27 bits
  const std::uint64_t b = rng() >> 6;  // 26 bits
  return (static_cast<double>((a << 26) | b) + 0.5) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) without modulo bias.
std::uint64_t uniform_index(RandomStream& rng, std::uint64_t bound);

/// Deterministic 64-bit mix used to derive stream ids from structured keys.
std::uint64_t mix_stream_id(std::uint64_t a, std::uint64_t b,
                            std::uint64_t c = 0);

}  // namespace conehull
