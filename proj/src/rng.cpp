#include "conehull/rng.hpp"

namespace conehull {
namespace {

constexpr std::uint32_t kMultiplier0 = 0xD2511F53;
constexpr std::uint32_t kMultiplier1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                    std::uint32_t& hi) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {}

Philox4x32::Block Philox4x32::bijection(Block ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMultiplier0, ctr[0], lo0, hi0);
    mulhilo(kMultiplier1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

void Philox4x32::refill() {
  const Block ctr{static_cast<std::uint32_t>(block_),
                  static_cast<std::uint32_t>(block_ >> 32),
                  static_cast<std::uint32_t>(stream_id_),
                  static_cast<std::uint32_t>(stream_id_ >> 32)};
  const Key key{static_cast<std::uint32_t>(seed_),
                static_cast<std::uint32_t>(seed_ >> 32)};
  buffer_ = bijection(ctr, key);
  ++block_;
  index_ = 0;
}

void Philox4x32::discard(std::uint64_t count) {
  while (count > 0 && index_ < 4) {
    ++index_;
    --count;
  }
  block_ += count / 4;
  const auto rest = static_cast<int>(count % 4);
  if (rest > 0) {
    refill();
    index_ = rest;
  }
}

std::uint64_t uniform_index(RandomStream& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t x =
        (static_cast<std::uint64_t>(rng()) << 32) | rng();
    if (x < limit) return x % bound;
  }
}

std::uint64_t mix_stream_id(std::uint64_t a, std::uint64_t b,
                            std::uint64_t c) {
  return splitmix64(splitmix64(splitmix64(a) ^ b) ^ c);
}

}  // namespace conehull
