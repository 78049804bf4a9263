#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "conehull/rng.hpp"
#include "conehull/stats.hpp"

using namespace conehull;

TEST_CASE("philox known-answer vectors") {
  using B = Philox4x32::Block;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::bijection(B{0, 0, 0, 0}, K{0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::bijection(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::bijection(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("engine output is the bijection of (block, stream) under the seed key") {
  RandomStream rng(0x0123456789abcdefULL, 0xfedcba9876543210ULL);
  const auto first = Philox4x32::bijection({0, 0, 0x76543210, 0xfedcba98}, {0x89abcdef, 0x01234567});
  for (int i = 0; i < 4; ++i) CHECK(rng() == first[i]);
  const auto second = Philox4x32::bijection({1, 0, 0x76543210, 0xfedcba98}, {0x89abcdef, 0x01234567});
  CHECK(rng() == second[0]);
}

TEST_CASE("same seed and stream reproduce, different streams differ") {
  RandomStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    CHECK(x == b());
    same_c += x == c();
    same_d += x == d();
  }
  CHECK(same_c < 3);
  CHECK(same_d < 3);
}

TEST_CASE("discard skips outputs") {
  for (std::uint64_t skip : {0ULL, 1ULL, 3ULL, 4ULL, 5ULL, 17ULL, 1000ULL}) {
    RandomStream a(11, 2), b(11, 2);
    for (std::uint64_t i = 0; i < skip; ++i) a();
    b.discard(skip);
    for (int i = 0; i < 9; ++i) CHECK(a() == b());
  }
  RandomStream a(11, 2), b(11, 2);
  a();
  a();
  b();
  b.discard(1);
  CHECK(a() == b());
}

TEST_CASE("uniform01 stays in the open interval with mean 1/2") {
  RandomStream rng(1, 1);
  double sum = 0.0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double u = uniform01(rng);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // s.e. of the mean is 1 / sqrt(12 count)
  CHECK(std::abs(sum / count - 0.5) < 6.0 / std::sqrt(12.0 * count));
}

TEST_CASE("uniform_index is unbiased") {
  RandomStream rng(3, 9);
  std::vector<std::size_t> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[uniform_index(rng, 7)];
  CHECK(chi_square_uniform(counts).p_value > 1e-3);
  CHECK(uniform_index(rng, 1) == 0);
}

TEST_CASE("mix_stream_id separates structured keys") {
  std::set<std::uint64_t> ids;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 20; ++b)
      for (std::uint64_t c = 0; c < 5; ++c) ids.insert(mix_stream_id(a, b, c));
  CHECK(ids.size() == 2000);
  CHECK(mix_stream_id(1, 2, 3) == mix_stream_id(1, 2, 3));
  CHECK(mix_stream_id(1, 2) != mix_stream_id(2, 1));
}
