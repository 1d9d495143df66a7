#include <cmath>
#include <vector>

#include "doctest.h"
#include "scenegt/random.h"

using namespace scenegt;

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST_CASE("philox4x32-10 known answers") {
  const Philox4x32 zero(Philox4x32::Key{0, 0});
  const auto a = zero({0, 0, 0, 0});
  CHECK(a[0] == 0x6627e8d5u);
  CHECK(a[1] == 0xe169c58du);
  CHECK(a[2] == 0xbc57ac4cu);
  CHECK(a[3] == 0x9b00dbd8u);

  const Philox4x32 ones(Philox4x32::Key{0xffffffffu, 0xffffffffu});
  const auto b = ones({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
  CHECK(b[0] == 0x408f276du);
  CHECK(b[1] == 0x41c83b0eu);
  CHECK(b[2] == 0xa20bc7c6u);
  CHECK(b[3] == 0x6d5451fdu);

  const Philox4x32 pi(Philox4x32::Key{0xa4093822u, 0x299f31d0u});
  const auto c = pi({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
  CHECK(c[0] == 0xd16cfe09u);
  CHECK(c[1] == 0x94fdccebu);
  CHECK(c[2] == 0x5001e420u);
  CHECK(c[3] == 0x24126ea1u);
}

TEST_CASE("seed constructor splits into two key words") {
  const Philox4x32 a(0x299f31d0a4093822ull);
  const Philox4x32 b(Philox4x32::Key{0xa4093822u, 0x299f31d0u});
  const Philox4x32::Counter ctr{1, 2, 3, 4};
  CHECK(a(ctr) == b(ctr));
}

TEST_CASE("uniform draws stay in range and look uniform") {
  const Philox4x32 rng(42);
  const int n = 20000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = ToUniform(rng({static_cast<std::uint32_t>(i), 0, 0, 0})[0], -1.0, 3.0);
    REQUIRE(u >= -1.0);
    REQUIRE(u < 3.0);
    sum += u;
    sum_sq += u * u;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean - 1.0) < 0.05);
  CHECK(std::abs(var - 16.0 / 12.0) < 0.05);
  CHECK(ToUnit(0) == 0.0);
  CHECK(ToUnit(0xffffffffu) < 1.0);
}
