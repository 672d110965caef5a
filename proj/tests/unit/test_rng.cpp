#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "ubm/rng.hpp"

using ubm::derive_stream;
using ubm::philox4x32;

TEST_CASE("philox4x32 matches the Random123 known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("same (seed, stream) reproduces the sequence") {
  auto a = derive_stream(42, 0);
  auto b = derive_stream(42, 0);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("distinct streams and seeds differ") {
  auto a = derive_stream(42, 0);
  auto b = derive_stream(42, 1);
  auto c = derive_stream(43, 0);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    same_ab += x == b.normal();
    same_ac += x == c.normal();
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
}

TEST_CASE("paired draws from neighbouring streams are uncorrelated") {
  auto a = derive_stream(7, 0);
  auto b = derive_stream(7, 1);
  const int n = 10000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.normal(), y = b.normal();
    sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
  }
  const double cov = sxy / n - sx / n * sy / n;
  const double r = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  CHECK(std::abs(r) < 0.05);
}

TEST_CASE("uniform draws lie in (0, 1] and normals have unit variance") {
  auto s = derive_stream(3, 9);
  double sum = 0, sq = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u <= 1.0);
  }
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  // Var of z^2 is 2, so the sample second moment has SE sqrt(2/n).
  CHECK(std::abs(sq / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("draw i depends only on the stream position") {
  auto s = derive_stream(11, 5);
  std::vector<double> first;
  for (int i = 0; i < 10; ++i) first.push_back(s.uniform());
  CHECK(s.blocks_used() == 10);
  auto t = derive_stream(11, 5);
  for (int i = 0; i < 10; ++i) CHECK(t.uniform() == first[i]);
}
