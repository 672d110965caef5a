#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "ubm/errors.hpp"
#include "ubm/lie_sampler.hpp"

using namespace ubm;

namespace {

struct MeanSe {
  double mean, se;
};

MeanSe stats(const std::vector<double>& v) {
  double s = 0, ss = 0;
  for (double x : v) s += x;
  const double m = s / v.size();
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (v.size() - 1) / v.size())};
}

}  // namespace

TEST_CASE("gaussian_u output is skew-Hermitian bit for bit") {
  auto rng = derive_stream(1, 0);
  for (int n : {1, 2, 5, 16}) {
    const auto x = gaussian_u(n, rng);
    const ComplexMatrix sum = x.matrix() + x.matrix().adjoint();
    CHECK(sum.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("squared norm averages to dim u(n) = n^2") {
  auto rng = derive_stream(2, 0);
  std::vector<double> v;
  for (int i = 0; i < 10000; ++i) v.push_back(scaled_norm_sq(gaussian_u(8, rng)));
  const auto [m, se] = stats(v);
  CHECK(std::abs(m - 64.0) <= 3.0 * se);
}

TEST_CASE("coefficient along the central unit vector is standard normal") {
  const ComplexMatrix xi0 = central_unit(8);
  CHECK(scaled_inner(xi0, xi0) == doctest::Approx(1.0).epsilon(1e-15));
  auto rng = derive_stream(3, 0);
  std::vector<double> c, c2;
  for (int i = 0; i < 10000; ++i) {
    const double a = scaled_inner(gaussian_u(8, rng).matrix(), xi0);
    c.push_back(a);
    c2.push_back(a * a);
  }
  CHECK(std::abs(stats(c).mean) <= 3.0 * stats(c).se);
  const auto [var, se] = stats(c2);
  CHECK(std::abs(var - 1.0) <= 3.0 * se);
}

TEST_CASE("coefficient along an off-diagonal unit vector is standard normal") {
  // xi = (E_12 - E_21) / sqrt(2 n) has <xi, xi>_N = 1.
  const int n = 6;
  ComplexMatrix xi = ComplexMatrix::Zero(n, n);
  xi(0, 1) = 1.0 / std::sqrt(2.0 * n);
  xi(1, 0) = -xi(0, 1);
  CHECK(scaled_inner(xi, xi) == doctest::Approx(1.0));
  auto rng = derive_stream(4, 0);
  std::vector<double> c2;
  for (int i = 0; i < 10000; ++i) {
    const double a = scaled_inner(gaussian_u(n, rng).matrix(), xi);
    c2.push_back(a * a);
  }
  const auto [var, se] = stats(c2);
  CHECK(std::abs(var - 1.0) <= 3.0 * se);
}

TEST_CASE("gaussian_su is traceless, orthogonal to the centre, with mean norm n^2 - 1") {
  auto rng = derive_stream(5, 0);
  const ComplexMatrix xi0 = central_unit(8);
  std::vector<double> v;
  for (int i = 0; i < 10000; ++i) {
    const auto x = gaussian_su(8, rng);
    REQUIRE(std::abs(x.matrix().trace()) < 1e-13);
    REQUIRE(std::abs(scaled_inner(x.matrix(), xi0)) < 1e-13);
    REQUIRE((x.matrix() + x.matrix().adjoint()).cwiseAbs().maxCoeff() == 0.0);
    v.push_back(scaled_norm_sq(x));
  }
  const auto [m, se] = stats(v);
  CHECK(std::abs(m - 63.0) <= 3.0 * se);
}

TEST_CASE("norm means for every n up to 32") {
  for (int n : {1, 3, 4, 12, 32}) {
    auto rng = derive_stream(6, static_cast<std::uint64_t>(n));
    std::vector<double> u, su;
    const int draws = n >= 12 ? 2000 : 10000;
    for (int i = 0; i < draws; ++i) {
      u.push_back(scaled_norm_sq(gaussian_u(n, rng)));
      su.push_back(scaled_norm_sq(gaussian_su(n, rng)));
    }
    CAPTURE(n);
    CHECK(std::abs(stats(u).mean - n * n) <= 3.0 * stats(u).se + 1e-12);
    CHECK(std::abs(stats(su).mean - (n * n - 1)) <= 3.0 * stats(su).se + 1e-12);
  }
}

TEST_CASE("samplers consume n^2 normals and reject n < 1") {
  auto a = derive_stream(8, 0);
  auto b = derive_stream(8, 0);
  (void)gaussian_u(5, a);
  (void)gaussian_su(5, b);
  CHECK(a.normal() == b.normal());
  CHECK_THROWS_AS(gaussian_u(0, a), Error);
  CHECK_THROWS_AS(gaussian_su(-1, a), Error);
  try {
    (void)gaussian_u(0, a);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_dimension);
  }
}

TEST_CASE("SkewMatrix::from_matrix validates") {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = {1.0, 2.0};
  m(1, 0) = {-1.0, 2.0};
  m(0, 0) = {0.0, 0.5};
  CHECK(SkewMatrix::from_matrix(m).dim() == 2);
  m(1, 0) = {1.0, 2.0};
  CHECK_THROWS_AS(SkewMatrix::from_matrix(m), Error);
}
