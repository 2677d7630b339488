#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "reserves/rng.hpp"

using namespace reserves;

TEST_CASE("philox known-answer vectors") {
  // Published test vectors for Philox4x32-10.
  auto z = rng::Philox4x32::encrypt({0, 0, 0, 0}, {0, 0});
  CHECK(z[0] == 0x6627e8d5u);
  CHECK(z[1] == 0xe169c58du);
  CHECK(z[2] == 0xbc57ac4cu);
  CHECK(z[3] == 0x9b00dbd8u);

  auto f = rng::Philox4x32::encrypt(
      {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
      {0xffffffffu, 0xffffffffu});
  CHECK(f[0] == 0x408f276du);
  CHECK(f[1] == 0x41c83b0eu);
  CHECK(f[2] == 0xa20bc7c6u);
  CHECK(f[3] == 0x6d5451fdu);

  auto p = rng::Philox4x32::encrypt(
      {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
      {0xa4093822u, 0x299f31d0u});
  CHECK(p[0] == 0xd16cfe09u);
  CHECK(p[1] == 0x94fdccebu);
  CHECK(p[2] == 0x5001e420u);
  CHECK(p[3] == 0x24126ea1u);
}

TEST_CASE("streams with distinct keys are distinct, same keys identical") {
  rng::Stream a(7, 1, 2, rng::StreamTag::kTransition);
  rng::Stream b(7, 1, 2, rng::StreamTag::kTransition);
  rng::Stream c(7, 1, 3, rng::StreamTag::kTransition);
  bool all_equal = true, any_equal_c = false;
  for (int i = 0; i < 64; ++i) {
    auto va = a();
    all_equal = all_equal && va == b();
    any_equal_c = any_equal_c || va == c();
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_c);
}

TEST_CASE("uniform stays inside the open unit interval") {
  rng::Stream rs(123, 0, 0, rng::StreamTag::kTest);
  for (int i = 0; i < 100000; ++i) {
    double u = rs.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("normal moments") {
  rng::Stream rs(9, 0, 0, rng::StreamTag::kTest);
  const int n = 200000;
  double sum = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rs.normal();
    sum += x;
    ss += x * x;
  }
  double mean = sum / n;
  double var = ss / n - mean * mean;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(double(n)));
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("gamma moments across the shape boundary") {
  // Mean a, variance a for unit scale; exercises both the squeeze and the
  // boost-and-power branch.
  for (double shape : {0.3, 0.9, 1.0, 2.5, 40.0, 966.0}) {
    rng::Stream rs(11, 0, std::uint32_t(shape * 10), rng::StreamTag::kTest);
    const int n = 100000;
    double sum = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
      double x = rs.gamma(shape);
      REQUIRE(x > 0.0);
      sum += x;
      ss += x * x;
    }
    double mean = sum / n;
    double var = ss / n - mean * mean;
    double mean_se = std::sqrt(shape / n);
    CHECK(std::abs(mean - shape) < 4.0 * mean_se);
    CHECK(std::abs(var - shape) / shape < 0.05);
  }
}

TEST_CASE("laplace median absolute deviation") {
  rng::Stream rs(13, 0, 0, rng::StreamTag::kTest);
  const int n = 100001;
  std::vector<double> abs_draws(n);
  for (int i = 0; i < n; ++i) abs_draws[i] = std::abs(rs.laplace(2.0));
  std::nth_element(abs_draws.begin(), abs_draws.begin() + n / 2, abs_draws.end());
  // median |X| = scale * ln 2
  CHECK(abs_draws[n / 2] == doctest::Approx(2.0 * std::log(2.0)).epsilon(0.02));
}

TEST_CASE("dirichlet draws live on the simplex") {
  rng::Stream rs(17, 0, 0, rng::StreamTag::kTest);
  std::vector<double> shape = {966.0 * 0.68, 966.0 * 0.26, 966.0 * 0.02,
                               966.0 * 0.02, 966.0 * 0.01, 966.0 * 0.01};
  std::vector<double> out(shape.size());
  for (int i = 0; i < 10000; ++i) {
    rng::dirichlet(rs, shape, out);
    double total = 0.0;
    for (double v : out) {
      REQUIRE(v >= 0.0);
      total += v;
    }
    REQUIRE(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}
