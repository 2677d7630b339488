#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reserves/equity_share.hpp"
#include "reserves/errors.hpp"
#include "reserves/rng.hpp"
#include "testutil.hpp"

using namespace reserves;

TEST_CASE("predicted component") {
  std::vector<double> one = {1.0};
  std::vector<double> r1 = {0.01};
  std::vector<double> de1 = {0.02};
  CHECK(predicted_component(one, r1, de1) ==
        doctest::Approx(0.0302).epsilon(1e-14));

  std::vector<double> beta = {0.5, 0.5};
  std::vector<double> r = {0.01, 0.02};
  std::vector<double> de = {0.0, -0.1};
  CHECK(predicted_component(beta, r, de) ==
        doctest::Approx(-0.036).epsilon(1e-14));

  std::vector<double> zero = {0.0, 0.0};
  CHECK(predicted_component(beta, zero, zero) == 0.0);
}

namespace {

struct Fixture {
  ObservationSeries obs;
  SharesSeries cofer;
  ReturnPanel returns;
  std::vector<double> p_eq, p_bd;
};

// A panel where the equity and bond predictions are distinct and wiggly.
Fixture make_fixture(std::size_t T, double true_x, double noise_scale,
                     std::uint64_t seed) {
  Fixture f;
  rng::Stream rs(seed, 0, 0, rng::StreamTag::kTest);
  Quarter start{2008, 2};
  f.returns.start = start;
  f.returns.n_ccy = 2;
  f.cofer.start = start.prev();
  f.cofer.n_ccy = 2;
  for (std::size_t t = 0; t <= T; ++t) {
    f.cofer.values.push_back(0.6);
    f.cofer.values.push_back(0.4);
  }
  f.obs.start = start;
  for (std::size_t t = 0; t < T; ++t) {
    f.returns.eq.push_back(0.02 + 0.08 * rs.normal());
    f.returns.eq.push_back(0.01 + 0.07 * rs.normal());
    f.returns.bond.push_back(0.005 + 0.01 * rs.normal());
    f.returns.bond.push_back(0.004 + 0.01 * rs.normal());
    f.returns.fx.push_back(0.0);
    f.returns.fx.push_back(0.04 * rs.normal());
    f.p_eq.push_back(predicted_component(f.cofer.row(t), f.returns.eq_row(t),
                                         f.returns.fx_row(t)));
    f.p_bd.push_back(predicted_component(f.cofer.row(t), f.returns.bond_row(t),
                                         f.returns.fx_row(t)));
    double eps = noise_scale > 0.0 ? noise_scale * rs.normal() : 0.0;
    f.obs.y.push_back(true_x * f.p_eq[t] + (1.0 - true_x) * f.p_bd[t] + eps);
    f.obs.sigma.push_back(0.002 + 0.001 * rs.uniform());
  }
  return f;
}

}  // namespace

TEST_CASE("pure bond and pure equity portfolios hit the bounds") {
  Fixture bond = make_fixture(30, 0.0, 0.0, 2);
  EquityShareSeries xb = estimate_equity_share(bond.obs, bond.cofer, bond.returns);
  for (double x : xb.x) CHECK(x == doctest::Approx(0.0).epsilon(1e-9));

  Fixture eq = make_fixture(30, 1.0, 0.0, 3);
  EquityShareSeries xe = estimate_equity_share(eq.obs, eq.cofer, eq.returns);
  for (double x : xe.x) CHECK(x == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("noiseless mixture recovers the true share") {
  Fixture f = make_fixture(40, 0.3, 0.0, 4);
  EquityShareSeries x = estimate_equity_share(f.obs, f.cofer, f.returns);
  for (std::size_t t = 0; t < x.size(); ++t) {
    CHECK(std::abs(x.x[t] - 0.3) <= 1e-8);
    CHECK(x.degenerate[t] == 0);
  }
}

TEST_CASE("bounds hold and sigma rescaling is irrelevant") {
  Fixture f = make_fixture(35, 0.4, 0.01, 5);
  EquityShareSeries base = estimate_equity_share(f.obs, f.cofer, f.returns);
  for (double x : base.x) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
  ObservationSeries scaled = f.obs;
  for (double& s : scaled.sigma) s *= 137.0;
  EquityShareSeries same = estimate_equity_share(scaled, f.cofer, f.returns);
  for (std::size_t t = 0; t < base.size(); ++t)
    CHECK(base.x[t] == doctest::Approx(same.x[t]).epsilon(1e-12));
}

TEST_CASE("identical equity and bond predictions are flagged degenerate") {
  Fixture f = make_fixture(20, 0.5, 0.0, 6);
  f.returns.eq = f.returns.bond;  // gap vanishes identically
  for (std::size_t t = 0; t < f.obs.size(); ++t)
    f.obs.y[t] = predicted_component(f.cofer.row(t), f.returns.bond_row(t),
                                     f.returns.fx_row(t));
  EquityShareSeries x = estimate_equity_share(f.obs, f.cofer, f.returns);
  for (std::size_t t = 0; t < x.size(); ++t) {
    CHECK(x.x[t] == 0.0);
    CHECK(x.degenerate[t] == 1);
  }
}

TEST_CASE("window truncation at the edges still estimates") {
  Fixture f = make_fixture(8, 0.25, 0.0, 7);  // shorter than the full window
  EquityShareSeries x = estimate_equity_share(f.obs, f.cofer, f.returns, 10);
  for (std::size_t t = 0; t < x.size(); ++t)
    CHECK(std::abs(x.x[t] - 0.25) <= 1e-8);
}

TEST_CASE("misaligned COFER is rejected") {
  Fixture f = make_fixture(10, 0.2, 0.0, 8);
  f.cofer.start = f.obs.start.next();  // no longer covers start-of-quarter
  CHECK_THROWS_AS(estimate_equity_share(f.obs, f.cofer, f.returns), DataError);
}
