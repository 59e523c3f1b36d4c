#include <cmath>
#include <vector>

#include "doctest.h"
#include "mlab/error.hpp"
#include "mlab/weights.hpp"

using namespace mlab;

namespace {
BallPolicy origin_only() {
  BallPolicy p;
  p.origin_only = true;
  return p;
}
const std::vector<int> kLadder{256, 512};
}  // namespace

TEST_CASE("weight specs parse and print canonically") {
  const WeightSpec w = WeightSpec::parse("power:-0.5");
  CHECK(w.kind() == WeightSpec::Kind::Power);
  CHECK(w.parameter() == -0.5);
  CHECK(WeightSpec::parse(w.id()).id() == w.id());
  CHECK(WeightSpec::parse("const:2").kind() == WeightSpec::Kind::Constant);
  CHECK(WeightSpec::parse("loggrid").refinable());
  CHECK_FALSE(WeightSpec::parse("csv:/nonexistent.csv").refinable());
  CHECK_THROWS_AS(WeightSpec::parse("bogus:1"), ConfigError);
  const Grid g(1, 1.0, 8);
  const Weight a = w.pow(2.0).sample(g);
  const Weight b = WeightSpec::power(-1.0).sample(g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_CASE("weights are strictly positive") {
  const Grid g(1, 1.0, 8);
  CHECK_THROWS(Weight(GridFunction::constant(g, 0.0)));
  const Weight w = WeightSpec::power(1.0).sample(g);
  CHECK(w.floor() == doctest::Approx(0.5 * g.spacing()));
}

TEST_CASE("A_2 of |x|^{-1/2} on origin balls approaches 4/3") {
  const Grid g(1, 8.0, 1024);
  const BallFamily F = build_ball_family(g, origin_only());
  const auto c = ap_characteristic(WeightSpec::power(-0.5).sample(g), 2.0, F);
  CHECK(c.value == doctest::Approx(4.0 / 3).epsilon(0.02));
  CHECK(c.value >= 1.0);
}

TEST_CASE("A_p characteristics are at least one and scale invariant") {
  const Grid g(1, 8.0, 256);
  const BallFamily F = build_ball_family(g, BallPolicy{});
  const Weight w = WeightSpec::power(0.3).sample(g);
  for (double p : {1.5, 2.0, 3.0}) {
    const double a = ap_characteristic(w, p, F).value;
    CHECK(a >= 1.0 - 1e-12);
    CHECK(ap_characteristic(w.scaled(7.0), p, F).value == doctest::Approx(a).epsilon(1e-12));
  }
  CHECK(ap_characteristic(Weight::unit(g), 2.0, F).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a1_characteristic(Weight::unit(g), F).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(reverse_holder_constant(Weight::unit(g), 2.0, F).value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("membership classification of power weights") {
  const Domain d{1, 8.0};
  CHECK(classify_ap(WeightSpec::power(-0.5), 2.0, d, origin_only(), kLadder).member);
  CHECK_FALSE(classify_ap(WeightSpec::power(-1.0), 2.0, d, origin_only(), kLadder).member);
  CHECK_FALSE(classify_ap(WeightSpec::power(2.0), 2.0, d, origin_only(), kLadder).member);
  CHECK(classify_ap(WeightSpec::power(-0.25), 1.0, d, origin_only(), kLadder).member);
  CHECK_FALSE(classify_ap(WeightSpec::power(1.0), 1.0, d, origin_only(), kLadder).member);
  CHECK(classify_rh(WeightSpec::power(-0.5), 1.5, d, origin_only(), kLadder).member);
  CHECK_FALSE(classify_rh(WeightSpec::power(-0.5), 3.0, d, origin_only(), kLadder).member);
}

TEST_CASE("critical reverse Holder index of power weights") {
  const Domain d{1, 8.0};
  // |x|^b with b < 0 is in RH_r exactly for r < 1/|b|.
  const CriticalIndex a = critical_index_estimate(WeightSpec::power(-0.5), d, origin_only(), kLadder, 0.05);
  CHECK_FALSE(a.capped);
  CHECK(a.value == doctest::Approx(2.0).epsilon(0.05));
  const CriticalIndex b = critical_index_estimate(WeightSpec::power(-0.75), d, origin_only(), kLadder, 0.05);
  CHECK(b.value == doctest::Approx(4.0 / 3).epsilon(0.075));
  const CriticalIndex c = critical_index_estimate(WeightSpec::constant(1.0), d, origin_only(), kLadder, 0.05);
  CHECK(c.capped);
}

TEST_CASE("factorization rows agree for sample exponents") {
  const std::vector<double> betas{-0.5, 0.5}, ss{1.5}, ps{2.0};
  for (const auto& row : check_ap_factorization(betas, ss, ps, Domain{1, 8.0}, origin_only(), kLadder))
    CHECK(row.agree());
}

TEST_CASE("A_p characteristic is non-increasing in p and RH_r constant non-decreasing in r") {
  const Grid g(1, 8.0, 256);
  const BallFamily F = build_ball_family(g, BallPolicy{});
  for (double beta : {-0.6, -0.25, 0.4, 1.5}) {
    const Weight w = WeightSpec::power(beta).sample(g);
    double prev = INFINITY;
    for (double p : {1.1, 1.5, 2.0, 3.0, 6.0}) {
      const double a = ap_characteristic(w, p, F).value;
      CHECK(a <= prev * (1 + 1e-12));
      prev = a;
    }
    CHECK(a1_characteristic(w, F).value >= ap_characteristic(w, 1.1, F).value * (1 - 1e-12));
    prev = 0;
    for (double r : {1.1, 1.5, 2.0, 3.0}) {
      const double c = reverse_holder_constant(w, r, F).value;
      CHECK(c >= prev * (1 - 1e-12));
      prev = c;
    }
  }
}
