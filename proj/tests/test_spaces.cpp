#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "mlab/error.hpp"
#include "mlab/harness.hpp"
#include "mlab/spaces.hpp"

using namespace mlab;

namespace {

GridFunction random_function(const Grid& g, std::mt19937_64& rng, bool ties) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_int_distribution<int> k(-2, 2);
  GridFunction f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = ties ? double(k(rng)) : u(rng);
  return f;
}

// Enumerates every nonempty union of cells.
double brute_kolmogorov(const GridFunction& f, double l, double r) {
  const std::size_t n = f.size();
  const double vol = f.grid().cell_volume();
  double best = 0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double s = 0;
    int cnt = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) {
        s += std::pow(std::abs(f[i]), r);
        ++cnt;
      }
    best = std::max(best, std::pow(s * vol, 1 / r) / std::pow(cnt * vol, 1 / r - 1 / l));
  }
  return best;
}

// sup over a fine grid of levels t, including values just below each sample.
double brute_weak(const GridFunction& f, double l) {
  const double vol = f.grid().cell_volume();
  double best = 0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double t = std::abs(f[j]) * (1 - 1e-15);
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < f.size(); ++i) cnt += std::abs(f[i]) > t;
    best = std::max(best, t * std::pow(cnt * vol, 1 / l));
  }
  return best;
}

}  // namespace

TEST_CASE("weak norm and Kolmogorov functional match exhaustive oracles") {
  std::mt19937_64 rng(7);
  for (int dim : {1, 2}) {
    const Grid g(dim, 1.0, dim == 1 ? 12 : 4);
    for (int trial = 0; trial < 20; ++trial) {
      const GridFunction f = random_function(g, rng, trial % 3 == 0);
      for (double l : {1.5, 2.0, 4.0}) {
        CHECK(weak_norm(f, l) == doctest::Approx(brute_weak(f, l)).epsilon(1e-12));
        for (double r : {0.5, 1.0}) {
          const double N = kolmogorov_functional(f, l, r);
          CHECK(N == doctest::Approx(brute_kolmogorov(f, l, r)).epsilon(1e-12));
          // weak <= N <= (l / (l - r))^{1/r} weak
          CHECK(weak_norm(f, l) <= N * (1 + 1e-12));
          CHECK(N <= std::pow(l / (l - r), 1 / r) * weak_norm(f, l) * (1 + 1e-12));
        }
      }
    }
  }
}

TEST_CASE("Kolmogorov functional restricted to balls is not a lower bound for the weak norm") {
  const Grid g(1, 8.0, 64);
  GridFunction f(g);
  f[3] = 1.0;
  f[60] = 1.0;
  BallPolicy pol;
  pol.include_single_cell = false;
  const BallFamily F = build_ball_family(g, pol);
  const double balls = kolmogorov_functional(f, 2.0, 1.0, F).value;
  CHECK(balls <= kolmogorov_functional(f, 2.0, 1.0) * (1 + 1e-12));
  CHECK(balls < weak_norm(f, 2.0));
  CHECK(weak_norm(f, 2.0) <= kolmogorov_functional(f, 2.0, 1.0) * (1 + 1e-12));
}

TEST_CASE("Morrey norm with kappa = 0 and the domain ball is the Lebesgue norm") {
  for (int dim : {1, 2}) {
    const Grid g(dim, 4.0, dim == 1 ? 256 : 32);
    BallPolicy pol;
    pol.include_domain_ball = true;
    const BallFamily F = build_ball_family(g, pol);
    const Weight w = WeightSpec::power(-0.5).sample(g);
    const GridFunction f = make_function("osc", g);
    for (double p : {1.0, 2.0, 3.5}) {
      const NormReport m = morrey_norm(f, MorreyParams(p, 0.0, w), F);
      CHECK(m.value == doctest::Approx(weighted_lebesgue_norm(f, p, w)).epsilon(1e-12));
    }
    CHECK(lebesgue_norm(f, 2.0) == doctest::Approx(weighted_lebesgue_norm(f, 2.0, Weight::unit(g))).epsilon(1e-14));
  }
}

TEST_CASE("Morrey norm matches a per-ball oracle") {
  const Grid g(1, 4.0, 64);
  const BallFamily F = build_ball_family(g, BallPolicy{});
  const Weight u = WeightSpec::power(-0.25).sample(g);
  const Weight v = WeightSpec::power(0.5).sample(g);
  const GridFunction f = make_function("gauss:0.5", g);
  const double p = 2.0, kappa = 0.3;
  double best = 0;
  for (const Ball& b : F.balls()) {
    double num = 0, vb = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (std::abs(g.coordinate(int(i)) - b.center[0]) <= b.radius * (1 + 1e-12)) {
        num += f[i] * f[i] * u[i] * g.spacing();
        vb += v[i] * g.spacing();
      }
    best = std::max(best, std::sqrt(num / std::pow(vb, kappa)));
  }
  const NormReport m = morrey_norm(f, MorreyParams(p, kappa, u, v), F);
  CHECK(m.value == doctest::Approx(best).epsilon(1e-12));
  REQUIRE(m.witness.has_value());
  // Positive homogeneity.
  CHECK(morrey_norm(f.scaled(-3.0), MorreyParams(p, kappa, u, v), F).value == doctest::Approx(3 * best).epsilon(1e-12));
}

TEST_CASE("BMO norms") {
  const Grid g(1, 4.0, 128);
  const BallFamily F = build_ball_family(g, BallPolicy{});
  const Weight w = WeightSpec::power(-0.5).sample(g);
  const GridFunction b = make_function("log", g);
  CHECK(bmo_norm(GridFunction::constant(g, 5.0), nullptr, F).value == doctest::Approx(0.0));
  const double n0 = bmo_norm(b, &w, F).value;
  CHECK(n0 > 0);
  CHECK(bmo_norm(b + GridFunction::constant(g, 2.0), &w, F).value == doctest::Approx(n0).epsilon(1e-12));
  const auto [r1, r2] = bmo_equivalence_ratio(b, w, F);
  CHECK(r1 * r2 == doctest::Approx(1.0).epsilon(1e-12));
  const Ball B = make_ball(g, {0.0, 0.0}, 1.0);
  CHECK(weighted_mean(GridFunction::constant(g, 2.0), w, B) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(mean(b, B) < 0);
}

TEST_CASE("parameter errors") {
  const Grid g(1, 1.0, 8);
  const GridFunction f = GridFunction::constant(g, 1.0);
  CHECK_THROWS_AS(weak_norm(f, 0.0), ParameterError);
  CHECK_THROWS_AS(kolmogorov_functional(f, 1.0, 2.0), ParameterError);
}
