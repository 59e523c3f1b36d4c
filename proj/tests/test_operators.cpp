#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mlab/error.hpp"
#include "mlab/harness.hpp"
#include "mlab/operators.hpp"
#include "mlab/special.hpp"

using namespace mlab;

namespace {
double rel_l2(const GridFunction& a, const GridFunction& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}
std::size_t nearest(const Grid& g, double x) { return g.flat_index(g.nearest_index(x)); }
}  // namespace

TEST_CASE("heat semigroup evolves Gaussians and conserves mass") {
  const Grid g(1, 8.0, 512);
  const double s = 0.5, t = 0.3;
  const GridFunction f = make_function("gauss:0.5", g);
  const GridFunction u = semigroup_apply(SemigroupSpec::heat(1), f, t);
  const double v = s * s + 2 * t;
  const GridFunction exact =
      GridFunction::from(g, [&](const Point& x) { return std::sqrt(s * s / v) * std::exp(-x[0] * x[0] / (2 * v)); });
  CHECK(rel_l2(u, exact) < 1e-4);
  CHECK(integrate(u) == doctest::Approx(integrate(f)).epsilon(1e-9));
  // The generic profile path agrees with the separable heat path.
  const GridFunction w = semigroup_apply(SemigroupSpec::gaussian_profile(1, 4.0), f, t);
  CHECK(rel_l2(w, u) < 1e-10);
}

TEST_CASE("semigroup kernel weights sum to one over the lattice") {
  for (int dim : {1, 2}) {
    const Grid g(dim, 4.0, 64);
    // Reach stays inside the grid for these times; longer times leak mass past the edge.
    for (double t : {1e-4, 0.01, 0.1}) {
      const SemigroupKernel k(SemigroupSpec::heat(dim), g, t);
      double s = 0;
      for (int i = -k.reach(); i <= k.reach(); ++i) {
        if (dim == 1) {
          s += k.weight(i);
        } else {
          for (int j = -k.reach(); j <= k.reach(); ++j) s += k.weight(i, j);
        }
      }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("profile and Gaussian bound audits") {
  for (int dim : {1, 2}) {
    for (const auto& spec : {SemigroupSpec::heat(dim), SemigroupSpec::gaussian_profile(dim, 2.0)}) {
      const ProfileAudit a = audit_profile(spec);
      CHECK(a.ok());
      CHECK(a.mass == doctest::Approx(1.0).epsilon(1e-10));
      const std::vector<double> ts{1e-3, 0.1, 1, 10}, rhos{0, 0.5, 1, 4};
      const Grid g(dim, 4.0, 32);
      const GaussianBoundAudit b = audit_gaussian_bound(spec, ts, rhos, &g);
      CHECK(b.violations == 0);
      CHECK(b.samples > 0);
    }
  }
}

TEST_CASE("Riesz potential of an indicator") {
  const Grid g(1, 4.0, 1024);
  const GridFunction u = riesz_potential(make_function("chi:1", g), 0.5);
  // (2 pi)^{-1/2} * integral_{-1}^{1} |y|^{-1/2} dy = 4 / sqrt(2 pi)
  CHECK(u[nearest(g, 0.0)] == doctest::Approx(1.59577).epsilon(0.01));
  CHECK(u[nearest(g, 0.0)] > u[nearest(g, 2.0)]);
}

TEST_CASE("fractional operators are linear and positivity preserving") {
  const Grid g(1, 4.0, 256);
  const GridFunction f = make_function("gauss:0.5", g);
  const GridFunction h = make_function("chi:1", g);
  const GridFunction lhs = riesz_potential(f.scaled(2.0) + h, 0.5);
  const GridFunction rhs = riesz_potential(f, 0.5).scaled(2.0) + riesz_potential(h, 0.5);
  CHECK(rel_l2(lhs, rhs) < 1e-13);
  const GridFunction gf = generalized_fractional(SemigroupSpec::heat(1), f, 0.5);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(gf[i] >= 0.0);
  // Heat generates the Riesz potential.
  CHECK(rel_l2(gf, riesz_potential(f, 0.5)) < 1e-3);
}

TEST_CASE("generalized operator is dominated by the Riesz potential of |f|") {
  const Grid g(1, 4.0, 256);
  const GridFunction f = make_function("osc", g);
  const SemigroupSpec spec = SemigroupSpec::gaussian_profile(1, 2.0);
  FractionalReport rep;
  const GridFunction gf = generalized_fractional(spec, f, 0.5, TimeQuadrature{}, &rep, true);
  const FractionalKernel k = semigroup_fractional_kernel(spec, 0.5);
  const GridFunction dom = fractional_apply(k, f.abs());
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(gf[i]) <= dom[i] + 1e-8);
  // The time integral and the closed-form kernel describe the same operator.
  CHECK(rel_l2(gf, fractional_apply(k, f)) < 1e-3);
  REQUIRE(rep.node_doubling_delta.has_value());
  CHECK(*rep.node_doubling_delta < 1e-3);
  CHECK(rep.nodes > 0);
}

TEST_CASE("fractional kernel self-cell uses the lattice zeta correction") {
  const FractionalKernel k = riesz_kernel(1, 0.5);
  const double h = 0.01;
  CHECK(k.self_weight(h) == doctest::Approx(-k.constant * std::pow(h, 0.5) * lattice_zeta(1, 0.5)).epsilon(1e-14));
  CHECK(k.weight(h, 3) == doctest::Approx(k.constant * std::pow(3 * h, -0.5) * h).epsilon(1e-14));
}

TEST_CASE("difference kernel matches high-precision values") {
  struct Row {
    double alpha, t, rho, value;
  };
  const SemigroupSpec heat = SemigroupSpec::heat(1);
  for (const Row& r : {Row{0.5, 1, 1, -0.11294341022786029}, Row{0.5, 0.01, 1, -0.0031353558024412471},
                       Row{0.25, 0.1, 0.5, -0.32377761680358821}, Row{0.25, 4, 2, -0.097966473210091685},
                       Row{0.5, 0.25, 2, -0.023125914912186266}, Row{0.5, 1e-12, 1, -2.9920671030238353e-13}}) {
    const DifferenceKernelValue v = difference_kernel(heat, r.alpha, r.t, r.rho);
    CHECK(v.value == doctest::Approx(r.value).epsilon(1e-8));
    CHECK(v.relative_delta < 1e-6);
  }
  CHECK(difference_kernel(SemigroupSpec::heat(2), 0.5, 0.5, 1.0).value ==
        doctest::Approx(-0.038043871583293331).epsilon(1e-8));
}

TEST_CASE("difference kernel scaling and decay") {
  const SemigroupSpec heat = SemigroupSpec::heat(1);
  const double alpha = 0.5, lambda = 3.0;
  const double a = difference_kernel(heat, alpha, 0.04, 1.0).value;
  const double b = difference_kernel(heat, alpha, 0.04 * lambda * lambda, lambda).value;
  CHECK(b == doctest::Approx(std::pow(lambda, alpha - 1) * a).epsilon(1e-8));
  const double t = 0.01;
  double prev = INFINITY;
  for (double rho = std::sqrt(t / 0.1); rho < 8; rho *= 1.3) {
    const double v = std::abs(difference_kernel(heat, alpha, t, rho).value);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("commutator with constant symbols vanishes") {
  const Grid g(1, 4.0, 128);
  const CommutatorSpec spec{0.5, {GridFunction::constant(g, 3.0), make_function("log", g)}};
  CHECK(multilinear_commutator(spec, make_function("gauss:0.5", g)).max_abs() == 0.0);
}

TEST_CASE("commutator matches a direct sum") {
  const Grid g(1, 4.0, 128);
  const GridFunction f = make_function("gauss:0.5", g);
  const GridFunction b = make_function("sin", g);
  const GridFunction u = multilinear_commutator(CommutatorSpec{0.5, {b}}, f);
  const FractionalKernel k = riesz_kernel(1, 0.5);
  const std::size_t x = nearest(g, 2.0);
  double s = 0;
  for (std::size_t y = 0; y < g.size(); ++y)
    if (y != x) s += k.weight(g.spacing(), int(x) - int(y)) * (b[x] - b[y]) * f[y];
  CHECK(u[x] == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("commutator is symmetric in its symbols and matches the subset expansion") {
  const Grid g(1, 4.0, 128);
  const GridFunction f = make_function("osc", g);
  const GridFunction b1 = make_function("log", g), b2 = make_function("xsmooth", g);
  const GridFunction u = multilinear_commutator(CommutatorSpec{0.5, {b1, b2}}, f);
  CHECK(rel_l2(multilinear_commutator(CommutatorSpec{0.5, {b2, b1}}, f), u) < 1e-13);
  const GridFunction e = sigma_expansion(CommutatorSpec{0.5, {b1, b2}}, {0.7, -1.3}, f);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(e[i] == doctest::Approx(u[i]).epsilon(1e-9).scale(1.0));
  const SemigroupSpec spec = SemigroupSpec::gaussian_profile(1, 2.0);
  const GridFunction v = multilinear_commutator(CommutatorSpec{0.5, {b1}}, f, KernelMode{&spec});
  const GridFunction ve = sigma_expansion(CommutatorSpec{0.5, {b1}}, {0.2}, f, KernelMode{&spec});
  CHECK(rel_l2(ve, v) < 1e-9);
}

TEST_CASE("maximal functions") {
  const Grid g(1, 8.0, 1024);
  const BallFamily F = build_ball_family(g, BallPolicy{});
  const GridFunction c = GridFunction::constant(g, 2.5);
  CHECK(rel_l2(maximal_function(c, MaximalKind::M, {}, F), c) < 1e-15);
  const GridFunction chi = make_function("chi:1", g);
  const GridFunction m = maximal_function(chi, MaximalKind::M, {}, F);
  // Uncentered: the interval [-1, 3] gives 1/2 at x = 3.
  CHECK(m[nearest(g, 3.0)] == doctest::Approx(0.5).epsilon(0.05));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(m[i] >= chi[i]);
  const GridFunction big = maximal_function(chi.scaled(2.0) + make_function("gauss:1", g), MaximalKind::M, {}, F);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(big[i] >= m[i]);
  const Weight w = WeightSpec::power(-0.5).sample(g);
  const GridFunction mw = maximal_function(c, MaximalKind::Mw, {0, 1, &w}, F);
  CHECK(rel_l2(mw, c) < 1e-14);
  CHECK_THROWS_AS(maximal_function(c, MaximalKind::Mw, {}, F), ParameterError);
  const GridFunction ma = maximal_function(chi, MaximalKind::MAlphaR, {0.0, 2.0, nullptr}, F);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(ma[i] >= m[i] * (1 - 1e-12));
}

TEST_CASE("sharp maximal function matches a per-ball oracle") {
  const Grid g(1, 4.0, 64);
  const BallFamily F = build_ball_family(g, BallPolicy{});
  const SemigroupSpec heat = SemigroupSpec::heat(1);
  const GridFunction f = make_function("osc", g);
  const GridFunction s = sharp_maximal(heat, f, F);
  GridFunction oracle(g);
  for (const Ball& b : F.balls()) {
    const GridFunction p = semigroup_apply(heat, f, b.t());
    double sum = 0;
    int cnt = 0;
    std::vector<std::size_t> in;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (std::abs(g.coordinate(int(i)) - b.center[0]) <= b.radius * (1 + 1e-12)) {
        sum += std::abs(f[i] - p[i]);
        ++cnt;
        in.push_back(i);
      }
    for (std::size_t i : in) oracle[i] = std::max(oracle[i], sum / cnt);
  }
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(s[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
}
