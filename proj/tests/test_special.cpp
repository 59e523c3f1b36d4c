#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mlab/special.hpp"

using namespace mlab;

// Reference values computed independently with mpmath at 30 digits.

TEST_CASE("riemann zeta, including the continuation below 1") {
  CHECK(riemann_zeta(2.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6).epsilon(1e-14));
  CHECK(riemann_zeta(0.5) == doctest::Approx(-1.46035450880958681).epsilon(1e-13));
  CHECK(riemann_zeta(0.75) == doctest::Approx(-3.44128538694522289).epsilon(1e-13));
  CHECK(riemann_zeta(0.0) == doctest::Approx(-0.5).epsilon(1e-13));
}

TEST_CASE("hurwitz zeta") {
  CHECK(hurwitz_zeta(0.75, 0.25) == doctest::Approx(-0.937591964187152487).epsilon(1e-12));
  CHECK(hurwitz_zeta(2.5, 0.3) == doctest::Approx(21.0692392022477249).epsilon(1e-13));
  // zeta(s, 1) is the Riemann zeta; zeta(s, a) - zeta(s, a + 1) = a^{-s}.
  CHECK(hurwitz_zeta(3.0, 1.0) == doctest::Approx(riemann_zeta(3.0)).epsilon(1e-14));
  for (double s : {0.3, 0.75, 2.5})
    CHECK(hurwitz_zeta(s, 0.4) - hurwitz_zeta(s, 1.4) == doctest::Approx(std::pow(0.4, -s)).epsilon(1e-12));
}

TEST_CASE("dirichlet beta") {
  CHECK(dirichlet_beta(3.0) == doctest::Approx(std::pow(std::numbers::pi, 3) / 32).epsilon(1e-13));
  CHECK(dirichlet_beta(2.0) == doctest::Approx(0.915965594177219015).epsilon(1e-13));
}

TEST_CASE("lattice zeta") {
  CHECK(lattice_zeta(1, 0.75) == doctest::Approx(2 * -3.44128538694522289).epsilon(1e-13));
  // Planar sums at s = 2 - alpha, the self-cell exponent n - alpha.
  CHECK(lattice_zeta(2, 2 - 0.25) == doctest::Approx(-22.5946564590670166).epsilon(1e-11));
  CHECK(lattice_zeta(2, 2 - 0.5) == doctest::Approx(-10.0775594787931521).epsilon(1e-11));
  CHECK(lattice_zeta(2, 2 - 1.0) == doctest::Approx(-3.90026492000195588).epsilon(1e-11));
  CHECK(lattice_zeta(2, 2 - 1.5) == doctest::Approx(-1.92168922117993012).epsilon(1e-11));
}

TEST_CASE("riesz constant") {
  CHECK(riesz_constant(1, 0.5) == doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi)).epsilon(1e-14));
  // dim 2, alpha 1: Gamma(1/2) / (pi 2 Gamma(1/2)) = 1 / (2 pi).
  CHECK(riesz_constant(2, 1.0) == doctest::Approx(0.5 / std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("quadrature rules") {
  const auto [x, w] = gauss_legendre01(12);
  double s = 0, m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += w[i];
    m += w[i] * std::pow(x[i], 11);
  }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m == doctest::Approx(1.0 / 12).epsilon(1e-13));
  CHECK(tanh_sinh([](double t) { return 1 / std::sqrt(t); }, 0.0, 1.0, 128) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(exp_sinh([](double t) { return std::exp(-t); }, 1.0, 128) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(exp_sinh([](double t) { return 1 / (1 + t * t); }, 1.0, 256) ==
        doctest::Approx(std::numbers::pi / 2).epsilon(1e-9));
}
