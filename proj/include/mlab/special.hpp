#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace mlab {

/// Hurwitz zeta sum_{k>=0} (k+a)^{-s} for real s != 1, a > 0 (analytic continuation via Euler-Maclaurin).
double hurwitz_zeta(double s, double a);
double riemann_zeta(double s);
/// Dirichlet beta sum_{k>=0} (-1)^k (2k+1)^{-s}.
double dirichlet_beta(double s);
/// Lattice sum over Z^dim \ {0} of |v|^{-s}, analytically continued (dim 1: 2 zeta(s); dim 2: 4 zeta(s/2) beta(s/2)).
double lattice_zeta(int dim, double s);

/// Constant of the classical Riesz potential: Gamma((n-a)/2) / (pi^{n/2} 2^a Gamma(a/2)).
double riesz_constant(int dim, double alpha);

/// Gauss-Legendre nodes and weights on [0, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int n);

/// Double-exponential quadrature of F over [a, b] with `nodes` sample points.
double tanh_sinh(const std::function<double(double)>& F, double a, double b, int nodes);
/// Double-exponential quadrature of F over [0, inf); `scale` sets where the transform is centered.
double exp_sinh(const std::function<double(double)>& F, double scale, int nodes);

}  // namespace mlab
