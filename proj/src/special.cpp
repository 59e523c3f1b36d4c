#include "mlab/special.hpp"

#include <cmath>
#include <numbers>

#include "mlab/error.hpp"

namespace mlab {

double hurwitz_zeta(double s, double a) {
  if (s == 1.0) throw ParameterError("hurwitz_zeta has a pole at s = 1");
  if (!(a > 0)) throw ParameterError("hurwitz_zeta needs a > 0");
  // B_{2j} / (2j)!
  static constexpr double kB[] = {1.0 / 12.0,          -1.0 / 720.0,         1.0 / 30240.0,
                                  -1.0 / 1209600.0,    1.0 / 47900160.0,     -691.0 / 1307674368000.0,
                                  1.0 / 74724249600.0, -3617.0 / 10670622842880000.0};
  const int M = 20;
  double sum = 0.0;
  for (int k = 0; k < M; ++k) sum += std::pow(k + a, -s);
  const double x = M + a;
  sum += std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  double rising = s;  // s (s+1) ... (s+2j-2)
  double xp = std::pow(x, -s - 1.0);
  for (int j = 0; j < 8; ++j) {
    sum += kB[j] * rising * xp;
    rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
    xp /= x * x;
  }
  return sum;
}

double riemann_zeta(double s) { return hurwitz_zeta(s, 1.0); }

double dirichlet_beta(double s) {
  return std::pow(4.0, -s) * (hurwitz_zeta(s, 0.25) - hurwitz_zeta(s, 0.75));
}

double lattice_zeta(int dim, double s) {
  if (dim == 1) return 2.0 * riemann_zeta(s);
  return 4.0 * riemann_zeta(0.5 * s) * dirichlet_beta(0.5 * s);
}

double riesz_constant(int dim, double alpha) {
  const double n = dim;
  return std::tgamma(0.5 * (n - alpha)) /
         (std::pow(std::numbers::pi, 0.5 * n) * std::pow(2.0, alpha) * std::tgamma(0.5 * alpha));
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_n, p0 = P_{n-1}
      double dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) {
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
        break;
      }
      x[i] = 0.5 * (1.0 - z);
      w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
  }
  return {x, w};
}

namespace {
constexpr double kDeSpan = 4.0;  // transformed variable runs over [-4, 4]
}

double tanh_sinh(const std::function<double(double)>& F, double a, double b, int nodes) {
  const double half = 0.5 * (b - a);
  const double step = 2.0 * kDeSpan / nodes;
  double sum = 0.0;
  for (int k = 0; k <= nodes; ++k) {
    const double u = -kDeSpan + k * step;
    const double sh = 0.5 * std::numbers::pi * std::sinh(u);
    const double ch = 0.5 * std::numbers::pi * std::cosh(u);
    const double th = std::tanh(sh);
    const double c = std::cosh(sh);
    const double dx = half * ch / (c * c);
    // distance to the nearer endpoint computed without cancellation
    const double e = 1.0 / (std::exp(2.0 * std::abs(sh)) + 1.0) * 2.0;  // 1 - |tanh|
    double x = th < 0 ? a + half * e : b - half * e;
    if (!(x > a && x < b) || dx == 0.0) continue;
    sum += F(x) * dx;
  }
  return sum * step;
}

double exp_sinh(const std::function<double(double)>& F, double scale, int nodes) {
  const double step = 2.0 * kDeSpan / nodes;
  double sum = 0.0;
  for (int k = 0; k <= nodes; ++k) {
    const double u = -kDeSpan + k * step;
    const double e = std::exp(0.5 * std::numbers::pi * std::sinh(u));
    const double x = scale * e;
    const double dx = x * 0.5 * std::numbers::pi * std::cosh(u);
    if (!(x > 0) || !std::isfinite(x) || !std::isfinite(dx)) continue;
    const double v = F(x) * dx;
    if (std::isfinite(v)) sum += v;
  }
  return sum * step;
}

}  // namespace mlab
