#include <algorithm>
#include <cmath>
#include <numbers>

#include "convolution.hpp"
#include "json.hpp"
#include "mlab/error.hpp"
#include "mlab/operators.hpp"
#include "mlab/parallel.hpp"
#include "mlab/special.hpp"

namespace mlab {

namespace {

void require_alpha(int dim, double alpha) {
  if (!(alpha > 0 && alpha < dim)) throw ParameterError("alpha must lie in (0, n)");
}

detail::OffsetTable fractional_table(const FractionalKernel& k, const Grid& g) {
  const int n = g.points_per_axis();
  const double h = g.spacing();
  detail::OffsetTable t(g.dim(), n - 1);
  if (g.dim() == 1) {
    for (int d = 0; d < n; ++d) t.at(d) = k.weight(h, d);
  } else {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) t.at(a, b) = k.weight(h, a, b);
  }
  return t;
}

}  // namespace

double FractionalKernel::self_weight(double h) const {
  return -constant * std::pow(h, alpha) * lattice_zeta(dim, dim - alpha);
}

double FractionalKernel::weight(double h, int di, int dj) const {
  if (di == 0 && dj == 0) return self_weight(h);
  const double r = h * std::sqrt(double(di) * di + double(dj) * dj);
  return constant * std::pow(h, dim) * std::pow(r, alpha - dim);
}

FractionalKernel riesz_kernel(int dim, double alpha) {
  require_alpha(dim, alpha);
  return FractionalKernel{dim, alpha, riesz_constant(dim, alpha)};
}

FractionalKernel semigroup_fractional_kernel(const SemigroupSpec& spec, double alpha) {
  require_alpha(spec.dim, alpha);
  if (spec.separable_heat) return riesz_kernel(spec.dim, alpha);
  // K_alpha(rho) = rho^{alpha-n} / Gamma(alpha/2) * int_0^inf u^{(n-alpha)/2 - 1} g(u) du
  const double a = 0.5 * (spec.dim - alpha);
  // u = v^{1/a} removes the u^{a-1} endpoint singularity.
  auto integrand = [&](double v) { return spec.profile(std::pow(v, 1.0 / a)) / a; };
  const double coarse = exp_sinh(integrand, 1.0, 128);
  const double fine = exp_sinh(integrand, 1.0, 256);
  if (std::abs(fine - coarse) > 1e-8 * std::abs(fine))
    throw AccuracyError("time integral of the semigroup profile did not converge under node doubling");
  return FractionalKernel{spec.dim, alpha, fine / std::tgamma(0.5 * alpha)};
}

GridFunction fractional_apply(const FractionalKernel& k, const GridFunction& f) {
  if (k.dim != f.grid().dim()) throw ParameterError("kernel dimension does not match the grid");
  detail::require_dense_size(f.grid());
  return detail::convolve(fractional_table(k, f.grid()), f);
}

GridFunction riesz_potential(const GridFunction& f, double alpha) {
  return fractional_apply(riesz_kernel(f.grid().dim(), alpha), f);
}

// --- generalized fractional integral ---------------------------------------------

std::string FractionalReport::to_json() const {
  nlohmann::ordered_json j;
  j["t_min"] = t_min;
  j["t_max"] = t_max;
  j["nodes"] = nodes;
  j["small_t_weight"] = small_t_weight;
  j["tail_bound"] = tail_bound;
  if (node_doubling_delta)
    j["node_doubling_delta"] = *node_doubling_delta;
  else
    j["node_doubling_delta"] = nullptr;
  return j.dump();
}

namespace {

/// Exact kernel of (1/Gamma(a/2)) int_T^inf p_t t^{a/2-1} dt at squared distance rho2.
struct TailKernel {
  const SemigroupSpec& spec;
  double alpha, T;
  std::vector<double> x, w;
  TailKernel(const SemigroupSpec& s, double a, double t) : spec(s), alpha(a), T(t) {
    std::tie(x, w) = gauss_legendre01(32);
  }
  double operator()(double rho2) const {
    const double a = 0.5 * (spec.dim - alpha);
    const double U = rho2 / T;
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += w[k] * spec.profile(U * std::pow(x[k], 1.0 / a));
    return std::pow(T, -a) / (a * std::tgamma(0.5 * alpha)) * s;
  }
};

detail::OffsetTable generalized_table(const SemigroupSpec& spec, const Grid& g, double alpha, double t_min,
                                      double t_max, int nodes, double& cap, double& tail0) {
  const int n = g.points_per_axis();
  const double h = g.spacing();
  const double gam = std::tgamma(0.5 * alpha);
  detail::OffsetTable tab(g.dim(), n - 1);
  const double step = std::log(t_max / t_min) / (nodes - 1);
  for (int k = 0; k < nodes; ++k) {
    const double t = t_min * std::exp(k * step);
    const double wk = step * (k == 0 || k == nodes - 1 ? 0.5 : 1.0) * std::pow(t, 0.5 * alpha) / gam;
    SemigroupKernel K(spec, g, t);
    const int reach = K.reach();
    if (g.dim() == 1) {
      for (int d = 0; d <= reach; ++d) tab.at(d) += wk * K.weight(d);
    } else {
      for (int a = 0; a <= reach; ++a)
        for (int b = 0; b <= reach; ++b) tab.at(a, b) += wk * K.weight(a, b);
    }
  }
  cap = 2.0 / alpha * std::pow(t_min, 0.5 * alpha) / gam;
  tab.at(0, 0) += cap;
  TailKernel tail(spec, alpha, t_max);
  const double vol = g.cell_volume();
  tail0 = tail(0.0);
  if (g.dim() == 1) {
    for (int d = 0; d < n; ++d) tab.at(d) += vol * tail(double(d) * d * h * h);
  } else {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) tab.at(a, b) += vol * tail((double(a) * a + double(b) * b) * h * h);
  }
  return tab;
}

}  // namespace

GridFunction generalized_fractional(const SemigroupSpec& spec, const GridFunction& f, double alpha,
                                    const TimeQuadrature& quad, FractionalReport* report, bool measure_doubling) {
  const Grid& g = f.grid();
  require_alpha(g.dim(), alpha);
  if (spec.dim != g.dim()) throw ParameterError("semigroup dimension does not match the grid");
  if (quad.nodes < 8) throw ConfigError("time quadrature needs at least 8 nodes");
  detail::require_dense_size(g);
  const double h = g.spacing();
  const double t_min = quad.t_min > 0 ? quad.t_min : (h / 4) * (h / 4);
  const double t_max = quad.t_max > 0 ? quad.t_max : (8 * g.half_width()) * (8 * g.half_width());
  if (!(t_max > t_min)) throw ConfigError("time quadrature needs t_max > t_min");
  double cap = 0, tail0 = 0;
  GridFunction out = detail::convolve(generalized_table(spec, g, alpha, t_min, t_max, quad.nodes, cap, tail0), f);
  if (report) {
    report->t_min = t_min;
    report->t_max = t_max;
    report->nodes = quad.nodes;
    report->small_t_weight = cap;
    double l1 = 0;
    for (double v : f.values()) l1 += std::abs(v);
    report->tail_bound = tail0 * l1 * g.cell_volume();
    report->node_doubling_delta.reset();
    if (measure_doubling) {
      GridFunction fine =
          detail::convolve(generalized_table(spec, g, alpha, t_min, t_max, 2 * quad.nodes, cap, tail0), f);
      double num = 0, den = 0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        num += (fine[i] - out[i]) * (fine[i] - out[i]);
        den += fine[i] * fine[i];
      }
      report->node_doubling_delta = den > 0 ? std::sqrt(num / den) : 0.0;
    }
  }
  return out;
}

// --- difference kernel --------------------------------------------------------------

namespace {

double difference_kernel_at(const SemigroupSpec& spec, double alpha, double t, double rho, int nodes) {
  // K~ = -(1/Gamma(a+1)) int_0^inf d/du p_u(rho) [u^a - (u-t)_+^a] du, a = alpha/2,
  // split at u = t so the kink of (u - t)_+^a sits at an endpoint. Both pieces run on [0, inf)
  // with a double-exponential rule using `nodes` points per half-line.
  const double a = 0.5 * alpha;
  const double r2 = rho * rho;
  const int pts = 2 * nodes;
  // u = t / (1 + s) maps [0, t] so that exp(-rho^2/4u) becomes a plain exponential in s
  const double near = exp_sinh(
      [&](double s) {
        const double u = t / (1.0 + s);
        return spec.kernel_time_derivative(u, r2) * std::pow(u, a) * t / ((1.0 + s) * (1.0 + s));
      },
      1.0 / (1.0 + r2 / (4.0 * t)), pts);
  const double far = exp_sinh(
      [&](double v) {
        const double bracket = std::pow(v, a) * std::expm1(a * std::log1p(t / v));
        return spec.kernel_time_derivative(t + v, r2) * bracket;
      },
      std::max(t, 0.25 * r2), pts);
  return -(near + far) / std::tgamma(a + 1.0);
}

}  // namespace

DifferenceKernelValue difference_kernel(const SemigroupSpec& spec, double alpha, double t, double rho, int nodes) {
  require_alpha(spec.dim, alpha);
  if (!(t > 0) || !(rho > 0)) throw ParameterError("difference_kernel needs t > 0 and rho > 0");
  if (nodes < 8) throw ConfigError("difference_kernel needs at least 8 nodes");
  DifferenceKernelValue v;
  v.value = difference_kernel_at(spec, alpha, t, rho, nodes);
  v.value_doubled = difference_kernel_at(spec, alpha, t, rho, 2 * nodes);
  const double scale = std::max(std::abs(v.value_doubled), 1e-300);
  v.relative_delta = std::abs(v.value_doubled - v.value) / scale;
  if (v.relative_delta > 1e-6)
    throw AccuracyError("difference kernel quadrature did not converge (relative change " +
                        std::to_string(v.relative_delta) + " under node doubling)");
  return v;
}

// --- commutators -----------------------------------------------------------------------

namespace {

FractionalKernel commutator_kernel(const CommutatorSpec& spec, const Grid& g, KernelMode mode) {
  if (spec.b.empty()) throw ParameterError("commutator needs m >= 1 (use generalized_fractional for m = 0)");
  for (const auto& b : spec.b)
    if (!(b.grid() == g)) throw ParameterError("commutator symbols live on a different grid");
  return mode.semigroup ? semigroup_fractional_kernel(*mode.semigroup, spec.alpha) : riesz_kernel(g.dim(), spec.alpha);
}

}  // namespace

GridFunction multilinear_commutator(const CommutatorSpec& spec, const GridFunction& f, KernelMode mode) {
  const Grid& g = f.grid();
  detail::require_dense_size(g);
  const FractionalKernel k = commutator_kernel(spec, g, mode);
  const detail::OffsetTable tab = fractional_table(k, g);
  const std::size_t m = spec.b.size();
  const int n = g.points_per_axis();
  GridFunction out(g);
  std::vector<const double*> bs(m);
  for (std::size_t j = 0; j < m; ++j) bs[j] = spec.b[j].values().data();
  const double* fv = f.values().data();
  if (g.dim() == 1) {
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        double s = 0.0;
        for (int z = 0; z < n; ++z) {
          if (std::size_t(z) == i) continue;  // diagonal factor vanishes
          double prod = fv[z] * tab.v[std::abs(int(i) - z)];
          for (std::size_t j = 0; j < m; ++j) prod *= bs[j][i] - bs[j][z];
          s += prod;
        }
        out[i] = s;
      }
    });
    return out;
  }
  parallel_for(g.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t y = lo; y < hi; ++y) {
      const int yi = int(y) / n, yj = int(y) % n;
      double s = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const std::size_t z = g.flat_index(a, b);
          if (z == y) continue;
          double prod = fv[z] * tab.at(yi - a, yj - b);
          for (std::size_t j = 0; j < m; ++j) prod *= bs[j][y] - bs[j][z];
          s += prod;
        }
      out[y] = s;
    }
  });
  return out;
}

GridFunction sigma_expansion(const CommutatorSpec& spec, const std::vector<double>& lambda, const GridFunction& f,
                             KernelMode mode) {
  const Grid& g = f.grid();
  const FractionalKernel k = commutator_kernel(spec, g, mode);
  const std::size_t m = spec.b.size();
  if (lambda.size() != m) throw ParameterError("lambda must have one entry per symbol");
  if (m > 20) throw ParameterError("sigma expansion supports m <= 20");
  GridFunction out(g);
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    // sigma = bits of mask; sigma' = the rest
    GridFunction inner = f;
    GridFunction outer = GridFunction::constant(g, 1.0);
    int size = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (mask & (1u << j)) {
        ++size;
        for (std::size_t i = 0; i < g.size(); ++i) outer[i] *= spec.b[j][i] - lambda[j];
      } else {
        for (std::size_t i = 0; i < g.size(); ++i) inner[i] *= spec.b[j][i] - lambda[j];
      }
    }
    const double sign = (int(m) - size) % 2 == 0 ? 1.0 : -1.0;
    const GridFunction applied = fractional_apply(k, inner);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] += sign * outer[i] * applied[i];
  }
  return out;
}

}  // namespace mlab
