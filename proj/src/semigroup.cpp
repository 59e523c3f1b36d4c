#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "convolution.hpp"
#include "mlab/error.hpp"
#include "mlab/operators.hpp"
#include "mlab/parallel.hpp"
#include "mlab/special.hpp"

namespace mlab {

namespace detail {

void require_dense_size(const Grid& g) {
  if (g.dim() == 2 && g.points_per_axis() > kDense2DLimit)
    throw ConfigError("dense 2D operators support N <= " + std::to_string(kDense2DLimit));
}

GridFunction convolve(const OffsetTable& k, const GridFunction& f) {
  const Grid& g = f.grid();
  const int n = g.points_per_axis();
  const int reach = std::min(k.reach, n - 1);
  GridFunction out(g);
  if (g.dim() == 1) {
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
      for (int i = int(lo); i < int(hi); ++i) {
        const int jlo = std::max(0, i - reach), jhi = std::min(n - 1, i + reach);
        double s = 0.0;
        for (int j = jlo; j <= jhi; ++j) s += k.v[std::abs(i - j)] * f[j];
        out[i] = s;
      }
    });
    return out;
  }
  const int stride = k.reach + 1;
  parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    for (int i = int(lo); i < int(hi); ++i) {
      const int ilo = std::max(0, i - reach), ihi = std::min(n - 1, i + reach);
      for (int j = 0; j < n; ++j) {
        const int jlo = std::max(0, j - reach), jhi = std::min(n - 1, j + reach);
        double s = 0.0;
        for (int a = ilo; a <= ihi; ++a) {
          const double* row = &k.v[std::abs(i - a) * stride];
          const double* fr = &f.values()[std::size_t(a) * n];
          for (int b = jlo; b <= jhi; ++b) s += row[std::abs(j - b)] * fr[b];
        }
        out[g.flat_index(i, j)] = s;
      }
    }
  });
  return out;
}

GridFunction convolve_separable(const std::vector<double>& k1, const GridFunction& f) {
  const Grid& g = f.grid();
  const int n = g.points_per_axis();
  const int reach = std::min(int(k1.size()) - 1, n - 1);
  if (g.dim() == 1) {
    OffsetTable t(1, int(k1.size()) - 1);
    t.v = k1;
    return convolve(t, f);
  }
  GridFunction tmp(g), out(g);
  parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    for (int i = int(lo); i < int(hi); ++i)
      for (int j = 0; j < n; ++j) {
        const int jlo = std::max(0, j - reach), jhi = std::min(n - 1, j + reach);
        double s = 0.0;
        for (int b = jlo; b <= jhi; ++b) s += k1[std::abs(j - b)] * f[g.flat_index(i, b)];
        tmp[g.flat_index(i, j)] = s;
      }
  });
  parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    for (int i = int(lo); i < int(hi); ++i) {
      const int ilo = std::max(0, i - reach), ihi = std::min(n - 1, i + reach);
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int a = ilo; a <= ihi; ++a) s += k1[std::abs(i - a)] * tmp[g.flat_index(a, j)];
        out[g.flat_index(i, j)] = s;
      }
    }
  });
  return out;
}

}  // namespace detail

// --- SemigroupSpec ------------------------------------------------------------

SemigroupSpec SemigroupSpec::heat(int dim) {
  if (dim != 1 && dim != 2) throw ParameterError("semigroup dimension must be 1 or 2");
  const double c0 = std::pow(4.0 * std::numbers::pi, -0.5 * dim);
  SemigroupSpec s;
  s.name = "heat";
  s.dim = dim;
  s.profile = [c0](double u) { return c0 * std::exp(-0.25 * u); };
  s.profile_derivative = [c0](double u) { return -0.25 * c0 * std::exp(-0.25 * u); };
  s.bound_C = c0;
  s.bound_c = 0.25;
  s.separable_heat = true;
  return s;
}

SemigroupSpec SemigroupSpec::gaussian_profile(int dim, double width) {
  if (dim != 1 && dim != 2) throw ParameterError("semigroup dimension must be 1 or 2");
  if (!(width > 0)) throw ParameterError("profile width must be positive");
  const double c0 = std::pow(std::numbers::pi * width, -0.5 * dim);
  SemigroupSpec s;
  std::ostringstream os;
  os << "gauss-profile:" << width;
  s.name = os.str();
  s.dim = dim;
  s.profile = [c0, width](double u) { return c0 * std::exp(-u / width); };
  s.profile_derivative = [c0, width](double u) { return -c0 / width * std::exp(-u / width); };
  s.bound_C = c0;
  s.bound_c = 1.0 / width;
  return s;
}

double SemigroupSpec::kernel(double t, double rho2) const {
  return std::pow(t, -0.5 * dim) * profile(rho2 / t);
}

double SemigroupSpec::kernel_time_derivative(double t, double rho2) const {
  const double u = rho2 / t;
  const double gu = profile(u);
  double dg;
  if (profile_derivative) {
    dg = profile_derivative(u);
  } else {
    const double e = 1e-6 * std::max(u, 1e-3);
    dg = (profile(u + e) - profile(std::max(0.0, u - e))) / (u + e - std::max(0.0, u - e));
  }
  return -0.5 * dim * std::pow(t, -0.5 * dim - 1.0) * gu - std::pow(t, -0.5 * dim - 2.0) * rho2 * dg;
}

double SemigroupSpec::mass() const {
  if (separable_heat) return 1.0;
  // u = v^2 removes the u^{-1/2} endpoint singularity.
  if (dim == 1) return exp_sinh([&](double v) { return 2.0 * profile(v * v); }, 1.0, 256);
  return std::numbers::pi * exp_sinh(profile, 1.0, 256);
}

double SemigroupSpec::cutoff_argument() const {
  const double g0 = profile(0.0);
  double u = 1.0;
  while (profile(u) > 1e-18 * g0 && u < 1e8) u *= 1.25;
  return u;
}

ProfileAudit audit_profile(const SemigroupSpec& spec) {
  ProfileAudit a;
  const double g0 = spec.profile(0.0);
  double prev = g0;
  if (!(g0 > 0) || !std::isfinite(g0)) {
    a.bounded = false;
    a.violations.push_back("g(0) is not positive and finite");
  }
  const double ucut = spec.cutoff_argument();
  for (int k = -40; k <= 200; ++k) {
    const double u = std::pow(10.0, k / 20.0);
    const double gu = spec.profile(u);
    if (u <= ucut && !(gu > 0)) {
      a.positive = false;
      a.violations.push_back("g(" + std::to_string(u) + ") <= 0");
      break;
    }
    if (gu > g0 || !std::isfinite(gu)) a.bounded = false;
    if (gu > prev * (1 + 1e-14)) {
      a.nonincreasing = false;
      a.violations.push_back("g increases near u = " + std::to_string(u));
      break;
    }
    prev = gu;
  }
  if (!a.bounded) a.violations.push_back("g exceeds g(0)");
  // r^{n+eps} g(r^2) at the large end of a geometric grid with eps = 0.5
  double tail = 0;
  for (double r = 10; r <= 1e4; r *= 10) tail = std::pow(r, spec.dim + 0.5) * spec.profile(r * r);
  if (!(tail < 1e-12)) {
    a.decays = false;
    a.violations.push_back("r^{n+eps} g(r^2) does not vanish on the sample grid");
  }
  a.mass = spec.mass();
  if (std::abs(a.mass - 1.0) > 1e-6) a.violations.push_back("profile mass is not 1");
  return a;
}

// --- discrete kernel ------------------------------------------------------------

namespace {

/// Lattice normalization h^n sum_{j in Z^n} p_t(|j| h) over the infinite lattice.
double lattice_mass(const SemigroupSpec& spec, double h, double t, int dim_used) {
  const double ratio = t / (h * h);
  if (spec.separable_heat) {
    if (ratio > 1.0) {
      double z = 1.0;
      for (int k = 1; k < 50; ++k) {
        const double term = 2.0 * std::exp(-4.0 * std::numbers::pi * std::numbers::pi * k * k * ratio);
        z += term;
        if (term < 1e-20) break;
      }
      return z;
    }
    const int J = int(std::ceil(std::sqrt(166.0 * t) / h)) + 1;
    const double c0 = 1.0 / std::sqrt(4.0 * std::numbers::pi * t);
    double z = 0.0;
    for (int j = -J; j <= J; ++j) z += c0 * std::exp(-double(j) * j * h * h / (4.0 * t));
    return z * h;
  }
  if (ratio > 25.0) return spec.mass();
  const int J = int(std::ceil(std::sqrt(spec.cutoff_argument() * t) / h)) + 1;
  double z = 0.0;
  if (dim_used == 1) {
    for (int j = -J; j <= J; ++j) z += spec.kernel(t, double(j) * j * h * h);
    return z * h;
  }
  for (int i = -J; i <= J; ++i)
    for (int j = -J; j <= J; ++j) z += spec.kernel(t, (double(i) * i + double(j) * j) * h * h);
  return z * h * h;
}

}  // namespace

SemigroupKernel::SemigroupKernel(const SemigroupSpec& spec, const Grid& grid, double t)
    : grid_(grid), t_(t), z_(1.0), reach_(0) {
  if (!(t > 0)) throw ParameterError("semigroup time must be positive");
  if (spec.dim != grid.dim()) throw ParameterError("semigroup dimension does not match the grid");
  const double h = grid.spacing();
  const int n = grid.points_per_axis();
  if (spec.separable_heat) {
    reach_ = std::min(n - 1, int(std::ceil(std::sqrt(166.0 * t) / h)));
    z_ = lattice_mass(spec, h, t, 1);
    table_.resize(reach_ + 1);
    const double c0 = h / std::sqrt(4.0 * std::numbers::pi * t) / z_;
    for (int d = 0; d <= reach_; ++d) table_[d] = c0 * std::exp(-double(d) * d * h * h / (4.0 * t));
    if (grid.dim() == 2) z_ *= z_;
    separable_ = true;
    return;
  }
  reach_ = std::min(n - 1, int(std::ceil(std::sqrt(spec.cutoff_argument() * t) / h)));
  z_ = lattice_mass(spec, h, t, grid.dim());
  const double vol = grid.cell_volume();
  if (grid.dim() == 1) {
    table_.resize(reach_ + 1);
    for (int d = 0; d <= reach_; ++d) table_[d] = vol * spec.kernel(t, double(d) * d * h * h) / z_;
  } else {
    table_.resize(std::size_t(reach_ + 1) * (reach_ + 1));
    for (int a = 0; a <= reach_; ++a)
      for (int b = 0; b <= reach_; ++b)
        table_[std::size_t(a) * (reach_ + 1) + b] = vol * spec.kernel(t, (double(a) * a + double(b) * b) * h * h) / z_;
  }
}

double SemigroupKernel::weight(int di, int dj) const {
  di = std::abs(di);
  dj = std::abs(dj);
  if (di > reach_ || dj > reach_) return 0.0;
  if (grid_.dim() == 1) return table_[di];
  if (separable_) return table_[di] * table_[dj];
  return table_[std::size_t(di) * (reach_ + 1) + dj];
}

GridFunction semigroup_apply(const SemigroupSpec& spec, const GridFunction& f, double t, Diagnostics* diag) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  if (t < h * h / 100.0 && diag)
    diag->warnings.push_back("semigroup time " + std::to_string(t) + " is below h^2/100; kernel under-resolved");
  SemigroupKernel k(spec, g, t);
  if (spec.separable_heat) {
    std::vector<double> k1(k.reach() + 1);
    for (int d = 0; d <= k.reach(); ++d) k1[d] = k.table1d(d);
    return detail::convolve_separable(k1, f);
  }
  detail::require_dense_size(g);
  detail::OffsetTable tab(g.dim(), k.reach());
  if (g.dim() == 1) {
    for (int d = 0; d <= k.reach(); ++d) tab.at(d) = k.weight(d);
  } else {
    for (int a = 0; a <= k.reach(); ++a)
      for (int b = 0; b <= k.reach(); ++b) tab.at(a, b) = k.weight(a, b);
  }
  return detail::convolve(tab, f);
}

GaussianBoundAudit audit_gaussian_bound(const SemigroupSpec& spec, const std::vector<double>& ts,
                                        const std::vector<double>& rhos, const Grid* grid) {
  GaussianBoundAudit a;
  auto record = [&](double value, double t, double rho) {
    const double bound = spec.bound_C * std::pow(t, -0.5 * spec.dim) * std::exp(-spec.bound_c * rho * rho / t);
    ++a.samples;
    const double ratio = bound > 0 ? value / bound : (value > 0 ? INFINITY : 0.0);
    if (ratio > a.max_ratio) {
      a.max_ratio = ratio;
      a.worst_t = t;
      a.worst_rho = rho;
    }
    if (value > bound * (1.0 + 1e-12)) ++a.violations;
  };
  for (double t : ts)
    for (double rho : rhos) record(spec.kernel(t, rho * rho), t, rho);
  if (grid) {
    const double h = grid->spacing();
    for (double t : ts) {
      SemigroupKernel k(spec, *grid, t);
      const double vol = grid->cell_volume();
      for (int d = 0; d <= k.reach(); d += std::max(1, k.reach() / 64)) record(k.weight(d) / vol, t, d * h);
    }
  }
  return a;
}

}  // namespace mlab
