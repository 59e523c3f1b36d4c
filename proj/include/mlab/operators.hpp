#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mlab/lattice.hpp"
#include "mlab/weights.hpp"

namespace mlab {

/// Kernel generator p_t(x,y) = t^{-n/2} g(|x-y|^2 / t) with Gaussian-bound constants (C, c).
struct SemigroupSpec {
  std::string name;
  int dim = 1;
  std::function<double(double)> profile;
  std::function<double(double)> profile_derivative;
  double bound_C = 0;
  double bound_c = 0;
  bool separable_heat = false;

  static SemigroupSpec heat(int dim);
  /// Unit-mass Gaussian profile g(u) = (pi s)^{-n/2} e^{-u/s}; s = 4 is the heat profile.
  /// Used to exercise the generic (non-separable) code paths.
  static SemigroupSpec gaussian_profile(int dim, double s);

  double kernel(double t, double rho2) const;
  /// d/dt of p_t at squared distance rho2.
  double kernel_time_derivative(double t, double rho2) const;
  /// Continuum mass of p_t (independent of t).
  double mass() const;
  /// Smallest u with g(u) <= 1e-18 g(0).
  double cutoff_argument() const;
};

struct ProfileAudit {
  bool positive = true;
  bool bounded = true;
  bool nonincreasing = true;
  bool decays = true;  // r^{n+eps} g(r^2) -> 0 on a geometric grid
  double mass = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};
ProfileAudit audit_profile(const SemigroupSpec& spec);

struct GaussianBoundAudit {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double max_ratio = 0;  // max of p_t / (C t^{-n/2} e^{-c rho^2/t})
  double worst_t = 0, worst_rho = 0;
};
/// Audits the continuum kernel and, when a grid is given, the renormalized discrete kernel.
GaussianBoundAudit audit_gaussian_bound(const SemigroupSpec& spec, const std::vector<double>& ts,
                                        const std::vector<double>& rhos, const Grid* grid = nullptr);

struct Diagnostics {
  std::vector<std::string> warnings;
};

/// Discrete heat-type kernel at offset, renormalized to unit mass over the infinite lattice.
class SemigroupKernel {
 public:
  SemigroupKernel(const SemigroupSpec& spec, const Grid& grid, double t);
  /// Weight (including cell volume) for integer offset (di) or (di, dj).
  double weight(int di, int dj = 0) const;
  double normalization() const { return z_; }
  int reach() const { return reach_; }
  /// Per-axis factor of a separable kernel.
  double table1d(int d) const { return table_[d]; }
  bool separable() const { return separable_; }

 private:
  Grid grid_;
  double t_;
  double z_;
  int reach_;
  bool separable_ = false;
  std::vector<double> table_;  // 1D table (dim 1 or separable 2D), or (reach+1)^2 table
};

GridFunction semigroup_apply(const SemigroupSpec& spec, const GridFunction& f, double t, Diagnostics* diag = nullptr);

/// Translation-invariant singular kernel c |x|^{alpha-n} with a lattice-zeta corrected self-cell.
struct FractionalKernel {
  int dim = 1;
  double alpha = 0.5;
  double constant = 0;
  /// Self-cell weight: -c h^alpha * Z_n(n - alpha).
  double self_weight(double h) const;
  double weight(double h, int di, int dj = 0) const;
};

FractionalKernel riesz_kernel(int dim, double alpha);
/// K_alpha of a semigroup: heat gives the Riesz constant, other profiles are integrated numerically.
FractionalKernel semigroup_fractional_kernel(const SemigroupSpec& spec, double alpha);

GridFunction fractional_apply(const FractionalKernel& k, const GridFunction& f);
GridFunction riesz_potential(const GridFunction& f, double alpha);

struct TimeQuadrature {
  double t_min = 0;  // 0 selects (h/4)^2
  double t_max = 0;  // 0 selects (8R)^2
  int nodes = 96;
};

struct FractionalReport {
  double t_min = 0, t_max = 0;
  int nodes = 0;
  double small_t_weight = 0;  // coefficient of f from [0, t_min]
  double tail_bound = 0;      // bound on the sup-norm of the exact [t_max, inf) part: tail(0) * ||f||_1
  std::optional<double> node_doubling_delta;  // rel. L2 change with twice the nodes
  std::string to_json() const;
};

GridFunction generalized_fractional(const SemigroupSpec& spec, const GridFunction& f, double alpha,
                                    const TimeQuadrature& quad = {}, FractionalReport* report = nullptr,
                                    bool measure_doubling = false);

struct DifferenceKernelValue {
  double value = 0;
  double value_doubled = 0;
  double relative_delta = 0;
};
/// Kernel of L^{-a/2} - e^{-tL} L^{-a/2} at distance rho.
DifferenceKernelValue difference_kernel(const SemigroupSpec& spec, double alpha, double t, double rho,
                                        int nodes = 64);

struct CommutatorSpec {
  double alpha = 0.5;
  std::vector<GridFunction> b;
};

/// Kernel choice for the commutator: classical Riesz or the semigroup-generated K_alpha.
struct KernelMode {
  const SemigroupSpec* semigroup = nullptr;  // nullptr = classical
};

GridFunction multilinear_commutator(const CommutatorSpec& spec, const GridFunction& f, KernelMode mode = {});
/// Right side of the subset expansion around lambda; must equal multilinear_commutator.
GridFunction sigma_expansion(const CommutatorSpec& spec, const std::vector<double>& lambda, const GridFunction& f,
                             KernelMode mode = {});

enum class MaximalKind { M, Mw, MAlphaR, MAlphaRW };

struct MaximalParams {
  double alpha = 0;
  double r = 1;
  const Weight* w = nullptr;
};

GridFunction maximal_function(const GridFunction& f, MaximalKind kind, const MaximalParams& params,
                              const BallFamily& F);

GridFunction sharp_maximal(const SemigroupSpec& spec, const GridFunction& f, const BallFamily& F);

}  // namespace mlab
