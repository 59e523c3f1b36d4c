#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlab/lattice.hpp"

namespace mlab {

/// Strictly positive grid function; `floor` is the smallest sample.
class Weight {
 public:
  explicit Weight(GridFunction base);
  static Weight unit(const Grid& grid);

  const GridFunction& values() const { return base_; }
  const Grid& grid() const { return base_.grid(); }
  double operator[](std::size_t i) const { return base_[i]; }
  double floor() const { return floor_; }
  Weight pow(double s) const;
  Weight scaled(double c) const;

 private:
  GridFunction base_;
  double floor_;
};

/// Resolution-independent weight description (`power:<b>`, `const:<c>`, `loggrid`, `csv:<path>`),
/// optionally raised to a power.
class WeightSpec {
 public:
  enum class Kind { Power, Constant, LogGrid, Samples };

  static WeightSpec parse(const std::string& text);
  static WeightSpec power(double beta);
  static WeightSpec constant(double c);

  Weight sample(const Grid& grid) const;
  WeightSpec pow(double s) const;
  std::string id() const;
  Kind kind() const { return kind_; }
  bool refinable() const { return kind_ != Kind::Samples; }
  double parameter() const { return param_; }
  double exponent() const { return exponent_; }

 private:
  Kind kind_ = Kind::Constant;
  double param_ = 1.0;
  double exponent_ = 1.0;
  std::string path_;
  std::string text_;
};

/// Grid geometry shared across a refinement ladder.
struct Domain {
  int dim = 1;
  double half_width = 8.0;
  Grid at(int n) const { return Grid(dim, half_width, n); }
};

struct WeightCharacteristics {
  double p = 0;  // exponent p (A_p, p = 1 for A_1) or r (RH_r)
  double value = 1.0;
  bool diverges = false;  // set only by refinement classification
  Ball witness;
  std::string family;
};

WeightCharacteristics ap_characteristic(const Weight& w, double p, const BallFamily& F);
WeightCharacteristics a1_characteristic(const Weight& w, const BallFamily& F);
WeightCharacteristics reverse_holder_constant(const Weight& w, double r, const BallFamily& F);

struct DivergenceOptions {
  double growth_factor = 1.5;
};

/// Whole-domain quantity whose observed refinement order decides integrability.
struct PrimitiveTrend {
  std::string name;
  std::vector<int> resolutions;
  std::vector<double> values;
  double increment_ratio = 0;  // (S3 - S2) / (S2 - S1); > 1 means the increments do not shrink
  bool diverges = false;
};

struct MembershipVerdict {
  std::string test;  // "A_p" / "A_1" / "RH_r"
  double exponent = 0;
  bool member = true;
  std::vector<int> resolutions;
  std::vector<WeightCharacteristics> values;
  std::vector<double> growth;
  bool growth_fired = false;
  std::vector<PrimitiveTrend> primitives;
};

/// Membership in A_p (p > 1) or A_1 (p == 1) judged from refinement behaviour.
MembershipVerdict classify_ap(const WeightSpec& w, double p, const Domain& domain, const BallPolicy& policy,
                              std::span<const int> resolutions, const DivergenceOptions& opt = {});
MembershipVerdict classify_rh(const WeightSpec& w, double r, const Domain& domain, const BallPolicy& policy,
                              std::span<const int> resolutions, const DivergenceOptions& opt = {});

struct CriticalIndex {
  double value = 0;
  bool capped = false;  // r_w >= r_max
  double lo = 1, hi = 0;
  std::vector<std::pair<double, bool>> scan;  // (r, diverges)
  /// True when |value - threshold| <= tol, so a hypothesis test against it is inconclusive.
  bool near(double threshold, double tol) const { return !capped && std::abs(value - threshold) <= tol; }
  std::string describe() const;
};

struct CriticalIndexOptions {
  double r_max = 64.0;
  DivergenceOptions divergence;
};

CriticalIndex critical_index_estimate(const WeightSpec& w, const Domain& domain, const BallPolicy& policy,
                                      std::span<const int> resolutions, double tol,
                                      const CriticalIndexOptions& opt = {});

struct FactorizationRow {
  double beta, s, p;
  bool lhs;  // w^s in A_p
  bool rhs;  // w in A_{1+(p-1)/s} and w in RH_s
  bool agree() const { return lhs == rhs; }
};

std::vector<FactorizationRow> check_ap_factorization(std::span<const double> betas, std::span<const double> ss,
                                                     std::span<const double> ps, const Domain& domain,
                                                     const BallPolicy& policy, std::span<const int> resolutions);

}  // namespace mlab
