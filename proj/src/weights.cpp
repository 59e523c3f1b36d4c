#include "mlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mlab/error.hpp"
#include "mlab/parallel.hpp"

namespace mlab {

Weight::Weight(GridFunction base) : base_(std::move(base)), floor_(std::numeric_limits<double>::infinity()) {
  for (double v : base_.values()) {
    if (!(v > 0) || !std::isfinite(v)) throw ParameterError("weight samples must be positive and finite");
    floor_ = std::min(floor_, v);
  }
}

Weight Weight::unit(const Grid& grid) { return Weight(GridFunction::constant(grid, 1.0)); }

Weight Weight::pow(double s) const {
  GridFunction g(grid());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::pow(base_[i], s);
  return Weight(std::move(g));
}

Weight Weight::scaled(double c) const { return Weight(base_.scaled(c)); }

// --- WeightSpec -------------------------------------------------------------

WeightSpec WeightSpec::power(double beta) {
  WeightSpec w;
  w.kind_ = Kind::Power;
  w.param_ = beta;
  return w;
}

WeightSpec WeightSpec::constant(double c) {
  if (!(c > 0)) throw ConfigError("constant weight must be positive");
  WeightSpec w;
  w.kind_ = Kind::Constant;
  w.param_ = c;
  return w;
}

WeightSpec WeightSpec::parse(const std::string& text) {
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("bad weight parameter in '" + text + "'");
    }
  };
  WeightSpec w;
  if (head == "power") {
    w = power(number(arg));
  } else if (head == "const") {
    w = constant(number(arg));
  } else if (head == "loggrid" && arg.empty()) {
    w.kind_ = Kind::LogGrid;
  } else if (head == "csv" && !arg.empty()) {
    w.kind_ = Kind::Samples;
    w.path_ = arg;
  } else {
    throw ConfigError("unknown weight spec '" + text + "' (expected power:<b>, const:<c>, loggrid or csv:<path>)");
  }
  w.text_ = text;
  return w;
}

WeightSpec WeightSpec::pow(double s) const {
  WeightSpec w = *this;
  if (kind_ == Kind::Power) {
    w.param_ = param_ * s;
    w.text_.clear();
  } else {
    w.exponent_ = exponent_ * s;
  }
  return w;
}

std::string WeightSpec::id() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Power: os << "power:" << param_; break;
    case Kind::Constant: os << "const:" << param_; break;
    case Kind::LogGrid: os << "loggrid"; break;
    case Kind::Samples: os << "csv:" << path_; break;
  }
  if (exponent_ != 1.0) os << "^" << exponent_;
  return os.str();
}

Weight WeightSpec::sample(const Grid& grid) const {
  GridFunction g(grid);
  switch (kind_) {
    case Kind::Power:
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::pow(norm(grid.point(i), grid.dim()), param_);
      break;
    case Kind::Constant:
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = param_;
      break;
    case Kind::LogGrid:
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = 1.0 + std::abs(std::log(norm(grid.point(i), grid.dim())));
      break;
    case Kind::Samples: {
      std::ifstream in(path_);
      if (!in) throw ConfigError("cannot open weight CSV '" + path_ + "'");
      g = read_csv(in, grid);
      break;
    }
  }
  Weight w(std::move(g));
  return exponent_ == 1.0 ? w : w.pow(exponent_);
}

// --- characteristics --------------------------------------------------------

namespace {

struct BallScore {
  double value;
  std::size_t index;
};

/// Max of score(ball) over the family; ties resolved to the lowest ball index.
template <class Score>
BallScore family_max(const BallFamily& F, Score&& score) {
  const auto& balls = F.balls();
  std::vector<double> vals(balls.size());
  parallel_for(balls.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) vals[k] = score(balls[k]);
  });
  BallScore best{-std::numeric_limits<double>::infinity(), 0};
  for (std::size_t k = 0; k < vals.size(); ++k)
    if (vals[k] > best.value) best = {vals[k], k};
  return best;
}

double ball_mean(const GridFunction& f, const Ball& b) {
  double s = 0.0;
  std::size_t n = 0;
  for_each_cell(f.grid(), b, [&](std::size_t i) {
    s += f[i];
    ++n;
  });
  if (n == 0) throw EmptyRegionError("ball contains no grid cell");
  return s / double(n);
}

WeightCharacteristics finish(double p, const BallFamily& F, BallScore s) {
  WeightCharacteristics c;
  c.p = p;
  c.value = s.value;
  c.witness = F.balls()[s.index];
  c.family = F.id();
  return c;
}

}  // namespace

WeightCharacteristics ap_characteristic(const Weight& w, double p, const BallFamily& F) {
  if (!(p > 1)) throw ParameterError("ap_characteristic needs p > 1 (use a1_characteristic for p = 1)");
  const GridFunction& base = w.values();
  const GridFunction dual = w.pow(-1.0 / (p - 1.0)).values();
  auto s = family_max(F, [&](const Ball& b) {
    return ball_mean(base, b) * std::pow(ball_mean(dual, b), p - 1.0);
  });
  return finish(p, F, s);
}

WeightCharacteristics a1_characteristic(const Weight& w, const BallFamily& F) {
  const GridFunction& base = w.values();
  auto s = family_max(F, [&](const Ball& b) {
    double sum = 0.0, mn = std::numeric_limits<double>::infinity();
    std::size_t n = 0;
    for_each_cell(base.grid(), b, [&](std::size_t i) {
      sum += base[i];
      mn = std::min(mn, base[i]);
      ++n;
    });
    if (n == 0) throw EmptyRegionError("ball contains no grid cell");
    return (sum / double(n)) / mn;
  });
  return finish(1.0, F, s);
}

WeightCharacteristics reverse_holder_constant(const Weight& w, double r, const BallFamily& F) {
  if (!(r > 1)) throw ParameterError("reverse_holder_constant needs r > 1");
  const GridFunction& base = w.values();
  const GridFunction powered = w.pow(r).values();
  auto s = family_max(F, [&](const Ball& b) {
    return std::pow(ball_mean(powered, b), 1.0 / r) / ball_mean(base, b);
  });
  return finish(r, F, s);
}

// --- refinement classification ---------------------------------------------

namespace {

constexpr double kIncrementThreshold = 0.999;

std::vector<int> ladder(std::span<const int> resolutions) {
  std::vector<int> res(resolutions.begin(), resolutions.end());
  if (res.size() < 2) throw ConfigError("refinement classification needs at least two resolutions");
  for (std::size_t i = 1; i < res.size(); ++i)
    if (res[i] <= res[i - 1]) throw ConfigError("resolutions must be strictly increasing");
  while (res.size() < 3) res.push_back(2 * res.back());
  return {res.end() - 3, res.end()};
}

enum class Prim { Integral, InverseMin };

PrimitiveTrend primitive_trend(const std::string& name, const WeightSpec& w, Prim kind, const Domain& domain,
                               const std::vector<int>& res) {
  PrimitiveTrend t;
  t.name = name;
  t.resolutions = res;
  for (int n : res) {
    Weight s = w.sample(domain.at(n));
    t.values.push_back(kind == Prim::Integral ? integrate(s.values()) : 1.0 / s.floor());
  }
  const double d1 = t.values[1] - t.values[0];
  const double d2 = t.values[2] - t.values[1];
  const double scale = std::abs(t.values[2]);
  if (std::abs(d1) <= 1e-12 * scale && std::abs(d2) <= 1e-12 * scale) {
    t.increment_ratio = 0.0;
  } else if (d1 == 0.0) {
    t.increment_ratio = std::numeric_limits<double>::infinity();
  } else {
    t.increment_ratio = d2 / d1;
  }
  t.diverges = t.increment_ratio >= kIncrementThreshold;
  return t;
}

template <class Eval>
MembershipVerdict classify(const std::string& test, double exponent, const WeightSpec& w, const Domain& domain,
                           const BallPolicy& policy, std::span<const int> resolutions, const DivergenceOptions& opt,
                           Eval&& eval, std::vector<std::pair<std::string, std::pair<WeightSpec, Prim>>> prims) {
  if (!w.refinable()) throw ConfigError("weight '" + w.id() + "' is sampled data and cannot be refined");
  MembershipVerdict v;
  v.test = test;
  v.exponent = exponent;
  v.resolutions.assign(resolutions.begin(), resolutions.end());
  const std::vector<int> lad = ladder(resolutions);
  for (int n : resolutions) {
    Grid g = domain.at(n);
    v.values.push_back(eval(w.sample(g), build_ball_family(g, policy)));
  }
  for (std::size_t k = 1; k < v.values.size(); ++k) {
    double gr = v.values[k].value / v.values[k - 1].value;
    v.growth.push_back(gr);
    if (gr > opt.growth_factor) v.growth_fired = true;
  }
  bool prim_fired = false;
  for (auto& [name, spec] : prims) {
    v.primitives.push_back(primitive_trend(name, spec.first, spec.second, domain, lad));
    prim_fired = prim_fired || v.primitives.back().diverges;
  }
  v.member = !(v.growth_fired || prim_fired);
  for (auto& c : v.values) c.diverges = !v.member;
  return v;
}

}  // namespace

MembershipVerdict classify_ap(const WeightSpec& w, double p, const Domain& domain, const BallPolicy& policy,
                              std::span<const int> resolutions, const DivergenceOptions& opt) {
  if (p < 1) throw ParameterError("A_p classification needs p >= 1");
  if (p == 1.0) {
    return classify("A_1", 1.0, w, domain, policy, resolutions, opt,
                    [](const Weight& s, const BallFamily& F) { return a1_characteristic(s, F); },
                    {{"int w", {w, Prim::Integral}}, {"1/min w", {w, Prim::InverseMin}}});
  }
  return classify("A_p", p, w, domain, policy, resolutions, opt,
                  [p](const Weight& s, const BallFamily& F) { return ap_characteristic(s, p, F); },
                  {{"int w", {w, Prim::Integral}}, {"int w^(-1/(p-1))", {w.pow(-1.0 / (p - 1.0)), Prim::Integral}}});
}

MembershipVerdict classify_rh(const WeightSpec& w, double r, const Domain& domain, const BallPolicy& policy,
                              std::span<const int> resolutions, const DivergenceOptions& opt) {
  if (!(r > 1)) throw ParameterError("RH_r classification needs r > 1");
  return classify("RH_r", r, w, domain, policy, resolutions, opt,
                  [r](const Weight& s, const BallFamily& F) { return reverse_holder_constant(s, r, F); },
                  {{"int w^r", {w.pow(r), Prim::Integral}}, {"int w", {w, Prim::Integral}}});
}

std::string CriticalIndex::describe() const {
  std::ostringstream os;
  if (capped) {
    os << ">= " << hi;
  } else {
    os << value << " (bracket " << lo << ".." << hi << ")";
  }
  return os.str();
}

CriticalIndex critical_index_estimate(const WeightSpec& w, const Domain& domain, const BallPolicy& policy,
                                      std::span<const int> resolutions, double tol,
                                      const CriticalIndexOptions& opt) {
  if (!(tol > 0)) throw ParameterError("critical_index_estimate needs tol > 0");
  if (resolutions.size() < 2) throw ConfigError("critical_index_estimate needs at least two resolutions");
  auto diverges = [&](double r) { return !classify_rh(w, r, domain, policy, resolutions, opt.divergence).member; };

  static constexpr double kScan[] = {1.05, 1.1, 1.2, 1.35, 1.5, 1.75, 2, 2.5, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64};
  CriticalIndex ci;
  std::vector<double> grid;
  for (double r : kScan)
    if (r < opt.r_max) grid.push_back(r);
  grid.push_back(opt.r_max);
  for (double r : grid) ci.scan.emplace_back(r, diverges(r));

  std::size_t first = ci.scan.size();
  for (std::size_t k = 0; k < ci.scan.size(); ++k)
    if (ci.scan[k].second) {
      first = k;
      break;
    }
  for (std::size_t k = first; k < ci.scan.size(); ++k) {
    if (!ci.scan[k].second) {
      std::ostringstream os;
      os << "non-monotone reverse Hoelder classification for " << w.id() << ":";
      for (auto& [r, d] : ci.scan) os << " r=" << r << (d ? " DIVERGES" : " ok");
      throw DiagnosticError(os.str());
    }
  }
  if (first == ci.scan.size()) {
    ci.capped = true;
    ci.lo = ci.hi = ci.value = opt.r_max;
    return ci;
  }
  double lo = first == 0 ? 1.0 : ci.scan[first - 1].first;
  double hi = ci.scan[first].first;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    bool d = diverges(mid);
    ci.scan.emplace_back(mid, d);
    (d ? hi : lo) = mid;
  }
  ci.lo = lo;
  ci.hi = hi;
  ci.value = 0.5 * (lo + hi);
  return ci;
}

std::vector<FactorizationRow> check_ap_factorization(std::span<const double> betas, std::span<const double> ss,
                                                     std::span<const double> ps, const Domain& domain,
                                                     const BallPolicy& policy, std::span<const int> resolutions) {
  std::vector<FactorizationRow> rows;
  for (double beta : betas) {
    if (!(beta > -domain.dim && beta < domain.dim))
      throw ParameterError("power exponent must lie in (-n, n)");
    for (double s : ss) {
      if (!(s > 1)) throw ParameterError("factorization needs s > 1");
      for (double p : ps) {
        if (p < 1) throw ParameterError("factorization needs p >= 1");
        rows.push_back({beta, s, p, false, false});
      }
    }
  }
  parallel_for(rows.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      auto& row = rows[k];
      WeightSpec w = WeightSpec::power(row.beta);
      row.lhs = classify_ap(w.pow(row.s), row.p, domain, policy, resolutions).member;
      row.rhs = classify_ap(w, 1.0 + (row.p - 1.0) / row.s, domain, policy, resolutions).member &&
                classify_rh(w, row.s, domain, policy, resolutions).member;
    }
  });
  return rows;
}

}  // namespace mlab
