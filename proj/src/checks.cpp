#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <memory>
#include <random>

#include "mlab/error.hpp"
#include "mlab/harness.hpp"
#include "mlab/operators.hpp"
#include "mlab/spaces.hpp"

namespace mlab {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct Setup {
  Grid grid;
  BallFamily family;
};

std::shared_ptr<const Setup> setup(const CheckConfig& c, int n, bool domain_ball = false) {
  const Grid g = c.domain.at(n);
  BallPolicy pol = c.policy;
  if (domain_ball) pol.include_domain_ball = true;
  return std::make_shared<const Setup>(Setup{g, build_ball_family(g, pol)});
}

WeightSpec weight_or(const CheckConfig& c, const WeightSpec& fallback) { return c.weight ? *c.weight : fallback; }

std::vector<WeightSpec> weights_or(const CheckConfig& c, std::vector<WeightSpec> fallback) {
  if (c.weight) return {*c.weight};
  return fallback;
}

// Default parameter tuples for the Morrey bounds. Both satisfy 1 < p < n/alpha and 0 <= kappa < p/q in
// dimension 1, and put the critical-index threshold (1-kappa)/(p/q-kappa) at 3.
std::vector<ParamTuple> tuples_or(const CheckConfig& c) {
  if (c.tuple) return {*c.tuple};
  return {ParamTuple{2.0, 0.25, 0.25}, ParamTuple{1.2, 0.5, 0.1}};
}

void validate_tuple(const ParamTuple& t, int dim) {
  std::vector<std::string> v;
  if (!(t.alpha > 0 && t.alpha < dim)) v.push_back("0 < alpha < n violated: alpha=" + num(t.alpha));
  if (!(t.p > 1 && t.p < dim / t.alpha)) v.push_back("1 < p < n/alpha violated: p=" + num(t.p));
  if (v.empty() && !(t.kappa >= 0 && t.kappa < t.p / t.q(dim)))
    v.push_back("0 <= kappa < p/q violated: kappa=" + num(t.kappa));
  if (!v.empty()) throw ConfigError(v);
}

std::string tuple_label(const ParamTuple& t, int dim) {
  return "p=" + num(t.p) + ",alpha=" + num(t.alpha) + ",kappa=" + num(t.kappa) + ",q=" + num(t.q(dim));
}

/// Weight and critical-index hypotheses of the main theorem, for every configured tuple.
std::optional<std::string> theorem_gate(const CheckConfig& c, Json& details, const WeightSpec& w) {
  const std::vector<ParamTuple> tuples = tuples_or(c);
  const DivergenceOptions div{c.growth_factor};
  const CriticalIndex ci = critical_index_estimate(w, c.domain, c.policy, c.resolutions, c.rh_tol,
                                                   CriticalIndexOptions{c.r_max, div});
  Json gate = Json::object();
  gate["weight"] = w.id();
  gate["critical_index"] = ci.value;
  gate["critical_index_capped"] = ci.capped;
  gate["critical_index_bracket"] = {ci.lo, ci.hi};
  Json rows = Json::array();
  std::optional<std::string> reason;
  for (const auto& t : tuples) {
    validate_tuple(t, c.domain.dim);
    const double q = t.q(c.domain.dim);
    const WeightSpec wq = w.pow(q / t.p);
    const MembershipVerdict a1 = classify_ap(wq, 1.0, c.domain, c.policy, c.resolutions, div);
    const double threshold = (1 - t.kappa) / (t.p / q - t.kappa);
    const bool index_ok = ci.capped || ci.value > threshold;
    const bool near = ci.near(threshold, c.rh_tol);
    rows.push_back({{"tuple", tuple_label(t, c.domain.dim)},
                    {"a1_weight", wq.id()},
                    {"a1_member", a1.member},
                    {"a1_growth_fired", a1.growth_fired},
                    {"threshold", threshold},
                    {"critical_index_ok", index_ok},
                    {"near_threshold", near}});
    if (!reason && !a1.member) reason = wq.id() + " is not in A_1 (" + tuple_label(t, c.domain.dim) + ")";
    if (!reason && !index_ok)
      reason = "critical index " + num(ci.value) + " <= " + num(threshold) + " (" + tuple_label(t, c.domain.dim) + ")";
  }
  gate["tuples"] = rows;
  details["hypotheses"] = gate;
  return reason;
}

/// max_x lhs(x)/rhs(x); points with both sides zero are skipped.
CaseOutcome pointwise_ratio(const GridFunction& lhs, const GridFunction& rhs) {
  const double scale = lhs.max_abs();
  CaseOutcome o;
  o.ratio = 0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const double l = std::abs(lhs[i]);
    if (rhs[i] == 0) {
      if (l > 1e-14 * scale)
        throw DegenerateRatioError("right side vanishes where the left side is " + num(l) + " (point " +
                                   std::to_string(i) + ")");
      continue;
    }
    const double r = l / rhs[i];
    if (r > o.ratio || !o.point) {
      o.ratio = r;
      o.point = i;
    }
  }
  return o;
}

CaseOutcome norm_ratio(const NormReport& num_, double den, const std::string& what) {
  if (!(den > 0)) {
    if (num_.value == 0) return CaseOutcome{};
    throw DegenerateRatioError(what + ": right side is zero while the left side is " + num(num_.value));
  }
  CaseOutcome o;
  o.ratio = num_.value / den;
  o.ball = num_.witness;
  return o;
}

/// Symbol tuples: singles for m = 1, unordered pairs with repetition for m = 2.
std::vector<std::vector<std::size_t>> symbol_tuples(std::size_t count, int m) {
  std::vector<std::vector<std::size_t>> out;
  if (m == 1) {
    for (std::size_t i = 0; i < count; ++i) out.push_back({i});
  } else {
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = i; j < count; ++j) out.push_back({i, j});
  }
  return out;
}

std::string join_ids(const std::vector<NamedFunction>& syms, const std::vector<std::size_t>& idx) {
  std::string s;
  for (std::size_t k = 0; k < idx.size(); ++k) s += (k ? "*" : "") + syms[idx[k]].id;
  return s;
}

// --- main theorem and Morrey bounds -------------------------------------------------------------------------

const WeightSpec kA1Weight = WeightSpec::power(-0.25);

std::vector<CheckCase> thm1_cases(const CheckConfig& c, int n) {
  const auto S = setup(c, n);
  const WeightSpec wspec = weight_or(c, kA1Weight);
  auto w = std::make_shared<const Weight>(wspec.sample(S->grid));
  auto fs = std::make_shared<const std::vector<NamedFunction>>(test_functions(S->grid));
  auto bs = std::make_shared<const std::vector<NamedFunction>>(test_symbols(S->grid));
  auto bmo = std::make_shared<std::vector<double>>();
  for (const auto& b : *bs) bmo->push_back(bmo_norm(b.f, w.get(), S->family).value);

  std::vector<CheckCase> cases;
  for (const auto& t : tuples_or(c)) {
    const double q = t.q(c.domain.dim);
    for (int m : {1, 2}) {
      for (const auto& idx : symbol_tuples(bs->size(), m)) {
        for (std::size_t fi = 0; fi < fs->size(); ++fi) {
          CheckCase cc;
          cc.function = (*fs)[fi].id;
          cc.weight = wspec.id();
          cc.params = tuple_label(t, c.domain.dim) + ",m=" + std::to_string(m) + ",b=" + join_ids(*bs, idx);
          cc.eval = [=]() {
            CommutatorSpec spec;
            spec.alpha = t.alpha;
            double bprod = 1;
            for (std::size_t j : idx) {
              spec.b.push_back((*bs)[j].f);
              bprod *= (*bmo)[j];
            }
            const GridFunction& f = (*fs)[fi].f;
            const GridFunction out = multilinear_commutator(spec, f);
            const NormReport lhs = morrey_norm(out, MorreyParams(q, t.kappa * q / t.p, w->pow(q / t.p), *w), S->family);
            const double src = morrey_norm(f, MorreyParams(t.p, t.kappa, *w), S->family).value;
            return norm_ratio(lhs, bprod * src, "commutator Morrey bound");
          };
          cases.push_back(std::move(cc));
        }
      }
    }
  }
  return cases;
}

enum class MorreyOp { MAlpha1, RieszPotential, MrW, MAlphaRW, Generalized };

std::vector<CheckCase> morrey_cases(const CheckConfig& c, int n, std::vector<MorreyOp> ops) {
  const auto S = setup(c, n);
  const WeightSpec wspec = weight_or(c, kA1Weight);
  auto w = std::make_shared<const Weight>(wspec.sample(S->grid));
  auto fs = std::make_shared<const std::vector<NamedFunction>>(test_functions(S->grid));
  const int dim = c.domain.dim;
  const int quad_nodes = c.quad_nodes;

  std::vector<CheckCase> cases;
  for (const auto& t : tuples_or(c)) {
    validate_tuple(t, dim);
    const double q = t.q(dim);
    const double r = 0.5 * (1 + t.p);  // 1 < r < p
    for (MorreyOp op : ops) {
      for (std::size_t fi = 0; fi < fs->size(); ++fi) {
        CheckCase cc;
        cc.function = (*fs)[fi].id;
        cc.weight = wspec.id();
        const char* name = op == MorreyOp::MAlpha1           ? "M_alpha1"
                           : op == MorreyOp::RieszPotential ? "I_alpha"
                           : op == MorreyOp::MrW            ? "M_rw"
                           : op == MorreyOp::MAlphaRW       ? "M_alpharw"
                                                            : "L^-alpha/2";
        cc.params = tuple_label(t, dim) + ",op=" + name;
        if (op == MorreyOp::MrW || op == MorreyOp::MAlphaRW) cc.params += ",r=" + num(r);
        cc.eval = [=]() {
          const GridFunction& f = (*fs)[fi].f;
          const MorreyParams source(t.p, t.kappa, *w);
          const MorreyParams two_weight(q, t.kappa * q / t.p, w->pow(q / t.p), *w);
          switch (op) {
            case MorreyOp::MAlpha1: {
              const GridFunction out = maximal_function(f, MaximalKind::MAlphaR, {t.alpha, 1.0, nullptr}, S->family);
              return norm_ratio(morrey_norm(out, two_weight, S->family),
                                morrey_norm(f, source, S->family).value, name);
            }
            case MorreyOp::RieszPotential: {
              const GridFunction out = riesz_potential(f, t.alpha);
              return norm_ratio(morrey_norm(out, two_weight, S->family),
                                morrey_norm(f, source, S->family).value, name);
            }
            case MorreyOp::MrW: {
              const GridFunction out = maximal_function(f, MaximalKind::MAlphaRW, {0.0, r, w.get()}, S->family);
              return norm_ratio(morrey_norm(out, two_weight, S->family),
                                morrey_norm(f, two_weight, S->family).value, name);
            }
            case MorreyOp::MAlphaRW: {
              const GridFunction out = maximal_function(f, MaximalKind::MAlphaRW, {t.alpha, r, w.get()}, S->family);
              const MorreyParams target(q, t.kappa * q / t.p, *w);
              return norm_ratio(morrey_norm(out, target, S->family), morrey_norm(f, source, S->family).value, name);
            }
            case MorreyOp::Generalized: {
              TimeQuadrature quad;
              quad.nodes = quad_nodes;
              const GridFunction out = generalized_fractional(SemigroupSpec::heat(dim), f, t.alpha, quad);
              return norm_ratio(morrey_norm(out, two_weight, S->family),
                                morrey_norm(f, source, S->family).value, name);
            }
          }
          return CaseOutcome{};
        };
        cases.push_back(std::move(cc));
      }
    }
  }
  return cases;
}

// --- sharp maximal estimates ------------------------------------------------------------------------------

std::vector<CheckCase> l16_cases(const CheckConfig& c, int n) {
  const auto S = setup(c, n, true);
  const int dim = c.domain.dim;
  const WeightSpec wspec = weight_or(c, kA1Weight);
  auto w = std::make_shared<const Weight>(wspec.sample(S->grid));
  auto fs = std::make_shared<const std::vector<NamedFunction>>(test_functions(S->grid));
  auto bs = std::make_shared<const std::vector<NamedFunction>>(test_symbols(S->grid));
  auto bmo = std::make_shared<std::vector<double>>();
  for (const auto& b : *bs) bmo->push_back(bmo_norm(b.f, nullptr, S->family).value);
  const double r = 2, tau = 2;

  std::vector<CheckCase> cases;
  for (double alpha : {0.25 * dim, 0.5 * dim}) {
    for (int m : {1, 2}) {
      for (const auto& idx : symbol_tuples(bs->size(), m)) {
        for (std::size_t fi = 0; fi < fs->size(); ++fi) {
          CheckCase cc;
          cc.function = (*fs)[fi].id;
          cc.weight = wspec.id();
          cc.params = "alpha=" + num(alpha) + ",m=" + std::to_string(m) + ",b=" + join_ids(*bs, idx) + ",r=2,tau=2";
          cc.eval = [=]() {
            const GridFunction& f = (*fs)[fi].f;
            const SemigroupSpec heat = SemigroupSpec::heat(dim);
            const BallFamily& F = S->family;
            CommutatorSpec spec;
            spec.alpha = alpha;
            double bprod = 1;
            for (std::size_t j : idx) {
              spec.b.push_back((*bs)[j].f);
              bprod *= (*bmo)[j];
            }
            const GridFunction lhs = sharp_maximal(heat, multilinear_commutator(spec, f), F);

            const GridFunction frac = fractional_apply(riesz_kernel(dim, alpha), f);
            GridFunction rhs = maximal_function(frac, MaximalKind::MAlphaRW, {0.0, r, w.get()}, F).scaled(bprod);
            if (m == 2) {
              for (int keep = 0; keep < 2; ++keep) {
                CommutatorSpec rest;
                rest.alpha = alpha;
                rest.b.push_back(spec.b[1 - keep]);
                const GridFunction sub = multilinear_commutator(rest, f);
                rhs = rhs + maximal_function(sub, MaximalKind::MAlphaRW, {0.0, tau, w.get()}, F)
                                .scaled((*bmo)[idx[keep]]);
              }
            }
            GridFunction frac_max = maximal_function(f, MaximalKind::MAlphaRW, {alpha, r, w.get()}, F);
            for (std::size_t i = 0; i < frac_max.size(); ++i) frac_max[i] *= std::pow((*w)[i], -alpha / dim);
            rhs = rhs + frac_max.scaled(bprod);
            rhs = rhs + maximal_function(f, MaximalKind::MAlphaR, {alpha, 1.0, nullptr}, F).scaled(bprod);
            return pointwise_ratio(lhs, rhs);
          };
          cases.push_back(std::move(cc));
        }
      }
    }
  }
  return cases;
}

std::vector<CheckCase> l15_cases(const CheckConfig& c, int n) {
  const auto S = setup(c, n, true);
  const int dim = c.domain.dim;
  const WeightSpec wspec = weight_or(c, WeightSpec::power(-0.5));
  auto w = std::make_shared<const Weight>(wspec.sample(S->grid));
  auto fs = std::make_shared<const std::vector<NamedFunction>>(test_functions(S->grid));
  auto bs = std::make_shared<std::vector<NamedFunction>>();
  for (auto& b : test_symbols(S->grid)) {
    if (b.id == "log" || b.id == "sin") bs->push_back(std::move(b));
  }
  auto bmo = std::make_shared<std::vector<double>>();
  for (const auto& b : *bs) bmo->push_back(bmo_norm(b.f, w.get(), S->family).value);
  const double tau = 2;

  // Balls grouped by radius: one semigroup time per group.
  auto groups = std::make_shared<std::map<double, std::vector<std::size_t>>>();
  for (std::size_t k = 0; k < S->family.size(); ++k) (*groups)[S->family.balls()[k].radius].push_back(k);

  std::vector<CheckCase> cases;
  for (int m : {1, 2}) {
    for (const auto& idx : symbol_tuples(bs->size(), m)) {
      for (std::size_t fi = 0; fi < fs->size(); ++fi) {
        CheckCase cc;
        cc.function = (*fs)[fi].id;
        cc.weight = wspec.id();
        cc.params = "sigma=" + join_ids(*bs, idx) + ",tau=2";
        cc.eval = [=]() {
          const GridFunction& f = (*fs)[fi].f;
          const Grid& g = S->grid;
          const SemigroupSpec heat = SemigroupSpec::heat(dim);
          const std::size_t k = idx.size();
          // e^{-tL}((b - lambda)_sigma f) = sum over A subset sigma of prod_{j not in A}(-lambda_j) e^{-tL}(b_A f).
          std::vector<GridFunction> products;
          for (unsigned mask = 0; mask < (1u << k); ++mask) {
            GridFunction p = f;
            for (std::size_t j = 0; j < k; ++j)
              if (mask & (1u << j)) p = p * (*bs)[idx[j]].f;
            products.push_back(std::move(p));
          }
          GridFunction lhs(g);
          for (const auto& [radius, members] : *groups) {
            std::vector<GridFunction> evolved;
            for (const auto& p : products) evolved.push_back(semigroup_apply(heat, p, radius * radius));
            for (std::size_t bi : members) {
              const Ball& B = S->family.balls()[bi];
              std::vector<double> lambda(k);
              for (std::size_t j = 0; j < k; ++j) lambda[j] = mean((*bs)[idx[j]].f, B);
              std::vector<double> coef(products.size());
              for (unsigned mask = 0; mask < coef.size(); ++mask) {
                double cf = 1;
                for (std::size_t j = 0; j < k; ++j)
                  if (!(mask & (1u << j))) cf *= -lambda[j];
                coef[mask] = cf;
              }
              double acc = 0;
              std::size_t cnt = 0;
              for_each_cell(g, B, [&](std::size_t i) {
                double v = 0;
                for (std::size_t a = 0; a < coef.size(); ++a) v += coef[a] * evolved[a][i];
                acc += std::abs(v);
                ++cnt;
              });
              const double avg = acc / double(cnt);
              for_each_cell(g, B, [&](std::size_t i) { lhs[i] = std::max(lhs[i], avg); });
            }
          }
          double bprod = 1;
          for (std::size_t j : idx) bprod *= (*bmo)[j];
          const GridFunction rhs =
              maximal_function(f, MaximalKind::MAlphaRW, {0.0, tau, w.get()}, S->family).scaled(bprod);
          return pointwise_ratio(lhs, rhs);
        };
        cases.push_back(std::move(cc));
      }
    }
  }
  return cases;
}

// --- kernels, weak type, norm chain -----------------------------------------------------------------------

std::vector<CheckCase> l14_cases(const CheckConfig& c, int nodes) {
  const int dim = c.domain.dim;
  std::vector<CheckCase> cases;
  for (double alpha : {0.25 * dim, 0.5 * dim}) {
    for (double rho : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      for (double tau : {0.01, 0.1, 1.0}) {
        CheckCase cc;
        cc.function = "kernel";
        cc.weight = "none";
        cc.params = "alpha=" + num(alpha) + ",rho=" + num(rho) + ",t=" + num(tau * rho * rho);
        cc.eval = [=]() {
          const double t = tau * rho * rho;
          const DifferenceKernelValue k = difference_kernel(SemigroupSpec::heat(dim), alpha, t, rho, nodes);
          CaseOutcome o;
          o.ratio = std::abs(k.value) * std::pow(rho, dim - alpha + 2) / t;
          return o;
        };
        cases.push_back(std::move(cc));
      }
    }
  }
  return cases;
}

std::vector<CheckCase> weak_cases(const CheckConfig& c, int n) {
  const auto S = setup(c, n);
  const int dim = c.domain.dim;
  auto fs = std::make_shared<const std::vector<NamedFunction>>(test_functions(S->grid));
  const int quad_nodes = c.quad_nodes;
  std::vector<CheckCase> cases;
  for (double alpha : {0.25 * dim, 0.5 * dim}) {
    for (std::size_t fi = 0; fi < fs->size(); ++fi) {
      CheckCase cc;
      cc.function = (*fs)[fi].id;
      cc.weight = "1";
      cc.params = "alpha=" + num(alpha) + ",l=" + num(dim / (dim - alpha));
      cc.eval = [=]() {
        const GridFunction& f = (*fs)[fi].f;
        TimeQuadrature quad;
        quad.nodes = quad_nodes;
        const GridFunction out = generalized_fractional(SemigroupSpec::heat(dim), f, alpha, quad);
        const double den = lebesgue_norm(f, 1.0);
        CaseOutcome o;
        o.ratio = weak_norm(out, dim / (dim - alpha)) / den;
        return o;
      };
      cases.push_back(std::move(cc));
    }
  }
  return cases;
}

std::vector<CheckCase> chain_cases(const CheckConfig& c, int n) {
  const auto S = setup(c, n);
  const int dim = c.domain.dim;
  auto fs = std::make_shared<const std::vector<NamedFunction>>(test_functions(S->grid));
  std::vector<std::pair<WeightSpec, WeightSpec>> uv;
  if (c.weight) {
    uv.push_back({*c.weight, *c.weight});
  } else {
    uv.push_back({WeightSpec::power(-0.25), WeightSpec::power(-0.25)});
    uv.push_back({WeightSpec::power(-0.5), WeightSpec::power(-0.25)});
  }
  const double p = c.tuple ? c.tuple->p : 2.0;
  const double kappa = c.tuple ? c.tuple->kappa : 0.25;
  std::vector<CheckCase> cases;
  for (const auto& [us, vs] : uv) {
    auto u = std::make_shared<const Weight>(us.sample(S->grid));
    auto v = std::make_shared<const Weight>(vs.sample(S->grid));
    for (std::size_t fi = 0; fi < fs->size(); ++fi) {
      CheckCase cc;
      cc.function = (*fs)[fi].id;
      cc.weight = us.id() + "," + vs.id();
      cc.params = "p=" + num(p) + ",kappa=" + num(kappa);
      cc.eval = [=]() {
        const GridFunction& f = (*fs)[fi].f;
        const MorreyParams prm(p, kappa, *u, *v);
        const double nf = morrey_norm(f, prm, S->family).value;
        const NormReport nm = morrey_norm(maximal_function(f, MaximalKind::M, {}, S->family), prm, S->family);
        const double ns = morrey_norm(sharp_maximal(SemigroupSpec::heat(dim), f, S->family), prm, S->family).value;
        CaseOutcome o = norm_ratio(nm, ns, "norm chain");
        if (nf > nm.value * (1 + 1e-12)) o.violations = 1;
        return o;
      };
      cases.push_back(std::move(cc));
    }
  }
  return cases;
}

// --- BMO -------------------------------------------------------------------------------------------------

std::vector<WeightSpec> a1_weights(const CheckConfig& c) {
  return weights_or(c, {WeightSpec::power(-0.25), WeightSpec::power(-0.5)});
}

std::vector<CheckCase> equiv_cases(const CheckConfig& c, int n) {
  const auto S = setup(c, n);
  auto bs = std::make_shared<const std::vector<NamedFunction>>(test_symbols(S->grid));
  std::vector<CheckCase> cases;
  for (const auto& ws : a1_weights(c)) {
    auto w = std::make_shared<const Weight>(ws.sample(S->grid));
    for (std::size_t bi = 0; bi < bs->size(); ++bi) {
      CheckCase cc;
      cc.function = (*bs)[bi].id;
      cc.weight = ws.id();
      cc.params = "both directions";
      cc.eval = [=]() {
        const auto [a, b] = bmo_equivalence_ratio((*bs)[bi].f, *w, S->family);
        CaseOutcome o;
        o.ratio = std::max(a, b);
        return o;
      };
      cases.push_back(std::move(cc));
    }
  }
  return cases;
}

// sup_B (1/w(B)) int_B |b - b_B| w  vs  ||b||_*; it bounds |b_{B,w} - b_B|.
std::vector<CheckCase> mean_shift_cases(const CheckConfig& c, int n) {
  const auto S = setup(c, n);
  auto bs = std::make_shared<const std::vector<NamedFunction>>(test_symbols(S->grid));
  std::vector<CheckCase> cases;
  for (const auto& ws : a1_weights(c)) {
    auto w = std::make_shared<const Weight>(ws.sample(S->grid));
    for (std::size_t bi = 0; bi < bs->size(); ++bi) {
      CheckCase cc;
      cc.function = (*bs)[bi].id;
      cc.weight = ws.id();
      cc.params = "";
      cc.eval = [=]() {
        const GridFunction& b = (*bs)[bi].f;
        const Grid& g = S->grid;
        double best = -1;
        std::optional<Ball> arg;
        for (const Ball& B : S->family.balls()) {
          const double m = mean(b, B);
          double num_ = 0, den = 0;
          for_each_cell(g, B, [&](std::size_t i) {
            num_ += std::abs(b[i] - m) * (*w)[i];
            den += (*w)[i];
          });
          if (num_ / den > best) {
            best = num_ / den;
            arg = B;
          }
        }
        NormReport lhs;
        lhs.value = best;
        lhs.witness = arg;
        return norm_ratio(lhs, bmo_norm(b, nullptr, S->family).value, "weighted mean deviation");
      };
      cases.push_back(std::move(cc));
    }
  }
  return cases;
}

// --- weights ---------------------------------------------------------------------------------------------

std::vector<CheckCase> l7_cases(const CheckConfig& c, int) {
  std::vector<CheckCase> cases;
  for (double beta : {-0.75, -0.5, -0.25, 0.0, 0.25}) {
    for (double s : {1.25, 1.5, 2.5, 3.0}) {
      for (double p : {1.0, 1.5, 2.0}) {
        CheckCase cc;
        cc.function = "none";
        cc.weight = WeightSpec::power(beta).id();
        cc.params = "beta=" + num(beta) + ",s=" + num(s) + ",p=" + num(p);
        cc.eval = [=]() {
          const double b[] = {beta}, ss[] = {s}, ps[] = {p};
          const auto rows = check_ap_factorization(b, ss, ps, c.domain, c.policy, c.resolutions);
          CaseOutcome o;
          o.violations = rows.front().agree() ? 0 : 1;
          o.ratio = double(o.violations);
          return o;
        };
        cases.push_back(std::move(cc));
      }
    }
  }
  return cases;
}

std::vector<CheckCase> neg_a1_cases(const CheckConfig& c, int n) {
  const auto S = setup(c, n);
  const WeightSpec ws = *c.weight;
  CheckCase cc;
  cc.function = "none";
  cc.weight = ws.id();
  cc.params = "A_1";
  cc.eval = [=]() {
    const WeightCharacteristics a = a1_characteristic(ws.sample(S->grid), S->family);
    CaseOutcome o;
    o.ratio = a.value;
    o.ball = a.witness;
    return o;
  };
  return {cc};
}

// --- exact identities and contracts ----------------------------------------------------------------------

double unit_draw(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

std::vector<CheckCase> sigma_cases(const CheckConfig& c, int n) {
  const auto S = setup(c, n);
  const int dim = c.domain.dim;
  const std::uint64_t seed = c.seed;
  std::vector<CheckCase> cases;
  for (int m : {1, 2}) {
    for (int draw = 0; draw < 5; ++draw) {
      CheckCase cc;
      cc.function = "gauss:0.5";
      cc.weight = "none";
      cc.params = "m=" + std::to_string(m) + ",draw=" + std::to_string(draw);
      cc.eval = [=]() {
        std::mt19937_64 rng(seed ^ (std::uint64_t(m) << 32) ^ std::uint64_t(draw) ^ (std::uint64_t(n) << 40));
        const Grid& g = S->grid;
        const double R = g.half_width();
        CommutatorSpec spec;
        spec.alpha = 0.5 * dim;
        std::vector<double> lambda;
        for (int j = 0; j < m; ++j) {
          double a[3], b[3];
          for (int k = 0; k < 3; ++k) {
            a[k] = 2 * unit_draw(rng) - 1;
            b[k] = 2 * unit_draw(rng) - 1;
          }
          spec.b.push_back(GridFunction::from(g, [&](const Point& x) {
            double v = 0;
            for (int k = 0; k < 3; ++k) {
              v += a[k] * std::sin((k + 1) * std::numbers::pi * x[0] / R);
              if (dim == 2) v += b[k] * std::cos((k + 1) * std::numbers::pi * x[1] / R);
              else v += b[k] * std::cos((k + 1) * std::numbers::pi * x[0] / R);
            }
            return v;
          }));
          lambda.push_back(4 * unit_draw(rng) - 2);
        }
        const GridFunction f = make_function("gauss:0.5", g);
        const GridFunction direct = multilinear_commutator(spec, f);
        const GridFunction expanded = sigma_expansion(spec, lambda, f);
        const double scale = direct.max_abs();
        if (scale == 0) throw DegenerateRatioError("commutator vanishes identically");
        CaseOutcome o;
        o.ratio = 0;
        for (std::size_t i = 0; i < direct.size(); ++i) {
          const double d = std::abs(direct[i] - expanded[i]) / scale;
          if (d > o.ratio || !o.point) {
            o.ratio = d;
            o.point = i;
          }
        }
        return o;
      };
      cases.push_back(std::move(cc));
    }
  }
  return cases;
}

std::vector<CheckCase> triv_comm_cases(const CheckConfig& c, int n) {
  const auto S = setup(c, n);
  const int dim = c.domain.dim;
  const std::vector<std::vector<std::string>> symbol_sets = {
      {"const:2.5"}, {"const:2.5", "const:-1"}, {"const:2.5", "const:-1", "const:0.75"},
      {"const:2.5", "log"}, {"log", "const:-1", "sin"}};
  std::vector<CheckCase> cases;
  for (const auto& syms : symbol_sets) {
    for (const char* fid : {"gauss:0.5", "osc"}) {
      CheckCase cc;
      cc.function = fid;
      cc.weight = "none";
      std::string label;
      for (const auto& s : syms) label += (label.empty() ? "" : "*") + s;
      cc.params = "m=" + std::to_string(syms.size()) + ",b=" + label;
      cc.eval = [=]() {
        CommutatorSpec spec;
        spec.alpha = 0.5 * dim;
        for (const auto& s : syms) spec.b.push_back(make_function(s, S->grid));
        const GridFunction out = multilinear_commutator(spec, make_function(fid, S->grid));
        CaseOutcome o;
        o.ratio = 0;
        for (std::size_t i = 0; i < out.size(); ++i) {
          if (std::abs(out[i]) > o.ratio || !o.point) {
            o.ratio = std::abs(out[i]);
            o.point = i;
          }
        }
        return o;
      };
      cases.push_back(std::move(cc));
    }
  }
  return cases;
}

std::vector<CheckCase> oracle_cases(const CheckConfig& c, int n) {
  const auto S = setup(c, n);
  const int dim = c.domain.dim;
  const int quad_nodes = c.quad_nodes;
  std::vector<CheckCase> cases;
  for (double alpha : {0.25, 0.5, 0.75 * dim}) {
    for (const char* fid : {"gauss:0.5", "gauss:1", "osc"}) {
      CheckCase cc;
      cc.function = fid;
      cc.weight = "none";
      cc.params = "alpha=" + num(alpha) + ",interior=50%";
      cc.eval = [=]() {
        const Grid& g = S->grid;
        const GridFunction f = make_function(fid, g);
        TimeQuadrature quad;
        quad.nodes = quad_nodes;
        const GridFunction a = generalized_fractional(SemigroupSpec::heat(dim), f, alpha, quad);
        const GridFunction b = riesz_potential(f, alpha);
        const double half = 0.5 * g.half_width();
        double num_ = 0, den = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
          const Point x = g.point(i);
          if (std::abs(x[0]) > half || (dim == 2 && std::abs(x[1]) > half)) continue;
          num_ += (a[i] - b[i]) * (a[i] - b[i]);
          den += b[i] * b[i];
        }
        CaseOutcome o;
        o.ratio = std::sqrt(num_ / den);
        return o;
      };
      cases.push_back(std::move(cc));
    }
  }
  return cases;
}

std::vector<CheckCase> maxpt_cases(const CheckConfig& c, int n) {
  const auto S = setup(c, n);
  auto fs = std::make_shared<const std::vector<NamedFunction>>(test_functions(S->grid));
  auto w1 = std::make_shared<const Weight>(WeightSpec::power(-0.25).sample(S->grid));
  auto w2 = std::make_shared<const Weight>(WeightSpec::power(-0.5).sample(S->grid));
  struct Variant {
    const char* label;
    MaximalKind kind;
    double r;
    std::shared_ptr<const Weight> w;
  };
  const std::vector<Variant> variants = {{"M", MaximalKind::M, 1, nullptr},
                                         {"M_w|x|^-0.25", MaximalKind::Mw, 1, w1},
                                         {"M_w|x|^-0.5", MaximalKind::Mw, 1, w2},
                                         {"M_0,2", MaximalKind::MAlphaR, 2, nullptr},
                                         {"M_2,w|x|^-0.25", MaximalKind::MAlphaRW, 2, w1}};
  std::vector<CheckCase> cases;
  for (const auto& v : variants) {
    for (std::size_t fi = 0; fi < fs->size(); ++fi) {
      CheckCase cc;
      cc.function = (*fs)[fi].id;
      cc.weight = v.w ? (v.w == w1 ? "power:-0.25" : "power:-0.5") : "none";
      cc.params = v.label;
      cc.eval = [=]() {
        const GridFunction& f = (*fs)[fi].f;
        const GridFunction mf = maximal_function(f, v.kind, {0.0, v.r, v.w.get()}, S->family);
        CaseOutcome o;
        o.ratio = 0;
        for (std::size_t i = 0; i < f.size(); ++i) {
          const double gap = std::abs(f[i]) - mf[i];
          if (gap > 0) {
            ++o.violations;
            if (gap > o.ratio) {
              o.ratio = gap;
              o.point = i;
            }
          }
        }
        return o;
      };
      cases.push_back(std::move(cc));
    }
  }
  return cases;
}

std::vector<CheckCase> kolm_cases(const CheckConfig& c, int n) {
  const Grid g = c.domain.at(n);
  const std::uint64_t seed = c.seed;
  const double l = 2, r = 1;
  const double upper = std::pow(l / (l - r), 1 / r);
  std::vector<CheckCase> cases;
  for (int k = 0; k < 1000; ++k) {
    CheckCase cc;
    cc.function = "random#" + std::to_string(k);
    cc.weight = "none";
    cc.params = "l=2,r=1";
    cc.eval = [=]() {
      std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * std::uint64_t(k + 1));
      GridFunction f(g);
      const bool ties = k % 10 == 0;  // small integer values exercise equal level sets
      const double density = 0.05 + 0.9 * unit_draw(rng);
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (unit_draw(rng) >= density) continue;
        const double mag = ties ? double(1 + (rng() % 3)) : -std::log(1 - unit_draw(rng));
        f[i] = (rng() & 1) ? mag : -mag;
      }
      f[rng() % f.size()] = 1.0;
      const double weak = weak_norm(f, l);
      const double kn = kolmogorov_functional(f, l, r);
      CaseOutcome o;
      o.ratio = std::max(weak / kn, kn / (upper * weak));
      const double slack = 1e-13;
      if (kn < weak * (1 - slack) || kn > upper * weak * (1 + slack)) o.violations = 1;
      return o;
    };
    cases.push_back(std::move(cc));
  }
  return cases;
}

std::vector<CheckCase> gauss_cases(const CheckConfig& c, int n) {
  const Grid g = c.domain.at(n);
  const int dim = c.domain.dim;
  std::vector<CheckCase> cases;
  for (double s : {4.0, 2.0}) {
    CheckCase cc;
    cc.function = s == 4.0 ? "heat" : "gaussian-profile:2";
    cc.weight = "none";
    cc.params = "t in [h^2/4, (8R)^2], rho in {0, h 2^k}";
    cc.eval = [=]() {
      const SemigroupSpec spec = s == 4.0 ? SemigroupSpec::heat(dim) : SemigroupSpec::gaussian_profile(dim, s);
      const double h = g.spacing();
      std::vector<double> ts, rhos{0.0};
      for (double t = h * h / 4; t <= 64 * g.half_width() * g.half_width() * 1.0000001; t *= 2) ts.push_back(t);
      for (double rho = h; rho <= 2 * g.half_width() * std::sqrt(double(dim)); rho *= 2) rhos.push_back(rho);
      const GaussianBoundAudit a = audit_gaussian_bound(spec, ts, rhos, &g);
      const ProfileAudit pa = audit_profile(spec);
      CaseOutcome o;
      o.ratio = a.max_ratio;
      o.violations = a.violations + pa.violations.size();
      return o;
    };
    cases.push_back(std::move(cc));
  }
  return cases;
}

std::vector<CheckDef> build_registry() {
  using L = CheckDef::Ladder;
  std::vector<CheckDef> r;
  auto stable = [&](std::string id, std::string desc, auto cases) {
    CheckDef d;
    d.id = std::move(id);
    d.description = std::move(desc);
    d.criterion = Criterion::Stability;
    d.tolerance = -1;
    d.cases = cases;
    return d;
  };
  auto exact = [&](std::string id, std::string desc, double tol, auto cases) {
    CheckDef d;
    d.id = std::move(id);
    d.description = std::move(desc);
    d.criterion = Criterion::Exact;
    d.tolerance = tol;
    d.cases = cases;
    return d;
  };
  auto thm_gate = [](const CheckConfig& c, Json& d) { return theorem_gate(c, d, weight_or(c, kA1Weight)); };

  CheckDef thm1 = stable("CHK-THM1", "commutator bound L^{p,kappa}(w) -> L^{q,kappa q/p}(w^{q/p}, w)", thm1_cases);
  thm1.gate = thm_gate;
  r.push_back(thm1);

  r.push_back(stable("CHK-L16", "pointwise sharp maximal estimate of the commutator", l16_cases));
  r.push_back(stable("CHK-L15", "semigroup means of (b - b_B)_sigma f against M_{tau,w} f", l15_cases));

  CheckDef l14 = stable("CHK-L14", "difference kernel ratio |K~| rho^{n-alpha+2} / t", l14_cases);
  l14.tolerance = 1.1;
  l14.ladder = L::Nodes;
  r.push_back(l14);

  CheckDef l12 = stable("CHK-L12", "Morrey bound for L^{-alpha/2}",
                        [](const CheckConfig& c, int n) { return morrey_cases(c, n, {MorreyOp::Generalized}); });
  l12.gate = thm_gate;
  r.push_back(l12);

  CheckDef l9 = stable("CHK-L9", "Morrey bounds for M_{alpha,1} and I_alpha", [](const CheckConfig& c, int n) {
    return morrey_cases(c, n, {MorreyOp::MAlpha1, MorreyOp::RieszPotential});
  });
  l9.gate = thm_gate;
  r.push_back(l9);

  CheckDef l10 = stable("CHK-L10", "M_{r,w} bounded on L^{q,kappa q/p}(w^{q/p}, w)",
                        [](const CheckConfig& c, int n) { return morrey_cases(c, n, {MorreyOp::MrW}); });
  l10.gate = thm_gate;
  r.push_back(l10);

  r.push_back(stable("CHK-L11", "M_{alpha,r,w}: L^{p,kappa}(w) -> L^{q,kappa q/p}(w)",
                     [](const CheckConfig& c, int n) { return morrey_cases(c, n, {MorreyOp::MAlphaRW}); }));
  r.push_back(stable("CHK-CHAIN", "||f|| <= ||Mf|| (exact) and ||Mf|| / ||M^#f|| (stable) in L^{p,kappa}(u,v)",
                     chain_cases));
  r.push_back(stable("CHK-WEAK", "weak (1, n/(n-alpha)) bound for L^{-alpha/2}", weak_cases));
  r.push_back(exact("CHK-KOLM", "Kolmogorov sandwich at (l, r) = (2, 1); ratio <= 1 means both bounds hold",
                    1 + 1e-13, kolm_cases));
  r.back().ladder = L::Whole;

  CheckDef l7;
  l7.id = "CHK-L7";
  l7.description = "w^s in A_p iff w in A_{1+(p-1)/s} and w in RH_s (p = 1 is A_1)";
  l7.criterion = Criterion::Agreement;
  l7.tolerance = 0;
  l7.ladder = L::Whole;
  l7.cases = l7_cases;
  r.push_back(l7);

  r.push_back(stable("CHK-EQUIV", "BMO(w) and BMO norm ratios, both directions", equiv_cases));
  r.push_back(stable("CHK-EQ21", "weighted mean deviation from b_B against ||b||_*", mean_shift_cases));
  r.push_back(exact("CHK-GAUSS", "Gaussian upper bound of continuum and discrete kernels", 1 + 1e-12, gauss_cases));
  r.push_back(exact("CHK-SIGMA", "subset expansion identity of the commutator", 1e-10, sigma_cases));
  r.push_back(exact("CHK-TRIV-COMM", "commutator with a constant symbol vanishes", 1e-12, triv_comm_cases));
  r.push_back(exact("CHK-ORACLE-IA", "semigroup fractional integral against the Riesz potential", 1e-3, oracle_cases));
  r.push_back(exact("CHK-MAXPT", "maximal functions dominate |f| pointwise", 0.0, maxpt_cases));

  CheckDef neg_a1 = stable("CHK-NEG-A1", "A_1 characteristic of |x|^{+1}; must blow up under refinement",
                           neg_a1_cases);
  neg_a1.negative_control = true;
  neg_a1.expected = Verdict::Fail;
  neg_a1.forced_weight = WeightSpec::power(1.0);
  r.push_back(neg_a1);

  CheckDef neg_thm1 = thm1;
  neg_thm1.id = "CHK-NEG-THM1";
  neg_thm1.description = "main theorem with w = |x|^{+1}; the A_1 hypothesis must gate it";
  neg_thm1.negative_control = true;
  neg_thm1.expected = Verdict::HypothesisGated;
  neg_thm1.forced_weight = WeightSpec::power(1.0);
  r.push_back(neg_thm1);
  return r;
}

}  // namespace

const std::vector<CheckDef>& registry() {
  static const std::vector<CheckDef> reg = build_registry();
  return reg;
}

const std::vector<std::pair<std::string, std::string>>& coverage_manifest() {
  static const std::vector<std::pair<std::string, std::string>> m = {
      {"Gaussian upper bound of the semigroup kernel", "CHK-GAUSS"},
      {"approximation of the identity built from the kernel profile", "CHK-GAUSS"},
      {"fractional integral generated by the semigroup", "CHK-ORACLE-IA"},
      {"classical fractional integral and its constant", "CHK-ORACLE-IA"},
      {"multilinear commutator definition", "CHK-TRIV-COMM"},
      {"main theorem: two-weight Morrey bound for the commutator", "CHK-THM1"},
      {"end-to-end proof chain by induction on m", "CHK-THM1"},
      {"weighted and two-weight Morrey spaces", "CHK-CHAIN"},
      {"Muckenhoupt and reverse Hoelder classes", "CHK-L7"},
      {"A_1^s = A_1 cap RH_s", "CHK-L7"},
      {"maximal operators M, M_w, M_{alpha,r}, M_{alpha,r,w}", "CHK-MAXPT"},
      {"BMO(w) and its equivalence with BMO", "CHK-EQUIV"},
      {"subset notation sigma, sigma', C_j^m", "CHK-SIGMA"},
      {"expansion of (b(z) - lambda)_sigma'", "CHK-SIGMA"},
      {"norm chain after the good-lambda inequality", "CHK-CHAIN"},
      {"Morrey bounds for M_{alpha,1} and I_alpha", "CHK-L9"},
      {"Morrey bound for M_{r,w}", "CHK-L10"},
      {"Morrey bound for M_{alpha,r,w}", "CHK-L11"},
      {"Morrey bound for L^{-alpha/2}", "CHK-L12"},
      {"weak type (1, n/(n-alpha)) of L^{-alpha/2}", "CHK-WEAK"},
      {"difference kernel bound", "CHK-L14"},
      {"semigroup mean estimate with t_B = r_B^2", "CHK-L15"},
      {"pointwise sharp maximal estimate", "CHK-L16"},
      {"Kolmogorov inequality", "CHK-KOLM"},
      {"weighted mean deviation bound", "CHK-EQ21"},
  };
  return m;
}

}  // namespace mlab
