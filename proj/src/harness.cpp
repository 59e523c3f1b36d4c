#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "mlab/error.hpp"
#include "mlab/harness.hpp"
#include "mlab/parallel.hpp"

namespace mlab {
namespace {

Json ratio_json(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

// Re-raises the active error with the check id and ladder level prepended, keeping its type.
[[noreturn]] void rethrow_annotated(const std::string& where) {
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const DegenerateRatioError& e) {
    throw DegenerateRatioError(where + ": " + e.what());
  } catch (const AccuracyError& e) {
    throw AccuracyError(where + ": " + e.what());
  } catch (const DiagnosticError& e) {
    throw DiagnosticError(where + ": " + e.what());
  } catch (const RegistryError&) {
    throw;
  } catch (const Error& e) {
    throw Error(where + ": " + e.what());
  }
}

std::vector<int> ladder_for(const CheckDef& def, const CheckConfig& cfg) {
  switch (def.ladder) {
    case CheckDef::Ladder::Nodes:
      return cfg.node_counts;
    case CheckDef::Ladder::Whole:
      return {cfg.resolutions.back()};
    case CheckDef::Ladder::Grid:
      break;
  }
  return cfg.resolutions;
}

void require_increasing(const std::vector<int>& v, const std::string& what) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] <= v[i - 1]) throw ConfigError(what + " must be strictly increasing");
  }
}

CheckConfig effective(const CheckDef& def, const CheckConfig& cfg) {
  CheckConfig eff = cfg;
  if (def.forced_weight) eff.weight = def.forced_weight;
  return eff;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "PASS";
    case Verdict::Fail:
      return "FAIL";
    case Verdict::HypothesisGated:
      return "hypothesis-gated";
  }
  return "?";
}

static const char* criterion_name(Criterion c) {
  switch (c) {
    case Criterion::Stability:
      return "finite-and-stable";
    case Criterion::Exact:
      return "exact";
    case Criterion::Agreement:
      return "verdict-agreement";
  }
  return "?";
}

Json CheckReport::to_json() const {
  Json j;
  j["id"] = id;
  j["toolkit_version"] = kToolkitVersion;
  j["config_hash"] = config_hash;
  j["criterion"] = criterion_name(criterion);
  j["tolerance"] = tolerance;
  Json levels = Json::array();
  for (const auto& r : resolutions) {
    Json w;
    w["case"] = r.witness.case_index;
    w["function"] = r.witness.function;
    w["weight"] = r.witness.weight;
    w["params"] = r.witness.params;
    if (r.witness.point) {
      w["point"] = *r.witness.point;
      w["x"] = r.witness.location;
    } else {
      w["point"] = nullptr;
    }
    if (r.witness.ball) {
      w["ball"] = {{"center", {r.witness.ball->center[0], r.witness.ball->center[1]}},
                   {"radius", r.witness.ball->radius}};
    } else {
      w["ball"] = nullptr;
    }
    levels.push_back({{"N", r.n},
                      {"max_ratio", ratio_json(r.max_ratio)},
                      {"cases", r.cases},
                      {"violations", r.violations},
                      {"witness", w}});
  }
  j["resolutions"] = levels;
  Json tr = Json::array();
  for (double t : trends) tr.push_back(ratio_json(t));
  j["trends"] = tr;
  j["verdict"] = verdict_name(verdict);
  j["negative_control"] = negative_control;
  j["expected"] = verdict_name(expected);
  j["as_expected"] = as_expected();
  j["details"] = details;
  return j;
}

std::vector<std::string> registry_ids() {
  std::vector<std::string> ids;
  for (const auto& d : registry()) ids.push_back(d.id);
  return ids;
}

const CheckDef& find_check(const std::string& id) {
  for (const auto& d : registry()) {
    if (d.id == id) return d;
  }
  std::ostringstream os;
  os << "unknown check id '" << id << "'; known ids:";
  for (const auto& k : registry_ids()) os << ' ' << k;
  throw RegistryError(os.str());
}

CheckReport run_check(const std::string& id, const CheckConfig& cfg) {
  const CheckDef& def = find_check(id);
  const auto start = std::chrono::steady_clock::now();
  const CheckConfig eff = effective(def, cfg);

  CheckReport rep;
  rep.id = def.id;
  rep.config_hash = cfg.config_hash;
  rep.criterion = def.criterion;
  rep.tolerance = def.tolerance < 0 ? cfg.stability_bound : def.tolerance;
  rep.negative_control = def.negative_control;
  rep.expected = def.expected;
  rep.details["description"] = def.description;
  if (eff.weight) rep.details["weight_override"] = eff.weight->id();

  const std::vector<int> ladder = ladder_for(def, eff);
  if (ladder.empty()) throw ConfigError(id + ": empty resolution list");
  require_increasing(ladder, id + " resolutions");
  if (def.criterion == Criterion::Stability && ladder.size() < 2) {
    throw ConfigError(id + ": stability checks need at least two resolutions");
  }

  if (def.gate) {
    std::optional<std::string> reason;
    try {
      reason = def.gate(eff, rep.details);
    } catch (...) {
      rethrow_annotated(id + " (hypothesis gate)");
    }
    if (reason) {
      rep.verdict = Verdict::HypothesisGated;
      rep.details["gate_reason"] = *reason;
      rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return rep;
    }
  }

  for (int n : ladder) {
    const std::string where = id + " at " + (def.ladder == CheckDef::Ladder::Nodes ? "nodes=" : "N=") +
                              std::to_string(n);
    try {
      const std::vector<CheckCase> cases = def.cases(eff, n);
      std::vector<CaseOutcome> out(cases.size());
      parallel_for(cases.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) out[i] = cases[i].eval();
      });
      ResolutionResult r;
      r.n = n;
      r.cases = cases.size();
      r.max_ratio = -std::numeric_limits<double>::infinity();
      std::size_t best = 0;
      for (std::size_t i = 0; i < out.size(); ++i) {
        double v = out[i].ratio;
        if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
        r.violations += out[i].violations;
        if (v > r.max_ratio) {
          r.max_ratio = v;
          best = i;
        }
      }
      if (!cases.empty()) {
        r.witness.case_index = best;
        r.witness.function = cases[best].function;
        r.witness.weight = cases[best].weight;
        r.witness.params = cases[best].params;
        r.witness.point = out[best].point;
        if (r.witness.point && def.ladder != CheckDef::Ladder::Nodes) {
          const Grid g = eff.domain.at(n);
          const Point p = g.point(*r.witness.point);
          r.witness.location.assign(p.begin(), p.begin() + g.dim());
        }
        r.witness.ball = out[best].ball;
      }
      rep.resolutions.push_back(r);
      if (!std::isfinite(r.max_ratio) && def.criterion == Criterion::Stability) {
        rep.details["aborted_after"] = n;
        break;
      }
    } catch (...) {
      rethrow_annotated(where);
    }
  }

  for (std::size_t k = 1; k < rep.resolutions.size(); ++k) {
    const double a = rep.resolutions[k - 1].max_ratio, b = rep.resolutions[k].max_ratio;
    rep.trends.push_back(a == 0 && b == 0 ? 1.0 : b / a);
  }

  bool ok = true;
  for (const auto& r : rep.resolutions) {
    if (r.violations > 0 || !std::isfinite(r.max_ratio)) ok = false;
    if (def.criterion == Criterion::Exact && !(r.max_ratio <= rep.tolerance)) ok = false;
    if (def.criterion == Criterion::Agreement && r.max_ratio != 0) ok = false;
  }
  if (def.criterion == Criterion::Stability) {
    if (rep.resolutions.size() != ladder.size()) ok = false;
    for (double t : rep.trends) {
      if (!(t <= rep.tolerance)) ok = false;
    }
  }
  rep.verdict = ok ? Verdict::Pass : Verdict::Fail;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

double replay_witness(const std::string& id, const CheckConfig& cfg, const ResolutionResult& r) {
  const CheckDef& def = find_check(id);
  const std::vector<CheckCase> cases = def.cases(effective(def, cfg), r.n);
  if (r.witness.case_index >= cases.size()) throw RegistryError(id + ": witness case out of range");
  return cases[r.witness.case_index].eval().ratio;
}

TrendTable refinement_study(const std::string& id, const CheckConfig& cfg, std::span<const int> resolutions) {
  const CheckDef& def = find_check(id);
  if (resolutions.size() < 2) throw ConfigError("refinement study needs at least two resolutions");
  CheckConfig c = cfg;
  std::vector<int> levels(resolutions.begin(), resolutions.end());
  require_increasing(levels, "refinement resolutions");
  if (def.ladder == CheckDef::Ladder::Nodes) {
    c.node_counts = levels;
  } else {
    c.resolutions = levels;
  }
  const CheckReport rep = run_check(id, c);
  TrendTable t;
  for (const auto& r : rep.resolutions) {
    t.resolutions.push_back(r.n);
    t.max_ratio.push_back(r.max_ratio);
  }
  t.trends = rep.trends;
  const double bound = def.tolerance < 0 || def.criterion != Criterion::Stability ? cfg.stability_bound
                                                                                  : def.tolerance;
  t.pass = rep.verdict != Verdict::HypothesisGated && t.resolutions.size() == levels.size();
  for (std::size_t k = 0; k < t.max_ratio.size(); ++k) {
    if (!std::isfinite(t.max_ratio[k])) t.pass = false;
  }
  for (double tr : t.trends) {
    if (!(tr <= bound)) t.pass = false;
  }
  if (def.criterion != Criterion::Stability && rep.verdict == Verdict::Fail) t.pass = false;
  return t;
}

RatioEstimate estimate_norm_ratio(const Operator& T, const NormFn& source, const NormFn& target,
                                  const std::vector<NamedFunction>& family) {
  if (family.empty()) throw ConfigError("estimate_norm_ratio: empty test family");
  RatioEstimate best;
  best.value = -1;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double s = source(family[i].f);
    if (!(s > 0)) throw DegenerateRatioError("degenerate input: source norm of '" + family[i].id + "' is zero");
    const double v = target(T(family[i].f)) / s;
    if (v > best.value) {
      best.value = v;
      best.witness = i;
      best.witness_id = family[i].id;
    }
  }
  return best;
}

}  // namespace mlab
