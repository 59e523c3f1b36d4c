#include "mlab/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "mlab/error.hpp"
#include "mlab/operators.hpp"
#include "mlab/parallel.hpp"
#include "mlab/spaces.hpp"

namespace mlab {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x))
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size()) throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  return x;
}

std::uint64_t to_uint64(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError("key '" + key + "': expected an unsigned 64-bit integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

template <class T, class Conv>
std::vector<T> to_list(const std::string& key, const std::string& v, Conv conv) {
  std::vector<T> out;
  for (const auto& item : split_list(v)) out.push_back(static_cast<T>(conv(key, item)));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

template <class T>
std::string join_numbers(const std::vector<T>& v) {
  std::vector<std::string> parts;
  for (const T& x : v) {
    if constexpr (std::is_integral_v<T>) {
      parts.push_back(std::to_string(x));
    } else {
      parts.push_back(fmt(x));
    }
  }
  return join(parts);
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s = {
      {"grid.dim", [](RunConfig& c, auto& k, auto& v) { c.dim = int(to_int(k, v)); }},
      {"grid.R", [](RunConfig& c, auto& k, auto& v) { c.R = to_double(k, v); }},
      {"grid.N", [](RunConfig& c, auto& k, auto& v) { c.N = int(to_int(k, v)); }},
      {"grid.resolutions", [](RunConfig& c, auto& k, auto& v) { c.resolutions = to_list<int>(k, v, to_int); }},
      {"balls.stride", [](RunConfig& c, auto& k, auto& v) { c.stride = int(to_int(k, v)); }},
      {"balls.origin", [](RunConfig& c, auto& k, auto& v) { c.origin = to_bool(k, v); }},
      {"balls.single_cell", [](RunConfig& c, auto& k, auto& v) { c.single_cell = to_bool(k, v); }},
      {"balls.origin_only", [](RunConfig& c, auto& k, auto& v) { c.origin_only = to_bool(k, v); }},
      {"balls.domain_ball", [](RunConfig& c, auto& k, auto& v) { c.domain_ball = to_bool(k, v); }},
      {"params.alpha", [](RunConfig& c, auto& k, auto& v) { c.alpha = to_double(k, v); }},
      {"params.p", [](RunConfig& c, auto& k, auto& v) { c.p = to_double(k, v); }},
      {"params.q", [](RunConfig& c, auto& k, auto& v) { c.q = to_double(k, v); }},
      {"params.kappa", [](RunConfig& c, auto& k, auto& v) { c.kappa = to_double(k, v); }},
      {"params.r", [](RunConfig& c, auto& k, auto& v) { c.r = to_double(k, v); }},
      {"params.tau", [](RunConfig& c, auto& k, auto& v) { c.tau = to_double(k, v); }},
      {"params.m", [](RunConfig& c, auto& k, auto& v) { c.m = int(to_int(k, v)); }},
      {"params.weight", [](RunConfig& c, auto&, auto& v) { c.weight = v; }},
      {"params.function", [](RunConfig& c, auto&, auto& v) { c.function = v; }},
      {"params.b", [](RunConfig& c, auto&, auto& v) { c.b = split_list(v); }},
      {"params.t", [](RunConfig& c, auto& k, auto& v) { c.t = to_double(k, v); }},
      {"params.quad_nodes", [](RunConfig& c, auto& k, auto& v) { c.quad_nodes = int(to_int(k, v)); }},
      {"params.quad_tmin", [](RunConfig& c, auto& k, auto& v) { c.quad_tmin = to_double(k, v); }},
      {"params.quad_tmax", [](RunConfig& c, auto& k, auto& v) { c.quad_tmax = to_double(k, v); }},
      {"params.rh_tol", [](RunConfig& c, auto& k, auto& v) { c.rh_tol = to_double(k, v); }},
      {"params.r_max", [](RunConfig& c, auto& k, auto& v) { c.r_max = to_double(k, v); }},
      {"params.growth_factor", [](RunConfig& c, auto& k, auto& v) { c.growth_factor = to_double(k, v); }},
      {"params.stability_bound", [](RunConfig& c, auto& k, auto& v) { c.stability_bound = to_double(k, v); }},
      {"params.seed", [](RunConfig& c, auto& k, auto& v) { c.seed = to_uint64(k, v); }},
      {"params.operator", [](RunConfig& c, auto&, auto& v) { c.op = v; }},
      {"params.maximal_kind", [](RunConfig& c, auto&, auto& v) { c.maximal_kind = v; }},
      {"params.norm", [](RunConfig& c, auto&, auto& v) { c.norm = v; }},
      {"params.l", [](RunConfig& c, auto& k, auto& v) { c.l = to_double(k, v); }},
      {"params.p_list", [](RunConfig& c, auto& k, auto& v) { c.p_list = to_list<double>(k, v, to_double); }},
      {"params.r_list", [](RunConfig& c, auto& k, auto& v) { c.r_list = to_list<double>(k, v, to_double); }},
      {"checks.ids", [](RunConfig& c, auto&, auto& v) { c.ids = split_list(v); }},
      {"checks.threads", [](RunConfig& c, auto& k, auto& v) { c.threads = int(to_int(k, v)); }},
      {"output.dir", [](RunConfig& c, auto&, auto& v) { c.out_dir = v; }},
  };
  return s;
}

bool known_function(const std::string& spec) {
  static const std::set<std::string> heads = {"gauss", "chi", "osc", "cusp", "log", "sin", "xsmooth", "const", "power", "csv"};
  return heads.count(spec.substr(0, spec.find(':'))) > 0;
}

}  // namespace

void validate_config(const RunConfig& c) {
  std::vector<std::string> v;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) v.push_back(msg);
  };
  need(c.dim == 1 || c.dim == 2, "dim must be 1 or 2: dim=" + std::to_string(c.dim));
  need(c.R > 0, "R must be positive: R=" + fmt(c.R));
  need(c.N >= 8 && c.N % 2 == 0, "N must be even and >= 8: N=" + std::to_string(c.N));
  need(!c.resolutions.empty(), "resolutions must not be empty");
  for (std::size_t i = 0; i < c.resolutions.size(); ++i) {
    need(c.resolutions[i] >= 8 && c.resolutions[i] % 2 == 0,
         "resolutions must be even and >= 8: " + std::to_string(c.resolutions[i]));
    if (i) need(c.resolutions[i] > c.resolutions[i - 1], "resolutions must be strictly increasing");
  }
  need(c.stride >= 1, "stride must be >= 1");
  need(c.m >= 1, "m must be >= 1: m=" + std::to_string(c.m));
  need(int(c.b.size()) == c.m, "b must list m symbols: m=" + std::to_string(c.m) + ", got " +
                                   std::to_string(c.b.size()));
  for (const auto& s : c.b) need(known_function(s), "unknown b selector: " + s);
  need(known_function(c.function), "unknown function selector: " + c.function);
  if (c.weight) {
    try {
      (void)WeightSpec::parse(*c.weight);
    } catch (const Error& e) {
      v.push_back(e.what());
    }
  }
  need(c.r >= 1, "r >= 1 violated: r=" + fmt(c.r));
  need(c.tau > 1, "tau > 1 violated: tau=" + fmt(c.tau));
  need(c.t > 0, "t > 0 violated: t=" + fmt(c.t));
  need(c.quad_nodes >= 8, "quad_nodes must be >= 8: quad_nodes=" + std::to_string(c.quad_nodes));
  need(c.quad_tmin >= 0 && c.quad_tmax >= 0, "quad_tmin and quad_tmax must be >= 0");
  if (c.quad_tmin > 0 && c.quad_tmax > 0) need(c.quad_tmin < c.quad_tmax, "quad_tmin < quad_tmax violated");
  need(c.rh_tol > 0, "rh_tol must be positive");
  need(c.r_max > 1, "r_max must be > 1");
  need(c.growth_factor > 1, "growth_factor must be > 1");
  need(c.stability_bound >= 1, "stability_bound must be >= 1");
  need(c.threads >= 0, "threads must be >= 0");
  need(c.l > 0, "l must be positive");
  for (double p : c.p_list) need(p >= 1, "p_list entries must be >= 1: " + fmt(p));
  for (double r : c.r_list) need(r > 1, "r_list entries must be > 1: " + fmt(r));
  static const std::set<std::string> ops = {"heat", "riesz", "generalized", "commutator", "maximal", "sharp"};
  need(ops.count(c.op) > 0, "unknown operator: " + c.op);
  static const std::set<std::string> kinds = {"M", "Mw", "MAlphaR", "MAlphaRW"};
  need(kinds.count(c.maximal_kind) > 0, "unknown maximal_kind: " + c.maximal_kind);
  static const std::set<std::string> norms = {"morrey", "lebesgue", "bmo", "weak", "kolmogorov"};
  need(norms.count(c.norm) > 0, "unknown norm: " + c.norm);

  // Parameter tuple of the main theorem.
  const double n = c.dim, a = c.alpha_value(), p = c.p_value(), k = c.kappa_value();
  const bool alpha_ok = a > 0 && a < n;
  need(alpha_ok, "0 < α < n violated: α=" + fmt(a) + ", n=" + fmt(n));
  if (alpha_ok) need(p > 1 && p < n / a, "1 < p < n/α violated: p=" + fmt(p) + ", n/α=" + fmt(n / a));
  const double inv_q = 1 / p - a / n;
  if (c.q) {
    if (std::abs(1 / *c.q - inv_q) > 1e-12)
      v.push_back("1/q = 1/p − α/n violated: p=" + fmt(p) + ", α=" + fmt(a) + ", q=" + fmt(*c.q));
  }
  if (alpha_ok && std::abs(inv_q) <= 1e-15) {
    v.push_back("q = ∞ not supported: 1/p − α/n = 0 for p=" + fmt(p) + ", α=" + fmt(a) + ", n=" + fmt(n));
  } else if (alpha_ok && inv_q > 0) {
    const double q = 1 / inv_q;
    need(k >= 0 && k < p / q, "0 ≤ κ < p/q violated: κ=" + fmt(k) + ", p/q=" + fmt(p / q));
  }
  if (!v.empty()) throw ConfigError(v);
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::vector<std::string> errors;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> sections = {"grid", "balls", "params", "checks", "output"};
      if (!sections.count(section)) errors.push_back("unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      errors.push_back("unknown key '" + key + "'");
      continue;
    }
    if (!seen.insert(key).second) {
      errors.push_back("duplicate key '" + key + "'");
      continue;
    }
    try {
      it->second(c, key, value);
    } catch (const ConfigError& e) {
      errors.push_back(e.what());
    }
  }
  try {
    validate_config(c);
  } catch (const ConfigError& e) {
    errors.insert(errors.end(), e.violations().begin(), e.violations().end());
  }
  if (!errors.empty()) throw ConfigError(errors);
  return c;
}

std::string to_ini(const RunConfig& c) {
  std::ostringstream os;
  os << "[grid]\n"
     << "dim = " << c.dim << "\n"
     << "R = " << fmt(c.R) << "\n"
     << "N = " << c.N << "\n"
     << "resolutions = " << join_numbers(c.resolutions) << "\n\n";
  os << "[balls]\n"
     << "stride = " << c.stride << "\n"
     << "origin = " << (c.origin ? "true" : "false") << "\n"
     << "single_cell = " << (c.single_cell ? "true" : "false") << "\n"
     << "origin_only = " << (c.origin_only ? "true" : "false") << "\n"
     << "domain_ball = " << (c.domain_ball ? "true" : "false") << "\n\n";
  os << "[params]\n";
  if (c.alpha) os << "alpha = " << fmt(*c.alpha) << "\n";
  if (c.p) os << "p = " << fmt(*c.p) << "\n";
  if (c.q) os << "q = " << fmt(*c.q) << "\n";
  if (c.kappa) os << "kappa = " << fmt(*c.kappa) << "\n";
  os << "r = " << fmt(c.r) << "\n"
     << "tau = " << fmt(c.tau) << "\n"
     << "m = " << c.m << "\n";
  if (c.weight) os << "weight = " << *c.weight << "\n";
  os << "function = " << c.function << "\n"
     << "b = " << join(c.b) << "\n"
     << "t = " << fmt(c.t) << "\n"
     << "quad_nodes = " << c.quad_nodes << "\n"
     << "quad_tmin = " << fmt(c.quad_tmin) << "\n"
     << "quad_tmax = " << fmt(c.quad_tmax) << "\n"
     << "rh_tol = " << fmt(c.rh_tol) << "\n"
     << "r_max = " << fmt(c.r_max) << "\n"
     << "growth_factor = " << fmt(c.growth_factor) << "\n"
     << "stability_bound = " << fmt(c.stability_bound) << "\n"
     << "seed = " << c.seed << "\n"
     << "operator = " << c.op << "\n"
     << "maximal_kind = " << c.maximal_kind << "\n"
     << "norm = " << c.norm << "\n"
     << "l = " << fmt(c.l) << "\n"
     << "p_list = " << join_numbers(c.p_list) << "\n"
     << "r_list = " << join_numbers(c.r_list) << "\n\n";
  os << "[checks]\n";
  if (!c.ids.empty()) os << "ids = " << join(c.ids) << "\n";
  os << "threads = " << c.threads << "\n\n";
  os << "[output]\n"
     << "dir = " << c.out_dir << "\n";
  return os.str();
}

static std::string canonical_for_hash(const RunConfig& c) {
  RunConfig k = c;
  k.threads = 0;
  k.out_dir = "";
  return to_ini(k);
}

std::string config_hash(const RunConfig& c) { return hex64(fnv1a(canonical_for_hash(c))); }

CheckConfig to_check_config(const RunConfig& c) {
  CheckConfig k;
  k.domain = Domain{c.dim, c.R};
  k.resolutions = c.resolutions;
  k.policy.stride = c.stride;
  k.policy.include_origin = c.origin;
  k.policy.include_single_cell = c.single_cell;
  k.policy.origin_only = c.origin_only;
  k.policy.include_domain_ball = c.domain_ball;
  if (c.weight) k.weight = WeightSpec::parse(*c.weight);
  if (c.alpha || c.p || c.kappa || c.q) k.tuple = ParamTuple{c.p_value(), c.alpha_value(), c.kappa_value()};
  k.stability_bound = c.stability_bound;
  k.growth_factor = c.growth_factor;
  k.rh_tol = c.rh_tol;
  k.r_max = c.r_max;
  k.quad_nodes = c.quad_nodes;
  k.seed = c.seed;
  k.config_hash = config_hash(c);
  return k;
}

// --- dispatch ----------------------------------------------------------------------------------------------

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << text;
}

void write_function(const fs::path& path, const GridFunction& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  write_csv(os, f);
}

Json header(const RunConfig& c, const std::string& sub) {
  Json j;
  j["toolkit_version"] = kToolkitVersion;
  j["config_hash"] = config_hash(c);
  j["subcommand"] = sub;
  j["config"] = canonical_for_hash(c);
  return j;
}

Json membership_json(const MembershipVerdict& m) {
  Json j;
  j["test"] = m.test;
  j["exponent"] = m.exponent;
  j["member"] = m.member;
  j["growth_fired"] = m.growth_fired;
  Json vals = Json::array();
  for (std::size_t k = 0; k < m.values.size(); ++k) {
    const auto& w = m.values[k];
    vals.push_back({{"N", m.resolutions[k]},
                    {"value", w.value},
                    {"witness_center", {w.witness.center[0], w.witness.center[1]}},
                    {"witness_radius", w.witness.radius}});
  }
  j["characteristics"] = vals;
  j["growth"] = m.growth;
  Json prims = Json::array();
  for (const auto& p : m.primitives) {
    prims.push_back({{"name", p.name},
                     {"resolutions", p.resolutions},
                     {"values", p.values},
                     {"increment_ratio", p.increment_ratio},
                     {"diverges", p.diverges}});
  }
  j["primitives"] = prims;
  return j;
}

int run_checks(const std::string& sub, const RunConfig& c, const fs::path& dir, std::ostream& out) {
  std::vector<std::string> ids = c.ids;
  if (ids.empty()) {
    if (sub == "check") throw ConfigError("check needs at least one check id");
    ids = registry_ids();
  }
  for (const auto& id : ids) (void)find_check(id);
  const CheckConfig cfg = to_check_config(c);

  Json rep = header(c, sub);
  Json checks = Json::array();
  std::ostringstream csv;
  csv << "check,N,max_ratio,trend,verdict,expected,seconds\n";
  int exit_code = 0;
  std::size_t passed = 0, failed = 0, gated = 0;
  for (const auto& id : ids) {
    const CheckReport r = run_check(id, cfg);
    checks.push_back(r.to_json());
    const bool ok = r.negative_control ? r.as_expected() : r.verdict != Verdict::Fail;
    if (!ok) exit_code = 1;
    (r.verdict == Verdict::Pass ? passed : r.verdict == Verdict::Fail ? failed : gated)++;

    out << id << ' ' << verdict_name(r.verdict);
    if (r.negative_control) out << " (negative control, expected " << verdict_name(r.expected) << ")";
    out << " max_ratio=";
    for (std::size_t k = 0; k < r.resolutions.size(); ++k)
      out << (k ? "," : "") << fmt(r.resolutions[k].max_ratio);
    if (!r.trends.empty()) {
      out << " trend=";
      for (std::size_t k = 0; k < r.trends.size(); ++k) out << (k ? "," : "") << fmt(r.trends[k]);
    }
    out << '\n';
    out.flush();
    if (r.resolutions.empty()) {
      csv << id << ",,,," << verdict_name(r.verdict) << ',' << verdict_name(r.expected) << ',' << fmt(r.seconds)
          << '\n';
    }
    for (std::size_t k = 0; k < r.resolutions.size(); ++k) {
      csv << id << ',' << r.resolutions[k].n << ',' << fmt(r.resolutions[k].max_ratio) << ','
          << (k ? fmt(r.trends[k - 1]) : "") << ',' << verdict_name(r.verdict) << ',' << verdict_name(r.expected)
          << ',' << fmt(r.seconds) << '\n';
    }
  }
  rep["checks"] = checks;
  rep["summary"] = {{"passed", passed}, {"failed", failed}, {"gated", gated}, {"exit_code", exit_code}};
  write_text(dir / "report.json", rep.dump(2) + "\n");
  write_text(dir / "summary.csv", csv.str());
  return exit_code;
}

Weight config_weight(const RunConfig& c, const Grid& g, const char* fallback) {
  return WeightSpec::parse(c.weight.value_or(fallback)).sample(g);
}

int run_ap_rh(const std::string& sub, const RunConfig& c, const fs::path& dir, std::ostream& out) {
  const CheckConfig cfg = to_check_config(c);
  const WeightSpec w = WeightSpec::parse(c.weight.value_or("power:-0.5"));
  const DivergenceOptions div{c.growth_factor};
  Json rep = header(c, sub);
  rep["weight"] = w.id();
  Json rows = Json::array();
  const auto& list = sub == "ap" ? c.p_list : c.r_list;
  for (double e : list) {
    const MembershipVerdict m = sub == "ap" ? classify_ap(w, e, cfg.domain, cfg.policy, c.resolutions, div)
                                            : classify_rh(w, e, cfg.domain, cfg.policy, c.resolutions, div);
    rows.push_back(membership_json(m));
    out << m.test << "(" << fmt(e) << ") " << w.id() << ": " << (m.member ? "member" : "not a member");
    if (!m.values.empty()) out << " characteristic=" << fmt(m.values.back().value);
    out << '\n';
  }
  rep["results"] = rows;
  if (sub == "rh") {
    const CriticalIndex ci = critical_index_estimate(w, cfg.domain, cfg.policy, c.resolutions, c.rh_tol,
                                                     CriticalIndexOptions{c.r_max, div});
    Json scan = Json::array();
    for (const auto& [r, d] : ci.scan) scan.push_back({{"r", r}, {"diverges", d}});
    rep["critical_index"] = {{"value", ci.value}, {"capped", ci.capped}, {"lo", ci.lo}, {"hi", ci.hi}, {"scan", scan}};
    out << "critical index " << ci.describe() << '\n';
  }
  write_text(dir / "report.json", rep.dump(2) + "\n");
  return 0;
}

int run_norm(const RunConfig& c, const fs::path& dir, std::ostream& out) {
  const Grid g(c.dim, c.R, c.N);
  const BallFamily F = build_ball_family(g, to_check_config(c).policy);
  const GridFunction f = make_function(c.function, g);
  Json rep = header(c, "norm");
  rep["function"] = c.function;
  std::string line;
  if (c.norm == "morrey") {
    const Weight w = config_weight(c, g, "const:1");
    const std::string params = "p=" + fmt(c.p_value()) + ",kappa=" + fmt(c.kappa_value()) + ",w=" +
                               c.weight.value_or("const:1");
    const NormReport r = morrey_norm(f, MorreyParams(c.p_value(), c.kappa_value(), w), F);
    rep["norm"] = Json::parse(to_json(r, "morrey", params));
    line = "morrey " + fmt(r.value);
  } else if (c.norm == "lebesgue") {
    const double v = weighted_lebesgue_norm(f, c.p_value(), config_weight(c, g, "const:1"));
    rep["norm"] = {{"norm_id", "lebesgue"}, {"params", "p=" + fmt(c.p_value())}, {"value", v}};
    line = "lebesgue " + fmt(v);
  } else if (c.norm == "bmo") {
    std::optional<Weight> w;
    if (c.weight) w = config_weight(c, g, "const:1");
    const NormReport r = bmo_norm(f, w ? &*w : nullptr, F);
    rep["norm"] = Json::parse(to_json(r, "bmo", "w=" + c.weight.value_or("none")));
    line = "bmo " + fmt(r.value);
  } else if (c.norm == "weak") {
    const double v = weak_norm(f, c.l);
    rep["norm"] = {{"norm_id", "weak"}, {"params", "l=" + fmt(c.l)}, {"value", v}};
    line = "weak " + fmt(v);
  } else {
    const double v = kolmogorov_functional(f, c.l, c.r);
    rep["norm"] = {{"norm_id", "kolmogorov"}, {"params", "l=" + fmt(c.l) + ",r=" + fmt(c.r)}, {"value", v}};
    line = "kolmogorov " + fmt(v);
  }
  out << line << '\n';
  write_function(dir / "input.csv", f);
  write_text(dir / "report.json", rep.dump(2) + "\n");
  return 0;
}

MaximalKind parse_kind(const std::string& s) {
  if (s == "M") return MaximalKind::M;
  if (s == "Mw") return MaximalKind::Mw;
  if (s == "MAlphaR") return MaximalKind::MAlphaR;
  return MaximalKind::MAlphaRW;
}

int run_apply(const RunConfig& c, const fs::path& dir, std::ostream& out) {
  const Grid g(c.dim, c.R, c.N);
  const GridFunction f = make_function(c.function, g);
  const SemigroupSpec heat = SemigroupSpec::heat(c.dim);
  Json rep = header(c, "apply");
  rep["operator"] = c.op;
  rep["function"] = c.function;
  Diagnostics diag;
  std::optional<GridFunction> result;
  if (c.op == "heat") {
    result = semigroup_apply(heat, f, c.t, &diag);
  } else if (c.op == "riesz") {
    result = riesz_potential(f, c.alpha_value());
  } else if (c.op == "generalized") {
    FractionalReport fr;
    result = generalized_fractional(heat, f, c.alpha_value(), TimeQuadrature{c.quad_tmin, c.quad_tmax, c.quad_nodes},
                                    &fr, true);
    rep["quadrature"] = Json::parse(fr.to_json());
    write_text(dir / "quadrature.json", fr.to_json() + "\n");
  } else if (c.op == "commutator") {
    CommutatorSpec spec;
    spec.alpha = c.alpha_value();
    for (const auto& s : c.b) spec.b.push_back(make_function(s, g));
    result = multilinear_commutator(spec, f);
  } else if (c.op == "maximal") {
    const BallFamily F = build_ball_family(g, to_check_config(c).policy);
    const Weight w = config_weight(c, g, "const:1");
    const MaximalKind kind = parse_kind(c.maximal_kind);
    const double alpha = (kind == MaximalKind::MAlphaR || kind == MaximalKind::MAlphaRW) ? c.alpha_value() : 0.0;
    result = maximal_function(f, kind, MaximalParams{alpha, c.r, &w}, F);
  } else {
    const BallFamily F = build_ball_family(g, to_check_config(c).policy);
    result = sharp_maximal(heat, f, F);
  }
  rep["warnings"] = diag.warnings;
  rep["output_max_abs"] = result->max_abs();
  write_function(dir / "input.csv", f);
  write_function(dir / "output.csv", *result);
  write_text(dir / "report.json", rep.dump(2) + "\n");
  for (const auto& w : diag.warnings) out << "warning: " << w << '\n';
  out << c.op << " applied to " << c.function << ": max |output| = " << fmt(result->max_abs()) << '\n';
  return 0;
}

void emit_diagnostic(std::ostream& err, const fs::path& dir, const std::string& kind, const std::string& message,
                     const std::vector<std::string>& extra_key_values = {}, const char* extra_key = nullptr) {
  Json j;
  j["error"] = kind;
  j["message"] = message;
  if (extra_key) j[extra_key] = extra_key_values;
  err << j.dump() << '\n';
  std::error_code ec;
  if (fs::is_directory(dir, ec)) {
    std::ofstream os(dir / "diagnostics.json", std::ios::binary);
    if (os) os << j.dump(2) << '\n';
  }
}

}  // namespace

int dispatch(const std::string& sub, const RunConfig& c, std::ostream& out, std::ostream& err) {
  const fs::path dir = c.out_dir;
  try {
    static const std::set<std::string> subs = {"ap", "rh", "norm", "apply", "check", "sweep"};
    if (!subs.count(sub)) throw ConfigError("unknown subcommand '" + sub + "'");
    validate_config(c);
    if (c.threads > 0) set_thread_count(c.threads);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    if (sub == "check" || sub == "sweep") return run_checks(sub, c, dir, out);
    if (sub == "ap" || sub == "rh") return run_ap_rh(sub, c, dir, out);
    if (sub == "norm") return run_norm(c, dir, out);
    return run_apply(c, dir, out);
  } catch (const ConfigError& e) {
    emit_diagnostic(err, dir, "config", e.what(), e.violations(), "violations");
    return 2;
  } catch (const RegistryError& e) {
    emit_diagnostic(err, dir, "registry", e.what(), registry_ids(), "known_ids");
    return 2;
  } catch (const ParameterError& e) {
    emit_diagnostic(err, dir, "parameter", e.what());
    return 2;
  } catch (const EmptyRegionError& e) {
    emit_diagnostic(err, dir, "empty-region", e.what());
    return 2;
  } catch (const AccuracyError& e) {
    emit_diagnostic(err, dir, "accuracy", e.what());
    return 3;
  } catch (const DegenerateRatioError& e) {
    emit_diagnostic(err, dir, "degenerate-ratio", e.what());
    return 3;
  } catch (const std::exception& e) {
    emit_diagnostic(err, dir, "internal", e.what());
    return 3;
  }
}

}  // namespace mlab
