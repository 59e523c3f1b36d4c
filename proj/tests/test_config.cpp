#include <algorithm>
#include <random>
#include <string>

#include "doctest.h"
#include "mlab/config.hpp"
#include "mlab/error.hpp"

using namespace mlab;

namespace {

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("defaults parse from an empty file") {
  CHECK(parse_config("") == RunConfig{});
  CHECK(parse_config("# comment\n[grid]\n; other comment\n") == RunConfig{});
}

TEST_CASE("canonical text round-trips for randomized configs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<std::string> fns{"gauss:0.5", "chi:1", "osc", "cusp", "sin", "power:-0.1"};
  const std::vector<std::string> ops{"heat", "riesz", "generalized", "commutator", "maximal", "sharp"};
  for (int trial = 0; trial < 200; ++trial) {
    RunConfig c;
    c.dim = 1 + int(rng() % 2);
    c.R = 0.5 + 10 * u(rng);
    c.N = 8 + 2 * int(rng() % 100);
    c.resolutions = {64, 64 * (2 + int(rng() % 3))};
    c.stride = 1 + int(rng() % 4);
    c.origin = rng() % 2;
    c.origin_only = c.origin && rng() % 2;
    c.domain_ball = rng() % 2;
    c.single_cell = rng() % 2;
    const double a = 0.05 + 0.4 * u(rng) * c.dim;
    if (rng() % 2) c.alpha = a;
    const double p = 1.01 + (c.dim / c.alpha_value() - 1.02) * u(rng);
    if (rng() % 2) c.p = p;
    const double q = 1 / (1 / c.p_value() - c.alpha_value() / c.dim);
    if (rng() % 2) c.q = q;
    if (rng() % 2 || c.kappa_value() >= c.p_value() / q) c.kappa = 0.99 * u(rng) * c.p_value() / q;
    c.r = 1 + 3 * u(rng);
    c.tau = 1.01 + u(rng);
    c.m = 1 + int(rng() % 3);
    c.b.assign(c.m, fns[rng() % fns.size()]);
    if (rng() % 2) c.weight = "power:" + std::to_string(-0.5 * u(rng));
    c.function = fns[rng() % fns.size()];
    c.t = u(rng) + 1e-3;
    c.quad_nodes = 8 + int(rng() % 200);
    c.seed = rng();
    c.op = ops[rng() % ops.size()];
    c.l = 0.5 + 3 * u(rng);
    c.p_list = {1.0, 1 + u(rng)};
    c.threads = int(rng() % 8);
    c.out_dir = "out-" + std::to_string(trial);
    if (rng() % 2) c.ids = {"CHK-SIGMA", "CHK-L7"};
    CAPTURE(to_ini(c));
    const RunConfig back = parse_config(to_ini(c));
    CHECK(back == c);
    CHECK(to_ini(back) == to_ini(c));
  }
}

TEST_CASE("parameter tuple constraints") {
  CHECK_NOTHROW(parse_config("[params]\nalpha = 0.25\np = 2\nq = 4\n"));
  const auto inf = violations_of("[params]\nalpha = 0.5\np = 2\n");
  CHECK(any_contains(inf, "q = ∞ not supported"));
  CHECK(any_contains(inf, "1 < p < n/α violated"));
  CHECK(any_contains(violations_of("[params]\nalpha = 0.25\np = 2\nq = 5\n"), "1/q = 1/p − α/n violated"));
  // kappa must stay strictly below p/q = 0.5
  CHECK(any_contains(violations_of("[params]\nalpha = 0.25\np = 2\nkappa = 0.5\n"), "0 ≤ κ < p/q violated"));
  CHECK_NOTHROW(parse_config("[params]\nalpha = 0.25\np = 2\nkappa = 0.49\n"));
  CHECK(any_contains(violations_of("[params]\nalpha = 1.5\n"), "0 < α < n violated"));
  CHECK_NOTHROW(parse_config("[grid]\ndim = 2\n[params]\nalpha = 1.5\np = 1.2\nkappa = 0.1\n"));
}

TEST_CASE("errors name the offending key and are all collected") {
  const auto v = violations_of(
      "[grid]\nN = 7\nbogus = 1\n[params]\nm = 2\nalpha = zero\n[nowhere]\nx = 1\n[grid]\nN = 8\n");
  CHECK(any_contains(v, "unknown key 'grid.bogus'"));
  CHECK(any_contains(v, "key 'params.alpha': expected a number"));
  CHECK(any_contains(v, "unknown section 'nowhere'"));
  CHECK(any_contains(v, "duplicate key 'grid.N'"));
  CHECK(any_contains(v, "N must be even"));
  CHECK(any_contains(v, "b must list m symbols"));
  CHECK(v.size() >= 6);
}

TEST_CASE("hash ignores thread count and output location") {
  RunConfig a;
  RunConfig b = a;
  b.threads = 4;
  b.out_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.R = 4;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("check configuration only overrides what was set") {
  const CheckConfig d = to_check_config(RunConfig{});
  CHECK_FALSE(d.tuple.has_value());
  CHECK_FALSE(d.weight.has_value());
  RunConfig c;
  c.kappa = 0.1;
  c.weight = "power:1";
  const CheckConfig k = to_check_config(c);
  REQUIRE(k.tuple.has_value());
  CHECK(k.tuple->kappa == 0.1);
  CHECK(k.tuple->p == 2.0);
  REQUIRE(k.weight.has_value());
  CHECK(k.weight->id() == WeightSpec::power(1).id());
}
