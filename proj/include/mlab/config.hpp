#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mlab/harness.hpp"

namespace mlab {

/// Flat INI configuration. Optional fields left unset keep each check's own defaults.
struct RunConfig {
  // [grid]
  int dim = 1;
  double R = 8.0;
  int N = 1024;
  std::vector<int> resolutions{512, 1024};
  // [balls]
  int stride = 1;
  bool origin = true;
  bool single_cell = true;
  bool origin_only = false;
  bool domain_ball = false;
  // [params]
  std::optional<double> alpha, p, q, kappa;
  double r = 2.0;
  double tau = 2.0;
  int m = 1;
  std::optional<std::string> weight;
  std::string function = "gauss:0.5";
  std::vector<std::string> b{"log"};
  double t = 0.25;
  int quad_nodes = 96;
  double quad_tmin = 0;
  double quad_tmax = 0;
  double rh_tol = 0.1;
  double r_max = 64;
  double growth_factor = 1.5;
  double stability_bound = 1.2;
  std::uint64_t seed = 20240917;
  std::string op = "riesz";
  std::string maximal_kind = "M";
  std::string norm = "morrey";
  double l = 2.0;
  std::vector<double> p_list{1.0, 1.5, 2.0, 3.0};
  std::vector<double> r_list{1.5, 2.0, 3.0};
  // [checks]
  std::vector<std::string> ids;
  int threads = 0;  // 0 defers to MLAB_THREADS / hardware
  // [output]
  std::string out_dir = "mlab-out";

  double alpha_value() const { return alpha.value_or(0.25); }
  double p_value() const { return p.value_or(2.0); }
  double kappa_value() const { return kappa.value_or(0.25); }

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates; throws ConfigError carrying every violation found.
RunConfig parse_config(const std::string& text);
/// Cross-field validation on an already-populated config (used after command-line overrides).
void validate_config(const RunConfig& c);
/// Canonical INI text; parse_config(to_ini(c)) == c.
std::string to_ini(const RunConfig& c);
/// Hash of the canonical text, excluding thread count and output location.
std::string config_hash(const RunConfig& c);
CheckConfig to_check_config(const RunConfig& c);

/// Runs a subcommand (ap, rh, norm, apply, check, sweep); returns the exit code.
/// 0 all pass (or gated, or negative controls firing as expected), 1 unexpected failure,
/// 2 configuration/registry error, 3 internal or accuracy error.
int dispatch(const std::string& subcommand, const RunConfig& c, std::ostream& out, std::ostream& err);

}  // namespace mlab
