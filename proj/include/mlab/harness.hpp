#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mlab/lattice.hpp"
#include "mlab/weights.hpp"

namespace mlab {

inline constexpr const char* kToolkitVersion = "1.0.0";

using Json = nlohmann::ordered_json;

// --- test family -------------------------------------------------------------------

struct NamedFunction {
  std::string id;
  GridFunction f;
};

/// Gaussian bumps, indicators of intervals/squares, an oscillatory bump and a power cusp.
std::vector<NamedFunction> test_functions(const Grid& g);
/// log|x| (clamped at +-log(R/h)), sin(pi x), smoothed x on [-1, 1].
std::vector<NamedFunction> test_symbols(const Grid& g);
std::vector<WeightSpec> test_weights();
/// Function selector shared with the CLI: gauss:<s>, chi:<a>, osc, cusp, log, sin, xsmooth, const:<c>,
/// power:<b>, csv:<path>.
GridFunction make_function(const std::string& spec, const Grid& g);

// --- configuration and reports --------------------------------------------------------

/// (p, alpha, kappa); q follows from 1/q = 1/p - alpha/n.
struct ParamTuple {
  double p = 2, alpha = 0.25, kappa = 0.25;
  double q(int dim) const { return 1.0 / (1.0 / p - alpha / dim); }
};

struct CheckConfig {
  Domain domain{1, 8.0};
  std::vector<int> resolutions{512, 1024};
  std::vector<int> node_counts{64, 128};
  BallPolicy policy{};
  std::optional<WeightSpec> weight;     // replaces each check's default weight
  std::optional<ParamTuple> tuple;      // replaces each check's default parameter tuples
  double stability_bound = 1.2;
  double growth_factor = 1.5;
  double rh_tol = 0.1;
  double r_max = 64;
  int quad_nodes = 96;
  std::uint64_t seed = 20240917;
  std::string config_hash = "unset";
};

enum class Verdict { Pass, Fail, HypothesisGated };
const char* verdict_name(Verdict v);

enum class Criterion { Stability, Exact, Agreement };

struct Witness {
  std::size_t case_index = 0;
  std::string function, weight, params;
  std::optional<std::size_t> point;
  std::vector<double> location;  // coordinates of `point`
  std::optional<Ball> ball;
};

struct ResolutionResult {
  int n = 0;
  double max_ratio = 0;
  Witness witness;
  std::size_t cases = 0;
  std::size_t violations = 0;
};

struct CheckReport {
  std::string id;
  std::string config_hash;
  Criterion criterion = Criterion::Stability;
  double tolerance = 0;
  std::vector<ResolutionResult> resolutions;
  std::vector<double> trends;
  Verdict verdict = Verdict::Fail;
  bool negative_control = false;
  Verdict expected = Verdict::Pass;
  Json details = Json::object();
  double seconds = 0;  // not serialized, so reports stay byte-identical

  bool as_expected() const { return verdict == expected; }
  Json to_json() const;
};

// --- registry ------------------------------------------------------------------------------

struct CaseOutcome {
  double ratio = 0;
  std::optional<std::size_t> point;
  std::optional<Ball> ball;
  std::size_t violations = 0;
};

/// One element of a quantifier domain.
struct CheckCase {
  std::string function, weight, params;
  std::function<CaseOutcome()> eval;
};

struct CheckDef {
  std::string id;
  std::string description;
  Criterion criterion = Criterion::Stability;
  double tolerance = 1.2;  // stability bound or exact tolerance; < 0 selects the config bound
  bool negative_control = false;
  Verdict expected = Verdict::Pass;
  enum class Ladder { Grid, Nodes, Whole } ladder = Ladder::Grid;
  std::optional<WeightSpec> forced_weight;  // negative controls pin their weight
  /// Returns a reason when the hypotheses fail; may add diagnostics to `details`.
  std::function<std::optional<std::string>(const CheckConfig&, Json& details)> gate;
  std::function<std::vector<CheckCase>(const CheckConfig&, int n)> cases;
};

const std::vector<CheckDef>& registry();
const CheckDef& find_check(const std::string& id);
std::vector<std::string> registry_ids();

/// Each statement of the source material under test, paired with the check that covers it.
const std::vector<std::pair<std::string, std::string>>& coverage_manifest();

CheckReport run_check(const std::string& id, const CheckConfig& cfg);
/// Re-evaluates the witness case of one resolution and returns its ratio.
double replay_witness(const std::string& id, const CheckConfig& cfg, const ResolutionResult& r);

struct TrendTable {
  std::vector<int> resolutions;
  std::vector<double> max_ratio;
  std::vector<double> trends;
  bool pass = false;
};
TrendTable refinement_study(const std::string& id, const CheckConfig& cfg, std::span<const int> resolutions);

struct RatioEstimate {
  double value = 0;
  std::size_t witness = 0;
  std::string witness_id;
};
using Operator = std::function<GridFunction(const GridFunction&)>;
using NormFn = std::function<double(const GridFunction&)>;
/// max over the family of target(T f) / source(f).
RatioEstimate estimate_norm_ratio(const Operator& T, const NormFn& source, const NormFn& target,
                                  const std::vector<NamedFunction>& family);

}  // namespace mlab
