#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "mlab/error.hpp"
#include "mlab/harness.hpp"

namespace mlab {
namespace {

double radius(const Point& x, int dim) { return norm(x, dim); }

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("invalid number in '" + what + "'");
}

}  // namespace

GridFunction make_function(const std::string& spec, const Grid& g) {
  const int dim = g.dim();
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  const double pi = std::numbers::pi;

  if (head == "gauss") {
    const double s = parse_number(arg, spec);
    if (s <= 0) throw ConfigError("gauss width must be positive: " + spec);
    return GridFunction::from(g, [&](const Point& x) {
      const double r = radius(x, dim);
      return std::exp(-r * r / (2 * s * s));
    });
  }
  if (head == "chi") {
    const double a = parse_number(arg, spec);
    return GridFunction::from(g, [&](const Point& x) {
      const bool in = std::abs(x[0]) <= a && (dim == 1 || std::abs(x[1]) <= a);
      return in ? 1.0 : 0.0;
    });
  }
  if (head == "osc") {
    return GridFunction::from(g, [&](const Point& x) {
      const double r = radius(x, dim);
      return std::sin(4 * pi * x[0]) * std::exp(-r * r / 2);
    });
  }
  if (head == "cusp") {
    return GridFunction::from(g, [&](const Point& x) {
      const double r = radius(x, dim);
      return r <= 1 ? std::pow(r, 0.25) : 0.0;
    });
  }
  if (head == "log") {
    const double cap = std::log(g.half_width() / g.spacing());
    return GridFunction::from(g, [&](const Point& x) { return std::clamp(std::log(radius(x, dim)), -cap, cap); });
  }
  if (head == "sin") {
    return GridFunction::from(g, [&](const Point& x) { return std::sin(pi * x[0]); });
  }
  if (head == "xsmooth") {
    return GridFunction::from(g, [&](const Point& x) {
      return x[0] * 0.5 * (1 - std::tanh((radius(x, dim) - 1) / 0.1));
    });
  }
  if (head == "const") {
    return GridFunction::constant(g, parse_number(arg, spec));
  }
  if (head == "power") {
    const double b = parse_number(arg, spec);
    return GridFunction::from(g, [&](const Point& x) { return std::pow(radius(x, dim), b); });
  }
  if (head == "csv") {
    std::ifstream in(arg);
    if (!in) throw ConfigError("cannot open function file: " + arg);
    return read_csv(in, g);
  }
  throw ConfigError("unknown function selector: " + spec);
}

std::vector<NamedFunction> test_functions(const Grid& g) {
  std::vector<NamedFunction> out;
  for (const char* id : {"gauss:0.25", "gauss:0.5", "gauss:1", "chi:0.5", "chi:1", "chi:2", "osc", "cusp"}) {
    out.push_back({id, make_function(id, g)});
  }
  return out;
}

std::vector<NamedFunction> test_symbols(const Grid& g) {
  std::vector<NamedFunction> out;
  for (const char* id : {"log", "sin", "xsmooth"}) out.push_back({id, make_function(id, g)});
  return out;
}

std::vector<WeightSpec> test_weights() {
  return {WeightSpec::constant(1.0), WeightSpec::power(-0.25), WeightSpec::power(-0.5)};
}

}  // namespace mlab
