#pragma once

#include <optional>
#include <string>
#include <utility>

#include "mlab/lattice.hpp"
#include "mlab/weights.hpp"

namespace mlab {

struct MorreyParams {
  double p = 2.0;
  double kappa = 0.0;
  Weight u;  // integrand weight
  Weight v;  // measure weight raised to -kappa

  MorreyParams(double p, double kappa, Weight u, Weight v);
  MorreyParams(double p, double kappa, const Weight& w) : MorreyParams(p, kappa, w, w) {}
};

struct NormReport {
  double value = 0.0;
  std::optional<Ball> witness;
  std::string family;
};

double weighted_lebesgue_norm(const GridFunction& f, double p, const Weight& w);
double lebesgue_norm(const GridFunction& f, double p);

NormReport morrey_norm(const GridFunction& f, const MorreyParams& params, const BallFamily& F);

double weighted_mean(const GridFunction& b, const Weight& w, const Ball& B);
double mean(const GridFunction& b, const Ball& B);

/// Weighted mean oscillation sup over F; pass nullptr for the unweighted norm.
NormReport bmo_norm(const GridFunction& b, const Weight* w, const BallFamily& F);

/// (||b||_{*,w} / ||b||_*, ||b||_* / ||b||_{*,w}).
std::pair<double, double> bmo_equivalence_ratio(const GridFunction& b, const Weight& w, const BallFamily& F);

/// sup_t t |{|f| > t}|^{1/l}, by exact threshold scan.
double weak_norm(const GridFunction& f, double l);

/// Kolmogorov functional N_{l,r}: sup over unions of cells E of ||f chi_E||_r / |E|^{1/r - 1/l}.
double kolmogorov_functional(const GridFunction& f, double l, double r);
/// Same functional with E restricted to the balls of F.
NormReport kolmogorov_functional(const GridFunction& f, double l, double r, const BallFamily& F);

std::string to_json(const NormReport& r, const std::string& norm_id, const std::string& params);

}  // namespace mlab
