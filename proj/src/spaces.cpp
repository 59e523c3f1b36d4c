#include "mlab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "json.hpp"
#include "mlab/error.hpp"
#include "mlab/parallel.hpp"

namespace mlab {

MorreyParams::MorreyParams(double p_, double kappa_, Weight u_, Weight v_)
    : p(p_), kappa(kappa_), u(std::move(u_)), v(std::move(v_)) {
  if (!(p >= 1)) throw ParameterError("Morrey exponent needs p >= 1");
  if (!(kappa >= 0 && kappa < 1)) throw ParameterError("Morrey parameter needs 0 <= kappa < 1");
  if (!(u.grid() == v.grid())) throw ParameterError("Morrey weights live on different grids");
}

double weighted_lebesgue_norm(const GridFunction& f, double p, const Weight& w) {
  if (!(p >= 1)) throw ParameterError("Lebesgue exponent needs p >= 1");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]), p) * w[i];
  return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

double lebesgue_norm(const GridFunction& f, double p) {
  if (!(p >= 1)) throw ParameterError("Lebesgue exponent needs p >= 1");
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

namespace {

/// Max over F of score(ball); ties go to the lowest index.
NormReport sup_over(const BallFamily& F, const std::function<double(const Ball&)>& score) {
  const auto& balls = F.balls();
  std::vector<double> vals(balls.size());
  parallel_for(balls.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) vals[k] = score(balls[k]);
  });
  NormReport r;
  r.family = F.id();
  double best = -1.0;
  for (std::size_t k = 0; k < vals.size(); ++k)
    if (vals[k] > best) {
      best = vals[k];
      r.witness = balls[k];
    }
  r.value = std::max(best, 0.0);
  return r;
}

}  // namespace

NormReport morrey_norm(const GridFunction& f, const MorreyParams& prm, const BallFamily& F) {
  const double vol = f.grid().cell_volume();
  std::vector<double> integrand(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) integrand[i] = std::pow(std::abs(f[i]), prm.p) * prm.u[i];
  return sup_over(F, [&](const Ball& b) {
    double num = 0.0, vb = 0.0;
    for_each_cell(f.grid(), b, [&](std::size_t i) {
      num += integrand[i];
      vb += prm.v[i];
    });
    if (vb == 0.0) return 0.0;
    return std::pow(num * vol / std::pow(vb * vol, prm.kappa), 1.0 / prm.p);
  });
}

double weighted_mean(const GridFunction& b, const Weight& w, const Ball& B) {
  double num = 0.0, den = 0.0;
  for_each_cell(b.grid(), B, [&](std::size_t i) {
    num += b[i] * w[i];
    den += w[i];
  });
  if (den == 0.0) throw EmptyRegionError("ball contains no grid cell");
  return num / den;
}

double mean(const GridFunction& b, const Ball& B) {
  double num = 0.0;
  std::size_t n = 0;
  for_each_cell(b.grid(), B, [&](std::size_t i) {
    num += b[i];
    ++n;
  });
  if (n == 0) throw EmptyRegionError("ball contains no grid cell");
  return num / double(n);
}

NormReport bmo_norm(const GridFunction& b, const Weight* w, const BallFamily& F) {
  return sup_over(F, [&](const Ball& B) {
    if (w == nullptr) {
      const double m = mean(b, B);
      double osc = 0.0;
      std::size_t n = 0;
      for_each_cell(b.grid(), B, [&](std::size_t i) {
        osc += std::abs(b[i] - m);
        ++n;
      });
      return osc / double(n);
    }
    const double m = weighted_mean(b, *w, B);
    double osc = 0.0, den = 0.0;
    for_each_cell(b.grid(), B, [&](std::size_t i) {
      osc += std::abs(b[i] - m) * (*w)[i];
      den += (*w)[i];
    });
    return osc / den;
  });
}

std::pair<double, double> bmo_equivalence_ratio(const GridFunction& b, const Weight& w, const BallFamily& F) {
  const double plain = bmo_norm(b, nullptr, F).value;
  const double weighted = bmo_norm(b, &w, F).value;
  if (plain == 0.0 || weighted == 0.0)
    throw UndefinedRatioError("BMO equivalence ratio undefined: b has zero oscillation on every ball");
  return {weighted / plain, plain / weighted};
}

namespace {
std::vector<double> sorted_magnitudes(const GridFunction& f) {
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(f[i]);
  std::sort(a.begin(), a.end(), std::greater<>());
  return a;
}
}  // namespace

double weak_norm(const GridFunction& f, double l) {
  if (!(l > 0)) throw ParameterError("weak_norm needs l > 0");
  const std::vector<double> a = sorted_magnitudes(f);
  const double vol = f.grid().cell_volume();
  // For t just below a[k-1], the level set {|f| > t} holds every cell with value >= a[k-1].
  double best = 0.0;
  std::size_t k = 0;
  while (k < a.size() && a[k] > 0) {
    const double t = a[k];
    while (k < a.size() && a[k] == t) ++k;
    best = std::max(best, t * std::pow(double(k) * vol, 1.0 / l));
  }
  return best;
}

double kolmogorov_functional(const GridFunction& f, double l, double r) {
  if (!(r > 0 && r < l)) throw ParameterError("Kolmogorov functional needs 0 < r < l");
  const std::vector<double> a = sorted_magnitudes(f);
  const double vol = f.grid().cell_volume();
  const double inv_h = 1.0 / r - 1.0 / l;
  // For fixed |E| = k cells the best E holds the k largest values.
  double best = 0.0, acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    acc += std::pow(a[k], r);
    const double m = double(k + 1) * vol;
    best = std::max(best, std::pow(acc * vol, 1.0 / r) / std::pow(m, inv_h));
  }
  return best;
}

NormReport kolmogorov_functional(const GridFunction& f, double l, double r, const BallFamily& F) {
  if (!(r > 0 && r < l)) throw ParameterError("Kolmogorov functional needs 0 < r < l");
  const double vol = f.grid().cell_volume();
  const double inv_h = 1.0 / r - 1.0 / l;
  return sup_over(F, [&](const Ball& b) {
    double acc = 0.0;
    std::size_t n = 0;
    for_each_cell(f.grid(), b, [&](std::size_t i) {
      acc += std::pow(std::abs(f[i]), r);
      ++n;
    });
    return std::pow(acc * vol, 1.0 / r) / std::pow(double(n) * vol, inv_h);
  });
}

std::string to_json(const NormReport& r, const std::string& norm_id, const std::string& params) {
  nlohmann::ordered_json j;
  j["norm_id"] = norm_id;
  j["params"] = params;
  j["value"] = r.value;
  if (r.witness) {
    j["witness_center"] = {r.witness->center[0], r.witness->center[1]};
    j["witness_radius"] = r.witness->radius;
  } else {
    j["witness_center"] = nullptr;
    j["witness_radius"] = nullptr;
  }
  j["family_id"] = r.family;
  return j.dump();
}

}  // namespace mlab
