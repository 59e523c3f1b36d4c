#include <algorithm>
#include <cmath>
#include <map>

#include "mlab/error.hpp"
#include "mlab/operators.hpp"
#include "mlab/parallel.hpp"

namespace mlab {

namespace {

/// out(x) = max over balls containing x of value[ball]; balls processed in family order.
void scatter_max(const BallFamily& F, const std::vector<double>& vals, GridFunction& out) {
  const auto& balls = F.balls();
  for (std::size_t k = 0; k < balls.size(); ++k) {
    const double v = vals[k];
    for_each_cell(F.grid(), balls[k], [&](std::size_t i) {
      if (v > out[i]) out[i] = v;
    });
  }
}

}  // namespace

GridFunction maximal_function(const GridFunction& f, MaximalKind kind, const MaximalParams& prm,
                              const BallFamily& F) {
  const Grid& g = f.grid();
  if (!(g == F.grid())) throw ParameterError("ball family and function live on different grids");
  if (!(prm.r >= 1)) throw ParameterError("maximal operator needs r >= 1");
  if (!(prm.alpha >= 0 && prm.alpha < g.dim())) throw ParameterError("maximal operator needs 0 <= alpha < n");
  const bool weighted = kind == MaximalKind::Mw || kind == MaximalKind::MAlphaRW;
  if (weighted && prm.w == nullptr) throw ParameterError("weighted maximal operator needs a weight");
  if (weighted && !(prm.w->grid() == g)) throw ParameterError("weight lives on a different grid");
  const double vol = g.cell_volume();
  const double n = g.dim();
  const double r = prm.r, alpha = prm.alpha;

  std::vector<double> pw(f.size());  // |f|^r (r = 1 for M, M_w)
  for (std::size_t i = 0; i < f.size(); ++i)
    pw[i] = (kind == MaximalKind::M || kind == MaximalKind::Mw) ? std::abs(f[i]) : std::pow(std::abs(f[i]), r);

  auto ball_value = [&](const Ball& b) {
    double s = 0.0, ws = 0.0;
    std::size_t cnt = 0;
    for_each_cell(g, b, [&](std::size_t i) {
      if (weighted) {
        s += pw[i] * (*prm.w)[i];
        ws += (*prm.w)[i];
      } else {
        s += pw[i];
      }
      ++cnt;
    });
    if (cnt == 0) return 0.0;
    switch (kind) {
      case MaximalKind::M: return s / double(cnt);
      case MaximalKind::Mw: return s / ws;
      case MaximalKind::MAlphaR: {
        const double meas = double(cnt) * vol;
        return std::pow(std::pow(meas, alpha * r / n) * (s / double(cnt)), 1.0 / r);
      }
      case MaximalKind::MAlphaRW: {
        const double wb = ws * vol;
        return std::pow(std::pow(wb, alpha * r / n) * (s / ws), 1.0 / r);
      }
    }
    return 0.0;
  };

  const auto& balls = F.balls();
  std::vector<double> vals(balls.size());
  parallel_for(balls.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) vals[k] = ball_value(balls[k]);
  });

  GridFunction out(g);
  if (F.policy().include_single_cell) {
    // closed forms on the single-cell ball, so that M f >= |f| holds bit-exactly
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double a = std::abs(f[i]);
      switch (kind) {
        case MaximalKind::M:
        case MaximalKind::Mw: out[i] = a; break;
        case MaximalKind::MAlphaR: out[i] = a * std::pow(vol, alpha / n); break;
        case MaximalKind::MAlphaRW: out[i] = a * std::pow((*prm.w)[i] * vol, alpha / n); break;
      }
    }
  }
  scatter_max(F, vals, out);
  return out;
}

GridFunction sharp_maximal(const SemigroupSpec& spec, const GridFunction& f, const BallFamily& F) {
  const Grid& g = f.grid();
  if (!(g == F.grid())) throw ParameterError("ball family and function live on different grids");
  const auto& balls = F.balls();
  // one semigroup application per distinct radius
  std::map<double, std::vector<std::size_t>> by_radius;
  for (std::size_t k = 0; k < balls.size(); ++k) by_radius[balls[k].radius].push_back(k);
  std::vector<double> vals(balls.size(), 0.0);
  for (const auto& [radius, members] : by_radius) {
    const GridFunction smooth = semigroup_apply(spec, f, radius * radius);
    std::vector<double> dev(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) dev[i] = std::abs(f[i] - smooth[i]);
    parallel_for(members.size(), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t m = lo; m < hi; ++m) {
        double s = 0.0;
        std::size_t cnt = 0;
        for_each_cell(g, balls[members[m]], [&](std::size_t i) {
          s += dev[i];
          ++cnt;
        });
        vals[members[m]] = cnt ? s / double(cnt) : 0.0;
      }
    });
  }
  GridFunction out(g);
  scatter_max(F, vals, out);
  return out;
}

}  // namespace mlab
