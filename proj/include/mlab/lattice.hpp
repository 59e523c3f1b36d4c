#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mlab {

using Point = std::array<double, 2>;

/// Cell-centered grid on [-R, R]^dim with N cells per axis (N even, so no sample sits at 0).
class Grid {
 public:
  Grid(int dim, double half_width, int points_per_axis);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int points_per_axis() const { return n_; }
  double spacing() const { return h_; }
  double cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }
  std::size_t size() const { return dim_ == 1 ? std::size_t(n_) : std::size_t(n_) * n_; }

  double coordinate(int i) const { return -half_width_ + (i + 0.5) * h_; }
  Point point(std::size_t flat) const;
  std::size_t flat_index(int i, int j = 0) const { return dim_ == 1 ? std::size_t(i) : std::size_t(i) * n_ + j; }
  /// Nearest cell index along one axis (clamped to the grid).
  int nearest_index(double x) const;

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && half_width_ == o.half_width_ && n_ == o.n_;
  }

 private:
  int dim_;
  double half_width_;
  int n_;
  double h_;
};

double norm(const Point& p, int dim);

class GridFunction {
 public:
  explicit GridFunction(const Grid& grid);  // zeros
  GridFunction(const Grid& grid, std::vector<double> values);

  static GridFunction from(const Grid& grid, const std::function<double(const Point&)>& fn);
  static GridFunction constant(const Grid& grid, double c);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  GridFunction abs() const;
  GridFunction scaled(double c) const;
  GridFunction operator+(const GridFunction& o) const;
  GridFunction operator-(const GridFunction& o) const;
  /// Pointwise product.
  GridFunction operator*(const GridFunction& o) const;
  double max_abs() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Metric ball; t() is the semigroup time r^2 attached to it.
struct Ball {
  Point center{0.0, 0.0};
  double radius = 0.0;
  bool single_cell = false;  // degenerate radius h/2 ball holding exactly one cell

  double t() const { return radius * radius; }
  Ball scaled(double factor) const { return Ball{center, radius * factor, false}; }
  bool operator==(const Ball&) const = default;
};

Ball make_ball(const Grid& grid, const Point& center, double radius);
Ball single_cell_ball(const Grid& grid, std::size_t flat);

/// Calls fn(flat_index) for every cell whose center lies in the ball, in increasing index order.
template <class Fn>
void for_each_cell(const Grid& g, const Ball& b, Fn&& fn);

std::size_t cell_count(const Grid& g, const Ball& b);

struct BallPolicy {
  int stride = 1;
  bool include_origin = true;
  bool include_single_cell = true;
  bool origin_only = false;        // only origin-centered balls
  bool include_domain_ball = false;  // one origin ball covering the whole domain (non-dyadic)

  std::string descriptor() const;
  bool operator==(const BallPolicy&) const = default;
};

class BallFamily {
 public:
  BallFamily(Grid grid, BallPolicy policy, std::vector<double> radii, std::vector<Ball> balls);

  const Grid& grid() const { return grid_; }
  const BallPolicy& policy() const { return policy_; }
  const std::vector<Ball>& balls() const { return balls_; }
  const std::vector<double>& radii() const { return radii_; }
  std::size_t size() const { return balls_.size(); }
  std::string id() const;

 private:
  Grid grid_;
  BallPolicy policy_;
  std::vector<double> radii_;
  std::vector<Ball> balls_;
};

/// Dyadic radii 2^k h for k = 1 .. floor(log2(R/h)) - 1.
std::vector<double> dyadic_radii(const Grid& grid);
BallFamily build_ball_family(const Grid& grid, const BallPolicy& policy);

double integrate(const GridFunction& f);
double integrate(const GridFunction& f, const Ball& region);
double lebesgue_measure(const Grid& grid, const Ball& ball);

void write_csv(std::ostream& os, const GridFunction& f);
GridFunction read_csv(std::istream& is, const Grid& grid);

/// FNV-1a, used for config and family ids.
std::uint64_t fnv1a(std::string_view text);
std::string hex64(std::uint64_t v);

// ---------------------------------------------------------------------------

namespace detail {
inline constexpr double kMembershipSlack = 1e-12;

inline void axis_range(const Grid& g, double c, double r, int& lo, int& hi) {
  const double h = g.spacing();
  const double x0 = -g.half_width() + 0.5 * h;
  const double slack = 1e-9;
  lo = static_cast<int>(std::ceil((c - r - x0) / h - slack));
  hi = static_cast<int>(std::floor((c + r - x0) / h + slack));
  if (lo < 0) lo = 0;
  if (hi > g.points_per_axis() - 1) hi = g.points_per_axis() - 1;
}
}  // namespace detail

template <class Fn>
void for_each_cell(const Grid& g, const Ball& b, Fn&& fn) {
  const double r2 = b.radius * b.radius * (1.0 + detail::kMembershipSlack);
  int lo = 0, hi = -1;
  detail::axis_range(g, b.center[0], b.radius, lo, hi);
  if (g.dim() == 1) {
    for (int i = lo; i <= hi; ++i) {
      const double d = g.coordinate(i) - b.center[0];
      if (d * d <= r2) fn(std::size_t(i));
    }
    return;
  }
  for (int i = lo; i <= hi; ++i) {
    const double dx = g.coordinate(i) - b.center[0];
    const double rem = r2 - dx * dx;
    if (rem < 0) continue;
    int jlo = 0, jhi = -1;
    detail::axis_range(g, b.center[1], std::sqrt(rem), jlo, jhi);
    for (int j = jlo; j <= jhi; ++j) {
      const double dy = g.coordinate(j) - b.center[1];
      if (dx * dx + dy * dy <= r2) fn(g.flat_index(i, j));
    }
  }
}

}  // namespace mlab
