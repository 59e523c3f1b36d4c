#include "mlab/lattice.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "mlab/error.hpp"

namespace mlab {

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error([&] {
        std::string msg;
        for (std::size_t i = 0; i < violations.size(); ++i) {
          if (i) msg += "; ";
          msg += violations[i];
        }
        return msg;
      }()),
      violations_(std::move(violations)) {}

Grid::Grid(int dim, double half_width, int points_per_axis)
    : dim_(dim), half_width_(half_width), n_(points_per_axis), h_(0.0) {
  if (dim != 1 && dim != 2) throw ConfigError("dim must be 1 or 2");
  if (!(half_width > 0) || !std::isfinite(half_width)) throw ConfigError("R must be positive");
  if (points_per_axis <= 0 || points_per_axis % 2 != 0) throw ConfigError("N must be a positive even integer");
  h_ = 2.0 * half_width / points_per_axis;
}

Point Grid::point(std::size_t flat) const {
  if (dim_ == 1) return {coordinate(int(flat)), 0.0};
  return {coordinate(int(flat / n_)), coordinate(int(flat % n_))};
}

int Grid::nearest_index(double x) const {
  int i = static_cast<int>(std::floor((x + half_width_) / h_));
  return std::clamp(i, 0, n_ - 1);
}

double norm(const Point& p, int dim) {
  return dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
}

GridFunction::GridFunction(const Grid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

GridFunction::GridFunction(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw ParameterError("grid function length does not match grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw ParameterError("grid function has a non-finite sample");
}

GridFunction GridFunction::from(const Grid& grid, const std::function<double(const Point&)>& fn) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.point(i));
  return GridFunction(grid, std::move(v));
}

GridFunction GridFunction::constant(const Grid& grid, double c) {
  return GridFunction(grid, std::vector<double>(grid.size(), c));
}

GridFunction GridFunction::abs() const {
  GridFunction out(grid_);
  for (std::size_t i = 0; i < size(); ++i) out[i] = std::abs(values_[i]);
  return out;
}

GridFunction GridFunction::scaled(double c) const {
  GridFunction out(grid_);
  for (std::size_t i = 0; i < size(); ++i) out[i] = c * values_[i];
  return out;
}

GridFunction GridFunction::operator+(const GridFunction& o) const {
  GridFunction out(grid_);
  for (std::size_t i = 0; i < size(); ++i) out[i] = values_[i] + o[i];
  return out;
}

GridFunction GridFunction::operator-(const GridFunction& o) const {
  GridFunction out(grid_);
  for (std::size_t i = 0; i < size(); ++i) out[i] = values_[i] - o[i];
  return out;
}

GridFunction GridFunction::operator*(const GridFunction& o) const {
  GridFunction out(grid_);
  for (std::size_t i = 0; i < size(); ++i) out[i] = values_[i] * o[i];
  return out;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Ball make_ball(const Grid& grid, const Point& center, double radius) {
  if (!(radius >= grid.spacing() * (1.0 - 1e-12)))
    throw ParameterError("ball radius must be at least the grid spacing");
  return Ball{center, radius, false};
}

Ball single_cell_ball(const Grid& grid, std::size_t flat) {
  return Ball{grid.point(flat), 0.5 * grid.spacing(), true};
}

std::size_t cell_count(const Grid& g, const Ball& b) {
  std::size_t n = 0;
  for_each_cell(g, b, [&](std::size_t) { ++n; });
  return n;
}

std::string BallPolicy::descriptor() const {
  std::ostringstream os;
  os << "stride=" << stride << ";origin=" << include_origin << ";single=" << include_single_cell
     << ";origin_only=" << origin_only << ";domain=" << include_domain_ball;
  return os.str();
}

BallFamily::BallFamily(Grid grid, BallPolicy policy, std::vector<double> radii, std::vector<Ball> balls)
    : grid_(grid), policy_(policy), radii_(std::move(radii)), balls_(std::move(balls)) {}

std::string BallFamily::id() const {
  std::ostringstream os;
  os << "d" << grid_.dim() << "R" << grid_.half_width() << "N" << grid_.points_per_axis() << ":"
     << policy_.descriptor();
  return os.str();
}

std::vector<double> dyadic_radii(const Grid& grid) {
  const double ratio = grid.half_width() / grid.spacing();  // N/2
  const int kmax = static_cast<int>(std::floor(std::log2(ratio) + 1e-12)) - 1;
  std::vector<double> radii;
  for (int k = 1; k <= kmax; ++k) radii.push_back(std::ldexp(grid.spacing(), k));
  return radii;
}

BallFamily build_ball_family(const Grid& grid, const BallPolicy& policy) {
  if (policy.stride < 1) throw ConfigError("ball stride must be >= 1");
  std::vector<double> radii = dyadic_radii(grid);
  if (radii.empty())
    throw ConfigError("grid too small to host any ball (N = " + std::to_string(grid.points_per_axis()) +
                      "; need N >= 8)");
  if (policy.origin_only && !policy.include_origin && !policy.include_domain_ball)
    throw ConfigError("origin_only requires the origin flag");

  std::vector<Point> centers;
  if (!policy.origin_only) {
    const int n = grid.points_per_axis();
    const int s = policy.stride;
    std::vector<int> idx;
    for (int i = (std::min(s, n) - 1) / 2; i < n; i += s) idx.push_back(i);
    if (grid.dim() == 1) {
      for (int i : idx) centers.push_back({grid.coordinate(i), 0.0});
    } else {
      for (int i : idx)
        for (int j : idx) centers.push_back({grid.coordinate(i), grid.coordinate(j)});
    }
  }
  // Origin balls first, then strided centers in lexicographic order; radii ascending per center.
  std::vector<Ball> balls;
  if (policy.include_origin)
    for (double r : radii) balls.push_back(Ball{{0.0, 0.0}, r, false});
  for (const auto& c : centers)
    for (double r : radii) balls.push_back(Ball{c, r, false});
  if (policy.include_domain_ball) {
    const double r = grid.half_width() * std::sqrt(double(grid.dim()));
    balls.push_back(Ball{{0.0, 0.0}, r, false});
  }
  return BallFamily(grid, policy, std::move(radii), std::move(balls));
}

double integrate(const GridFunction& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().cell_volume();
}

double integrate(const GridFunction& f, const Ball& region) {
  double s = 0.0;
  std::size_t n = 0;
  for_each_cell(f.grid(), region, [&](std::size_t i) {
    s += f[i];
    ++n;
  });
  if (n == 0) throw EmptyRegionError("integration region contains no grid cell");
  return s * f.grid().cell_volume();
}

double lebesgue_measure(const Grid& grid, const Ball& ball) {
  return double(cell_count(grid, ball)) * grid.cell_volume();
}

void write_csv(std::ostream& os, const GridFunction& f) {
  const Grid& g = f.grid();
  char buf[96];
  if (g.dim() == 1) {
    os << "i,x,value\n";
    for (int i = 0; i < g.points_per_axis(); ++i) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", i, g.coordinate(i), f[i]);
      os << buf;
    }
    return;
  }
  os << "i,j,x,y,value\n";
  for (int i = 0; i < g.points_per_axis(); ++i)
    for (int j = 0; j < g.points_per_axis(); ++j) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", i, j, g.coordinate(i), g.coordinate(j),
                    f[g.flat_index(i, j)]);
      os << buf;
    }
}

GridFunction read_csv(std::istream& is, const Grid& grid) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty CSV");
  std::vector<double> values(grid.size(), 0.0);
  std::vector<char> seen(grid.size(), 0);
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    const std::size_t want = grid.dim() == 1 ? 3 : 5;
    if (cols.size() != want) throw ConfigError("CSV row has " + std::to_string(cols.size()) + " columns");
    int i = std::stoi(cols[0]);
    int j = grid.dim() == 1 ? 0 : std::stoi(cols[1]);
    if (i < 0 || i >= grid.points_per_axis() || j < 0 || j >= grid.points_per_axis())
      throw ConfigError("CSV index out of range");
    std::size_t k = grid.flat_index(i, j);
    values[k] = std::stod(cols.back());
    seen[k] = 1;
    ++rows;
  }
  if (rows != grid.size() || std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw ConfigError("CSV does not cover the grid");
  return GridFunction(grid, std::move(values));
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace mlab
