#include "pxlap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pxlap/error.hpp"

namespace pxlap {

namespace {

int count_nodes(double lo, double hi, double h, const char* axis) {
  if (!(h > 0.0)) throw ParameterError("grid spacing h must be > 0");
  if (!(hi > lo)) throw ParameterError(std::string("empty interval on axis ") + axis);
  const double cells = (hi - lo) / h;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
    throw ParameterError(std::string("spacing does not divide the interval on axis ") + axis);
  }
  if (rounded < 1.0) throw ParameterError("grid needs at least two nodes per axis");
  return static_cast<int>(rounded) + 1;
}

}  // namespace

Grid::Grid(int dim, Point lo, Point hi, int nx, int ny, double h)
    : dim_(dim), lo_(std::move(lo)), hi_(std::move(hi)), nx_(nx), ny_(ny), h_(h) {}

Grid Grid::line(double lo, double hi, double h) {
  const int n = count_nodes(lo, hi, h, "x");
  return Grid(1, Point(lo, 0.0), Point(hi, 0.0), n, 1, (hi - lo) / (n - 1));
}

Grid Grid::rect(double x_lo, double x_hi, double y_lo, double y_hi, double h) {
  const int nx = count_nodes(x_lo, x_hi, h, "x");
  const int ny = count_nodes(y_lo, y_hi, h, "y");
  return Grid(2, Point(x_lo, y_lo), Point(x_hi, y_hi), nx, ny, (x_hi - x_lo) / (nx - 1));
}

Grid Grid::line_nodes(double lo, double hi, int n) {
  if (n < 2) throw ParameterError("grid needs at least two nodes");
  if (!(hi > lo)) throw ParameterError("empty interval on axis x");
  return Grid(1, Point(lo, 0.0), Point(hi, 0.0), n, 1, (hi - lo) / (n - 1));
}

Grid Grid::square_nodes(double lo, double hi, int n) {
  if (n < 2) throw ParameterError("grid needs at least two nodes per axis");
  if (!(hi > lo)) throw ParameterError("empty interval");
  return Grid(2, Point(lo, lo), Point(hi, hi), n, n, (hi - lo) / (n - 1));
}

Point Grid::node(std::size_t k) const { return node(ix(k), iy(k)); }

Point Grid::node(int i, int j) const {
  if (dim_ == 1) return Point(lo_.x() + i * h_, 0.0);
  return Point(lo_.x() + i * h_, lo_.y() + j * h_);
}

bool Grid::is_boundary(std::size_t k) const { return layer(k) == 0; }

int Grid::layer(std::size_t k) const {
  const int i = ix(k);
  int d = std::min(i, nx_ - 1 - i);
  if (dim_ == 2) {
    const int j = iy(k);
    d = std::min({d, j, ny_ - 1 - j});
  }
  return d;
}

double Grid::distance_to_boundary(std::size_t k) const { return layer(k) * h_; }

double Grid::weight(std::size_t k) const {
  const int i = ix(k);
  double w = h_;
  if (i == 0 || i == nx_ - 1) w *= 0.5;
  if (dim_ == 2) {
    const int j = iy(k);
    w *= h_;
    if (j == 0 || j == ny_ - 1) w *= 0.5;
  }
  return w;
}

double Grid::measure() const {
  double m = hi_.x() - lo_.x();
  if (dim_ == 2) m *= hi_.y() - lo_.y();
  return m;
}

bool Grid::contains(const Point& x) const {
  const double slack = 1e-12 * std::max(1.0, h_);
  if (x.x() < lo_.x() - slack || x.x() > hi_.x() + slack) return false;
  if (dim_ == 2 && (x.y() < lo_.y() - slack || x.y() > hi_.y() + slack)) return false;
  return true;
}

bool Grid::same_as(const Grid& other) const {
  return dim_ == other.dim_ && nx_ == other.nx_ && ny_ == other.ny_ &&
         std::abs(h_ - other.h_) <= 1e-14 * std::max(1.0, h_) &&
         (lo_ - other.lo_).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, h_);
}

Grid Grid::sub_box(const Point& lo, const Point& hi) const {
  const double slack = 1e-9 * h_;
  auto first = [&](double a, double origin) {
    return static_cast<int>(std::ceil((a - origin) / h_ - slack / h_));
  };
  auto last = [&](double b, double origin) {
    return static_cast<int>(std::floor((b - origin) / h_ + slack / h_));
  };
  const int i0 = std::max(0, first(lo.x(), lo_.x()));
  const int i1 = std::min(nx_ - 1, last(hi.x(), lo_.x()));
  if (i1 - i0 < 1) throw ParameterError("sub-box contains fewer than two nodes per axis");
  if (dim_ == 1) {
    return Grid(1, node(i0, 0), node(i1, 0), i1 - i0 + 1, 1, h_);
  }
  const int j0 = std::max(0, first(lo.y(), lo_.y()));
  const int j1 = std::min(ny_ - 1, last(hi.y(), lo_.y()));
  if (j1 - j0 < 1) throw ParameterError("sub-box contains fewer than two nodes per axis");
  return Grid(2, node(i0, j0), node(i1, j1), i1 - i0 + 1, j1 - j0 + 1, h_);
}

GridFunction::GridFunction(Grid grid, double fill)
    : grid_(std::move(grid)), values_(grid_.size(), fill) {}

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw DimensionError("value count does not match the grid node count");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ParameterError("grid function values must be finite");
  }
}

GridFunction GridFunction::sample(const Grid& grid,
                                  const std::function<double(const Point&)>& fn) {
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) values[k] = fn(grid.node(k));
  return GridFunction(grid, std::move(values));
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool GridFunction::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

GridFunction GridFunction::scaled(double c) const {
  GridFunction out = *this;
  for (double& v : out.values_) v *= c;
  return out;
}

GridFunction GridFunction::shifted(double c) const {
  GridFunction out = *this;
  for (double& v : out.values_) v += c;
  return out;
}

GridFunction GridFunction::restricted(const Grid& sub) const {
  const double h = grid_.h();
  const int i0 = static_cast<int>(std::lround((sub.lo().x() - grid_.lo().x()) / h));
  const int j0 = grid_.dim() == 2
                     ? static_cast<int>(std::lround((sub.lo().y() - grid_.lo().y()) / h))
                     : 0;
  std::vector<double> values(sub.size());
  for (int j = 0; j < sub.ny(); ++j) {
    for (int i = 0; i < sub.nx(); ++i) {
      values[sub.index(i, j)] = at(i0 + i, j0 + j);
    }
  }
  return GridFunction(sub, std::move(values));
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!a.same_as(b)) throw DimensionError(std::string(what) + ": grids do not match");
}

Vec2 nodal_gradient(const GridFunction& u, std::size_t k) {
  const Grid& g = u.grid();
  const double h = g.h();
  const int i = g.ix(k);
  const int j = g.iy(k);
  auto diff = [&](int n, int c, auto value) {
    if (c == 0) return (value(1) - value(0)) / h;
    if (c == n - 1) return (value(c) - value(c - 1)) / h;
    return (value(c + 1) - value(c - 1)) / (2.0 * h);
  };
  Vec2 grad = Vec2::Zero();
  grad.x() = diff(g.nx(), i, [&](int a) { return u.at(a, j); });
  if (g.dim() == 2) grad.y() = diff(g.ny(), j, [&](int b) { return u.at(i, b); });
  return grad;
}

GridFunction gradient_magnitude(const GridFunction& u) {
  std::vector<double> values(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) values[k] = nodal_gradient(u, k).norm();
  return GridFunction(u.grid(), std::move(values));
}

}  // namespace pxlap
