#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pxlap {

// Coordinates and gradients are stored as 2-vectors; in 1D the second
// component is always zero.
using Point = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Uniform, axis-aligned node grid on a closed interval or rectangle.
// Both axes share the spacing h and nodes include the boundary.
// Node k = j * nx + i sits at (lo.x + i h, lo.y + j h).
class Grid {
 public:
  Grid() = default;

  static Grid line(double lo, double hi, double h);
  static Grid rect(double x_lo, double x_hi, double y_lo, double y_hi, double h);
  // Grid with n nodes per axis on the given interval (h = (hi - lo) / (n - 1)).
  static Grid line_nodes(double lo, double hi, int n);
  static Grid square_nodes(double lo, double hi, int n);

  int dim() const { return dim_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
  double h() const { return h_; }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }

  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * nx_ + i;
  }
  int ix(std::size_t k) const { return static_cast<int>(k % nx_); }
  int iy(std::size_t k) const { return static_cast<int>(k / nx_); }
  Point node(std::size_t k) const;
  Point node(int i, int j) const;

  bool is_boundary(std::size_t k) const;
  // Number of nodes separating k from the nearest boundary node (0 on the boundary).
  int layer(std::size_t k) const;
  double distance_to_boundary(std::size_t k) const;
  // Composite trapezoid weight: h^d times 1/2 per boundary axis.
  double weight(std::size_t k) const;
  double measure() const;

  bool contains(const Point& x) const;
  bool same_as(const Grid& other) const;

  // Sub-grid of nodes whose coordinates lie inside [lo, hi] (inclusive, with
  // a small slack). The result shares the spacing of this grid.
  Grid sub_box(const Point& lo, const Point& hi) const;

 private:
  Grid(int dim, Point lo, Point hi, int nx, int ny, double h);

  int dim_ = 1;
  Point lo_ = Point::Zero();
  Point hi_ = Point::Zero();
  int nx_ = 0;
  int ny_ = 1;
  double h_ = 0.0;
};

// Scalar field sampled on the nodes of a grid.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(Grid grid, double fill = 0.0);
  GridFunction(Grid grid, std::vector<double> values);

  static GridFunction sample(const Grid& grid,
                             const std::function<double(const Point&)>& fn);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double at(int i, int j = 0) const { return values_[grid_.index(i, j)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double max_abs() const;
  double min() const;
  double max() const;
  double oscillation() const { return max() - min(); }
  bool is_zero() const;

  GridFunction scaled(double c) const;
  GridFunction shifted(double c) const;
  GridFunction negated() const { return scaled(-1.0); }

  // Restriction to a sub-grid produced by Grid::sub_box.
  GridFunction restricted(const Grid& sub) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

// Throws DimensionError unless both grids coincide.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

// Nodal gradient: central differences in the interior, one-sided on the
// boundary.
Vec2 nodal_gradient(const GridFunction& u, std::size_t k);
GridFunction gradient_magnitude(const GridFunction& u);

}  // namespace pxlap
