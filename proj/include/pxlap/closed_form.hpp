#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pxlap/grid.hpp"
#include "pxlap/params.hpp"

namespace pxlap {

// Value, gradient and hessian of a function at a point: the (eta, X) pair of
// a second-order jet together with the base value.
struct OperatorProbe {
  Point x = Point::Zero();
  double value = 0.0;
  Vec2 gradient = Vec2::Zero();
  Mat2 hessian = Mat2::Zero();
  int dim = 1;
};

// Closed-form scalar function. Smooth presets also provide exact first and
// second derivatives; non-smooth ones (cone, random-lipschitz) only values.
struct ClosedForm {
  std::string name;
  std::function<double(const Point&)> value;
  std::function<Vec2(const Point&)> gradient;
  std::function<Mat2(const Point&)> hessian;

  bool smooth() const { return static_cast<bool>(gradient) && static_cast<bool>(hessian); }
  OperatorProbe probe(const Point& x, int dim) const;
  GridFunction sample(const Grid& grid) const { return GridFunction::sample(grid, value); }
};

// Presets: constant, affine, quadratic, radial, cone, sine, polynomial, sinh,
// exp, p-poisson-1d, random-lipschitz. `grid` supplies the domain for the
// random presets. Throws ConfigError for unknown presets or parameters.
ClosedForm make_closed_form(const std::string& preset, const Params& params, const Grid& grid);
std::vector<std::string> closed_form_presets();

}  // namespace pxlap
