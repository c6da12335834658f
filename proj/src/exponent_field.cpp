#include "pxlap/exponent_field.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "pxlap/error.hpp"

namespace pxlap {

ExponentField ExponentField::build(const std::function<double(const Point&)>& expression,
                                   const Grid& grid) {
  return from_values(GridFunction::sample(grid, expression));
}

ExponentField ExponentField::from_values(const GridFunction& values) {
  const Grid& grid = values.grid();
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] > 1.0) || !std::isfinite(values[k])) {
      const Point x = grid.node(k);
      std::ostringstream msg;
      msg << "exponent must exceed 1: p = " << values[k] << " at node " << k << " (x = " << x.x();
      if (grid.dim() == 2) msg << ", y = " << x.y();
      msg << ")";
      throw InvalidExponentError(msg.str());
    }
  }
  ExponentField field;
  field.values_ = values;
  field.gradient_.resize(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) field.gradient_[k] = nodal_gradient(values, k);
  field.p_minus_ = values.min();
  field.p_plus_ = values.max();
  return field;
}

ExponentField ExponentField::constant(const Grid& grid, double p) {
  return from_values(GridFunction(grid, p));
}

namespace {

struct Cell {
  int i0, j0;
  double tx, ty;
};

Cell locate(const Grid& g, const Point& x) {
  const double h = g.h();
  auto axis = [h](double coord, double origin, int n, int& i0, double& t) {
    double s = (coord - origin) / h;
    s = std::clamp(s, 0.0, static_cast<double>(n - 1));
    i0 = std::min(static_cast<int>(std::floor(s)), n - 2);
    t = s - i0;
  };
  Cell c{0, 0, 0.0, 0.0};
  axis(x.x(), g.lo().x(), g.nx(), c.i0, c.tx);
  if (g.dim() == 2) axis(x.y(), g.lo().y(), g.ny(), c.j0, c.ty);
  return c;
}

template <class Get>
auto bilinear(const Grid& g, const Cell& c, Get get) {
  auto v00 = get(g.index(c.i0, c.j0));
  auto v10 = get(g.index(c.i0 + 1, c.j0));
  if (g.dim() == 1) return decltype(v00)((1.0 - c.tx) * v00 + c.tx * v10);
  auto v01 = get(g.index(c.i0, c.j0 + 1));
  auto v11 = get(g.index(c.i0 + 1, c.j0 + 1));
  return decltype(v00)((1.0 - c.ty) * ((1.0 - c.tx) * v00 + c.tx * v10) +
                       c.ty * ((1.0 - c.tx) * v01 + c.tx * v11));
}

}  // namespace

double ExponentField::at(const Point& x) const {
  const Cell c = locate(grid(), x);
  return bilinear(grid(), c, [&](std::size_t k) { return values_[k]; });
}

Vec2 ExponentField::gradient_at(const Point& x) const {
  const Cell c = locate(grid(), x);
  return bilinear(grid(), c, [&](std::size_t k) { return Vec2(gradient_[k]); });
}

void ExponentField::write_csv(std::ostream& os) const {
  const auto flags = os.flags();
  const bool two_d = grid().dim() == 2;
  os << (two_d ? "x,y,p,dp_dx,dp_dy\n" : "x,p,dp_dx\n") << std::setprecision(17);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const Point x = grid().node(k);
    os << x.x() << ',';
    if (two_d) os << x.y() << ',';
    os << values_[k] << ',' << gradient_[k].x();
    if (two_d) os << ',' << gradient_[k].y();
    os << '\n';
  }
  os.flags(flags);
}

double log_holder_constant(const ExponentField& field) {
  const Grid& g = field.grid();
  const std::size_t n = g.size();
  if (n < 2) throw ParameterError("log-Hoelder constant needs at least two nodes");
  double best = 0.0;
#pragma omp parallel for reduction(max : best) schedule(dynamic, 16)
  for (std::size_t a = 0; a < n; ++a) {
    const Point xa = g.node(a);
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dist = (g.node(b) - xa).norm();
      if (dist >= 0.5) continue;
      const double c = std::abs(field[a] - field[b]) * std::abs(std::log(dist));
      best = std::max(best, c);
    }
  }
  return best;
}

double choose_q(double p_minus) {
  if (!(p_minus > 1.0)) throw InvalidExponentError("choose_q requires p_minus > 1");
  return std::max(2.0, p_minus / (p_minus - 1.0));
}

}  // namespace pxlap
