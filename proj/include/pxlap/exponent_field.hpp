#pragma once

#include <functional>
#include <ostream>

#include "pxlap/grid.hpp"

namespace pxlap {

// Variable exponent p(x) > 1 sampled on a grid, together with its gradient
// and extrema. Immutable after construction.
class ExponentField {
 public:
  ExponentField() = default;

  // Samples `expression` on every node of `grid` (boundary included) and
  // differentiates it by central differences (one-sided on the boundary).
  // Throws InvalidExponentError naming the first node where p <= 1.
  static ExponentField build(const std::function<double(const Point&)>& expression,
                             const Grid& grid);
  static ExponentField from_values(const GridFunction& values);
  static ExponentField constant(const Grid& grid, double p);

  const Grid& grid() const { return values_.grid(); }
  const GridFunction& values() const { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  const Vec2& gradient(std::size_t k) const { return gradient_[k]; }
  double p_minus() const { return p_minus_; }
  double p_plus() const { return p_plus_; }
  bool is_constant() const { return p_minus_ == p_plus_; }

  // Bilinear interpolation of the stored values / gradients; exact at nodes.
  double at(const Point& x) const;
  Vec2 gradient_at(const Point& x) const;

  // CSV rows x[,y],p,dp_dx[,dp_dy].
  void write_csv(std::ostream& os) const;

 private:
  GridFunction values_;
  std::vector<Vec2> gradient_;
  double p_minus_ = 0.0;
  double p_plus_ = 0.0;
};

// max |p(x) - p(y)| * |log|x - y|| over node pairs with 0 < |x - y| < 1/2.
// Diagnostic only.
double log_holder_constant(const ExponentField& field);

// Smallest q >= 2 with p_minus - 2 + (q - 2)/(q - 1) >= 0.
double choose_q(double p_minus);

}  // namespace pxlap
