#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pxlap/grid.hpp"
#include "pxlap/params.hpp"

namespace pxlap {

// Right-hand side f(x, t, eta) with its growth envelope
//   |f(x, t, eta)| <= gamma(|t|) |eta|^{p(x)-1} + phi(x)
// and structural flags.
struct SourceSpec {
  std::string name;
  std::function<double(const Point&, double, const Vec2&)> evaluate;
  std::function<double(double)> gamma;
  std::function<double(const Point&)> phi;
  double lipschitz_eta = 0.0;
  bool monotone_t = true;  // non-increasing in t
  bool depends_on_t = false;
  bool depends_on_eta = false;

  double operator()(const Point& x, double t, const Vec2& eta) const {
    return evaluate(x, t, eta);
  }
  bool depends_on_x_only() const { return !depends_on_t && !depends_on_eta; }
};

// Presets (parameters in brackets):
//   zero
//   constant        f = c                         [c]
//   linear-x        f = a + b x1 + c x2           [a b c]
//   sine            f = a sin(omega x1 + shift)   [a omega shift]
//   damping         f = b - a t                   [a b bound]
//   gradient        f = c + a |eta|               [a c]
//   damped-gradient f = -t + a |eta|              [a bound]
//   cubic-gradient  f = |eta|^3
// `bound` is the |t| range the growth envelope is certified for (default 10).
SourceSpec make_source(const std::string& preset, const Params& params);
std::vector<std::string> source_presets();

}  // namespace pxlap
