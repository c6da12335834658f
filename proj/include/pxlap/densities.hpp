#pragma once

#include <cmath>

#include "pxlap/grid.hpp"

namespace pxlap {

// (delta^2 + |xi|^2)^{p/2} / p and its flux (delta^2 + |xi|^2)^{(p-2)/2} xi.
// With delta = 0 the flux is extended by 0 at xi = 0.
struct PowerDensity {
  double delta = 0.0;

  double value(double p, const Vec2& xi) const {
    const double s = delta * delta + xi.squaredNorm();
    return s == 0.0 ? 0.0 : std::pow(s, 0.5 * p) / p;
  }

  Vec2 flux(double p, const Vec2& xi) const {
    const double s = delta * delta + xi.squaredNorm();
    if (s == 0.0) return Vec2::Zero();
    return std::pow(s, 0.5 * (p - 2.0)) * xi;
  }

  // value(p, xi + d) - value(p, xi) without cancellation against value(p, xi).
  double difference(double p, const Vec2& xi, const Vec2& d) const {
    const double s = delta * delta + xi.squaredNorm();
    const double ds = d.dot(2.0 * xi + d);
    if (s == 0.0) return ds <= 0.0 ? 0.0 : std::pow(ds, 0.5 * p) / p;
    const double ratio = ds / s;
    if (ratio <= -1.0) return -std::pow(s, 0.5 * p) / p;
    return std::pow(s, 0.5 * p) * std::expm1(0.5 * p * std::log1p(ratio)) / p;
  }
};

// Chen-Levine-Rao density: |xi|^p / p for |xi| <= beta, |xi| - C(beta, p)
// beyond, with C chosen so the density is continuous at |xi| = beta.
struct ClrDensity {
  double beta = 1.0;

  static double continuity_constant(double beta, double p) {
    return beta - std::pow(beta, p) / p;
  }

  double value(double p, const Vec2& xi) const {
    const double r = xi.norm();
    if (r <= beta) return r == 0.0 ? 0.0 : std::pow(r, p) / p;
    return r - continuity_constant(beta, p);
  }

  Vec2 flux(double p, const Vec2& xi) const {
    const double r = xi.norm();
    if (r == 0.0) return Vec2::Zero();
    if (r <= beta) return std::pow(r, p - 2.0) * xi;
    return xi / r;
  }

  double difference(double p, const Vec2& xi, const Vec2& d) const {
    return value(p, xi + d) - value(p, xi);
  }
};

}  // namespace pxlap
