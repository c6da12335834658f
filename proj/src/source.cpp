#include "pxlap/source.hpp"

#include <cmath>
#include <numbers>

#include "pxlap/error.hpp"

namespace pxlap {

namespace {

void require_params(const std::string& preset, const Params& params,
                    const std::vector<std::string>& allowed) {
  const auto bad = params.unknown(allowed);
  if (!bad.empty()) {
    throw ConfigError("unknown parameter '" + bad.front() + "' for source '" + preset + "'");
  }
}

}  // namespace

std::vector<std::string> source_presets() {
  return {"zero", "constant", "linear-x", "sine", "damping",
          "gradient", "damped-gradient", "cubic-gradient"};
}

SourceSpec make_source(const std::string& preset, const Params& prm) {
  SourceSpec s;
  s.name = preset;
  s.gamma = [](double) { return 0.0; };
  if (preset == "zero") {
    require_params(preset, prm, {});
    s.evaluate = [](const Point&, double, const Vec2&) { return 0.0; };
    s.phi = [](const Point&) { return 0.0; };
  } else if (preset == "constant") {
    require_params(preset, prm, {"c"});
    const double c = prm.get("c", 1.0);
    s.evaluate = [c](const Point&, double, const Vec2&) { return c; };
    s.phi = [c](const Point&) { return std::abs(c); };
  } else if (preset == "linear-x") {
    require_params(preset, prm, {"a", "b", "c"});
    const double a = prm.get("a", 0.0), b = prm.get("b", 1.0), c = prm.get("c", 0.0);
    s.evaluate = [=](const Point& x, double, const Vec2&) { return a + b * x.x() + c * x.y(); };
    s.phi = [=](const Point& x) { return std::abs(a + b * x.x() + c * x.y()); };
  } else if (preset == "sine") {
    require_params(preset, prm, {"a", "omega", "shift"});
    const double a = prm.get("a", 1.0), w = prm.get("omega", std::numbers::pi);
    const double sh = prm.get("shift", 0.0);
    s.evaluate = [=](const Point& x, double, const Vec2&) { return a * std::sin(w * x.x() + sh); };
    s.phi = [=](const Point&) { return std::abs(a); };
  } else if (preset == "damping") {
    require_params(preset, prm, {"a", "b", "bound"});
    const double a = prm.get("a", 1.0), b = prm.get("b", 0.0), bound = prm.get("bound", 10.0);
    if (a < 0.0) throw ConfigError("damping source requires a >= 0");
    s.evaluate = [=](const Point&, double t, const Vec2&) { return b - a * t; };
    s.phi = [=](const Point&) { return std::abs(b) + a * bound; };
    s.depends_on_t = true;
  } else if (preset == "gradient") {
    require_params(preset, prm, {"a", "c"});
    const double a = prm.get("a", 0.1), c = prm.get("c", 0.0);
    s.evaluate = [=](const Point&, double, const Vec2& eta) { return c + a * eta.norm(); };
    s.gamma = [a](double) { return std::abs(a); };
    s.phi = [=](const Point&) { return std::abs(c) + std::abs(a); };
    s.lipschitz_eta = std::abs(a);
    s.depends_on_eta = true;
  } else if (preset == "damped-gradient") {
    require_params(preset, prm, {"a", "bound"});
    const double a = prm.get("a", 1.0), bound = prm.get("bound", 10.0);
    s.evaluate = [=](const Point&, double t, const Vec2& eta) { return -t + a * eta.norm(); };
    s.gamma = [a](double) { return std::abs(a); };
    s.phi = [=](const Point&) { return bound + std::abs(a); };
    s.lipschitz_eta = std::abs(a);
    s.depends_on_t = true;
    s.depends_on_eta = true;
  } else if (preset == "cubic-gradient") {
    require_params(preset, prm, {});
    s.evaluate = [](const Point&, double, const Vec2& eta) { return std::pow(eta.norm(), 3); };
    s.gamma = [](double) { return 1.0; };
    s.phi = [](const Point&) { return 0.0; };
    s.lipschitz_eta = INFINITY;
    s.depends_on_eta = true;
  } else {
    throw ConfigError("unknown source preset '" + preset + "'");
  }
  return s;
}

}  // namespace pxlap
