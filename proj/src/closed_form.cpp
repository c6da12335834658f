#include "pxlap/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "pxlap/error.hpp"

namespace pxlap {

std::vector<std::string> Params::unknown(const std::vector<std::string>& allowed) const {
  std::vector<std::string> out;
  for (const auto& [key, value] : values_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) out.push_back(key);
  }
  return out;
}

OperatorProbe ClosedForm::probe(const Point& x, int dim) const {
  if (!smooth()) throw ParameterError("closed form '" + name + "' has no derivatives");
  OperatorProbe pr;
  pr.x = x;
  pr.dim = dim;
  pr.value = value(x);
  pr.gradient = gradient(x);
  pr.hessian = hessian(x);
  if (dim == 1) {
    pr.gradient.y() = 0.0;
    pr.hessian(0, 1) = pr.hessian(1, 0) = pr.hessian(1, 1) = 0.0;
  }
  return pr;
}

namespace {

using std::numbers::pi;

void require_params(const std::string& preset, const Params& params,
                    const std::vector<std::string>& allowed) {
  const auto bad = params.unknown(allowed);
  if (!bad.empty()) {
    throw ConfigError("unknown parameter '" + bad.front() + "' for preset '" + preset + "'");
  }
}

ClosedForm random_lipschitz(const Params& prm, const Grid& grid) {
  const int knots = std::max(2, static_cast<int>(prm.get("knots", 16)));
  const double lip = prm.get("lipschitz", 1.0);
  const auto seed = static_cast<std::uint64_t>(prm.get("seed", 1));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  const Point lo = grid.lo();
  const Point hi = grid.hi();
  const double dx = (hi.x() - lo.x()) / (knots - 1);
  const double dy = grid.dim() == 2 ? (hi.y() - lo.y()) / (knots - 1) : 1.0;
  const int ny = grid.dim() == 2 ? knots : 1;
  auto table = std::make_shared<std::vector<double>>(static_cast<std::size_t>(knots) * ny);
  if (grid.dim() == 1) {
    double v = 0.0;
    for (int i = 0; i < knots; ++i) {
      (*table)[i] = v;
      v += lip * unit(rng) * dx;
    }
  } else {
    const double step = 0.5 * lip * std::min(dx, dy);
    for (auto& v : *table) v = step * unit(rng);
  }
  const int dim = grid.dim();
  ClosedForm cf;
  cf.name = "random-lipschitz";
  cf.value = [=](const Point& x) {
    auto locate = [knots](double s, int& i0, double& t) {
      s = std::clamp(s, 0.0, static_cast<double>(knots - 1));
      i0 = std::min(static_cast<int>(std::floor(s)), knots - 2);
      t = s - i0;
    };
    int i0 = 0, j0 = 0;
    double tx = 0.0, ty = 0.0;
    locate((x.x() - lo.x()) / dx, i0, tx);
    const auto& tab = *table;
    if (dim == 1) return (1.0 - tx) * tab[i0] + tx * tab[i0 + 1];
    locate((x.y() - lo.y()) / dy, j0, ty);
    auto at = [&](int i, int j) { return tab[static_cast<std::size_t>(j) * knots + i]; };
    return (1.0 - ty) * ((1.0 - tx) * at(i0, j0) + tx * at(i0 + 1, j0)) +
           ty * ((1.0 - tx) * at(i0, j0 + 1) + tx * at(i0 + 1, j0 + 1));
  };
  return cf;
}

}  // namespace

std::vector<std::string> closed_form_presets() {
  return {"constant", "affine", "quadratic", "radial", "cone", "sine",
          "polynomial", "sinh", "exp", "p-poisson-1d", "random-lipschitz"};
}

ClosedForm make_closed_form(const std::string& preset, const Params& prm, const Grid& grid) {
  ClosedForm cf;
  cf.name = preset;
  if (preset == "constant") {
    require_params(preset, prm, {"c"});
    const double c = prm.get("c", 0.0);
    cf.value = [c](const Point&) { return c; };
    cf.gradient = [](const Point&) { return Vec2(Vec2::Zero()); };
    cf.hessian = [](const Point&) { return Mat2(Mat2::Zero()); };
  } else if (preset == "affine" || preset == "quadratic") {
    if (preset == "affine") {
      require_params(preset, prm, {"a", "b", "c"});
    } else {
      require_params(preset, prm, {"a", "b", "c", "d", "e", "f"});
    }
    const double a = prm.get("a", 0.0), b = prm.get("b", 0.0), c = prm.get("c", 0.0);
    const double d = prm.get("d", 0.0), e = prm.get("e", 0.0), f = prm.get("f", 0.0);
    cf.value = [=](const Point& x) {
      return a + b * x.x() + c * x.y() + d * x.x() * x.x() + e * x.y() * x.y() +
             f * x.x() * x.y();
    };
    cf.gradient = [=](const Point& x) {
      return Vec2(b + 2.0 * d * x.x() + f * x.y(), c + 2.0 * e * x.y() + f * x.x());
    };
    cf.hessian = [=](const Point&) {
      Mat2 m;
      m << 2.0 * d, f, f, 2.0 * e;
      return m;
    };
  } else if (preset == "radial" || preset == "cone") {
    require_params(preset, prm, {"a", "m", "cx", "cy"});
    const double a = prm.get("a", 1.0);
    const double m = preset == "cone" ? 1.0 : prm.get("m", 2.0);
    const Point c(prm.get("cx", 0.0), grid.dim() == 2 ? prm.get("cy", 0.0) : 0.0);
    cf.value = [=](const Point& x) { return a * std::pow((x - c).norm(), m); };
    if (preset == "radial") {
      cf.gradient = [=](const Point& x) {
        const Vec2 d = x - c;
        const double r = d.norm();
        if (r == 0.0) return Vec2(Vec2::Zero());
        return Vec2(a * m * std::pow(r, m - 2.0) * d);
      };
      cf.hessian = [=](const Point& x) {
        const Vec2 d = x - c;
        const double r = d.norm();
        if (r == 0.0) {
          return Mat2(m == 2.0 ? Mat2(2.0 * a * Mat2::Identity()) : Mat2(Mat2::Zero()));
        }
        const Vec2 n = d / r;
        return Mat2(a * m * std::pow(r, m - 2.0) *
                    (Mat2::Identity() + (m - 2.0) * n * n.transpose()));
      };
    }
  } else if (preset == "sine") {
    require_params(preset, prm, {"a", "b", "omega", "shift"});
    const double a = prm.get("a", 1.0), b = prm.get("b", 0.0);
    const double w = prm.get("omega", pi), s = prm.get("shift", 0.0);
    cf.value = [=](const Point& x) {
      return a * std::sin(w * x.x() + s) + b * std::sin(w * x.y() + s);
    };
    cf.gradient = [=](const Point& x) {
      return Vec2(a * w * std::cos(w * x.x() + s), b * w * std::cos(w * x.y() + s));
    };
    cf.hessian = [=](const Point& x) {
      Mat2 h = Mat2::Zero();
      h(0, 0) = -a * w * w * std::sin(w * x.x() + s);
      h(1, 1) = -b * w * w * std::sin(w * x.y() + s);
      return h;
    };
  } else if (preset == "polynomial") {
    std::vector<std::string> keys;
    for (int k = 0; k < 10; ++k) keys.push_back("c" + std::to_string(k));
    require_params(preset, prm, keys);
    std::vector<double> c(10);
    for (int k = 0; k < 10; ++k) c[k] = prm.get(keys[k], 0.0);
    auto eval = [c](double x, int deriv) {
      double sum = 0.0;
      for (int k = 9; k >= deriv; --k) {
        double coeff = c[k];
        for (int d = 0; d < deriv; ++d) coeff *= (k - d);
        sum = sum * x + coeff;
      }
      return sum;
    };
    cf.value = [eval](const Point& x) { return eval(x.x(), 0); };
    cf.gradient = [eval](const Point& x) { return Vec2(eval(x.x(), 1), 0.0); };
    cf.hessian = [eval](const Point& x) {
      Mat2 h = Mat2::Zero();
      h(0, 0) = eval(x.x(), 2);
      return h;
    };
  } else if (preset == "sinh" || preset == "exp") {
    require_params(preset, prm, {"a", "omega"});
    const double a = prm.get("a", 1.0), w = prm.get("omega", 1.0);
    const bool is_sinh = preset == "sinh";
    // sinh preset: a sinh(w x) / sinh(w), equal to a at x = 1.
    const double scale = is_sinh ? a / std::sinh(w) : a;
    cf.value = [=](const Point& x) {
      return scale * (is_sinh ? std::sinh(w * x.x()) : std::exp(w * x.x()));
    };
    cf.gradient = [=](const Point& x) {
      return Vec2(scale * w * (is_sinh ? std::cosh(w * x.x()) : std::exp(w * x.x())), 0.0);
    };
    cf.hessian = [=](const Point& x) {
      Mat2 h = Mat2::Zero();
      h(0, 0) = scale * w * w * (is_sinh ? std::sinh(w * x.x()) : std::exp(w * x.x()));
      return h;
    };
  } else if (preset == "p-poisson-1d") {
    // Solution of -(|u'|^{p-2} u')' = 1 on [0, 1] with u(0) = u(1) = 0:
    // u = (p-1)/p ((1/2)^{p/(p-1)} - |x - 1/2|^{p/(p-1)}).
    require_params(preset, prm, {"p"});
    const double p = prm.get("p", 2.0);
    if (!(p > 1.0)) throw ConfigError("p-poisson-1d requires p > 1");
    const double e = p / (p - 1.0);
    const double c = (p - 1.0) / p;
    cf.value = [=](const Point& x) {
      return c * (std::pow(0.5, e) - std::pow(std::abs(x.x() - 0.5), e));
    };
    cf.gradient = [=](const Point& x) {
      const double t = 0.5 - x.x();
      return Vec2(std::copysign(std::pow(std::abs(t), 1.0 / (p - 1.0)), t), 0.0);
    };
    cf.hessian = [=](const Point& x) {
      Mat2 h = Mat2::Zero();
      const double t = std::abs(0.5 - x.x());
      h(0, 0) = t == 0.0 ? (p < 2.0 ? 0.0 : -INFINITY)
                         : -std::pow(t, 1.0 / (p - 1.0) - 1.0) / (p - 1.0);
      return h;
    };
  } else if (preset == "random-lipschitz") {
    require_params(preset, prm, {"knots", "lipschitz", "seed"});
    cf = random_lipschitz(prm, grid);
  } else {
    throw ConfigError("unknown function preset '" + preset + "'");
  }
  return cf;
}

}  // namespace pxlap
