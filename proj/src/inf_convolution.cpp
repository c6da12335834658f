#include "pxlap/inf_convolution.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "pxlap/error.hpp"
#include "pxlap/kernels.hpp"

namespace pxlap {

namespace {

struct Direction {
  int di;
  int dj;
};

std::vector<Direction> directions(int dim) {
  if (dim == 1) return {{1, 0}};
  return {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
}

bool neighbor(const Grid& g, std::size_t k, int di, int dj, std::size_t& out) {
  const int i = g.ix(k) + di;
  const int j = g.iy(k) + dj;
  if (i < 0 || i >= g.nx() || j < 0 || j >= g.ny()) return false;
  out = g.index(i, j);
  return true;
}

std::string node_label(const std::string& what, const Grid& g, std::size_t k) {
  std::ostringstream os;
  os << what << "@x=" << std::setprecision(6) << g.node(k).x();
  if (g.dim() == 2) os << ";y=" << g.node(k).y();
  return os.str();
}

double default_tol(const Grid& g, std::optional<double> tol) { return tol ? *tol : 10.0 * g.h(); }

}  // namespace

void ConvolutionResult::write_csv(std::ostream& os, const GridFunction& u) const {
  const Grid& g = grid();
  const bool two_d = g.dim() == 2;
  const auto flags = os.flags();
  os << (two_d ? "x,y,u,u_eps,argmin_x,argmin_y,dist\n" : "x,u,u_eps,argmin_x,dist\n")
     << std::setprecision(17);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    const Point y = g.node(argmin[k]);
    os << x.x() << ',';
    if (two_d) os << x.y() << ',';
    os << u[k] << ',' << u_eps[k] << ',' << y.x() << ',';
    if (two_d) os << y.y() << ',';
    os << (x - y).norm() << '\n';
  }
  os.flags(flags);
}

ConvolutionResult inf_convolve(const GridFunction& u, double epsilon, double q) {
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be > 0");
  if (!(q >= 2.0)) throw ParameterError("q must be >= 2");
  const Grid& g = u.grid();
  ConvolutionResult res;
  res.epsilon = epsilon;
  res.q = q;
  res.oscillation = u.oscillation();
  res.r_eps = kernels::convolution_radius(epsilon, q, res.oscillation);
  std::vector<double> values(g.size());
  res.argmin.resize(g.size());
  kernels::omp::inf_convolve(g, u.values(), epsilon, q, values, res.argmin);
  res.u_eps = GridFunction(g, std::move(values));
  return res;
}

ConvolutionResult sup_convolve(const GridFunction& u, double epsilon, double q) {
  ConvolutionResult res = inf_convolve(u.negated(), epsilon, q);
  res.u_eps = res.u_eps.negated();
  return res;
}

CheckReport monotone_family_check(const GridFunction& u, std::span<const double> epsilons,
                                  double q) {
  for (std::size_t k = 1; k < epsilons.size(); ++k) {
    if (!(epsilons[k] < epsilons[k - 1])) {
      throw ParameterError("epsilons must be strictly decreasing");
    }
  }
  CheckReport report("monotone_family", 0.0);
  std::vector<GridFunction> family;
  for (double eps : epsilons) family.push_back(inf_convolve(u, eps, q).u_eps);
  double prev_dev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < family.size(); ++k) {
    const GridFunction& cur = family[k];
    const GridFunction& next = k + 1 < family.size() ? family[k + 1] : u;
    double worst = -std::numeric_limits<double>::infinity();
    double dev = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) {
      worst = std::max(worst, cur[n] - next[n]);
      dev = std::max(dev, std::abs(cur[n] - u[n]));
    }
    std::ostringstream label;
    label << "increasing:eps=" << epsilons[k] << (k + 1 < family.size() ? "->next" : "->u");
    report.add_le(label.str(), worst, 0.0);
    std::ostringstream dlabel;
    dlabel << "deviation_nonincreasing:eps=" << epsilons[k];
    if (k > 0) report.add_le(dlabel.str(), dev, prev_dev);
    prev_dev = dev;
  }
  return report;
}

double semiconcavity_constant(double q, double epsilon, double r_eps) {
  if (q == 2.0) return 1.0 / (2.0 * epsilon);
  return (q - 1.0) / (2.0 * epsilon) * std::pow(2.0 * r_eps, q - 2.0) /
         std::pow(epsilon, q - 2.0);
}

CheckReport semiconcavity_check(const ConvolutionResult& res, std::optional<double> tol) {
  const Grid& g = res.grid();
  if (g.nx() < 3 || (g.dim() == 2 && g.ny() < 3)) {
    throw ParameterError("semiconcavity_check needs at least 3 nodes per axis");
  }
  CheckReport report("semiconcavity", default_tol(g, tol));
  const double bound = 2.0 * semiconcavity_constant(res.q, res.epsilon, res.r_eps);
  const double h = g.h();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.layer(k) < 1 || !res.in_shrunken_domain(k)) continue;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& d : directions(g.dim())) {
      std::size_t a = 0, b = 0;
      if (!neighbor(g, k, d.di, d.dj, a) || !neighbor(g, k, -d.di, -d.dj, b)) continue;
      const double len2 = h * h * (d.di * d.di + d.dj * d.dj);
      worst = std::max(worst, (res.u_eps[a] - 2.0 * res.u_eps[k] + res.u_eps[b]) / len2);
    }
    report.add_le(node_label("second_difference", g, k), worst, bound);
  }
  return report;
}

CheckReport dominance_check(const ConvolutionResult& res, const GridFunction& u) {
  CheckReport report("dominance", 0.0);
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t at = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (res.u_eps[k] - u[k] > worst) {
      worst = res.u_eps[k] - u[k];
      at = k;
    }
  }
  report.add_le(node_label("u_eps-u", u.grid(), at), worst, 0.0);
  return report;
}

CheckReport lipschitz_check(const ConvolutionResult& res, const GridFunction& u,
                            std::optional<double> tol) {
  const Grid& g = u.grid();
  const double h = g.h();
  double lip_u = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (const auto& d : directions(g.dim())) {
      if (d.di + d.dj != 1 || d.di < 0 || d.dj < 0) continue;  // axis directions only
      std::size_t a = 0;
      if (neighbor(g, k, d.di, d.dj, a)) lip_u = std::max(lip_u, std::abs(u[a] - u[k]) / h);
    }
  }
  double lip_eps = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!res.in_shrunken_domain(k)) continue;
    for (int axis = 0; axis < g.dim(); ++axis) {
      std::size_t a = 0;
      if (!neighbor(g, k, axis == 0 ? 1 : 0, axis == 1 ? 1 : 0, a)) continue;
      if (!res.in_shrunken_domain(a)) continue;
      lip_eps = std::max(lip_eps, std::abs(res.u_eps[a] - res.u_eps[k]) / h);
    }
  }
  CheckReport report("lipschitz", default_tol(g, tol));
  const double bound = lip_u + std::pow(res.r_eps / res.epsilon, res.q - 1.0);
  report.add_le("lip(u_eps)<=lip(u)+(r/eps)^(q-1)", lip_eps, bound);
  return report;
}

std::optional<JetFromArgmin> jet_from_argmin(const ConvolutionResult& res, std::size_t node) {
  const Grid& g = res.grid();
  const std::size_t y = res.argmin[node];
  if (y == node) return std::nullopt;
  const Vec2 d = g.node(node) - g.node(y);
  const double r = d.norm();
  const double q = res.q;
  JetFromArgmin jet;
  jet.probe.x = g.node(node);
  jet.probe.dim = g.dim();
  jet.probe.value = res.u_eps[node];
  jet.probe.gradient = d * std::pow(r, q - 2.0) / std::pow(res.epsilon, q - 1.0);
  jet.hessian_bound =
      (q - 1.0) / res.epsilon * std::pow(jet.probe.gradient.norm(), (q - 2.0) / (q - 1.0));
  jet.probe.hessian = jet.hessian_bound * Mat2::Identity();
  if (g.dim() == 1) jet.probe.hessian(1, 1) = 0.0;
  return jet;
}

CheckReport jet_check(const ConvolutionResult& res, const GridFunction& u,
                      std::optional<double> tol) {
  const Grid& g = res.grid();
  const double h = g.h();
  const double q = res.q;
  const double denom = q * std::pow(res.epsilon, q - 1.0);
  CheckReport report("jet", default_tol(g, tol));
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.layer(k) < 1 || !res.in_shrunken_domain(k)) continue;
    const auto jet = jet_from_argmin(res, k);
    if (!jet) {
      report.count_skipped();
      continue;
    }
    const std::size_t y = res.argmin[k];
    const int yi = g.ix(y), yj = g.iy(y);
    auto paraboloid = [&](std::size_t z) {
      return kernels::convolution_term(u[y], g.ix(z) - yi, g.iy(z) - yj, h, q, denom);
    };
    // Exact identities of the discrete minimization.
    report.add_le(node_label("argmin_identity", g, k), std::abs(res.u_eps[k] - paraboloid(k)),
                  0.0, 0.0);
    double touch = -std::numeric_limits<double>::infinity();
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        std::size_t z = 0;
        if (neighbor(g, k, di, g.dim() == 2 ? dj : 0, z)) {
          touch = std::max(touch, res.u_eps[z] - paraboloid(z));
        }
      }
    }
    report.add_le(node_label("paraboloid_above", g, k), touch, 0.0, 0.0);

    // Difference checks where a sub-touching probe can exist. backward <=
    // forward and u_eps <= paraboloid pin the central difference to within
    // h/2 times the paraboloid's curvature of eta.
    const double dist = (g.node(k) - g.node(y)).norm();
    const double curvature = (q - 1.0) * std::pow(dist + h, q - 2.0) / std::pow(res.epsilon, q - 1.0);
    const double eta_tol = report.tolerance() + 0.5 * h * curvature;
    for (int axis = 0; axis < g.dim(); ++axis) {
      std::size_t a = 0, b = 0;
      const int di = axis == 0 ? 1 : 0, dj = axis == 1 ? 1 : 0;
      if (!neighbor(g, k, di, dj, a) || !neighbor(g, k, -di, -dj, b)) continue;
      const double forward = (res.u_eps[a] - res.u_eps[k]) / h;
      const double backward = (res.u_eps[k] - res.u_eps[b]) / h;
      if (backward > forward) {
        report.count_skipped();
        continue;
      }
      const std::string axis_name = axis == 0 ? "x" : "y";
      const double central = 0.5 * (forward + backward);
      report.add_le(node_label("eta_" + axis_name, g, k),
                    std::abs(central - jet->probe.gradient[axis]), 0.0, eta_tol);
      report.add_le(node_label("hessian_bound_" + axis_name, g, k), (forward - backward) / h,
                    jet->hessian_bound);
    }
  }
  return report;
}

double f_lower_envelope(const SourceSpec& f, const Grid& grid, double r_eps, const Point& x,
                        double s, const Vec2& eta) {
  if (r_eps < 0.0) throw ParameterError("r_eps must be >= 0");
  double best = f(x, s, eta);
  if (r_eps == 0.0) return best;
  const double h = grid.h();
  const int reach = static_cast<int>(std::ceil(r_eps / h)) + 1;
  const int ci = static_cast<int>(std::lround((x.x() - grid.lo().x()) / h));
  const int cj =
      grid.dim() == 2 ? static_cast<int>(std::lround((x.y() - grid.lo().y()) / h)) : 0;
  const int j_lo = grid.dim() == 2 ? std::max(0, cj - reach) : 0;
  const int j_hi = grid.dim() == 2 ? std::min(grid.ny() - 1, cj + reach) : 0;
  for (int j = j_lo; j <= j_hi; ++j) {
    for (int i = std::max(0, ci - reach); i <= std::min(grid.nx() - 1, ci + reach); ++i) {
      const Point y = grid.node(i, j);
      if ((y - x).norm() <= r_eps) best = std::min(best, f(y, s, eta));
    }
  }
  return best;
}

CheckReport convolution_lemma_suite(const GridFunction& u, std::span<const double> epsilons,
                                    double q, std::optional<double> tol) {
  CheckReport report("convolution_lemma_suite", default_tol(u.grid(), tol));
  report.append(monotone_family_check(u, epsilons, q), "monotone:");
  for (double eps : epsilons) {
    const ConvolutionResult res = inf_convolve(u, eps, q);
    std::ostringstream prefix;
    prefix << "eps=" << eps << ":";
    report.append(dominance_check(res, u), prefix.str() + "dominance:");
    report.append(lipschitz_check(res, u, tol), prefix.str() + "lipschitz:");
    report.append(semiconcavity_check(res, tol), prefix.str() + "semiconcavity:");
    report.append(jet_check(res, u, tol), prefix.str() + "jet:");
  }
  return report;
}

}  // namespace pxlap
