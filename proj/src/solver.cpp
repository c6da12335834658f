#include "pxlap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "pxlap/densities.hpp"
#include "pxlap/error.hpp"
#include "pxlap/kernels.hpp"
#include "pxlap/mesh.hpp"

namespace pxlap {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Discrete energy, its gradient with respect to the interior values and the
// Euler-Lagrange residual for a frozen right-hand side.
class Problem {
 public:
  Problem(const ExponentField& p, const GridFunction& f_of_x, double delta)
      : grid_(p.grid()), mesh_(grid_), density_{delta} {
    require_same_grid(p.grid(), f_of_x.grid(), "solve_variational");
    pe_ = kernels::element_exponents(mesh_, p.values().values());
    fw_.assign(grid_.size(), 0.0);
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      if (!grid_.is_boundary(k)) fw_[k] = grid_.weight(k) * f_of_x[k];
    }
    vol_ = grid_.dim() == 1 ? grid_.h() : grid_.h() * grid_.h();
  }

  double energy(std::span<const double> u) const {
    return kernels::omp::energy(mesh_, u, pe_, density_) - dot(fw_, u);
  }

  double difference(std::span<const double> u, std::span<const double> d) const {
    return kernels::omp::energy_difference(mesh_, u, d, pe_, density_) - dot(fw_, d);
  }

  void gradient(std::span<const double> u, std::vector<double>& g) const {
    g.resize(grid_.size());
    kernels::omp::energy_gradient(mesh_, u, pe_, density_, g);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = grid_.is_boundary(k) ? 0.0 : g[k] - fw_[k];
  }

  double residual(std::span<const double> g) const { return max_abs(g) / vol_; }
  double cell_volume() const { return vol_; }

 private:
  Grid grid_;
  Mesh mesh_;
  PowerDensity density_;
  std::vector<double> pe_;
  std::vector<double> fw_;
  double vol_ = 0.0;
};

void validate_options(const SolverOptions& o) {
  if (!(o.tol > 0.0)) throw ParameterError("tol must be > 0");
  if (o.max_iterations < 1) throw ParameterError("max_iterations must be >= 1");
  if (!(o.delta >= 0.0)) throw ParameterError("delta must be >= 0");
  if (!(o.armijo > 0.0 && o.armijo < 1.0)) throw ParameterError("armijo must lie in (0, 1)");
  if (o.max_backtracks < 1) throw ParameterError("max_backtracks must be >= 1");
}

GridFunction with_boundary(const Grid& grid, const BoundaryTrace& g, const GridFunction* initial) {
  GridFunction u = initial ? *initial : GridFunction(grid, 0.0);
  if (initial) require_same_grid(grid, initial->grid(), "solve_variational initial iterate");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.is_boundary(k)) u[k] = g(grid.node(k));
  }
  return u;
}

// Nonlinear conjugate gradients (Polak-Ribiere+, restarted whenever the
// direction is not a descent direction). The trial step comes from a secant
// on the directional derivative, then Armijo halving.
SolveOutcome descend(const Problem& prob, GridFunction u, const SolverOptions& o) {
  const std::size_t n = u.size();
  std::vector<double> g, g_new, g_trial, d(n), trial(n);
  prob.gradient(u.values(), g);

  SolveOutcome out;
  out.energy_history.push_back(prob.energy(u.values()));
  double res = prob.residual(g);
  for (std::size_t k = 0; k < n; ++k) d[k] = -g[k];
  double step = 0.0;

  while (res > o.tol) {
    if (out.iterations >= o.max_iterations) {
      std::ostringstream msg;
      msg << "solve_variational: no convergence after " << out.iterations
          << " iterations (residual " << std::setprecision(6) << res << ", tol " << o.tol << ")";
      throw IterationLimitError(msg.str());
    }
    double gd = dot(g, d);
    if (!(gd < 0.0)) {
      for (std::size_t k = 0; k < n; ++k) d[k] = -g[k];
      gd = dot(g, d);
    }
    const double dmax = max_abs(d);
    const double tau = step > 0.0 ? step : 1e-3 * (1.0 + u.max_abs()) / dmax;
    for (std::size_t k = 0; k < n; ++k) trial[k] = u[k] + tau * d[k];
    prob.gradient(trial, g_trial);
    const double slope = dot(g_trial, d);
    double alpha = slope > gd ? tau * (-gd) / (slope - gd) : 4.0 * tau;

    bool accepted = false;
    double change = 0.0;
    for (int bt = 0; bt < o.max_backtracks; ++bt) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = alpha * d[k];
      change = prob.difference(u.values(), trial);
      if (change < 0.0 && change <= o.armijo * alpha * gd) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << std::setprecision(6) << "solve_variational: line search failed at iteration "
          << out.iterations << " (residual " << res << ", energy " << out.energy_history.back()
          << ", directional derivative " << gd << ", last step " << alpha << ")";
      throw DescentStallError(msg.str());
    }

    for (std::size_t k = 0; k < n; ++k) u[k] += alpha * d[k];
    out.energy_decrements.push_back(change);
    out.energy_history.push_back(out.energy_history.back() + change);
    ++out.iterations;
    step = alpha;

    prob.gradient(u.values(), g_new);
    double num = 0.0;
    for (std::size_t k = 0; k < n; ++k) num += g_new[k] * (g_new[k] - g[k]);
    const double beta = std::max(0.0, num / dot(g, g));
    for (std::size_t k = 0; k < n; ++k) d[k] = -g_new[k] + beta * d[k];
    g.swap(g_new);
    res = prob.residual(g);
  }
  out.final_residual = res;
  out.u = std::move(u);
  return out;
}

}  // namespace

void SolveOutcome::write_csv(std::ostream& os) const {
  const Grid& g = u.grid();
  const bool two_d = g.dim() == 2;
  os << (two_d ? "x,y,u\n" : "x,u\n") << std::setprecision(17);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    os << x.x() << ',';
    if (two_d) os << x.y() << ',';
    os << u[k] << '\n';
  }
}

double discrete_energy(const GridFunction& u, const ExponentField& p, const GridFunction& f_of_x,
                       double delta) {
  require_same_grid(u.grid(), p.grid(), "discrete_energy");
  return Problem(p, f_of_x, delta).energy(u.values());
}

std::vector<double> euler_lagrange_residual(const GridFunction& u, const ExponentField& p,
                                            const GridFunction& f_of_x, double delta) {
  require_same_grid(u.grid(), p.grid(), "euler_lagrange_residual");
  const Problem prob(p, f_of_x, delta);
  std::vector<double> g;
  prob.gradient(u.values(), g);
  for (double& v : g) v /= prob.cell_volume();
  return g;
}

GridFunction evaluate_source(const SourceSpec& f, const GridFunction& u) {
  const Grid& g = u.grid();
  std::vector<double> vals(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) vals[k] = f(g.node(k), u[k], nodal_gradient(u, k));
  return GridFunction(g, std::move(vals));
}

CheckReport validate_growth(const SourceSpec& f, const ExponentField& p, int samples,
                            std::uint64_t seed, double t_bound, double eta_radius) {
  if (samples < 1) throw ParameterError("samples must be >= 1");
  if (!(t_bound >= 0.0) || !(eta_radius >= 0.0)) {
    throw ParameterError("t_bound and eta_radius must be >= 0");
  }
  const Grid& grid = p.grid();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw_eta = [&]() -> Vec2 {
    if (grid.dim() == 1) return Vec2((2.0 * unit(rng) - 1.0) * eta_radius, 0.0);
    const double angle = 2.0 * M_PI * unit(rng);
    const double r = eta_radius * std::sqrt(unit(rng));
    return Vec2(r * std::cos(angle), r * std::sin(angle));
  };

  CheckReport report("validate_growth:" + f.name, 1e-9);
  struct Worst {
    double margin = std::numeric_limits<double>::infinity();
    double lhs = 0.0, rhs = 0.0;
    std::string where;
    int violations = 0;
  };
  Worst growth, mono, lip;
  auto record = [](Worst& w, double lhs, double rhs, const std::string& where) {
    const double margin = rhs - lhs;
    if (margin < -1e-9 * (1.0 + std::abs(rhs))) ++w.violations;
    if (margin < w.margin) w = {margin, lhs, rhs, where, w.violations};
  };
  auto describe = [](const Point& x, double t, const Vec2& eta) {
    std::ostringstream s;
    s << std::setprecision(6) << "x=(" << x.x() << ',' << x.y() << ") t=" << t << " eta=("
      << eta.x() << ',' << eta.y() << ')';
    return s.str();
  };

  for (int s = 0; s < samples; ++s) {
    const std::size_t k = pick(rng);
    const Point x = grid.node(k);
    const double t = (2.0 * unit(rng) - 1.0) * t_bound;
    const Vec2 eta = draw_eta();
    const double value = f(x, t, eta);
    const double gamma = f.gamma ? f.gamma(std::abs(t)) : 0.0;
    const double phi = f.phi ? f.phi(x) : 0.0;
    const double bound = gamma * std::pow(eta.norm(), p[k] - 1.0) + phi;
    record(growth, std::abs(value), bound, describe(x, t, eta));

    if (f.monotone_t) {
      double t2 = (2.0 * unit(rng) - 1.0) * t_bound;
      const double lo = std::min(t, t2), hi = std::max(t, t2);
      record(mono, f(x, hi, eta), f(x, lo, eta), describe(x, hi, eta));
    }
    if (std::isfinite(f.lipschitz_eta)) {
      const Vec2 eta2 = draw_eta();
      const double lhs = std::abs(f(x, t, eta) - f(x, t, eta2));
      record(lip, lhs, f.lipschitz_eta * (eta - eta2).norm(), describe(x, t, eta2));
    }
  }

  auto emit = [&](const std::string& label, const Worst& w) {
    report.add_le(label, w.lhs, w.rhs, 1e-9 * (1.0 + std::abs(w.rhs)));
    std::ostringstream note;
    note << label << ": " << w.violations << " of " << samples << " samples violate; worst at "
         << w.where;
    report.add_note(note.str());
  };
  emit("growth", growth);
  if (f.monotone_t) emit("monotone_t", mono);
  if (std::isfinite(f.lipschitz_eta)) emit("lipschitz_eta", lip);
  return report;
}

GridFunction harmonic_extension(const Grid& grid, const BoundaryTrace& g,
                                const SolverOptions& options) {
  validate_options(options);
  const ExponentField two = ExponentField::constant(grid, 2.0);
  const Problem prob(two, GridFunction(grid, 0.0), 0.0);
  SolverOptions o = options;
  o.delta = 0.0;
  return descend(prob, with_boundary(grid, g, nullptr), o).u;
}

SolveOutcome solve_variational(const ExponentField& p, const BoundaryTrace& g,
                               const GridFunction& f_of_x, const SolverOptions& options,
                               const GridFunction* initial) {
  validate_options(options);
  if (!(p.p_minus() > 1.0)) throw InvalidExponentError("solve_variational requires p_minus > 1");
  const Problem prob(p, f_of_x, options.delta);
  GridFunction start = initial ? with_boundary(p.grid(), g, initial)
                               : harmonic_extension(p.grid(), g, options);
  return descend(prob, std::move(start), options);
}

SolveOutcome solve_fixed_point(const ExponentField& p, const BoundaryTrace& g,
                               const SourceSpec& f, double tol, int max_outer, double omega,
                               const SolverOptions& inner) {
  if (!(tol > 0.0)) throw ParameterError("tol must be > 0");
  if (max_outer < 1) throw ParameterError("max_outer must be >= 1");
  if (!(omega > 0.0 && omega <= 1.0)) throw ParameterError("omega must lie in (0, 1]");
  validate_options(inner);

  GridFunction u = harmonic_extension(p.grid(), g, inner);
  std::vector<double> history;
  for (int outer = 1; outer <= max_outer; ++outer) {
    const GridFunction frozen = evaluate_source(f, u);
    SolveOutcome step = solve_variational(p, g, frozen, inner, &u);
    if (f.depends_on_x_only()) {
      step.outer_residuals = {0.0};
      return step;
    }
    double diff = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double next = (1.0 - omega) * u[k] + omega * step.u[k];
      diff = std::max(diff, std::abs(next - u[k]));
      u[k] = next;
    }
    history.push_back(diff);
    if (diff <= tol) {
      step.u = u;
      step.outer_residuals = history;
      const auto el = euler_lagrange_residual(u, p, evaluate_source(f, u), inner.delta);
      step.final_residual = max_abs(el);
      return step;
    }
  }
  std::ostringstream msg;
  msg << "solve_fixed_point: no convergence after " << max_outer << " outer iterations;"
      << " residual history:" << std::setprecision(6);
  for (double r : history) msg << ' ' << r;
  throw FixedPointStallError(msg.str());
}

}  // namespace pxlap
