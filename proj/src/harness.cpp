#include "pxlap/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "pxlap/error.hpp"
#include "pxlap/inf_convolution.hpp"
#include "pxlap/plaplace_op.hpp"
#include "pxlap/variable_lebesgue.hpp"

namespace pxlap {

namespace {

std::string where(const Grid& g, std::size_t k) {
  std::ostringstream s;
  s << std::setprecision(6) << "x=" << g.node(k).x();
  if (g.dim() == 2) s << ",y=" << g.node(k).y();
  return s.str();
}

double weak_default(const Grid& g, std::optional<double> tol) {
  return tol ? *tol : 10.0 * g.h() * g.h();
}

double viscosity_default(const Grid& g, std::optional<double> tol) {
  return tol ? *tol : 10.0 * g.h();
}

double bump(const Point& x, const Point& c, double r) {
  const double s = (x - c).squaredNorm() / (r * r);
  return s < 1.0 ? (1.0 - s) * (1.0 - s) : 0.0;
}

TestFunction make_bump(const Grid& grid, const Point& c, double r, std::string label) {
  GridFunction phi(grid, 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!grid.is_boundary(k)) phi[k] = bump(grid.node(k), c, r);
  }
  return {std::move(label), std::move(phi)};
}

CheckReport weak_check(const GridFunction& u, const ExponentField& p, const SourceSpec& f,
                       std::span<const TestFunction> battery, std::optional<double> tol,
                       bool super) {
  require_same_grid(u.grid(), p.grid(), "weak check");
  const double t = weak_default(u.grid(), tol);
  CheckReport report(super ? "weak_supersolution" : "weak_subsolution", t);
  for (const auto& tf : battery) {
    const double r = weak_residual(u, tf.phi, p, f);
    if (super) {
      report.add_ge(tf.label, r, 0.0);
    } else {
      report.add_le(tf.label, r, 0.0);
    }
  }
  return report;
}

// Touching-probe evaluation at one node.
struct NodeVerdict {
  bool admitted = false;
  double lhs = 0.0;
  double rhs = 0.0;
  Vec2 eta = Vec2::Zero();
};

class ProbeBuilder {
 public:
  ProbeBuilder(const GridFunction& u, bool super) : u_(u), g_(u.grid()), super_(super) {}

  NodeVerdict evaluate(std::size_t k, const ExponentField& p, const SourceSpec& f) const {
    NodeVerdict best;
    const int i = g_.ix(k), j = g_.iy(k);
    const bool two_d = g_.dim() == 2;
    const double h = g_.h();
    const double u0 = u_[k];

    Mat2 x = Mat2::Zero();
    x(0, 0) = (value(i + 1, j) - 2.0 * u0 + value(i - 1, j)) / (h * h);
    if (two_d) {
      x(1, 1) = (value(i, j + 1) - 2.0 * u0 + value(i, j - 1)) / (h * h);
      x(0, 1) = x(1, 0) = (value(i + 1, j + 1) - value(i + 1, j - 1) - value(i - 1, j + 1) +
                           value(i - 1, j - 1)) /
                          (4.0 * h * h);
    }
    const double c = third_difference_bound(i, j);

    const std::array<double, 3> ex = {(value(i + 1, j) - value(i - 1, j)) / (2.0 * h),
                                      (value(i + 1, j) - u0) / h, (u0 - value(i - 1, j)) / h};
    std::array<double, 3> ey = {0.0, 0.0, 0.0};
    if (two_d) {
      ey = {(value(i, j + 1) - value(i, j - 1)) / (2.0 * h), (value(i, j + 1) - u0) / h,
            (u0 - value(i, j - 1)) / h};
    }
    const int ny_choices = two_d ? 3 : 1;
    Mat2 id = Mat2::Identity();
    if (!two_d) id(1, 1) = 0.0;

    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < ny_choices; ++b) {
        const Vec2 eta(ex[a], ey[b]);
        if (eta.squaredNorm() == 0.0) continue;
        for (double m : {0.0, c * h, 2.0 * c * h, 4.0 * c * h}) {
          const Mat2 xm = super_ ? Mat2(x - m * id) : Mat2(x + m * id);
          if (!touches(i, j, u0, eta, xm)) {
            if (c == 0.0) break;
            continue;
          }
          OperatorProbe probe;
          probe.x = g_.node(k);
          probe.value = u0;
          probe.gradient = eta;
          probe.hessian = xm;
          probe.dim = g_.dim();
          const double lhs = strong_operator(probe, p);
          const double rhs = f(probe.x, u0, eta);
          const double margin = super_ ? lhs - rhs : rhs - lhs;
          const double current = super_ ? best.lhs - best.rhs : best.rhs - best.lhs;
          if (!best.admitted || margin < current) best = {true, lhs, rhs, eta};
          break;
        }
      }
    }
    return best;
  }

 private:
  double value(int i, int j) const { return u_.at(i, j); }

  bool inside(int i, int j) const {
    return i >= 0 && i < g_.nx() && j >= 0 && j < g_.ny();
  }

  // Quadratic through (u0, eta, X) lies below (super) or above (sub) u on
  // the stencil.
  bool touches(int i, int j, double u0, const Vec2& eta, const Mat2& x) const {
    const double h = g_.h();
    const int jr = g_.dim() == 2 ? 1 : 0;
    for (int dj = -jr; dj <= jr; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        const Vec2 d(di * h, dj * h);
        const double phi = u0 + eta.dot(d) + 0.5 * d.dot(x * d);
        const double uy = value(i + di, j + dj);
        const double slack = 1e-12 * (1.0 + std::abs(uy) + std::abs(u0));
        if (super_ ? phi > uy + slack : phi < uy - slack) return false;
      }
    }
    return true;
  }

  // Max |third difference| over 4-point windows through (i, j) along the
  // axes and (in 2D) the diagonals.
  double third_difference_bound(int i, int j) const {
    const double h = g_.h();
    std::vector<std::array<int, 2>> dirs = {{1, 0}};
    if (g_.dim() == 2) dirs = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
    double c = 0.0;
    for (const auto& d : dirs) {
      const double step = h * std::sqrt(static_cast<double>(d[0] * d[0] + d[1] * d[1]));
      for (int s = -2; s <= -1; ++s) {
        std::array<double, 4> w{};
        bool ok = true;
        for (int t = 0; t < 4 && ok; ++t) {
          const int a = i + (s + t) * d[0], b = j + (s + t) * d[1];
          ok = inside(a, b);
          if (ok) w[t] = value(a, b);
        }
        if (!ok) continue;
        const double third = (w[3] - 3.0 * w[2] + 3.0 * w[1] - w[0]) / (step * step * step);
        c = std::max(c, std::abs(third));
      }
    }
    return c;
  }

  const GridFunction& u_;
  const Grid& g_;
  bool super_;
};

CheckReport viscosity_check(const GridFunction& u, const ExponentField& p, const SourceSpec& f,
                            std::optional<double> tol, bool super) {
  require_same_grid(u.grid(), p.grid(), "viscosity check");
  const Grid& g = u.grid();
  const double t = viscosity_default(g, tol);
  CheckReport report(super ? "viscosity_supersolution" : "viscosity_subsolution", t);
  const ProbeBuilder builder(u, super);
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  std::vector<NodeVerdict> verdicts(g.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    if (g.is_boundary(static_cast<std::size_t>(k))) continue;
    verdicts[k] = builder.evaluate(static_cast<std::size_t>(k), p, f);
  }
  std::size_t interior = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.is_boundary(k)) continue;
    ++interior;
    const auto& v = verdicts[k];
    if (!v.admitted) {
      report.count_skipped();
      continue;
    }
    if (super) {
      report.add_ge(where(g, k), v.lhs, v.rhs);
    } else {
      report.add_le(where(g, k), v.lhs, v.rhs);
    }
  }
  std::ostringstream note;
  note << "interior nodes " << interior << ", skipped " << report.skipped();
  report.add_note(note.str());
  return report;
}

ExponentField restrict_exponent(const ExponentField& p, const Grid& sub) {
  return ExponentField::from_values(p.values().restricted(sub));
}

}  // namespace

std::vector<TestFunction> bump_battery(const Grid& grid, int lattice) {
  if (lattice < 1) throw ParameterError("lattice must be >= 1");
  const Point lo = grid.lo(), hi = grid.hi();
  const Point span = hi - lo;
  const bool two_d = grid.dim() == 2;
  const double spacing_x = span.x() / (lattice + 1);
  const double spacing_y = two_d ? span.y() / (lattice + 1) : spacing_x;
  const double r = std::min(spacing_x, spacing_y);

  std::vector<TestFunction> battery;
  auto keep = [&](TestFunction tf) {
    if (!tf.phi.is_zero()) battery.push_back(std::move(tf));
  };
  const int jn = two_d ? lattice : 1;
  for (int b = 0; b < jn; ++b) {
    for (int a = 0; a < lattice; ++a) {
      const Point c(lo.x() + (a + 1) * spacing_x, two_d ? lo.y() + (b + 1) * spacing_y : 0.0);
      std::ostringstream label;
      label << std::setprecision(6) << "bump(" << c.x();
      if (two_d) label << ',' << c.y();
      label << ";r=" << r << ')';
      keep(make_bump(grid, c, r, label.str()));
    }
  }
  const Point mid = 0.5 * (lo + hi);
  const double rg = two_d ? 0.5 * std::min(span.x(), span.y()) : 0.5 * span.x();
  keep(make_bump(grid, mid, rg, "global"));
  return battery;
}

std::vector<TestFunction> embedded_battery(const Grid& grid, const Grid& sub, int lattice) {
  const double h = grid.h();
  const int i0 = static_cast<int>(std::lround((sub.lo().x() - grid.lo().x()) / h));
  const int j0 =
      grid.dim() == 2 ? static_cast<int>(std::lround((sub.lo().y() - grid.lo().y()) / h)) : 0;
  std::vector<TestFunction> out;
  for (auto& tf : bump_battery(sub, lattice)) {
    GridFunction phi(grid, 0.0);
    for (int j = 0; j < sub.ny(); ++j) {
      for (int i = 0; i < sub.nx(); ++i) phi[grid.index(i0 + i, j0 + j)] = tf.phi.at(i, j);
    }
    out.push_back({tf.label, std::move(phi)});
  }
  return out;
}

CheckReport check_weak_supersolution(const GridFunction& u, const ExponentField& p,
                                     const SourceSpec& f, std::span<const TestFunction> battery,
                                     std::optional<double> tol) {
  return weak_check(u, p, f, battery, tol, true);
}

CheckReport check_weak_subsolution(const GridFunction& u, const ExponentField& p,
                                   const SourceSpec& f, std::span<const TestFunction> battery,
                                   std::optional<double> tol) {
  return weak_check(u, p, f, battery, tol, false);
}

CheckReport check_viscosity_supersolution(const GridFunction& u, const ExponentField& p,
                                          const SourceSpec& f, std::optional<double> tol) {
  return viscosity_check(u, p, f, tol, true);
}

CheckReport check_viscosity_subsolution(const GridFunction& u, const ExponentField& p,
                                        const SourceSpec& f, std::optional<double> tol) {
  return viscosity_check(u, p, f, tol, false);
}

PipelineResult pipeline_viscosity_to_weak(const GridFunction& u, const ExponentField& p,
                                          const SourceSpec& f, std::span<const double> epsilons,
                                          std::optional<double> tol) {
  require_same_grid(u.grid(), p.grid(), "pipeline_viscosity_to_weak");
  if (epsilons.empty()) throw ParameterError("epsilons must not be empty");
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    if (!(epsilons[k] > 0.0)) throw ParameterError("epsilons must be > 0");
    if (k > 0 && !(epsilons[k] < epsilons[k - 1])) {
      throw ParameterError("epsilons must be strictly decreasing");
    }
  }
  const Grid& g = u.grid();
  const double t = viscosity_default(g, tol);
  PipelineResult out;
  out.report = CheckReport("pipeline_viscosity_to_weak", t);
  out.q = choose_q(p.p_minus());

  const Point mid = 0.5 * (g.lo() + g.hi());
  const Point quarter = 0.25 * (g.hi() - g.lo());
  const Grid inner = g.sub_box(mid - quarter, mid + quarter);
  const ExponentField p_inner = restrict_exponent(p, inner);
  const auto flux = [&](const GridFunction& w) { return divergence_flux_all(w, p); };

  for (double eps : epsilons) {
    const ConvolutionResult res = inf_convolve(u, eps, out.q);
    PipelineStage stage;
    stage.epsilon = eps;
    stage.r_eps = res.r_eps;
    std::ostringstream tag;
    tag << std::setprecision(6) << "eps=" << eps;

    SourceSpec f_eps = f;
    f_eps.name = f.name + "_eps";
    const double r = res.r_eps;
    f_eps.evaluate = [&f, &g, r](const Point& x, double s, const Vec2& eta) {
      return f_lower_envelope(f, g, r, x, s, eta);
    };

    const auto div = flux(res.u_eps);
    stage.margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g.layer(k) < 1 || !res.in_shrunken_domain(k)) continue;
      const double fe = f_eps(g.node(k), res.u_eps[k], nodal_gradient(res.u_eps, k));
      stage.margin = std::min(stage.margin, div[k] - fe);
      ++stage.nodes;
    }
    if (stage.nodes == 0) {
      out.report.add_note(tag.str() + ": shrunken domain has no interior nodes");
      out.report.count_skipped();
      stage.margin = 0.0;
    } else {
      out.report.add_ge("margin:" + tag.str(), stage.margin, 0.0);
    }
    stage.deficit = std::max(0.0, -stage.margin);

    stage.worst_weak = std::numeric_limits<double>::infinity();
    std::vector<TestFunction> battery;
    try {
      const Point shrink = g.dim() == 2 ? Point(r, r) : Point(r, 0.0);
      const Grid sub = g.sub_box(g.lo() + shrink, g.hi() - shrink);
      if (sub.nx() >= 3 && (g.dim() == 1 || sub.ny() >= 3)) battery = embedded_battery(g, sub);
    } catch (const ParameterError&) {
    }
    if (battery.empty()) {
      out.report.add_note(tag.str() + ": no test functions fit in the shrunken domain");
      stage.worst_weak = 0.0;
    }
    for (const auto& tf : battery) {
      const double resid = weak_residual(res.u_eps, tf.phi, p, f_eps);
      stage.worst_weak = std::min(stage.worst_weak, resid);
      out.report.add_ge("weak:" + tag.str() + ":" + tf.label, resid,
                        -stage.deficit * integrate(tf.phi));
    }

    std::vector<double> diff(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) diff[k] = res.u_eps[k] - u[k];
    stage.sobolev_distance =
        sobolev_norm(GridFunction(g, std::move(diff)).restricted(inner), p_inner);
    out.stages.push_back(stage);
  }

  for (std::size_t k = 1; k < out.stages.size(); ++k) {
    const auto& a = out.stages[k - 1];
    const auto& b = out.stages[k];
    std::ostringstream tag;
    tag << std::setprecision(6) << "eps=" << a.epsilon << "->" << b.epsilon;
    out.report.add_le("deficit:" + tag.str(), b.deficit, a.deficit, 1e-12 * (1.0 + a.deficit));
    out.report.add_le("sobolev:" + tag.str(), b.sobolev_distance, a.sobolev_distance,
                      1e-12 * (1.0 + a.sobolev_distance));
  }
  return out;
}

ComparisonResult comparison_experiment(const GridFunction& u, const GridFunction& v,
                                       const ExponentField& p, const SourceSpec& f,
                                       const Box& box, std::optional<double> tol) {
  require_same_grid(u.grid(), p.grid(), "comparison_experiment");
  require_same_grid(v.grid(), p.grid(), "comparison_experiment");
  const Grid sub = p.grid().sub_box(box.lo, box.hi);
  const double t = weak_default(sub, tol);
  const GridFunction ub = u.restricted(sub), vb = v.restricted(sub);
  const ExponentField pb = restrict_exponent(p, sub);

  CheckReport pre("comparison_preconditions", t);
  double worst_boundary = std::numeric_limits<double>::infinity();
  std::size_t worst_k = 0;
  for (std::size_t k = 0; k < sub.size(); ++k) {
    if (!sub.is_boundary(k)) continue;
    const double gap = vb[k] - ub[k];
    if (gap < worst_boundary) {
      worst_boundary = gap;
      worst_k = k;
    }
  }
  pre.add_le("boundary-order@" + where(sub, worst_k), ub[worst_k], vb[worst_k]);

  constexpr double kGradientFloor = 1e-8;
  double min_grad = std::numeric_limits<double>::infinity();
  std::size_t grad_k = 0;
  for (std::size_t k = 0; k < sub.size(); ++k) {
    if (!(pb[k] > 2.0)) continue;
    const double s = nodal_gradient(ub, k).norm() + nodal_gradient(vb, k).norm();
    if (s < min_grad) {
      min_grad = s;
      grad_k = k;
    }
  }
  if (std::isfinite(min_grad)) {
    pre.add_ge("gradient-hypothesis@" + where(sub, grad_k), min_grad, kGradientFloor, 0.0);
  } else {
    pre.add_note("gradient hypothesis vacuous: p <= 2 on B");
  }

  const auto battery = bump_battery(sub);
  pre.append(check_weak_subsolution(ub, pb, f, battery, t), "u-weak-sub:");
  pre.append(check_weak_supersolution(vb, pb, f, battery, t), "v-weak-super:");

  ComparisonResult out;
  out.preconditions_ok = pre.all_pass();
  if (!out.preconditions_ok) {
    out.report = CheckReport("comparison:precondition-violation", t);
    out.report.append(pre);
    out.report.add_note("preconditions failed; ordering not tested");
    return out;
  }
  out.report = CheckReport("comparison", t);
  out.report.append(pre);
  bool ordered = true;
  for (std::size_t k = 0; k < sub.size(); ++k) {
    if (sub.is_boundary(k)) continue;
    out.report.add_le("order@" + where(sub, k), ub[k], vb[k]);
    ordered = ordered && out.report.items().back().pass;
  }
  out.ordered = ordered;
  std::ostringstream note;
  note << std::setprecision(6) << "box [" << sub.lo().x() << ',' << sub.hi().x() << ']';
  if (sub.dim() == 2) note << "x[" << sub.lo().y() << ',' << sub.hi().y() << ']';
  note << " measure " << sub.measure();
  out.report.add_note(note.str());
  return out;
}

std::vector<Box> shrinking_boxes(const Grid& grid, int count) {
  if (count < 1) throw ParameterError("count must be >= 1");
  const Point mid = 0.5 * (grid.lo() + grid.hi());
  Point half = 0.5 * (grid.hi() - grid.lo());
  std::vector<Box> boxes;
  for (int k = 0; k < count; ++k) {
    boxes.push_back({mid - half, mid + half});
    half *= 0.5;
  }
  return boxes;
}

ComparisonSweep comparison_sweep(const GridFunction& u, const GridFunction& v,
                                 const ExponentField& p, const SourceSpec& f,
                                 std::span<const Box> boxes, std::optional<double> tol) {
  ComparisonSweep out;
  out.summary = CheckReport("comparison_sweep", weak_default(p.grid(), tol));
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    ComparisonResult r = comparison_experiment(u, v, p, f, boxes[b], tol);
    const Grid sub = p.grid().sub_box(boxes[b].lo, boxes[b].hi);
    const double measure = sub.measure();
    std::ostringstream label;
    label << std::setprecision(6) << "box" << b << ":measure=" << measure;
    if (!r.preconditions_ok) label << ":precondition-violation";
    out.summary.add_flag(label.str(), r.preconditions_ok && r.ordered);
    if (r.preconditions_ok && r.ordered) {
      out.empirical_delta = std::max(out.empirical_delta, measure);
    }
    out.measures.push_back(measure);
    out.boxes.push_back(std::move(r));
  }
  std::ostringstream note;
  note << std::setprecision(6) << "empirical delta " << out.empirical_delta;
  out.summary.add_note(note.str());
  return out;
}

}  // namespace pxlap
