#include "pxlap/plaplace_op.hpp"

#include <cmath>

#include "pxlap/densities.hpp"
#include "pxlap/error.hpp"
#include "pxlap/kernels.hpp"
#include "pxlap/mesh.hpp"

namespace pxlap {

namespace {

void require_nonzero(const Vec2& xi, const char* what) {
  if (xi.squaredNorm() == 0.0) {
    throw DegenerateGradientError(std::string(what) + ": gradient must be nonzero");
  }
}

double cell_volume(const Grid& g) { return g.dim() == 1 ? g.h() : g.h() * g.h(); }

}  // namespace

Mat2 diffusion_matrix(const Point& x, const Vec2& xi, const ExponentField& p) {
  require_nonzero(xi, "diffusion_matrix");
  const double px = p.at(x);
  const double r = xi.norm();
  const Vec2 n = xi / r;
  Mat2 a = std::pow(r, px - 2.0) * (Mat2::Identity() + (px - 2.0) * n * n.transpose());
  if (p.grid().dim() == 1) a(0, 1) = a(1, 0) = a(1, 1) = 0.0;
  return a;
}

double log_drift(const Point& x, const Vec2& xi, const ExponentField& p) {
  require_nonzero(xi, "log_drift");
  const double r = xi.norm();
  return std::pow(r, p.at(x) - 2.0) * std::log(r) * xi.dot(p.gradient_at(x));
}

double strong_operator(const OperatorProbe& probe, const ExponentField& p) {
  require_nonzero(probe.gradient, "strong_operator");
  const Mat2 a = diffusion_matrix(probe.x, probe.gradient, p);
  return -(a * probe.hessian).trace() - log_drift(probe.x, probe.gradient, p);
}

double infinity_laplacian(const OperatorProbe& probe) {
  return probe.gradient.dot(probe.hessian * probe.gradient);
}

double divergence_flux_fd(const GridFunction& u, const ExponentField& p, std::size_t node) {
  require_same_grid(u.grid(), p.grid(), "divergence_flux_fd");
  const Grid& g = u.grid();
  if (node >= g.size() || g.layer(node) < 1) {
    throw BoundaryError("divergence_flux_fd: stencil leaves the grid at node " +
                        std::to_string(node));
  }
  const Mesh mesh(g);
  const PowerDensity density;
  double s = 0.0;
  for (const auto& inc : mesh.incident(node)) {
    const double pe = mesh.mean(inc.element, p.values().values());
    const Vec2 flux = density.flux(pe, mesh.gradient(inc.element, u.values()));
    s += mesh.element_measure() * flux.dot(mesh.coefficients(inc.element)[inc.slot]);
  }
  return s / cell_volume(g);
}

std::vector<double> divergence_flux_all(const GridFunction& u, const ExponentField& p) {
  require_same_grid(u.grid(), p.grid(), "divergence_flux_all");
  const Grid& g = u.grid();
  const Mesh mesh(g);
  const auto pe = kernels::element_exponents(mesh, p.values().values());
  std::vector<double> grad(g.size());
  kernels::omp::energy_gradient(mesh, u.values(), pe, PowerDensity{}, grad);
  const double vol = cell_volume(g);
  for (std::size_t k = 0; k < g.size(); ++k) grad[k] = g.is_boundary(k) ? 0.0 : grad[k] / vol;
  return grad;
}

double flux_pairing(const GridFunction& u, const GridFunction& v, const ExponentField& p) {
  require_same_grid(u.grid(), p.grid(), "flux_pairing");
  require_same_grid(v.grid(), p.grid(), "flux_pairing");
  const Mesh mesh(u.grid());
  const PowerDensity density;
  double s = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double pe = mesh.mean(e, p.values().values());
    const Vec2 flux = density.flux(pe, mesh.gradient(e, u.values()));
    s += mesh.element_measure() * flux.dot(mesh.gradient(e, v.values()));
  }
  return s;
}

double weak_residual(const GridFunction& u, const GridFunction& phi, const ExponentField& p,
                     const SourceSpec& f) {
  require_same_grid(u.grid(), phi.grid(), "weak_residual");
  const Grid& g = u.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (phi[k] < 0.0) {
      throw InvalidTestFunctionError("test function is negative at node " + std::to_string(k));
    }
    if (g.is_boundary(k) && phi[k] != 0.0) {
      throw InvalidTestFunctionError("test function is nonzero on the boundary at node " +
                                     std::to_string(k));
    }
  }
  double source = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (phi[k] == 0.0) continue;
    source += g.weight(k) * f(g.node(k), u[k], nodal_gradient(u, k)) * phi[k];
  }
  return flux_pairing(u, phi, p) - source;
}

double weak_residual_tolerance(const GridFunction& phi) {
  double lip = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    lip = std::max(lip, nodal_gradient(phi, k).cwiseAbs().maxCoeff());
  }
  return 10.0 * (1.0 + phi.max_abs() + lip) * phi.grid().h();
}

}  // namespace pxlap
