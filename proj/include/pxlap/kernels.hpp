#pragma once

// Data-parallel kernels. Every kernel has a plain serial reference in
// kernels::serial and an OpenMP version in kernels::omp. The OpenMP versions
// never reduce across threads in a thread-dependent order: per-item results
// are written to arrays and summed in index order, so their output does not
// depend on the thread count.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "pxlap/mesh.hpp"

namespace pxlap::kernels {

// Per-element exponent (mean of the vertex values).
std::vector<double> element_exponents(const Mesh& mesh, std::span<const double> p_nodal);

// Inf-convolution search radius: minimizers lie within
// (q eps^{q-1} osc(u))^{1/q} of x.
double convolution_radius(double eps, double q, double oscillation);

// u(y) + |x - y|^q / (q eps^{q-1}) for a node offset (di, dj).
inline double convolution_term(double u_y, int di, int dj, double h, double q, double denom) {
  const double d2 = h * h * static_cast<double>(di * di + dj * dj);
  return u_y + std::pow(d2, 0.5 * q) / denom;
}

namespace serial {

template <class Density>
double energy(const Mesh& mesh, std::span<const double> u, std::span<const double> p_elem,
              const Density& density) {
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    sum += mesh.element_measure() * density.value(p_elem[e], mesh.gradient(e, u));
  }
  return sum;
}

// grad[n] = d/du_n sum_e |e| density(G_e(u)), accumulated element by element.
template <class Density>
void energy_gradient(const Mesh& mesh, std::span<const double> u,
                     std::span<const double> p_elem, const Density& density,
                     std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  const int npe = mesh.nodes_per_element();
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const Vec2 flux = density.flux(p_elem[e], mesh.gradient(e, u));
    const auto nd = mesh.nodes(e);
    const auto& c = mesh.coefficients(e);
    for (int a = 0; a < npe; ++a) grad[nd[a]] += mesh.element_measure() * flux.dot(c[a]);
  }
}

// Exact inf-convolution by exhaustive search over every node pair.
// Ties go to the lexicographically smallest minimizer.
void inf_convolve(const Grid& grid, std::span<const double> u, double eps, double q,
                  std::span<double> out, std::span<std::size_t> argmin);

}  // namespace serial

namespace omp {

template <class Density>
double energy(const Mesh& mesh, std::span<const double> u, std::span<const double> p_elem,
              const Density& density) {
  const auto n = static_cast<std::ptrdiff_t>(mesh.element_count());
  std::vector<double> parts(mesh.element_count());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t e = 0; e < n; ++e) {
    parts[e] = mesh.element_measure() * density.value(p_elem[e], mesh.gradient(e, u));
  }
  double sum = 0.0;
  for (double v : parts) sum += v;
  return sum;
}

// Sum over elements of |e| [density(G_e(u + d)) - density(G_e(u))], computed
// per element without cancellation.
template <class Density>
double energy_difference(const Mesh& mesh, std::span<const double> u, std::span<const double> d,
                         std::span<const double> p_elem, const Density& density) {
  const auto n = static_cast<std::ptrdiff_t>(mesh.element_count());
  std::vector<double> parts(mesh.element_count());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t e = 0; e < n; ++e) {
    parts[e] = mesh.element_measure() *
               density.difference(p_elem[e], mesh.gradient(e, u), mesh.gradient(e, d));
  }
  double sum = 0.0;
  for (double v : parts) sum += v;
  return sum;
}

// Same result as serial::energy_gradient up to summation order: element
// fluxes first, then a per-node gather over incident elements.
template <class Density>
void energy_gradient(const Mesh& mesh, std::span<const double> u,
                     std::span<const double> p_elem, const Density& density,
                     std::span<double> grad) {
  const auto ne = static_cast<std::ptrdiff_t>(mesh.element_count());
  std::vector<Vec2> flux(mesh.element_count());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t e = 0; e < ne; ++e) flux[e] = density.flux(p_elem[e], mesh.gradient(e, u));
  const auto nn = static_cast<std::ptrdiff_t>(mesh.grid().size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < nn; ++k) {
    double s = 0.0;
    for (const auto& inc : mesh.incident(static_cast<std::size_t>(k))) {
      s += mesh.element_measure() * flux[inc.element].dot(mesh.coefficients(inc.element)[inc.slot]);
    }
    grad[k] = s;
  }
}

// Windowed exact inf-convolution: only nodes within convolution_radius are
// searched, which cannot change the minimum or the tie-break.
void inf_convolve(const Grid& grid, std::span<const double> u, double eps, double q,
                  std::span<double> out, std::span<std::size_t> argmin);

}  // namespace omp

}  // namespace pxlap::kernels
