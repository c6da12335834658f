#include "pxlap/kernels.hpp"

#include <algorithm>
#include <limits>

namespace pxlap::kernels {

std::vector<double> element_exponents(const Mesh& mesh, std::span<const double> p_nodal) {
  std::vector<double> p(mesh.element_count());
  for (std::size_t e = 0; e < p.size(); ++e) p[e] = mesh.mean(e, p_nodal);
  return p;
}

double convolution_radius(double eps, double q, double oscillation) {
  return std::pow(q * std::pow(eps, q - 1.0) * oscillation, 1.0 / q);
}

namespace {

struct Best {
  double value = std::numeric_limits<double>::infinity();
  int i = -1;
  int j = -1;

  void offer(double v, int ci, int cj) {
    if (v < value || (v == value && (ci < i || (ci == i && cj < j)))) {
      value = v;
      i = ci;
      j = cj;
    }
  }
};

}  // namespace

namespace serial {

void inf_convolve(const Grid& grid, std::span<const double> u, double eps, double q,
                  std::span<double> out, std::span<std::size_t> argmin) {
  const double denom = q * std::pow(eps, q - 1.0);
  const double h = grid.h();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const int xi = grid.ix(k);
    const int xj = grid.iy(k);
    Best best;
    for (std::size_t m = 0; m < grid.size(); ++m) {
      const int yi = grid.ix(m);
      const int yj = grid.iy(m);
      best.offer(convolution_term(u[m], yi - xi, yj - xj, h, q, denom), yi, yj);
    }
    out[k] = best.value;
    argmin[k] = grid.index(best.i, best.j);
  }
}

}  // namespace serial

namespace omp {

void inf_convolve(const Grid& grid, std::span<const double> u, double eps, double q,
                  std::span<double> out, std::span<std::size_t> argmin) {
  const double denom = q * std::pow(eps, q - 1.0);
  const double h = grid.h();
  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  const double radius = convolution_radius(eps, q, *hi - *lo);
  const int reach = static_cast<int>(std::floor(radius * (1.0 + 1e-9) / h)) + 1;
  const int nx = grid.nx();
  const int ny = grid.ny();
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const int xi = grid.ix(static_cast<std::size_t>(k));
    const int xj = grid.iy(static_cast<std::size_t>(k));
    const int i0 = std::max(0, xi - reach), i1 = std::min(nx - 1, xi + reach);
    const int j0 = std::max(0, xj - reach), j1 = std::min(ny - 1, xj + reach);
    Best best;
    for (int yj = j0; yj <= j1; ++yj) {
      for (int yi = i0; yi <= i1; ++yi) {
        best.offer(convolution_term(u[grid.index(yi, yj)], yi - xi, yj - xj, h, q, denom), yi,
                   yj);
      }
    }
    out[k] = best.value;
    argmin[k] = grid.index(best.i, best.j);
  }
}

}  // namespace omp

}  // namespace pxlap::kernels
