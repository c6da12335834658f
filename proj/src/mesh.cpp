#include "pxlap/mesh.hpp"

namespace pxlap {

Mesh::Mesh(const Grid& grid) : grid_(grid) {
  const double h = grid.h();
  if (grid.dim() == 1) {
    element_count_ = static_cast<std::size_t>(grid.nx() - 1);
    measure_ = h;
    coeff_1d_ = {Vec2(-1.0 / h, 0.0), Vec2(1.0 / h, 0.0), Vec2::Zero()};
  } else {
    element_count_ = 2u * static_cast<std::size_t>(grid.nx() - 1) * (grid.ny() - 1);
    measure_ = 0.5 * h * h;
    coeff_2d_[0] = {Vec2(-1.0 / h, -1.0 / h), Vec2(1.0 / h, 0.0), Vec2(0.0, 1.0 / h)};
    coeff_2d_[1] = {Vec2(1.0 / h, 1.0 / h), Vec2(-1.0 / h, 0.0), Vec2(0.0, -1.0 / h)};
  }

  std::vector<std::size_t> counts(grid.size() + 1, 0);
  const int npe = nodes_per_element();
  for (std::size_t e = 0; e < element_count_; ++e) {
    const auto nd = nodes(e);
    for (int a = 0; a < npe; ++a) ++counts[nd[a] + 1];
  }
  offsets_.assign(grid.size() + 1, 0);
  for (std::size_t k = 0; k < grid.size(); ++k) offsets_[k + 1] = offsets_[k] + counts[k + 1];
  incidence_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t e = 0; e < element_count_; ++e) {
    const auto nd = nodes(e);
    for (int a = 0; a < npe; ++a) incidence_[fill[nd[a]]++] = Incidence{e, a};
  }
}

std::array<std::size_t, 3> Mesh::nodes(std::size_t e) const {
  if (grid_.dim() == 1) return {e, e + 1, e + 1};
  const std::size_t cell = e >> 1u;
  const int cells_x = grid_.nx() - 1;
  const int i = static_cast<int>(cell % cells_x);
  const int j = static_cast<int>(cell / cells_x);
  if ((e & 1u) == 0) return {grid_.index(i, j), grid_.index(i + 1, j), grid_.index(i, j + 1)};
  return {grid_.index(i + 1, j + 1), grid_.index(i, j + 1), grid_.index(i + 1, j)};
}

Vec2 Mesh::gradient(std::size_t e, std::span<const double> u) const {
  const auto nd = nodes(e);
  const auto& c = coefficients(e);
  Vec2 g = c[0] * u[nd[0]] + c[1] * u[nd[1]];
  if (grid_.dim() == 2) g += c[2] * u[nd[2]];
  return g;
}

double Mesh::mean(std::size_t e, std::span<const double> nodal) const {
  const auto nd = nodes(e);
  if (grid_.dim() == 1) return 0.5 * (nodal[nd[0]] + nodal[nd[1]]);
  return (nodal[nd[0]] + nodal[nd[1]] + nodal[nd[2]]) / 3.0;
}

Point Mesh::centroid(std::size_t e) const {
  const auto nd = nodes(e);
  if (grid_.dim() == 1) return 0.5 * (grid_.node(nd[0]) + grid_.node(nd[1]));
  return (grid_.node(nd[0]) + grid_.node(nd[1]) + grid_.node(nd[2])) / 3.0;
}

}  // namespace pxlap
