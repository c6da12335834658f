#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "pxlap/grid.hpp"

namespace pxlap {

// Piecewise-linear element layout over a Grid. In 1D each cell is a segment;
// in 2D each cell [i, i+1] x [j, j+1] is split into a lower triangle
// {(i,j), (i+1,j), (i,j+1)} and an upper triangle {(i+1,j+1), (i,j+1), (i+1,j)}.
// Element gradients are then forward differences on the cell edges, and the
// stencil around every node is centrally symmetric.
class Mesh {
 public:
  struct Incidence {
    std::size_t element;
    int slot;
  };

  explicit Mesh(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::size_t element_count() const { return element_count_; }
  int nodes_per_element() const { return grid_.dim() == 1 ? 2 : 3; }
  double element_measure() const { return measure_; }

  std::array<std::size_t, 3> nodes(std::size_t e) const;
  // d(element gradient)/d(u at slot a).
  const std::array<Vec2, 3>& coefficients(std::size_t e) const {
    return grid_.dim() == 1 ? coeff_1d_ : coeff_2d_[e & 1u];
  }

  Vec2 gradient(std::size_t e, std::span<const double> u) const;
  double mean(std::size_t e, std::span<const double> nodal) const;
  Point centroid(std::size_t e) const;

  // Elements touching `node`, in increasing element order.
  std::span<const Incidence> incident(std::size_t node) const {
    return {incidence_.data() + offsets_[node], incidence_.data() + offsets_[node + 1]};
  }

 private:
  Grid grid_;
  std::size_t element_count_ = 0;
  double measure_ = 0.0;
  std::array<Vec2, 3> coeff_1d_{};
  std::array<std::array<Vec2, 3>, 2> coeff_2d_{};
  std::vector<std::size_t> offsets_;
  std::vector<Incidence> incidence_;
};

}  // namespace pxlap
