#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pxlap/check_report.hpp"
#include "pxlap/exponent_field.hpp"
#include "pxlap/grid.hpp"
#include "pxlap/source.hpp"

namespace pxlap {

struct TestFunction {
  std::string label;
  GridFunction phi;
};

// Bumps max(0, 1 - |x - c|^2 / r^2)^2 centred on a lattice x lattice grid of
// interior points (radius = lattice spacing) plus one global bump. All vanish
// on the boundary.
std::vector<TestFunction> bump_battery(const Grid& grid, int lattice = 3);

// The battery of `sub` extended by zero to `grid`.
std::vector<TestFunction> embedded_battery(const Grid& grid, const Grid& sub, int lattice = 3);

// Weak residuals against every test function. Supersolution: R >= -tol;
// subsolution: R <= tol. Default tol is 10 h^2.
CheckReport check_weak_supersolution(const GridFunction& u, const ExponentField& p,
                                     const SourceSpec& f, std::span<const TestFunction> battery,
                                     std::optional<double> tol = {});
CheckReport check_weak_subsolution(const GridFunction& u, const ExponentField& p,
                                   const SourceSpec& f, std::span<const TestFunction> battery,
                                   std::optional<double> tol = {});

// Discrete touching probes at every interior node. eta runs over central /
// forward / backward differences per axis, X is the second-difference matrix
// shifted by m I (down for super, up for sub) with m the smallest of
// 0, c h, 2 c h, 4 c h (c = local max |third difference|) for which the
// quadratic stays below (above) u on the 3x3 stencil. Probes with eta = 0 are
// ignored; nodes without admissible probes are counted as skipped. One item
// per node: the worst admitted probe. Default tol is 10 h.
CheckReport check_viscosity_supersolution(const GridFunction& u, const ExponentField& p,
                                          const SourceSpec& f, std::optional<double> tol = {});
CheckReport check_viscosity_subsolution(const GridFunction& u, const ExponentField& p,
                                        const SourceSpec& f, std::optional<double> tol = {});

struct PipelineStage {
  double epsilon = 0.0;
  double r_eps = 0.0;
  double margin = 0.0;          // min over the shrunken domain of -Delta_p u_eps - f_eps
  double deficit = 0.0;         // max(0, -margin): the empirical E(eps)
  double worst_weak = 0.0;      // smallest weak residual of u_eps over the battery
  double sobolev_distance = 0.0;
  std::size_t nodes = 0;        // nodes entering the margin
};

struct PipelineResult {
  CheckReport report;
  std::vector<PipelineStage> stages;
  double q = 2.0;
};

// For each eps: strong-form margin of u_eps against the lower envelope f_eps
// on the shrunken domain, weak residuals of u_eps for bumps supported there,
// and ||u_eps - u|| in W^{1,p} on the centred half-side box. Passes iff every
// margin is >= -tol with non-increasing deficits, weak residuals are
// >= -(deficit int phi + tol) and the Sobolev distances are non-increasing.
// Default tol is 10 h. Throws ParameterError unless epsilons strictly decrease.
PipelineResult pipeline_viscosity_to_weak(const GridFunction& u, const ExponentField& p,
                                          const SourceSpec& f, std::span<const double> epsilons,
                                          std::optional<double> tol = {});

struct Box {
  Point lo = Point::Zero();
  Point hi = Point::Zero();
};

struct ComparisonResult {
  CheckReport report;
  bool preconditions_ok = false;
  bool ordered = false;
};

// On the nodes of B: checks u <= v on the boundary of B, |Du| + |Dv| > 0
// where p > 2, weak subsolution of u and supersolution of v with the battery
// of B. If any of these fails the report lists them and the ordering is not
// tested. Otherwise asserts u <= v + tol inside B (default tol 10 h^2).
ComparisonResult comparison_experiment(const GridFunction& u, const GridFunction& v,
                                       const ExponentField& p, const SourceSpec& f,
                                       const Box& box, std::optional<double> tol = {});

struct ComparisonSweep {
  std::vector<ComparisonResult> boxes;
  std::vector<double> measures;
  // Largest |B| among boxes whose preconditions held and which ordered
  // correctly; 0 if none.
  double empirical_delta = 0.0;
  CheckReport summary;
};

// Centred boxes with side fractions 1, 1/2, 1/4, ... (`count` of them).
std::vector<Box> shrinking_boxes(const Grid& grid, int count);

ComparisonSweep comparison_sweep(const GridFunction& u, const GridFunction& v,
                                 const ExponentField& p, const SourceSpec& f,
                                 std::span<const Box> boxes, std::optional<double> tol = {});

}  // namespace pxlap
