#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "pxlap/check_report.hpp"
#include "pxlap/exponent_field.hpp"
#include "pxlap/grid.hpp"
#include "pxlap/source.hpp"

namespace pxlap {

using BoundaryTrace = std::function<double(const Point&)>;

struct SolverOptions {
  double tol = 1e-9;             // max nodal Euler-Lagrange residual at exit
  int max_iterations = 200000;
  double delta = 0.0;            // (delta^2 + |Du|^2)^{p/2} regularization
  double armijo = 1e-4;
  int max_backtracks = 60;
};

struct SolveOutcome {
  GridFunction u;
  int iterations = 0;
  // Energy after each accepted step (first entry: initial iterate). For the
  // fixed-point solver this is the history of the last inner solve.
  std::vector<double> energy_history;
  // Accepted energy changes; every entry is strictly negative.
  std::vector<double> energy_decrements;
  double final_residual = 0.0;
  // Fixed-point solver only: max |u_{k+1} - u_k| per outer iteration.
  std::vector<double> outer_residuals;

  // CSV rows x[,y],u.
  void write_csv(std::ostream& os) const;
};

// Discrete energy sum_e |e| (delta^2 + |Du|^2)^{p/2} / p - sum_n w_n f_n u_n.
double discrete_energy(const GridFunction& u, const ExponentField& p, const GridFunction& f_of_x,
                       double delta = 0.0);

// Nodal Euler-Lagrange residual (-div F)_n - f_n at interior nodes, 0 on the
// boundary.
std::vector<double> euler_lagrange_residual(const GridFunction& u, const ExponentField& p,
                                            const GridFunction& f_of_x, double delta = 0.0);

// Samples (node, t in [-t_bound, t_bound], eta in the ball of radius
// eta_radius) and checks the growth envelope, monotonicity in t (when
// flagged) and the Lipschitz constant in eta.
CheckReport validate_growth(const SourceSpec& f, const ExponentField& p, int samples,
                            std::uint64_t seed = 1, double t_bound = 10.0,
                            double eta_radius = 10.0);

// Discrete harmonic extension of the boundary trace (p = 2, f = 0).
GridFunction harmonic_extension(const Grid& grid, const BoundaryTrace& g,
                                const SolverOptions& options = {});

// Minimizes the discrete energy over grid functions equal to g on the
// boundary by nonlinear conjugate gradients with Armijo backtracking.
// Throws DescentStallError if the line search fails and IterationLimitError
// if max_iterations is reached.
SolveOutcome solve_variational(const ExponentField& p, const BoundaryTrace& g,
                               const GridFunction& f_of_x, const SolverOptions& options = {},
                               const GridFunction* initial = nullptr);

// Picard iteration for -Delta_{p(x)} u = f(x, u, Du):
// freeze f at u_k, solve the variational problem, relax with omega.
// `tol` bounds max |u_{k+1} - u_k|. Throws FixedPointStallError with the
// residual history after max_outer iterations.
SolveOutcome solve_fixed_point(const ExponentField& p, const BoundaryTrace& g,
                               const SourceSpec& f, double tol, int max_outer,
                               double omega = 0.5, const SolverOptions& inner = {});

// f(x, u(x), Du(x)) at every node, with nodal central gradients.
GridFunction evaluate_source(const SourceSpec& f, const GridFunction& u);

}  // namespace pxlap
