#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "pxlap/check_report.hpp"
#include "pxlap/closed_form.hpp"
#include "pxlap/grid.hpp"
#include "pxlap/source.hpp"

namespace pxlap {

// Discrete inf-convolution u_eps(x) = min_y u(y) + |x - y|^q / (q eps^{q-1})
// (or the sup-convolution mirror), with the minimizing node per x.
struct ConvolutionResult {
  GridFunction u_eps;
  std::vector<std::size_t> argmin;
  double epsilon = 0.0;
  double q = 2.0;
  double r_eps = 0.0;
  double oscillation = 0.0;

  const Grid& grid() const { return u_eps.grid(); }
  // dist(x, boundary) > r_eps.
  bool in_shrunken_domain(std::size_t k) const {
    return grid().distance_to_boundary(k) > r_eps;
  }
  // CSV rows x[,y],u,u_eps,argmin_x[,argmin_y],dist.
  void write_csv(std::ostream& os, const GridFunction& u) const;
};

// Exact minimization over the grid. Throws ParameterError for eps <= 0 or q < 2.
ConvolutionResult inf_convolve(const GridFunction& u, double epsilon, double q);
// -inf_convolve(-u), bit for bit.
ConvolutionResult sup_convolve(const GridFunction& u, double epsilon, double q);

// u_{eps_1} <= u_{eps_2} <= ... <= u for eps_1 > eps_2 > ..., and
// max |u_{eps_k} - u| non-increasing in k.
CheckReport monotone_family_check(const GridFunction& u, std::span<const double> epsilons,
                                  double q);

// C with D^2 u_eps <= 2C I: 1/(2 eps) for q = 2, otherwise
// (q-1)/(2 eps) (2 r_eps)^{q-2} / eps^{q-2}.
double semiconcavity_constant(double q, double epsilon, double r_eps);

// Second differences of u_eps along axes (and diagonals in 2D) on the
// shrunken domain are <= 2C + tol. Default tol is 10 h.
CheckReport semiconcavity_check(const ConvolutionResult& res, std::optional<double> tol = {});

// u_eps <= u at every node.
CheckReport dominance_check(const ConvolutionResult& res, const GridFunction& u);

// Discrete Lipschitz constant of u_eps on the shrunken domain is at most
// Lip(u) + r_eps^{q-1} / eps^{q-1} (+ tol, default 10 h).
CheckReport lipschitz_check(const ConvolutionResult& res, const GridFunction& u,
                            std::optional<double> tol = {});

struct JetFromArgmin {
  OperatorProbe probe;          // gradient = eta, hessian = bound * I
  double hessian_bound = 0.0;   // (q-1)/eps |eta|^{(q-2)/(q-1)}
};

// eta = (x - x_eps) |x - x_eps|^{q-2} / eps^{q-1} and the matrix bound.
// Returns nullopt when the minimizer is x itself (zero gradient: the
// viscosity definitions impose nothing there).
std::optional<JetFromArgmin> jet_from_argmin(const ConvolutionResult& res, std::size_t node);

// At every node of the shrunken domain with argmin != x:
//  - exact: u_eps(x) = u(x_eps) + |x - x_eps|^q / (q eps^{q-1}) and the
//    paraboloid through x_eps bounds u_eps from above on the stencil;
//  - where the discrete subgradient set is nonempty, the central difference
//    of u_eps matches eta within tol + h/2 times the paraboloid curvature
//    (the grid argmin is only h-accurate) and second differences respect the
//    hessian bound within tol (default 10 h).
CheckReport jet_check(const ConvolutionResult& res, const GridFunction& u,
                      std::optional<double> tol = {});

// min over nodes y with |y - x| <= r_eps of f(y, s, eta); x itself is always
// a candidate.
double f_lower_envelope(const SourceSpec& f, const Grid& grid, double r_eps, const Point& x,
                        double s, const Vec2& eta);

// Dominance, monotonicity, Lipschitz, semiconcavity and jet checks over an
// epsilon sweep.
CheckReport convolution_lemma_suite(const GridFunction& u, std::span<const double> epsilons,
                                    double q, std::optional<double> tol = {});

}  // namespace pxlap
