#pragma once

#include "pxlap/check_report.hpp"
#include "pxlap/exponent_field.hpp"
#include "pxlap/grid.hpp"

namespace pxlap {

inline constexpr double kDefaultNormTol = 1e-10;

// Composite trapezoid quadrature of u over its grid, summed in node order.
double integrate(const GridFunction& u);

// rho(u) = integral of |u|^p.
double modular(const GridFunction& u, const ExponentField& p);
// Same with the exponent given as raw nodal values (used for p', p*q, ...).
double modular(const GridFunction& u, const GridFunction& exponent);

// Luxemburg norm inf{lambda > 0 : rho(u / lambda) <= 1}, found by bisection
// until |rho(u / lambda) - 1| <= tol. Returns 0 for u == 0.
// Throws IterationLimitError when max_iterations is exhausted.
double luxemburg_norm(const GridFunction& u, const ExponentField& p,
                      double tol = kDefaultNormTol, int max_iterations = 400);
double luxemburg_norm(const GridFunction& u, const GridFunction& exponent,
                      double tol = kDefaultNormTol, int max_iterations = 400);

// ||u||_{L^p} + || |Du| ||_{L^p} with nodal (central) gradients.
double sobolev_norm(const GridFunction& u, const ExponentField& p, double tol = kDefaultNormTol);

// Conjugate exponent p / (p - 1) per node; requires p >= 1 + 1e-6.
GridFunction conjugate_exponent(const ExponentField& p);

// Norm/modular sandwich and the unit-ball equivalences. Items carry the
// relative tolerance 10 * tol * max(1, |lhs|, |rhs|).
CheckReport check_modular_norm_relations(const GridFunction& u, const ExponentField& p,
                                         double tol = kDefaultNormTol);

// |int u v| <= (1/p- + 1/(p')-) ||u||_{p} ||v||_{p'}.
CheckReport check_holder_pairing(const GridFunction& u, const GridFunction& v,
                                 const ExponentField& p, double tol = kDefaultNormTol);

// Relation between ||f||_{L^{pq}} and || |f|^p ||_{L^q} (both branches).
CheckReport check_product_lemma(const GridFunction& f, const ExponentField& p,
                                const ExponentField& q, double tol = kDefaultNormTol);

}  // namespace pxlap
