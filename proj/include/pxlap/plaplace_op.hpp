#pragma once

#include <vector>

#include "pxlap/closed_form.hpp"
#include "pxlap/exponent_field.hpp"
#include "pxlap/grid.hpp"
#include "pxlap/source.hpp"

namespace pxlap {

// A(x, xi) = |xi|^{p-2} (I + (p-2) xi/|xi| (x) xi/|xi|). In 1D only the
// (0,0) entry is populated. Throws DegenerateGradientError for xi = 0.
Mat2 diffusion_matrix(const Point& x, const Vec2& xi, const ExponentField& p);

// B(x, xi) = |xi|^{p-2} log|xi| xi . Dp(x), using the stored gradient of p.
double log_drift(const Point& x, const Vec2& xi, const ExponentField& p);

// -Delta_{p(x)} phi at probe.x from analytic derivatives:
// -tr(A(x, D phi) D^2 phi) - B(x, D phi).
double strong_operator(const OperatorProbe& probe, const ExponentField& p);

// D^2 phi D phi . D phi.
double infinity_laplacian(const OperatorProbe& probe);

// Conservative discrete -div(|Du|^{p-2} Du) at an interior node: element
// fluxes on the piecewise-linear layout, gathered and divided by h^d.
// Throws BoundaryError for boundary nodes.
double divergence_flux_fd(const GridFunction& u, const ExponentField& p, std::size_t node);

// The same quantity at every node (boundary entries are 0).
std::vector<double> divergence_flux_all(const GridFunction& u, const ExponentField& p);

// <L(u), v> = integral of |Du|^{p-2} Du . Dv over the element layout.
double flux_pairing(const GridFunction& u, const GridFunction& v, const ExponentField& p);

// R = int |Du|^{p-2} Du . D phi - int f(x, u, Du) phi. R >= -tol certifies
// the supersolution inequality for this phi. Throws InvalidTestFunctionError
// if phi < 0 somewhere or phi != 0 on the boundary.
double weak_residual(const GridFunction& u, const GridFunction& phi, const ExponentField& p,
                     const SourceSpec& f);

// Default tolerance 10 (1 + ||phi||_{C^1}) h for weak_residual.
double weak_residual_tolerance(const GridFunction& phi);

}  // namespace pxlap
