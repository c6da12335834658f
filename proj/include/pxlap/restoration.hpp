#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "pxlap/exponent_field.hpp"
#include "pxlap/grid.hpp"

namespace pxlap {

// Grey-level image with intensities in [0, 1], row-major, pixel pitch 1.
struct ImageGrid {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  ImageGrid() = default;
  ImageGrid(int w, int h, double fill = 0.0);
  // Throws DimensionError on a size mismatch; values outside [0, 1] are clamped.
  ImageGrid(int w, int h, std::vector<double> values);

  double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const { return pixels.size(); }

  // Node grid [0, w-1] x [0, h-1] with h = 1; node (i, j) is pixel (i, j).
  Grid grid() const;
  GridFunction as_function() const;
  static ImageGrid from_function(const GridFunction& u);
};

// PGM input (P2 or P5, maxval <= 255) mapped to [0, 1]. Throws IoError.
ImageGrid read_pgm(std::istream& in);
ImageGrid read_pgm(const std::string& path);
void write_pgm(std::ostream& out, const ImageGrid& img, bool binary = true);
void write_pgm(const std::string& path, const ImageGrid& img, bool binary = true);

// Separable Gaussian blur with mirror padding; sigma = 0 returns the input.
ImageGrid gaussian_blur(const ImageGrid& img, double sigma);

// p = 1 + 1/(1 + k |D(G_sigma * I)|^2), clamped to [1 + 1e-3, 2].
ExponentField build_exponent_from_image(const ImageGrid& image, double sigma, double k);

constexpr double kMinImageExponent = 1.0 + 1e-3;

// beta - beta^p / p. Throws ParameterError unless beta > 0 and p in [1, 2].
double continuity_constant(double beta, double p_at_x);

// |xi|^{p-2} xi for 0 < |xi| <= beta, xi/|xi| beyond, 0 at xi = 0.
Vec2 clr_flux(const Point& x, const Vec2& xi, const ExponentField& p, double beta);

// Piecewise-linear quadrature of the density plus lumped (trapezoid)
// quadrature of (u - I)^2.
double clr_energy(const ImageGrid& u, const ImageGrid& image, const ExponentField& p,
                  double beta);

enum class FlowScheme {
  // Diffusivity frozen at u_n, diffusion and fidelity implicit. Never
  // increases the energy, for any dt.
  SemiImplicit,
  // Forward Euler. Only stable for dt below the heuristic bound, which
  // degenerates where p < 2 and Du is small.
  Explicit,
};

struct FlowOptions {
  double beta = 1.0;
  double dt = 0.2;
  int steps = 100;
  bool dirichlet = false;  // keep boundary pixels at I; default is Neumann
  FlowScheme scheme = FlowScheme::SemiImplicit;
};

struct FlowResult {
  ImageGrid u;
  std::vector<double> energy;         // initial energy, then one entry per step
  std::vector<std::size_t> clamped;   // pixels clamped to [0, 1] per step
  double stable_dt = 0.0;             // h^2 / (4 max flux slope + h^2) at u0
  bool stability_warning = false;     // explicit scheme with dt > stable_dt

  // CSV rows step,energy,clamped.
  void write_energy_csv(std::ostream& os) const;
};

// Time stepping for u_t = div(flux(x, Du)) - 2 (u - I) with lumped mass and
// natural (Neumann) boundary unless options.dirichlet. Clamps to [0, 1] after
// every step. Throws BlowUpError naming the step if values become non-finite.
FlowResult evolve_flow(const ImageGrid& u0, const ImageGrid& image, const ExponentField& p,
                       const FlowOptions& options = {});

}  // namespace pxlap
