#include "pxlap/restoration.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "pxlap/densities.hpp"
#include "pxlap/error.hpp"
#include "pxlap/kernels.hpp"
#include "pxlap/mesh.hpp"

namespace pxlap {

namespace {

void require_shape(const ImageGrid& a, const ImageGrid& b, const char* what) {
  if (a.width != b.width || a.height != b.height) {
    std::ostringstream msg;
    msg << what << ": image shapes differ (" << a.width << 'x' << a.height << " vs " << b.width
        << 'x' << b.height << ')';
    throw DimensionError(msg.str());
  }
}

void require_exponent_shape(const ImageGrid& img, const ExponentField& p, const char* what) {
  const Grid& g = p.grid();
  if (g.dim() != 2 || g.nx() != img.width || g.ny() != img.height) {
    throw DimensionError(std::string(what) + ": exponent grid does not match the image");
  }
}

// Next whitespace-delimited header token, skipping # comments.
std::string header_token(std::istream& in) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      if (!tok.empty()) return tok;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(c);
  }
  if (tok.empty()) throw IoError("pgm: truncated header");
  return tok;
}

int header_int(std::istream& in, const char* what) {
  const std::string tok = header_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError(std::string("pgm: bad ") + what + " '" + tok + "'");
  }
}

int mirror(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

// Diffusivity a_e with flux = a_e G_e, frozen at the current iterate.
// Elements with zero gradient and p < 2 get a large finite value.
double lagged_diffusivity(const Vec2& grad, double p, double beta) {
  constexpr double kCap = 1e12;
  const double r = grad.norm();
  if (r > beta) return 1.0 / r;
  if (p == 2.0) return 1.0;
  if (r == 0.0) return kCap;
  return std::min(std::pow(r, p - 2.0), kCap);
}

// One implicit step of (M/dt + 2M + K(a)) u = M (u_n/dt + 2 I) with the
// stiffness K assembled from lagged diffusivities. For densities concave in
// |xi|^2 (p <= 2 and the linear branch) the frozen quadratic majorizes the
// energy, so the step never increases it.
class LaggedSystem {
 public:
  LaggedSystem(const Mesh& mesh, bool dirichlet) : mesh_(mesh), dirichlet_(dirichlet) {}

  std::vector<double> step(const std::vector<double>& u, const std::vector<double>& image,
                           const std::vector<double>& pe, double beta, double dt) {
    const Grid& g = mesh_.grid();
    const std::size_t n = g.size();
    const int npe = mesh_.nodes_per_element();
    auto fixed = [&](std::size_t k) { return dirichlet_ && g.is_boundary(k); };

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(n + mesh_.element_count() * 9);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      if (fixed(k)) {
        entries.emplace_back(i, i, 1.0);
        rhs[i] = image[k];
        continue;
      }
      const double w = g.weight(k);
      entries.emplace_back(i, i, w * (1.0 / dt + 2.0));
      rhs[i] = w * (u[k] / dt + 2.0 * image[k]);
    }
    for (std::size_t e = 0; e < mesh_.element_count(); ++e) {
      const double a = lagged_diffusivity(mesh_.gradient(e, u), pe[e], beta);
      const auto nd = mesh_.nodes(e);
      const auto& c = mesh_.coefficients(e);
      for (int s = 0; s < npe; ++s) {
        if (fixed(nd[s])) continue;
        for (int t = 0; t < npe; ++t) {
          const double kst = mesh_.element_measure() * a * c[s].dot(c[t]);
          if (fixed(nd[t])) {
            rhs[static_cast<Eigen::Index>(nd[s])] -= kst * image[nd[t]];
          } else {
            entries.emplace_back(static_cast<Eigen::Index>(nd[s]),
                                 static_cast<Eigen::Index>(nd[t]), kst);
          }
        }
      }
    }
    Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    a.setFromTriplets(entries.begin(), entries.end());
    if (!analyzed_) {
      solver_.analyzePattern(a);
      analyzed_ = true;
    }
    solver_.factorize(a);
    if (solver_.info() != Eigen::Success) throw BlowUpError("evolve_flow: factorization failed");
    const Eigen::VectorXd x = solver_.solve(rhs);
    return std::vector<double>(x.data(), x.data() + x.size());
  }

 private:
  const Mesh& mesh_;
  bool dirichlet_;
  bool analyzed_ = false;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

}  // namespace

ImageGrid::ImageGrid(int w, int h, double fill) : width(w), height(h) {
  if (w < 1 || h < 1) throw DimensionError("image must be at least 1x1");
  pixels.assign(static_cast<std::size_t>(w) * h, std::clamp(fill, 0.0, 1.0));
}

ImageGrid::ImageGrid(int w, int h, std::vector<double> values)
    : width(w), height(h), pixels(std::move(values)) {
  if (w < 1 || h < 1) throw DimensionError("image must be at least 1x1");
  if (pixels.size() != static_cast<std::size_t>(w) * h) {
    throw DimensionError("image has " + std::to_string(pixels.size()) + " values, expected " +
                         std::to_string(static_cast<std::size_t>(w) * h));
  }
  for (double& v : pixels) {
    if (!std::isfinite(v)) throw DimensionError("image values must be finite");
    v = std::clamp(v, 0.0, 1.0);
  }
}

Grid ImageGrid::grid() const {
  if (width < 2 || height < 2) throw DimensionError("image grid needs at least 2x2 pixels");
  return Grid::rect(0.0, width - 1.0, 0.0, height - 1.0, 1.0);
}

GridFunction ImageGrid::as_function() const { return GridFunction(grid(), pixels); }

ImageGrid ImageGrid::from_function(const GridFunction& u) {
  const Grid& g = u.grid();
  if (g.dim() != 2) throw DimensionError("image needs a 2D grid");
  return ImageGrid(g.nx(), g.ny(), std::vector<double>(u.values().begin(), u.values().end()));
}

ImageGrid read_pgm(std::istream& in) {
  const std::string magic = header_token(in);
  if (magic != "P2" && magic != "P5") throw IoError("pgm: unsupported magic '" + magic + "'");
  const int w = header_int(in, "width");
  const int h = header_int(in, "height");
  const int maxval = header_int(in, "maxval");
  if (w < 1 || h < 1) throw IoError("pgm: non-positive size");
  if (maxval < 1 || maxval > 255) throw IoError("pgm: maxval must be in [1, 255]");
  std::vector<double> values(static_cast<std::size_t>(w) * h);
  if (magic == "P5") {
    std::vector<char> raw(values.size());
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
      throw IoError("pgm: truncated pixel data");
    }
    for (std::size_t k = 0; k < raw.size(); ++k) {
      values[k] = static_cast<unsigned char>(raw[k]) / static_cast<double>(maxval);
    }
  } else {
    for (auto& v : values) {
      int x;
      if (!(in >> x)) throw IoError("pgm: truncated pixel data");
      if (x < 0 || x > maxval) throw IoError("pgm: pixel value out of range");
      v = x / static_cast<double>(maxval);
    }
  }
  return ImageGrid(w, h, std::move(values));
}

ImageGrid read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_pgm(in);
}

void write_pgm(std::ostream& out, const ImageGrid& img, bool binary) {
  out << (binary ? "P5" : "P2") << '\n' << img.width << ' ' << img.height << "\n255\n";
  auto level = [](double v) {
    return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  if (binary) {
    for (double v : img.pixels) out.put(static_cast<char>(level(v)));
  } else {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) out << level(img.at(x, y)) << (x + 1 < img.width ? ' ' : '\n');
    }
  }
  if (!out) throw IoError("pgm: write failed");
}

void write_pgm(const std::string& path, const ImageGrid& img, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_pgm(out, img, binary);
}

ImageGrid gaussian_blur(const ImageGrid& img, double sigma) {
  if (!(sigma >= 0.0)) throw ParameterError("sigma must be >= 0");
  if (sigma == 0.0) return img;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    kernel[t + radius] = std::exp(-0.5 * t * t / (sigma * sigma));
    total += kernel[t + radius];
  }
  for (double& w : kernel) w /= total;

  ImageGrid tmp = img, out = img;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double s = 0.0;
      for (int t = -radius; t <= radius; ++t) s += kernel[t + radius] * img.at(mirror(x + t, img.width), y);
      tmp.at(x, y) = s;
    }
  }
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double s = 0.0;
      for (int t = -radius; t <= radius; ++t) s += kernel[t + radius] * tmp.at(x, mirror(y + t, img.height));
      out.at(x, y) = s;
    }
  }
  return out;
}

ExponentField build_exponent_from_image(const ImageGrid& image, double sigma, double k) {
  if (!(k > 0.0)) throw ParameterError("k must be > 0");
  const GridFunction smooth = gaussian_blur(image, sigma).as_function();
  std::vector<double> p(smooth.size());
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double g2 = nodal_gradient(smooth, n).squaredNorm();
    p[n] = std::clamp(1.0 + 1.0 / (1.0 + k * g2), kMinImageExponent, 2.0);
  }
  return ExponentField::from_values(GridFunction(smooth.grid(), std::move(p)));
}

double continuity_constant(double beta, double p_at_x) {
  if (!(beta > 0.0)) throw ParameterError("beta must be > 0");
  if (!(p_at_x >= 1.0 && p_at_x <= 2.0)) throw ParameterError("p must lie in [1, 2]");
  return ClrDensity::continuity_constant(beta, p_at_x);
}

Vec2 clr_flux(const Point& x, const Vec2& xi, const ExponentField& p, double beta) {
  if (!(beta > 0.0)) throw ParameterError("beta must be > 0");
  return ClrDensity{beta}.flux(p.at(x), xi);
}

double clr_energy(const ImageGrid& u, const ImageGrid& image, const ExponentField& p,
                  double beta) {
  require_shape(u, image, "clr_energy");
  require_exponent_shape(u, p, "clr_energy");
  if (!(beta > 0.0)) throw ParameterError("beta must be > 0");
  const Mesh mesh(p.grid());
  const auto pe = kernels::element_exponents(mesh, p.values().values());
  double e = kernels::omp::energy(mesh, std::span<const double>(u.pixels), pe, ClrDensity{beta});
  const Grid& g = p.grid();
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double d = u.pixels[k] - image.pixels[k];
    e += g.weight(k) * d * d;
  }
  return e;
}

void FlowResult::write_energy_csv(std::ostream& os) const {
  os << "step,energy,clamped\n" << std::setprecision(17);
  for (std::size_t s = 0; s < energy.size(); ++s) {
    os << s << ',' << energy[s] << ',' << (s == 0 ? 0 : clamped[s - 1]) << '\n';
  }
}

FlowResult evolve_flow(const ImageGrid& u0, const ImageGrid& image, const ExponentField& p,
                       const FlowOptions& options) {
  require_shape(u0, image, "evolve_flow");
  require_exponent_shape(u0, p, "evolve_flow");
  if (!(options.dt > 0.0)) throw ParameterError("dt must be > 0");
  if (options.steps < 1) throw ParameterError("steps must be >= 1");
  if (!(options.beta > 0.0)) throw ParameterError("beta must be > 0");
  if (p.p_minus() < 1.0 || p.p_plus() > 2.0) throw ParameterError("p must lie in [1, 2]");

  const Grid& g = p.grid();
  const Mesh mesh(g);
  const auto pe = kernels::element_exponents(mesh, p.values().values());
  const ClrDensity density{options.beta};

  FlowResult out;
  out.u = u0;
  double slope = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double r = mesh.gradient(e, std::span<const double>(u0.pixels)).norm();
    if (r == 0.0) continue;
    slope = std::max(slope, r <= options.beta ? std::pow(r, pe[e] - 2.0) : 1.0 / r);
  }
  slope = std::max(slope, 1.0);
  // 2 / Lipschitz constant of the energy gradient: 8 slope / h^2 from the
  // diffusion, 2 from the fidelity term.
  out.stable_dt = g.h() * g.h() / (4.0 * slope + g.h() * g.h());
  out.stability_warning = options.scheme == FlowScheme::Explicit && options.dt > out.stable_dt;

  out.energy.push_back(clr_energy(out.u, image, p, options.beta));
  LaggedSystem lagged(mesh, options.dirichlet);
  std::vector<double> grad(g.size());
  auto& u = out.u.pixels;
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  for (int step = 1; step <= options.steps; ++step) {
    std::vector<double> next(u.size());
    if (options.scheme == FlowScheme::Explicit) {
      kernels::omp::energy_gradient(mesh, std::span<const double>(u), pe, density, grad);
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t k = 0; k < n; ++k) {
        if (options.dirichlet && g.is_boundary(static_cast<std::size_t>(k))) {
          next[k] = u[k];
          continue;
        }
        const double rate = -grad[k] / g.weight(static_cast<std::size_t>(k)) -
                            2.0 * (u[k] - image.pixels[k]);
        next[k] = u[k] + options.dt * rate;
      }
    } else {
      next = lagged.step(u, image.pixels, pe, options.beta, options.dt);
    }
    std::size_t clamped = 0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (!std::isfinite(next[k])) {
        throw BlowUpError("evolve_flow: non-finite value at step " + std::to_string(step));
      }
      const double c = std::clamp(next[k], 0.0, 1.0);
      clamped += c != next[k];
      u[k] = c;
    }
    out.clamped.push_back(clamped);
    out.energy.push_back(clr_energy(out.u, image, p, options.beta));
  }
  return out;
}

}  // namespace pxlap
