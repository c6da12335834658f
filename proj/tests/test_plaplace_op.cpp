#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pxlap/closed_form.hpp"
#include "pxlap/densities.hpp"
#include "pxlap/error.hpp"
#include "pxlap/plaplace_op.hpp"
#include "pxlap/source.hpp"

using namespace pxlap;

namespace {

const Grid kSquare = Grid::square_nodes(0.0, 1.0, 9);

ExponentField p_of(const Grid& g, std::function<double(const Point&)> f) {
  return ExponentField::build(f, g);
}

OperatorProbe probe(const ClosedForm& cf, const Point& x, int dim) { return cf.probe(x, dim); }

}  // namespace

TEST_CASE("diffusion matrix examples") {
  const auto p2 = ExponentField::constant(kSquare, 2.0);
  const auto p3 = ExponentField::constant(kSquare, 3.0);
  const Point x(0.5, 0.5);
  CHECK((diffusion_matrix(x, Vec2(0.3, -1.7), p2) - Mat2::Identity()).norm() < 1e-14);
  Mat2 expect;
  expect << 2, 0, 0, 1;
  CHECK((diffusion_matrix(x, Vec2(1.0, 0.0), p3) - expect).norm() < 1e-14);
  CHECK_THROWS_AS(diffusion_matrix(x, Vec2::Zero(), p2), DegenerateGradientError);
}

TEST_CASE("diffusion matrix eigenvalues against a dense eigensolver") {
  const auto p = ExponentField::constant(kSquare, 2.5);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> d(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec2 xi(d(rng), d(rng));
    const Mat2 a = diffusion_matrix(Point(0.5, 0.5), xi, p);
    CHECK(std::abs(a(0, 1) - a(1, 0)) <= 1e-12 * a.norm());
    Eigen::SelfAdjointEigenSolver<Mat2> es(a);
    const double s = std::pow(xi.norm(), 0.5);
    CHECK(es.eigenvalues()(0) == doctest::Approx(s).epsilon(1e-12));
    CHECK(es.eigenvalues()(1) == doctest::Approx(1.5 * s).epsilon(1e-12));
  }
}

TEST_CASE("diffusion matrix is positive definite with the stated minimum eigenvalue") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> pd(1.05, 5.0);
  std::normal_distribution<double> d(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double pc = pd(rng);
    const auto p = ExponentField::constant(kSquare, pc);
    const Vec2 xi(d(rng), d(rng));
    Eigen::SelfAdjointEigenSolver<Mat2> es(diffusion_matrix(Point(0.5, 0.5), xi, p));
    const double lmin = std::min(1.0, pc - 1.0) * std::pow(xi.norm(), pc - 2.0);
    CHECK(es.eigenvalues()(0) > 0.0);
    CHECK(es.eigenvalues()(0) == doctest::Approx(lmin).epsilon(1e-10));
  }
}

TEST_CASE("1D diffusion matrix only fills the first entry") {
  const Grid g = Grid::line_nodes(0.0, 1.0, 9);
  const auto p = ExponentField::constant(g, 3.0);
  const Mat2 a = diffusion_matrix(Point(0.5, 0.0), Vec2(-2.0, 0.0), p);
  CHECK(a(0, 0) == doctest::Approx(4.0));
  CHECK(a(1, 1) == 0.0);
  CHECK(a(0, 1) == 0.0);
}

TEST_CASE("log drift examples") {
  const auto pc = ExponentField::constant(kSquare, 2.7);
  CHECK(log_drift(Point(0.4, 0.4), Vec2(3.0, 1.0), pc) == 0.0);
  const auto pv = p_of(kSquare, [](const Point& x) { return 2.0 + x.x(); });
  CHECK(log_drift(Point(0.5, 0.5), Vec2(0.6, 0.8), pv) == doctest::Approx(0.0));
  const double e = std::exp(1.0);
  for (double x1 : {0.0, 0.25, 0.5, 1.0}) {
    const Point x(x1, 0.5);
    CHECK(log_drift(x, Vec2(e, 0.0), pv) == doctest::Approx(std::exp(x1 + 1.0)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(log_drift(Point(0.5, 0.5), Vec2::Zero(), pv), DegenerateGradientError);
}

TEST_CASE("strong operator examples") {
  const auto p2 = ExponentField::constant(kSquare, 2.0);
  const auto half_sq = make_closed_form("quadratic", {{"d", 0.5}, {"e", 0.5}}, kSquare);
  CHECK(strong_operator(probe(half_sq, Point(0.3, 0.7), 2), p2) == doctest::Approx(-2.0));
  const auto affine = make_closed_form("affine", {{"a", 1}, {"b", 2}, {"c", -3}}, kSquare);
  CHECK(strong_operator(probe(affine, Point(0.3, 0.7), 2), ExponentField::constant(kSquare, 3.5)) ==
        doctest::Approx(0.0));
  CHECK_THROWS_AS(strong_operator(probe(half_sq, Point(0.0, 0.0), 2), p2),
                  DegenerateGradientError);
}

TEST_CASE("strong operator equals the expanded form") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const auto p = p_of(kSquare, [](const Point& x) { return 2.2 + 0.5 * x.x() - 0.3 * x.y(); });
  for (int trial = 0; trial < 100; ++trial) {
    OperatorProbe pr;
    pr.dim = 2;
    pr.x = Point(0.5 + 0.4 * d(rng), 0.5 + 0.4 * d(rng));
    pr.gradient = Vec2(d(rng), d(rng));
    const double a = d(rng), b = d(rng), c = d(rng);
    pr.hessian << a, b, b, c;
    const double pe = p.at(pr.x);
    const Vec2 dp = p.gradient_at(pr.x);
    const double r = pr.gradient.norm();
    const double lap = a + c;
    const double inf = pr.gradient.dot(pr.hessian * pr.gradient);
    const double expanded = -std::pow(r, pe - 2) * (lap + (pe - 2) * inf / (r * r)) -
                            std::pow(r, pe - 2) * dp.dot(pr.gradient) * std::log(r);
    CHECK(strong_operator(pr, p) == doctest::Approx(expanded).epsilon(1e-12));
  }
}

TEST_CASE("infinity Laplacian") {
  OperatorProbe pr;
  pr.hessian = Mat2::Identity();
  CHECK(infinity_laplacian(pr) == 0.0);
  pr.gradient = Vec2(1.0, 0.0);
  CHECK(infinity_laplacian(pr) == 1.0);
  std::mt19937_64 rng(24);
  std::normal_distribution<double> d(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    double x[2][2];
    x[0][0] = d(rng);
    x[0][1] = x[1][0] = d(rng);
    x[1][1] = d(rng);
    const double eta[2] = {d(rng), d(rng)};
    double naive = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) naive += x[i][j] * eta[i] * eta[j];
    pr.hessian << x[0][0], x[0][1], x[1][0], x[1][1];
    pr.gradient = Vec2(eta[0], eta[1]);
    CHECK(infinity_laplacian(pr) == doctest::Approx(naive).epsilon(1e-13));
  }
}

TEST_CASE("flux divergence of affine data vanishes for constant p") {
  for (double pc : {1.5, 2.0, 3.0}) {
    const auto p = ExponentField::constant(kSquare, pc);
    const auto u = GridFunction::sample(kSquare, [](const Point& x) { return 1 + 2 * x.x() - x.y(); });
    for (std::size_t k = 0; k < kSquare.size(); ++k) {
      if (kSquare.is_boundary(k)) continue;
      CHECK(std::abs(divergence_flux_fd(u, p, k)) < 1e-12);
    }
  }
}

TEST_CASE("flux divergence with p = 2 is the 5-point Laplacian") {
  const Grid g = Grid::square_nodes(0.0, 1.0, 17);
  const auto p = ExponentField::constant(g, 2.0);
  const auto u = GridFunction::sample(g, [](const Point& x) {
    return std::sin(3 * x.x()) * std::cos(2 * x.y()) + x.x() * x.x() * x.y();
  });
  const double h = g.h();
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      const double five = -(u.at(i + 1, j) + u.at(i - 1, j) + u.at(i, j + 1) + u.at(i, j - 1) -
                            4 * u.at(i, j)) /
                          (h * h);
      CHECK(divergence_flux_fd(u, p, g.index(i, j)) == doctest::Approx(five).epsilon(1e-10));
    }
  }
}

TEST_CASE("flux divergence rejects boundary nodes") {
  const auto p = ExponentField::constant(kSquare, 2.0);
  CHECK_THROWS_AS(divergence_flux_fd(GridFunction(kSquare, 0.0), p, 0), BoundaryError);
  const auto all = divergence_flux_all(GridFunction(kSquare, 1.0), p);
  CHECK(all[0] == 0.0);
}

TEST_CASE("strong operator and flux divergence agree at second order") {
  const Params prm{{"d", 1.0}, {"c", 1.0}};  // u = x^2 + y
  auto pexpr = [](const Point& x) { return 2.0 + x.x(); };
  std::vector<double> hs, errs;
  for (int n : {17, 33, 65}) {
    const Grid g = Grid::square_nodes(0.0, 1.0, n);
    const auto cf = make_closed_form("quadratic", prm, g);
    const auto p = ExponentField::build(pexpr, g);
    const std::size_t k = g.index((n - 1) / 2, (n - 1) / 2);
    const double fd = divergence_flux_fd(cf.sample(g), p, k);
    const double exact = strong_operator(cf.probe(g.node(k), 2), p);
    hs.push_back(g.h());
    errs.push_back(std::abs(fd - exact));
  }
  CHECK(oracle::convergence_order(hs, errs) >= 1.8);
}

TEST_CASE("weak residual examples") {
  const Grid g = Grid::line_nodes(-1.0, 1.0, 65);
  const auto p = ExponentField::constant(g, 2.0);
  const auto zero = make_source("zero", {});
  const auto phi = GridFunction::sample(g, [](const Point& x) {
    return std::pow(std::max(0.0, 1.0 - x.x() * x.x() / 0.25), 2.0);
  });
  CHECK(weak_residual(GridFunction(g, 0.0), phi, p, zero) == 0.0);
  const auto u = GridFunction::sample(g, [](const Point& x) { return 1.0 - x.x() * x.x(); });
  // -u'' = 2, so R = 2 int phi.
  const double r = weak_residual(u, phi, p, zero);
  CHECK(r > 0.0);
  const double int_phi =
      oracle::simpson([](double x) { return std::pow(std::max(0.0, 1 - 4 * x * x), 2.0); }, -0.5,
                      0.5, 10000);
  CHECK(r == doctest::Approx(2.0 * int_phi).epsilon(0.01));

  GridFunction bad = phi;
  bad[10] = -1e-3;
  CHECK_THROWS_AS(weak_residual(u, bad, p, zero), InvalidTestFunctionError);
  GridFunction edge = phi;
  edge[0] = 0.5;
  CHECK_THROWS_AS(weak_residual(u, edge, p, zero), InvalidTestFunctionError);
  CHECK(weak_residual_tolerance(phi) > 0.0);
}

TEST_CASE("flux map is strongly monotone") {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> pd(1.2, 4.0);
  std::normal_distribution<double> d(0.0, 1.0);
  const PowerDensity density;
  for (int batch = 0; batch < 10; ++batch) {
    const double p = pd(rng);
    double c = INFINITY;
    for (int trial = 0; trial < 500; ++trial) {
      const Vec2 a(d(rng), d(rng)), b(d(rng), d(rng));
      const double lhs = (density.flux(p, a) - density.flux(p, b)).dot(a - b);
      const double rhs = std::pow(a.norm() + b.norm(), p - 2) * (a - b).squaredNorm();
      c = std::min(c, lhs / rhs);
    }
    CHECK(c > 0.0);
  }
}

TEST_CASE("discrete operator is monotone") {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const Grid g = Grid::square_nodes(0.0, 1.0, 17);
  const auto p = ExponentField::build([](const Point& x) { return 1.5 + x.x() + x.y(); }, g);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(g.size()), b(g.size()), diff(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      a[k] = d(rng);
      b[k] = d(rng);
      diff[k] = a[k] - b[k];
    }
    const GridFunction u(g, a), v(g, b), w(g, diff);
    CHECK(flux_pairing(u, w, p) - flux_pairing(v, w, p) >= 0.0);
  }
}
