#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pxlap/error.hpp"
#include "pxlap/variable_lebesgue.hpp"

using namespace pxlap;

namespace {

Grid unit(int n) { return Grid::line_nodes(0.0, 1.0, n); }

ExponentField affine_p(const Grid& g, double a, double b) {
  return ExponentField::build([=](const Point& x) { return a + b * x.x(); }, g);
}

GridFunction fn(const Grid& g, std::function<double(double)> f) {
  return GridFunction::sample(g, [&](const Point& x) { return f(x.x()); });
}

}  // namespace

TEST_CASE("modular of constants") {
  const Grid g = unit(33);
  const auto p = ExponentField::constant(g, 2.0);
  CHECK(modular(GridFunction(g, 1.0), p) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(modular(GridFunction(g, 2.0), p) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(modular(GridFunction(g, 0.0), p) == 0.0);
}

TEST_CASE("modular of x with p = 2 + x converges at second order") {
  // int_0^1 x^{2+x} dx
  const double frozen = 0.278117612199708338;
  const double fine = oracle::simpson([](double x) { return std::pow(x, 2.0 + x); }, 0.0, 1.0,
                                      1'000'000);
  CHECK(fine == doctest::Approx(frozen).epsilon(1e-13));

  std::vector<double> hs, errs;
  for (int n : {33, 65, 129, 257}) {
    const Grid g = unit(n);
    const double rho = modular(fn(g, [](double x) { return x; }), affine_p(g, 2.0, 1.0));
    hs.push_back(g.h());
    errs.push_back(std::abs(rho - frozen));
    CHECK(std::abs(rho - frozen) <= g.h() * g.h());
  }
  CHECK(oracle::convergence_order(hs, errs) >= 1.9);
}

TEST_CASE("modular is zero only for zero") {
  const Grid g = unit(17);
  GridFunction u(g, 0.0);
  u[8] = 1e-6;
  CHECK(modular(u, ExponentField::constant(g, 3.0)) > 0.0);
}

TEST_CASE("modular rejects mismatched grids") {
  CHECK_THROWS_AS(modular(GridFunction(unit(17), 1.0), ExponentField::constant(unit(9), 2.0)),
                  DimensionError);
}

TEST_CASE("Luxemburg norm examples") {
  const Grid g = unit(65);
  const auto p2 = ExponentField::constant(g, 2.0);
  CHECK(luxemburg_norm(GridFunction(g, 0.0), p2) == 0.0);
  CHECK(luxemburg_norm(GridFunction(g, 2.0), p2) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("Luxemburg norm of 1 with p = 2 + x against an independent root") {
  auto excess_q = [](double lam) {
    return oracle::simpson([&](double x) { return std::pow(lam, -(2.0 + x)); }, 0.0, 1.0,
                           200'000) -
           1.0;
  };
  const double root = oracle::bisect_decreasing(excess_q, 0.5, 2.0, 80);
  const Grid g = unit(1025);
  const double lam = luxemburg_norm(GridFunction(g, 1.0), affine_p(g, 2.0, 1.0), 1e-12);
  // Trapezoid error on a 1025-node grid.
  CHECK(lam == doctest::Approx(root).epsilon(1e-6));
  // rho(1) = 1 exactly, so the root is 1.
  CHECK(root == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Luxemburg norm of x with p = 2 + x") {
  const double frozen = 0.6308956505289966636;
  const double root = oracle::bisect_decreasing(
      [](double lam) {
        return oracle::simpson([&](double x) { return std::pow(x / lam, 2.0 + x); }, 0.0, 1.0,
                               100'000) -
               1.0;
      },
      0.3, 1.0, 80);
  CHECK(root == doctest::Approx(frozen).epsilon(1e-9));
  const Grid g = unit(2049);
  CHECK(luxemburg_norm(fn(g, [](double x) { return x; }), affine_p(g, 2.0, 1.0)) ==
        doctest::Approx(frozen).epsilon(1e-6));
}

TEST_CASE("Luxemburg norm reports non-convergence") {
  const Grid g = unit(33);
  CHECK_THROWS_AS(luxemburg_norm(fn(g, [](double x) { return 1 + x; }), affine_p(g, 2.0, 1.0),
                                 1e-14, 3),
                  IterationLimitError);
}

TEST_CASE("Luxemburg norm is homogeneous") {
  std::mt19937_64 rng(3);
  const Grid g = unit(65);
  const auto p = affine_p(g, 1.5, 2.0);
  const double tol = 1e-10;
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = oracle::random_poly(rng, 4);
    const auto u = fn(g, [&](double x) { return oracle::horner(c, x); });
    const double base = luxemburg_norm(u, p, tol);
    for (double s : {-3.0, 0.01, 0.5, 7.0}) {
      const double scaled = luxemburg_norm(u.scaled(s), p, tol);
      CHECK(std::abs(scaled - std::abs(s) * base) <= 10.0 * tol * std::max(1.0, std::abs(s) * base));
    }
  }
}

TEST_CASE("scaling by 2^-k drives modular and norm to zero monotonically") {
  const Grid g = unit(65);
  const auto p = affine_p(g, 1.5, 1.0);
  const auto u = fn(g, [](double x) { return 3.0 * std::sin(4.0 * x) + 1.0; });
  double prev_rho = INFINITY, prev_norm = INFINITY;
  for (int k = 0; k <= 10; ++k) {
    const auto v = u.scaled(std::ldexp(1.0, -k));
    const double rho = modular(v, p), nrm = luxemburg_norm(v, p);
    CHECK(rho < prev_rho);
    CHECK(nrm < prev_norm);
    prev_rho = rho;
    prev_norm = nrm;
  }
  CHECK(prev_rho < 1e-4);
}

TEST_CASE("constant exponent reduces to the classical norm") {
  std::mt19937_64 rng(5);
  const Grid g = unit(129);
  for (double pc : {2.0, 3.0, 1.5}) {
    const auto p = ExponentField::constant(g, pc);
    for (int trial = 0; trial < 5; ++trial) {
      const auto c = oracle::random_poly(rng, 3);
      const auto u = fn(g, [&](double x) { return oracle::horner(c, x); });
      const double exact = std::pow(
          oracle::simpson([&](double x) { return std::pow(std::abs(oracle::horner(c, x)), pc); },
                          0.0, 1.0, 200'000),
          1.0 / pc);
      CHECK(luxemburg_norm(u, p) == doctest::Approx(exact).epsilon(10.0 * g.h() * g.h()));
    }
  }
}

TEST_CASE("modular-norm sandwich examples") {
  const Grid g = unit(33);
  SUBCASE("equality case u = 1, p = 2") {
    const auto r = check_modular_norm_relations(GridFunction(g, 1.0), ExponentField::constant(g, 2.0));
    CHECK(r.all_pass());
  }
  SUBCASE("u = 2 with p between 2 and 3") {
    const auto p = affine_p(g, 2.0, 1.0);
    const GridFunction u(g, 2.0);
    const double nrm = luxemburg_norm(u, p), rho = modular(u, p);
    CHECK(nrm > 1.0);
    CHECK(std::pow(nrm, 2.0) <= rho);
    CHECK(rho <= std::pow(nrm, 3.0));
    CHECK(check_modular_norm_relations(u, p).all_pass());
  }
  SUBCASE("u = 1/2, p = 2") {
    const auto p = ExponentField::constant(g, 2.0);
    const GridFunction u(g, 0.5);
    CHECK(luxemburg_norm(u, p) == doctest::Approx(0.5));
    CHECK(modular(u, p) == doctest::Approx(0.25));
    CHECK(check_modular_norm_relations(u, p).all_pass());
  }
}

TEST_CASE("Sobolev norm satisfies the triangle inequality") {
  std::mt19937_64 rng(9);
  const Grid g = unit(65);
  const auto p = affine_p(g, 1.8, 1.0);
  const double tol = 1e-10;
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracle::random_poly(rng, 5), b = oracle::random_poly(rng, 5);
    const auto u = fn(g, [&](double x) { return oracle::horner(a, x); });
    const auto v = fn(g, [&](double x) { return oracle::horner(b, x); });
    GridFunction w(g);
    for (std::size_t k = 0; k < g.size(); ++k) w[k] = u[k] + v[k];
    CHECK(sobolev_norm(w, p, tol) <= sobolev_norm(u, p, tol) + sobolev_norm(v, p, tol) + 10 * tol);
  }
}

TEST_CASE("Holder pairing examples") {
  const Grid g = unit(65);
  CHECK(check_holder_pairing(GridFunction(g, 1.0), GridFunction(g, 1.0),
                             ExponentField::constant(g, 2.0))
            .all_pass());
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const Grid g64 = unit(64);
  std::vector<double> v(g64.size());
  for (auto& x : v) x = d(rng);
  const GridFunction r(g64, v);
  CHECK(check_holder_pairing(r, r, ExponentField::constant(g64, 2.0)).all_pass());
  CHECK(check_holder_pairing(fn(g, [](double x) { return x; }), fn(g, [](double x) { return 1 - x; }),
                             affine_p(g, 2.0, 1.0))
            .all_pass());
}

TEST_CASE("product lemma examples") {
  const Grid g = unit(65);
  const auto p2 = ExponentField::constant(g, 2.0);
  CHECK(check_product_lemma(GridFunction(g, 1.0), p2, p2).all_pass());
  CHECK(check_product_lemma(GridFunction(g, 2.0), p2, p2).all_pass());
  CHECK(check_product_lemma(fn(g, [](double x) { return 1 + x; }), affine_p(g, 2.0, 0.5), p2)
            .all_pass());
}

TEST_CASE("integrate uses trapezoid weights in 2D") {
  const Grid g = Grid::square_nodes(0.0, 1.0, 17);
  const auto u = GridFunction::sample(g, [](const Point& x) { return x.x() + 2.0 * x.y(); });
  CHECK(integrate(u) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(integrate(GridFunction(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));
}
