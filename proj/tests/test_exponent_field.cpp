#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pxlap/error.hpp"
#include "pxlap/exponent_field.hpp"

using namespace pxlap;

TEST_CASE("constant exponent has zero gradient and equal extrema") {
  const Grid g = Grid::line(0.0, 1.0, 0.25);
  const auto p = ExponentField::build([](const Point&) { return 2.0; }, g);
  CHECK(g.size() == 5);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(p[k] == 2.0);
    CHECK(p.gradient(k).norm() == 0.0);
  }
  CHECK(p.p_minus() == 2.0);
  CHECK(p.p_plus() == 2.0);
  CHECK(p.is_constant());
}

TEST_CASE("affine exponent sampled at the nodes") {
  const Grid g = Grid::line(0.0, 1.0, 0.5);
  const auto p = ExponentField::build([](const Point& x) { return 2.0 + x.x(); }, g);
  REQUIRE(g.size() == 3);
  CHECK(p[0] == doctest::Approx(2.0));
  CHECK(p[1] == doctest::Approx(2.5));
  CHECK(p[2] == doctest::Approx(3.0));
  CHECK(p.p_minus() == doctest::Approx(2.0));
  CHECK(p.p_plus() == doctest::Approx(3.0));
}

TEST_CASE("interior gradient of a sine exponent is second order") {
  const double pi = std::numbers::pi;
  std::vector<double> errs, hs;
  for (int n : {17, 33, 65, 129}) {
    const Grid g = Grid::line_nodes(0.0, 1.0, n);
    const auto p =
        ExponentField::build([&](const Point& x) { return 2.0 + std::sin(pi * x.x()) / 2.0; }, g);
    double err = 0.0;
    for (std::size_t k = 1; k + 1 < g.size(); ++k) {
      err = std::max(err, std::abs(p.gradient(k).x() - pi / 2.0 * std::cos(pi * g.node(k).x())));
    }
    errs.push_back(err);
    hs.push_back(g.h());
  }
  for (std::size_t k = 1; k < errs.size(); ++k) {
    CHECK(errs[k - 1] / errs[k] == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("exponent at or below one is rejected with the node") {
  const Grid g = Grid::line(0.0, 1.0, 0.25);
  CHECK_THROWS_AS(ExponentField::build([](const Point& x) { return 0.5 + x.x(); }, g),
                  InvalidExponentError);
  try {
    ExponentField::build([](const Point& x) { return 0.5 + x.x(); }, g);
  } catch (const InvalidExponentError& e) {
    CHECK(std::string(e.what()).find("node") != std::string::npos);
  }
}

TEST_CASE("2D fields store both gradient components") {
  const Grid g = Grid::square_nodes(0.0, 1.0, 9);
  const auto p = ExponentField::build([](const Point& x) { return 2.0 + x.x() - 0.5 * x.y(); }, g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(p.gradient(k).x() == doctest::Approx(1.0));
    CHECK(p.gradient(k).y() == doctest::Approx(-0.5));
  }
}

TEST_CASE("log-Holder constant") {
  SUBCASE("constant field gives zero") {
    const auto p = ExponentField::constant(Grid::line_nodes(0.0, 1.0, 33), 2.5);
    CHECK(log_holder_constant(p) == 0.0);
  }
  SUBCASE("pair at distance 1/4") {
    // 0.25 log 4
    const double frozen = 0.34657359027997265;
    const auto coarse =
        ExponentField::build([](const Point& x) { return 2.0 + x.x(); }, Grid::line(0.0, 0.25, 0.25));
    CHECK(log_holder_constant(coarse) == doctest::Approx(frozen).epsilon(1e-14));
    const auto fine = ExponentField::build([](const Point& x) { return 2.0 + x.x(); },
                                           Grid::line_nodes(0.0, 0.25, 17));
    CHECK(log_holder_constant(fine) >= frozen - 1e-14);
  }
  SUBCASE("single pair {0, 0.1}") {
    // 0.1 |log 0.1|
    const double frozen = 0.23025850929940458;
    const auto p =
        ExponentField::build([](const Point& x) { return 2.0 + x.x(); }, Grid::line(0.0, 0.1, 0.1));
    CHECK(log_holder_constant(p) == doctest::Approx(frozen).epsilon(1e-12));
  }
  SUBCASE("pairs at distance >= 1/2 are ignored") {
    const auto p =
        ExponentField::build([](const Point& x) { return 2.0 + x.x(); }, Grid::line(0.0, 1.0, 0.5));
    CHECK(log_holder_constant(p) == 0.0);
  }
}

TEST_CASE("log-Holder constant is invariant under mirroring and zero only for constants") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(1.2, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Grid g = Grid::line_nodes(0.0, 1.0, 21);
    std::vector<double> v(g.size()), w(g.size());
    for (auto& x : v) x = d(rng);
    for (std::size_t k = 0; k < g.size(); ++k) w[k] = v[g.size() - 1 - k];
    const auto a = ExponentField::from_values(GridFunction(g, v));
    const auto b = ExponentField::from_values(GridFunction(g, w));
    CHECK(log_holder_constant(a) == doctest::Approx(log_holder_constant(b)).epsilon(1e-14));
    CHECK(log_holder_constant(a) > 0.0);
  }
}

TEST_CASE("choose_q closed form and examples") {
  CHECK(choose_q(2.0) == 2.0);
  CHECK(choose_q(3.0) == 2.0);
  CHECK(choose_q(1.5) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK_THROWS_AS(choose_q(1.0), InvalidExponentError);
  CHECK_THROWS_AS(choose_q(0.5), InvalidExponentError);
}

TEST_CASE("choose_q is the smallest admissible q") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(1.0 + 1e-3, 4.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double pm = d(rng);
    const double q = choose_q(pm);
    CHECK(q >= 2.0);
    CHECK(pm - 2.0 + (q - 2.0) / (q - 1.0) >= -1e-12);
    if (q > 2.0) {
      const double smaller = q * (1.0 - 1e-9);
      CHECK(pm - 2.0 + (smaller - 2.0) / (smaller - 1.0) < 0.0);
    }
  }
}

TEST_CASE("refinement moves p_minus monotonically toward the true minimum") {
  // True minimum 2 at x = 0.3, which no dyadic grid hits exactly.
  auto expr = [](const Point& x) { return 2.0 + (x.x() - 0.3) * (x.x() - 0.3); };
  double prev = INFINITY;
  for (int n : {5, 9, 17, 33, 65, 129}) {
    const auto p = ExponentField::build(expr, Grid::line_nodes(0.0, 1.0, n));
    const double err = p.p_minus() - 2.0;
    CHECK(err >= 0.0);
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("bilinear interpolation is exact at nodes") {
  const Grid g = Grid::square_nodes(0.0, 1.0, 5);
  const auto p = ExponentField::build(
      [](const Point& x) { return 2.0 + x.x() * x.y() + 0.1 * x.x(); }, g);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(p.at(g.node(k)) == doctest::Approx(p[k]));
  CHECK(p.at(Point(0.125, 0.125)) ==
        doctest::Approx(0.25 * (p[g.index(0, 0)] + p[g.index(1, 0)] + p[g.index(0, 1)] +
                                p[g.index(1, 1)])));
}
