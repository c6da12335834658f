#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pxlap/closed_form.hpp"
#include "pxlap/error.hpp"
#include "pxlap/inf_convolution.hpp"
#include "pxlap/source.hpp"

using namespace pxlap;

namespace {

// Brute-force inf-convolution of a 1D function over an arbitrary candidate set.
double brute_inf(const std::function<double(double)>& u, double x, double eps, double q,
                 double lo, double hi, int n) {
  double best = INFINITY;
  for (int i = 0; i < n; ++i) {
    const double y = lo + (hi - lo) * i / (n - 1);
    best = std::min(best, u(y) + std::pow(std::abs(x - y), q) / (q * std::pow(eps, q - 1)));
  }
  return best;
}

GridFunction sample1(const Grid& g, const std::function<double(double)>& f) {
  return GridFunction::sample(g, [&](const Point& x) { return f(x.x()); });
}

}  // namespace

TEST_CASE("convolution of a constant is the constant") {
  const Grid g = Grid::square_nodes(0.0, 1.0, 11);
  const GridFunction u(g, 3.5);
  for (double q : {2.0, 3.0}) {
    const auto inf = inf_convolve(u, 0.1, q);
    const auto sup = sup_convolve(u, 0.1, q);
    for (std::size_t k = 0; k < g.size(); ++k) {
      CHECK(inf.u_eps[k] == 3.5);
      CHECK(inf.argmin[k] == k);
      CHECK(sup.u_eps[k] == 3.5);
    }
  }
}

TEST_CASE("convolution of a linear function shifts by eps a^2 / 2") {
  const Grid g = Grid::line_nodes(0.0, 1.0, 65);
  const double a = 1.0, eps = 0.25;  // shift eps a = 16 h
  const auto u = sample1(g, [&](double y) { return a * y; });
  const auto inf = inf_convolve(u, eps, 2.0);
  const auto sup = sup_convolve(u, eps, 2.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = g.node(k).x();
    if (x - eps * a < -1e-12 || x + eps * a > 1 + 1e-12) continue;
    CHECK(inf.u_eps[k] == doctest::Approx(a * x - eps * a * a / 2).epsilon(1e-13));
    CHECK(g.node(inf.argmin[k]).x() == doctest::Approx(x - eps * a));
    CHECK(sup.u_eps[k] == doctest::Approx(a * x + eps * a * a / 2).epsilon(1e-13));
  }
}

TEST_CASE("convolution of a linear function matches a fine brute-force search") {
  const Grid g = Grid::line_nodes(0.0, 1.0, 41);
  const double a = 0.7, eps = 0.3;
  auto f = [&](double y) { return a * y; };
  const auto inf = inf_convolve(sample1(g, f), eps, 2.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = g.node(k).x();
    if (x < 0.3) continue;
    const double fine = brute_inf(f, x, eps, 2.0, 0.0, 1.0, 10 * 40 + 1);
    CHECK(std::abs(inf.u_eps[k] - fine) <= g.h() * g.h());
  }
}

TEST_CASE("cone at the origin") {
  const Grid g = Grid::line_nodes(-1.0, 1.0, 81);
  const auto cone = sample1(g, [](double y) { return std::abs(y); });
  const auto res = inf_convolve(cone, 0.2, 2.0);
  const std::size_t mid = 40;
  CHECK(res.u_eps[mid] == 0.0);
  CHECK(res.argmin[mid] == mid);
  const auto neg = sample1(g, [](double y) { return -std::abs(y); });
  CHECK(sup_convolve(neg, 0.2, 2.0).u_eps[mid] == 0.0);
}

TEST_CASE("invalid parameters") {
  const GridFunction u(Grid::line_nodes(0.0, 1.0, 9), 0.0);
  CHECK_THROWS_AS(inf_convolve(u, 0.0, 2.0), ParameterError);
  CHECK_THROWS_AS(inf_convolve(u, -1.0, 2.0), ParameterError);
  CHECK_THROWS_AS(inf_convolve(u, 0.1, 1.5), ParameterError);
}

TEST_CASE("structural invariants on random data") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int dim : {1, 2}) {
    const Grid g = dim == 1 ? Grid::line_nodes(0.0, 1.0, 101) : Grid::square_nodes(0.0, 1.0, 21);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> v(g.size());
      for (auto& x : v) x = d(rng);
      const GridFunction u(g, v);
      for (double q : {2.0, 3.0}) {
        const double eps = 0.05;
        const auto res = inf_convolve(u, eps, q);
        const double denom = q * std::pow(eps, q - 1);
        for (std::size_t k = 0; k < g.size(); ++k) {
          CHECK(res.u_eps[k] <= u[k]);
          const double dist = (g.node(k) - g.node(res.argmin[k])).norm();
          CHECK(res.u_eps[k] == doctest::Approx(u[res.argmin[k]] + std::pow(dist, q) / denom)
                                   .epsilon(1e-14));
          CHECK(dist <= res.r_eps + 1e-12);
        }
        // sup/inf duality, bit for bit
        const auto sup = sup_convolve(u, eps, q);
        const auto mirror = inf_convolve(u.negated(), eps, q);
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(sup.u_eps[k] == -mirror.u_eps[k]);
        // applying the convolution twice never goes up
        const auto twice = inf_convolve(res.u_eps, eps, q);
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(twice.u_eps[k] <= res.u_eps[k]);
      }
    }
  }
}

TEST_CASE("exact discrete minimum against exhaustive search") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  const Grid g = Grid::square_nodes(-1.0, 1.0, 15);
  std::vector<double> v(g.size());
  for (auto& x : v) x = d(rng);
  const GridFunction u(g, v);
  const double eps = 0.3, q = 2.5;
  const auto res = inf_convolve(u, eps, q);
  for (std::size_t k = 0; k < g.size(); ++k) {
    double best = INFINITY;
    std::size_t arg = 0;
    for (std::size_t y = 0; y < g.size(); ++y) {
      const double val =
          u[y] + std::pow((g.node(k) - g.node(y)).norm(), q) / (q * std::pow(eps, q - 1));
      if (val < best) {
        best = val;
        arg = y;
      }
    }
    // Distances are formed differently here, so allow roundoff.
    CHECK(res.u_eps[k] == doctest::Approx(best).epsilon(1e-14));
    CHECK(res.argmin[k] == arg);
  }
}

TEST_CASE("r_eps shrinks with eps") {
  const Grid g = Grid::line_nodes(-1.0, 1.0, 65);
  const auto u = sample1(g, [](double y) { return std::sin(3 * y); });
  for (double q : {2.0, 3.0}) {
    double prev = INFINITY;
    for (double eps : {0.4, 0.2, 0.1, 0.05, 0.025}) {
      const double r = inf_convolve(u, eps, q).r_eps;
      CHECK(r < prev);
      prev = r;
    }
  }
}

TEST_CASE("monotone family") {
  const Grid g = Grid::line_nodes(-1.0, 1.0, 129);
  const std::vector<double> eps{0.4, 0.2, 0.1};
  CHECK(monotone_family_check(GridFunction(g, 2.0), eps, 2.0).all_pass());
  const auto cone = sample1(g, [](double y) { return std::abs(y); });
  CHECK(monotone_family_check(cone, eps, 2.0).all_pass());
  const auto sine = sample1(g, [](double y) { return std::sin(4 * y); });
  CHECK(monotone_family_check(sine, std::vector<double>{0.4, 0.2, 0.1, 0.05}, 3.0).all_pass());
  // Pointwise increase toward |x|, checked directly.
  std::vector<GridFunction> family;
  for (double e : eps) family.push_back(inf_convolve(cone, e, 2.0).u_eps);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(family[0][k] <= family[1][k]);
    CHECK(family[1][k] <= family[2][k]);
    CHECK(family[2][k] <= cone[k]);
  }
}

TEST_CASE("semiconcavity constant") {
  CHECK(semiconcavity_constant(2.0, 0.1, 0.7) == doctest::Approx(5.0));
  CHECK(semiconcavity_constant(3.0, 0.5, 0.25) ==
        doctest::Approx(2.0 / 1.0 * std::pow(0.5, 1.0) / std::pow(0.5, 1.0)));
}

TEST_CASE("Moreau envelope of |x| is the Huber function") {
  const Grid g = Grid::line_nodes(-1.0, 1.0, 201);
  const auto cone = sample1(g, [](double y) { return std::abs(y); });
  for (double eps : {0.4, 0.2, 0.1}) {
    const auto res = inf_convolve(cone, eps, 2.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double x = g.node(k).x();
      if (!res.in_shrunken_domain(k)) continue;
      const double huber = std::abs(x) <= eps ? x * x / (2 * eps) : std::abs(x) - eps / 2;
      // The grid minimizer is within h/2 of the continuum one.
      CHECK(std::abs(res.u_eps[k] - huber) <= g.h() * g.h() / (2 * eps));
    }
    CHECK(semiconcavity_check(res).all_pass());
  }
}

TEST_CASE("semiconcavity of a concave function and of random Lipschitz data") {
  const Grid g = Grid::line_nodes(0.0, 1.0, 129);
  const auto concave = sample1(g, [](double y) { return -y * y; });
  CHECK(semiconcavity_check(inf_convolve(concave, 0.1, 2.0)).all_pass());
  const auto rl = make_closed_form("random-lipschitz", {{"knots", 12}, {"lipschitz", 2}, {"seed", 4}}, g)
                      .sample(g);
  for (double eps : {0.4, 0.2, 0.1, 0.05}) {
    const auto res = inf_convolve(rl, eps, 2.0);
    CHECK(semiconcavity_check(res).all_pass());
    CHECK(lipschitz_check(res, rl).all_pass());
    CHECK(dominance_check(res, rl).all_pass());
  }
}

TEST_CASE("jet from the argmin") {
  const Grid g = Grid::line_nodes(0.0, 1.0, 65);
  const double a = 1.0, eps = 0.25;
  const auto res = inf_convolve(sample1(g, [&](double y) { return a * y; }), eps, 2.0);
  const std::size_t k = 48;  // x = 0.75
  const auto jet = jet_from_argmin(res, k);
  REQUIRE(jet.has_value());
  CHECK(jet->probe.gradient.x() == doctest::Approx(a));
  CHECK(jet->hessian_bound == doctest::Approx(1.0 / eps));

  const auto flat = inf_convolve(GridFunction(g, 1.0), eps, 2.0);
  CHECK_FALSE(jet_from_argmin(flat, 32).has_value());

  // q > 2: eta = (x - x_eps) |x - x_eps|^{q-2} / eps^{q-1}
  const double q = 3.0;
  const auto res3 = inf_convolve(sample1(g, [&](double y) { return a * y; }), eps, q);
  const auto jet3 = jet_from_argmin(res3, k);
  REQUIRE(jet3.has_value());
  const double dx = g.node(k).x() - g.node(res3.argmin[k]).x();
  CHECK(jet3->probe.gradient.x() ==
        doctest::Approx(dx * std::abs(dx) / (eps * eps)).epsilon(1e-14));
  CHECK(jet3->hessian_bound ==
        doctest::Approx((q - 1) / eps * std::pow(std::abs(jet3->probe.gradient.x()), 0.5)));
}

TEST_CASE("jet check on the standard inputs") {
  const Grid g = Grid::line_nodes(-1.0, 1.0, 257);
  const auto cone = sample1(g, [](double y) { return std::abs(y); });
  const auto sine = sample1(g, [](double y) { return std::sin(3 * y); });
  for (const auto* u : {&cone, &sine}) {
    for (double eps : {0.4, 0.2, 0.1, 0.05}) {
      const auto res = inf_convolve(*u, eps, 2.0);
      CHECK(jet_check(res, *u).all_pass());
    }
  }
}

TEST_CASE("lower envelope of the source") {
  const Grid g = Grid::line_nodes(0.0, 1.0, 101);
  const auto c = make_source("constant", {{"c", 2.0}});
  CHECK(f_lower_envelope(c, g, 0.3, Point(0.5, 0), 0.0, Vec2(1, 0)) == 2.0);
  const auto lin = make_source("linear-x", {{"b", 1.0}});
  CHECK(f_lower_envelope(lin, g, 0.2, Point(0.5, 0), 0.0, Vec2::Zero()) == doctest::Approx(0.3));
  CHECK(f_lower_envelope(lin, g, 0.2, Point(0.1, 0), 0.0, Vec2::Zero()) == doctest::Approx(0.0));
  CHECK(f_lower_envelope(lin, g, 0.0, Point(0.37, 0), 0.0, Vec2::Zero()) ==
        doctest::Approx(0.37));
}

TEST_CASE("lemma suite on the standard inputs") {
  const Grid g = Grid::line_nodes(-1.0, 1.0, 129);
  const std::vector<double> eps{0.4, 0.2, 0.1, 0.05};
  CHECK(convolution_lemma_suite(sample1(g, [](double y) { return std::abs(y); }), eps, 2.0)
            .all_pass());
  CHECK(convolution_lemma_suite(sample1(g, [](double y) { return std::sin(3 * y); }), eps, 3.0)
            .all_pass());
}
