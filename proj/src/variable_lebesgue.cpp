#include "pxlap/variable_lebesgue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pxlap/error.hpp"

namespace pxlap {

namespace {

double modular_scaled(const GridFunction& u, const GridFunction& exponent, double inv_lambda) {
  const Grid& g = u.grid();
  double sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double a = std::abs(u[k]) * inv_lambda;
    if (a == 0.0) continue;
    sum += g.weight(k) * std::pow(a, exponent[k]);
  }
  return sum;
}

double relative_tol(double tol, double lhs, double rhs) {
  return 10.0 * tol * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

}  // namespace

double integrate(const GridFunction& u) {
  const Grid& g = u.grid();
  double sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) sum += g.weight(k) * u[k];
  return sum;
}

double modular(const GridFunction& u, const GridFunction& exponent) {
  require_same_grid(u.grid(), exponent.grid(), "modular");
  return modular_scaled(u, exponent, 1.0);
}

double modular(const GridFunction& u, const ExponentField& p) { return modular(u, p.values()); }

double luxemburg_norm(const GridFunction& u, const GridFunction& exponent, double tol,
                      int max_iterations) {
  require_same_grid(u.grid(), exponent.grid(), "luxemburg_norm");
  if (!(tol > 0.0)) throw ParameterError("tol must be > 0");
  const double umax = u.max_abs();
  if (umax == 0.0) return 0.0;

  const auto rho = [&](double lambda) { return modular_scaled(u, exponent, 1.0 / lambda); };
  double lo = std::numeric_limits<double>::epsilon();
  double hi = umax * (1.0 + u.grid().measure());
  int doublings = 0;
  while (rho(hi) > 1.0) {
    hi *= 2.0;
    if (++doublings > 2000) throw IterationLimitError("luxemburg_norm: could not bracket");
  }
  // rho(u / lambda) is continuous and strictly decreasing in lambda.
  for (int it = 0; it < max_iterations; ++it) {
    const double mid = hi / lo > 4.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double r = rho(mid);
    if (std::abs(r - 1.0) <= tol) return mid;
    if (r > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double r_hi = rho(hi);
  if (std::abs(r_hi - 1.0) <= tol) return hi;
  std::ostringstream msg;
  msg.precision(17);
  msg << "luxemburg_norm did not converge: bracket [" << lo << ", " << hi << "]";
  throw IterationLimitError(msg.str());
}

double luxemburg_norm(const GridFunction& u, const ExponentField& p, double tol,
                      int max_iterations) {
  return luxemburg_norm(u, p.values(), tol, max_iterations);
}

double sobolev_norm(const GridFunction& u, const ExponentField& p, double tol) {
  return luxemburg_norm(u, p, tol) + luxemburg_norm(gradient_magnitude(u), p, tol);
}

GridFunction conjugate_exponent(const ExponentField& p) {
  if (p.p_minus() < 1.0 + 1e-6) {
    throw ParameterError("conjugate exponent requires p >= 1 + 1e-6");
  }
  std::vector<double> values(p.values().size());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = p[k] / (p[k] - 1.0);
  return GridFunction(p.grid(), std::move(values));
}

CheckReport check_modular_norm_relations(const GridFunction& u, const ExponentField& p,
                                         double tol) {
  require_same_grid(u.grid(), p.grid(), "check_modular_norm_relations");
  if (u.is_zero()) throw ParameterError("check_modular_norm_relations requires u != 0");
  CheckReport report("modular_norm_relations", 10.0 * tol);
  const double norm = luxemburg_norm(u, p, tol);
  const double rho = modular(u, p);
  const double band = 10.0 * tol;

  // Unit ball equivalences.
  if (norm < 1.0 - band) {
    report.add_le("unit_ball:norm<1=>rho<1", rho, 1.0, relative_tol(tol, rho, 1.0));
  } else if (norm > 1.0 + band) {
    report.add_ge("unit_ball:norm>1=>rho>1", rho, 1.0, relative_tol(tol, rho, 1.0));
  } else {
    report.add_le("unit_ball:norm=1=>|rho-1|", std::abs(rho - 1.0), 0.0,
                  relative_tol(tol, rho, 1.0));
  }
  if (rho < 1.0 - band) {
    report.add_le("unit_ball:rho<1=>norm<1", norm, 1.0, band);
  } else if (rho > 1.0 + band) {
    report.add_ge("unit_ball:rho>1=>norm>1", norm, 1.0, band);
  }

  const double lo_pow = std::pow(norm, norm >= 1.0 ? p.p_minus() : p.p_plus());
  const double hi_pow = std::pow(norm, norm >= 1.0 ? p.p_plus() : p.p_minus());
  const std::string branch = norm >= 1.0 ? "norm>=1" : "norm<1";
  report.add_le("sandwich_lower:" + branch, lo_pow, rho, relative_tol(tol, lo_pow, rho));
  report.add_le("sandwich_upper:" + branch, rho, hi_pow, relative_tol(tol, rho, hi_pow));
  return report;
}

CheckReport check_holder_pairing(const GridFunction& u, const GridFunction& v,
                                 const ExponentField& p, double tol) {
  require_same_grid(u.grid(), p.grid(), "check_holder_pairing");
  require_same_grid(v.grid(), p.grid(), "check_holder_pairing");
  const GridFunction conj = conjugate_exponent(p);
  std::vector<double> product(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) product[k] = u[k] * v[k];
  const double pairing = std::abs(integrate(GridFunction(u.grid(), std::move(product))));
  const double constant = 1.0 / p.p_minus() + 1.0 / conj.min();
  const double bound = constant * luxemburg_norm(u, p, tol) * luxemburg_norm(v, conj, tol);
  CheckReport report("holder_pairing", 10.0 * tol);
  report.add_le("holder:|int uv|<=C*|u|*|v|", pairing, bound, relative_tol(tol, pairing, bound));
  return report;
}

CheckReport check_product_lemma(const GridFunction& f, const ExponentField& p,
                                const ExponentField& q, double tol) {
  require_same_grid(f.grid(), p.grid(), "check_product_lemma");
  require_same_grid(f.grid(), q.grid(), "check_product_lemma");
  std::vector<double> pq(f.size()), fp(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    pq[k] = p[k] * q[k];
    fp[k] = std::pow(std::abs(f[k]), p[k]);
  }
  const double a = luxemburg_norm(f, GridFunction(f.grid(), std::move(pq)), tol);
  const double b = luxemburg_norm(GridFunction(f.grid(), std::move(fp)), q, tol);
  CheckReport report("product_lemma", 10.0 * tol);
  // The norm tolerance propagates through the powers: relative error ~ p+ * tol.
  const double scale = p.p_plus();
  auto item_tol = [&](double l, double r) { return scale * relative_tol(tol, l, r); };
  if (a <= 1.0) {
    const double lo = std::pow(a, p.p_plus());
    const double hi = std::pow(a, p.p_minus());
    report.add_le("product(i):|f|^p+<=|f^p|", lo, b, item_tol(lo, b));
    report.add_le("product(i):|f^p|<=|f|^p-", b, hi, item_tol(b, hi));
  }
  if (a >= 1.0) {
    const double lo = std::pow(a, p.p_minus());
    const double hi = std::pow(a, p.p_plus());
    report.add_le("product(ii):|f|^p-<=|f^p|", lo, b, item_tol(lo, b));
    report.add_le("product(ii):|f^p|<=|f|^p+", b, hi, item_tol(b, hi));
  }
  return report;
}

}  // namespace pxlap
