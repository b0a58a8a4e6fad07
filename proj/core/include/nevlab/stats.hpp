#pragma once

#include <cmath>
#include <stdexcept>

namespace nevlab::stats {

// Lanczos log-gamma, |error| < 2e-10 for positive arguments.
inline double gammln(double x) {
  static const double c[6] = {76.18009172947146,  -86.50532032941677, 24.01409824083091,
                              -1.231739572450155, 0.1208650973866179e-2, -0.5395239384953e-5};
  double y = x, tmp = x + 5.5;
  tmp -= (x + 0.5) * std::log(tmp);
  double ser = 1.000000000190015;
  for (int j = 0; j < 6; ++j) ser += c[j] / ++y;
  return -tmp + std::log(2.5066282746310005 * ser / x);
}

namespace detail {

// Series for the regularized lower incomplete gamma, valid for x < a+1.
inline double gamma_p_series(double a, double x) {
  double ap = a, sum = 1.0 / a, del = sum;
  for (int n = 0; n < 500; ++n) {
    ++ap;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - gammln(a));
}

// Lentz continued fraction for the regularized upper tail, valid for x >= a+1.
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - gammln(a)) * h;
}

}  // namespace detail

// Regularized incomplete gamma P(a,x) and its complement Q(a,x), each
// evaluated on the branch that keeps it accurate when it is small.
inline double gammp(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gammp: bad arguments");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? detail::gamma_p_series(a, x) : 1.0 - detail::gamma_q_cf(a, x);
}

inline double gammq(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gammq: bad arguments");
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - detail::gamma_p_series(a, x) : detail::gamma_q_cf(a, x);
}

// Chi-square tail probability P(X >= chi2) with dof degrees of freedom.
inline double chi2_sf(double chi2, int dof) { return gammq(0.5 * dof, 0.5 * chi2); }

}  // namespace nevlab::stats
