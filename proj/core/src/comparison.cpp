#include "nevlab/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nevlab::comparison {

namespace {

struct State {
  double G;
  double Gp;
};

// Quintic two-point Hermite interpolation using values, first and second
// derivatives at the cell ends (G'' = -kappa G is available for free).
struct Cell {
  double t0, h;
  double y0, d0, s0;  // value, first, second at the left end
  double a, b, c;     // tau^3..tau^5 coefficients

  double eval(double t) const {
    const double dt = t - t0;
    const double tau = dt / h;
    return y0 + d0 * dt + 0.5 * s0 * dt * dt + ((c * tau + b) * tau + a) * tau * tau * tau;
  }
  double eval_prime(double t) const {
    const double dt = t - t0;
    const double tau = dt / h;
    return d0 + s0 * dt + ((5.0 * c * tau + 4.0 * b) * tau + 3.0 * a) * tau * tau / h;
  }
};

Cell make_cell(double t0, double h, double y0, double d0, double s0, double y1, double d1,
               double s1) {
  const double P = y1 - y0 - d0 * h - 0.5 * s0 * h * h;
  const double Q = h * (d1 - d0 - s0 * h);
  const double R = h * h * (s1 - s0);
  Cell c;
  c.t0 = t0;
  c.h = h;
  c.y0 = y0;
  c.d0 = d0;
  c.s0 = s0;
  c.a = 10.0 * P - 4.0 * Q + 0.5 * R;
  c.b = 7.0 * Q - 15.0 * P - R;
  c.c = 0.5 * (R + 12.0 * P - 6.0 * Q);
  return c;
}

std::size_t locate(const std::vector<double>& grid, double t) {
  auto it = std::upper_bound(grid.begin(), grid.end(), t);
  std::size_t i = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
  if (i + 1 >= grid.size()) i = grid.size() - 2;
  return i;
}

// 16-point Gauss-Legendre nodes/weights on [-1,1].
constexpr int kGl = 16;
const double kGlX[kGl] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
const double kGlW[kGl] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

double gl_panel(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < kGl; ++i) s += kGlW[i] * f(mid + half * kGlX[i]);
  return s * half;
}

// Panels graded geometrically toward the left endpoint; handles integrands
// with an integrable singularity as a -> 0.
double integrate_graded(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  double s = 0.0;
  double hi = b;
  const double floor_width = std::max(1e-14, 1e-6 * (b - a));
  while (hi - a > floor_width) {
    double lo = std::max(a, a + 0.5 * (hi - a));
    s += gl_panel(f, lo, hi);
    hi = lo;
  }
  s += gl_panel(f, a, hi);
  return s;
}

}  // namespace

double ComparisonSolution::eval_G(double t) const {
  if (t <= r_grid.front()) return G.front() + (t - r_grid.front()) * G_prime.front();
  if (t >= r_grid.back()) return G.back() + (t - r_grid.back()) * G_prime.back();
  const std::size_t i = locate(r_grid, t);
  // Rebuild the Hermite cell on demand; kappa is recovered from the stored
  // second differences G'' = (interpolated via the ODE at build time).
  const double h = r_grid[i + 1] - r_grid[i];
  Cell c = make_cell(r_grid[i], h, G[i], G_prime[i], G_pp[i], G[i + 1], G_prime[i + 1],
                     G_pp[i + 1]);
  return c.eval(t);
}

double ComparisonSolution::eval_G_prime(double t) const {
  if (t <= r_grid.front()) return G_prime.front();
  if (t >= r_grid.back()) return G_prime.back();
  const std::size_t i = locate(r_grid, t);
  const double h = r_grid[i + 1] - r_grid[i];
  Cell c = make_cell(r_grid[i], h, G[i], G_prime[i], G_pp[i], G[i + 1], G_prime[i + 1],
                     G_pp[i + 1]);
  return c.eval_prime(t);
}

ComparisonSolution solve_G(const std::function<double(double)>& kappa, double t_max, double tol,
                           int n_out, const std::string& kappa_id) {
  if (!(t_max > 0.0)) throw std::invalid_argument("solve_G: t_max must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_G: tolerance must be positive");

  auto rhs = [&kappa](double t, const State& y) { return State{y.Gp, -kappa(t) * y.G}; };

  // Dormand-Prince 5(4) coefficients.
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                      e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                      e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  ComparisonSolution sol;
  sol.kappa_id = kappa_id;
  double t = 0.0;
  State y{0.0, 1.0};
  const double h_max = t_max / std::max(n_out, 64);
  double h = std::min(h_max, 1e-4);
  sol.r_grid.push_back(0.0);
  sol.G.push_back(0.0);
  sol.G_prime.push_back(1.0);
  sol.G_pp.push_back(0.0);

  State k1 = rhs(t, y);
  int rejected_in_a_row = 0;
  while (t < t_max) {
    if (t + h > t_max) h = t_max - t;
    auto axpy = [&](double f1, const State* s1, double f2 = 0, const State* s2 = nullptr,
                    double f3 = 0, const State* s3 = nullptr, double f4 = 0,
                    const State* s4 = nullptr, double f5 = 0, const State* s5 = nullptr,
                    double f6 = 0, const State* s6 = nullptr) {
      State out{y.G, y.Gp};
      auto add = [&](double f, const State* s) {
        if (s) { out.G += h * f * s->G; out.Gp += h * f * s->Gp; }
      };
      add(f1, s1); add(f2, s2); add(f3, s3); add(f4, s4); add(f5, s5); add(f6, s6);
      return out;
    };
    State k2 = rhs(t + c2 * h, axpy(a21, &k1));
    State k3 = rhs(t + c3 * h, axpy(a31, &k1, a32, &k2));
    State k4 = rhs(t + c4 * h, axpy(a41, &k1, a42, &k2, a43, &k3));
    State k5 = rhs(t + c5 * h, axpy(a51, &k1, a52, &k2, a53, &k3, a54, &k4));
    State k6 = rhs(t + h, axpy(a61, &k1, a62, &k2, a63, &k3, a64, &k4, a65, &k5));
    State y5 = axpy(b1, &k1, 0.0, nullptr, b3, &k3, b4, &k4, b5, &k5, b6, &k6);
    State k7 = rhs(t + h, y5);

    const double errG = h * (e1 * k1.G + e3 * k3.G + e4 * k4.G + e5 * k5.G + e6 * k6.G + e7 * k7.G);
    const double errGp =
        h * (e1 * k1.Gp + e3 * k3.Gp + e4 * k4.Gp + e5 * k5.Gp + e6 * k6.Gp + e7 * k7.Gp);
    const double scG = tol + tol * std::max(std::abs(y.G), std::abs(y5.G));
    const double scGp = tol + tol * std::max(std::abs(y.Gp), std::abs(y5.Gp));
    const double err = std::sqrt(0.5 * ((errG / scG) * (errG / scG) + (errGp / scGp) * (errGp / scGp)));

    if (err <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;  // FSAL
      sol.r_grid.push_back(t);
      sol.G.push_back(y.G);
      sol.G_prime.push_back(y.Gp);
      sol.G_pp.push_back(-kappa(t) * y.G);
      rejected_in_a_row = 0;
    } else if (++rejected_in_a_row > 64) {
      throw std::runtime_error("solve_G: step control failed to converge");
    }
    const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    h = std::min(h, h_max);
    if (!(h > 0.0) || !std::isfinite(h)) throw std::runtime_error("solve_G: step underflow");
  }
  return sol;
}

double integral_G_power(const ComparisonSolution& sol, double a, double b, int m) {
  if (!(b > a)) return 0.0;
  const double p = 1.0 - 2.0 * m;
  auto f = [&](double t) { return std::pow(std::max(sol.eval_G(t), 1e-300), p); };
  // Gauss-Legendre 5 on each solution cell restricted to [a,b]. The flat
  // profile saturates the log-integral bound exactly, so the rule has to be
  // well below the 1e-9 slack tolerance; Simpson is not.
  static const double gl_x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
  static const double gl_w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};
  double s = 0.0;
  double lo = a;
  for (std::size_t i = 0; i + 1 < sol.r_grid.size() && lo < b; ++i) {
    if (sol.r_grid[i + 1] <= lo) continue;
    const double hi = std::min(sol.r_grid[i + 1], b);
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    for (int k = 0; k < 5; ++k) s += h * gl_w[k] * f(c + h * gl_x[k]);
    lo = hi;
  }
  return s;
}

BoundsReport check_G_bounds(const ComparisonSolution& sol,
                            const std::function<double(double)>& kappa, int m) {
  BoundsReport rep;
  rep.slack_lower = std::numeric_limits<double>::infinity();
  rep.slack_integral = std::numeric_limits<double>::infinity();
  rep.slack_upper = std::numeric_limits<double>::infinity();

  double cumulative = 0.0;  // int_1^r G^{1-2m}, accumulated along the grid
  bool past_one = false;
  double prev_r = 1.0;
  for (std::size_t i = 0; i < sol.r_grid.size(); ++i) {
    const double r = sol.r_grid[i];
    const double G = sol.G[i];
    rep.slack_lower = std::min(rep.slack_lower, G - r);
    const double k = kappa(r);
    if (k > 0.0) throw std::invalid_argument("check_G_bounds: kappa must be non-positive");
    const double upper = r * std::exp(r * std::sqrt(-k));
    rep.slack_upper = std::min(rep.slack_upper, upper - G);
    if (r >= 1.0) {
      if (!past_one) {
        cumulative = 0.0;
        prev_r = 1.0;
        past_one = true;
      }
      cumulative += integral_G_power(sol, prev_r, r, m);
      prev_r = r;
      rep.slack_integral = std::min(rep.slack_integral, std::log(r) - cumulative);
    }
  }
  if (!past_one) rep.slack_integral = 0.0;
  const double scale = std::max(1.0, std::abs(sol.G.back()));
  rep.ok = rep.slack_lower >= -1e-9 * scale && rep.slack_integral >= -1e-9 &&
           rep.slack_upper >= -1e-9 * scale;
  return rep;
}

double green_euclidean(int m, double r, double s) {
  if (!(r > 0.0) || !(s > 0.0)) throw std::invalid_argument("green_euclidean: radii must be positive");
  if (s > r) return 0.0;
  if (m == 1) return std::log(r / s) / std::numbers::pi;
  const double omega = geometry::unit_sphere_area(m);
  return (std::pow(s, 2.0 - 2.0 * m) - std::pow(r, 2.0 - 2.0 * m)) / ((m - 1.0) * omega);
}

double green_radial(const geometry::ManifoldModel& model, double r, double s) {
  if (!(r > 0.0) || !(s > 0.0)) throw std::invalid_argument("green_radial: radii must be positive");
  if (s >= r) return 0.0;
  if (model.is_flat()) return green_euclidean(model.m, r, s);
  auto f = [&](double t) { return 2.0 / geometry::sphere_area(model, t); };
  return integrate_graded(f, s, r);
}

double harmonic_density_bound(int m, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("harmonic_density_bound: radius must be positive");
  return 1.0 / (geometry::unit_sphere_area(m) * std::pow(r, 2.0 * m - 1.0));
}

GreenComparisonProbe green_comparison_probe(const geometry::ManifoldModel& model,
                                            const ComparisonSolution& sol, double eta, double r,
                                            const std::vector<double>& probe_radii) {
  if (!(eta > 0.0) || !(r > eta)) throw std::invalid_argument("green_comparison_probe: need 0 < eta < r");
  GreenComparisonProbe probe;
  probe.eta = eta;
  probe.r = r;
  const double ref = integral_G_power(sol, eta, r, model.m);
  double c_min = std::numeric_limits<double>::infinity();
  for (double rx : probe_radii) {
    if (!(rx > 0.0) || rx >= r) continue;
    const double g = green_radial(model, r, rx);
    const double denom = integral_G_power(sol, rx, r, model.m);
    if (denom <= 0.0) continue;
    c_min = std::min(c_min, g * ref / denom);
    ++probe.n_probes;
  }
  probe.c_hat = probe.n_probes > 0 ? c_min : 0.0;
  return probe;
}

BorelScan borel_check(const std::vector<double>& r_grid, const std::vector<double>& T,
                      double delta) {
  if (r_grid.size() != T.size() || r_grid.size() < 2)
    throw std::invalid_argument("borel_check: need matching grids with at least two nodes");
  BorelScan scan;
  scan.grid_span = r_grid.back() - r_grid.front();
  const double e = std::exp(1.0);
  for (std::size_t i = 0; i + 1 < r_grid.size(); ++i) {
    const double w = r_grid[i + 1] - r_grid[i];
    if (!(w > 0.0)) throw std::invalid_argument("borel_check: grid must be strictly increasing");
    const double t_mid = 0.5 * (T[i] + T[i + 1]);
    if (!(t_mid >= e)) continue;  // profile not yet in the regulated regime
    const double deriv = (T[i + 1] - T[i]) / w;
    const double threshold = t_mid * std::pow(std::log(t_mid), 1.0 + delta);
    if (deriv > threshold * (1.0 + 1e-12)) {
      scan.violation_measure += w;
      scan.violation_cells.emplace_back(r_grid[i], r_grid[i + 1]);
    }
  }
  return scan;
}

CalculusF calculus_F(double gamma_hat, double kappa_r, double r, int m, double delta) {
  if (kappa_r > 0.0) throw std::invalid_argument("calculus_F: kappa must be non-positive");
  if (!(delta > 0.0)) throw std::invalid_argument("calculus_F: delta must be positive");
  CalculusF out;
  const double lg = log_plus(gamma_hat);
  const double root = r * std::sqrt(-kappa_r);
  // log of the inner argument, assembled in log space to avoid overflow:
  // r^{2m-1} e^{(2m-1) r sqrt(-kappa)} * gamma_hat * (log+ gamma_hat)^{1+delta}
  const double log_inner = (2.0 * m - 1.0) * std::log(std::max(r, 1e-300)) + (2.0 * m - 1.0) * root +
                           std::log(std::max(gamma_hat, 1e-300)) + (1.0 + delta) * std::log(std::max(lg, 1e-300));
  const double lp_inner = std::max(log_inner, 0.0);
  out.F = std::pow(lg * lp_inner, 1.0 + delta);
  out.log_F = out.F > 0.0 ? std::log(out.F) : 0.0;
  out.budget = log_plus(std::log(std::max(gamma_hat, 1.0))) + log_plus(root) +
               log_plus(std::log(std::max(r, 1.0)));
  return out;
}

}  // namespace nevlab::comparison
