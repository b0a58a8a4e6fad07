#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "nevlab/geometry.hpp"

namespace nevlab::comparison {

// Growth comparison: G'' + kappa(t) G = 0, G(0) = 0, G'(0) = 1 for a
// non-positive non-increasing curvature profile kappa. For kappa == 0 this is
// G = t, for kappa == -a^2 it is sinh(a t)/a.

struct ComparisonSolution {
  std::vector<double> r_grid;   // strictly increasing, r_grid.front() == 0
  std::vector<double> G;
  std::vector<double> G_prime;
  std::vector<double> G_pp;     // second derivative -kappa G at the nodes
  std::string kappa_id;         // description of the profile that produced it

  double eval_G(double t) const;        // dense-output interpolation
  double eval_G_prime(double t) const;
};

// Integrates the comparison equation on [0, t_max] with an embedded adaptive
// Dormand-Prince 5(4) pair, mixed abs/rel tolerance `tol` (default 1e-10),
// and stores a dense grid fine enough for cubic-Hermite interpolation at the
// same accuracy. `n_out` extra uniform output nodes are merged into the grid.
ComparisonSolution solve_G(const std::function<double(double)>& kappa, double t_max,
                           double tol = 1e-10, int n_out = 256,
                           const std::string& kappa_id = "");

struct BoundsReport {
  // Worst-case slack of each bound over the grid; non-negative slack means
  // the bound holds at every node.
  double slack_lower = 0.0;        // min over grid of G(t) - t
  double slack_integral = 0.0;     // min over grid of log r - int_1^r G^{1-2m}
  double slack_upper = 0.0;        // min over grid of r exp(r sqrt(-kappa(r))) - G(r)
  bool ok = false;
};

// Checks the three growth bounds for complex dimension m:
//   G(t) >= t,
//   int_1^r G^{1-2m} dt <= log r          (r >= 1),
//   G(r) <= r exp(r sqrt(-kappa(r))).
// `kappa` must be the same profile the solution was integrated with.
BoundsReport check_G_bounds(const ComparisonSolution& sol,
                            const std::function<double(double)>& kappa, int m);

// int_a^b G(t)^{1-2m} dt on the dense grid (trapezoid with grid refinement).
double integral_G_power(const ComparisonSolution& sol, double a, double b, int m);

// Green function of the geodesic ball B_o(r) of the flat model, generator L/2,
// evaluated at chart distance s from the center:
//   m = 1: (1/pi) log(r/s)
//   m >= 2: (s^{2-2m} - r^{2-2m}) / ((m-1) omega_{2m-1})
double green_euclidean(int m, double r, double s);

// Green function of B_o(r) for any radial model: 2 int_s^r dt / sphere_area(t).
double green_radial(const geometry::ManifoldModel& model, double r, double s);

// Upper bound for the density of harmonic measure (exit distribution) of
// B_o(r) against sphere surface measure: 1 / (omega_{2m-1} r^{2m-1}).
double harmonic_density_bound(int m, double r);

// Empirical profile of the Green comparison constant: the reported value is
//   C_hat(eta, r) = min over probe points x of
//       g_r(o,x) * int_eta^r G^{1-2m} / int_{r(x)}^r G^{1-2m},
// where g_r is the exact (flat) or occupation-estimated Green function.
struct GreenComparisonProbe {
  double eta = 1.0;
  double r = 10.0;
  double c_hat = 0.0;
  int n_probes = 0;
};

GreenComparisonProbe green_comparison_probe(const geometry::ManifoldModel& model,
                                            const ComparisonSolution& sol, double eta,
                                            double r, const std::vector<double>& probe_radii);

// Growth-rate exceptional-set scan: measures the subset of the grid where
// T' > T (log T)^{1+delta}, restricted to cells with T >= e. Discrete
// derivative and threshold are evaluated at cell midpoints.
struct BorelScan {
  double violation_measure = 0.0;
  double grid_span = 0.0;
  std::vector<std::pair<double, double>> violation_cells;
};

BorelScan borel_check(const std::vector<double>& r_grid, const std::vector<double>& T,
                      double delta);

// Growth regulator used by the second main theorem error term:
//   F = { log+ G * log+ ( r^{2m-1} e^{(2m-1) r sqrt(-kappa)} G (log+ G)^{1+delta} ) }^{1+delta}
// evaluated at G = gamma_hat, together with the iterated-log budget
//   budget = log+log+ gamma_hat + log+ (r sqrt(-kappa)) + log+ log r
// that bounds log F up to a constant.
struct CalculusF {
  double F = 0.0;
  double log_F = 0.0;
  double budget = 0.0;
};

CalculusF calculus_F(double gamma_hat, double kappa_r, double r, int m, double delta);

inline double log_plus(double x) { return x > 1.0 ? std::log(x) : 0.0; }

}  // namespace nevlab::comparison
