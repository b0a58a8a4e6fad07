#pragma once

#include <cstdint>
#include <vector>

#include "nevlab/geometry.hpp"
#include "nevlab/stochastic.hpp"
#include "nevlab/target.hpp"

namespace nevlab::nevanlinna {

// Nevanlinna functions of a map f : M -> P^n against (O(d), FS), in the
// normalization tied to Brownian motion started at the base point:
//   T(r)   = (1/2) E int_0^tau e(X_t) dt   = (1/2) int_{B_r} g_r e dV,
//   m(r)   = E[ -log ||s(f(X_tau))|| ],
//   N(r)   = pi * sum_{zeros} mult * g_r   (+ ord_0 log r at the base point),
// so that m(r) + N(r) - T(r) is constant in r (the first main identity).

struct TOptions {
  int radial_panels = 32;
  int action_panels = 1;  // sphere rule, m >= 2
  int angle_points = 12;  // per torus factor, m >= 2
  int min_angles_1d = 64; // m = 1 circle average floor (scales with r)
};

// Deterministic expected exit time of the r-ball: 2 int_0^r Theta(t)/theta(t) dt
// with Theta the ball volume and theta the sphere area.
double expected_exit_time(const geometry::ManifoldModel& model, double r);

// Green-weighted quadrature for T(r, O(degree)).
double characteristic_T(const geometry::ManifoldModel& model, const target::HoloMap& map,
                        int degree, double r, const TOptions& opts = {});

// Independent shell route: T(r) = int_0^r A(t)/theta(t) dt, A(t) = int_{B_t} e dV.
double characteristic_T_shell(const geometry::ManifoldModel& model, const target::HoloMap& map,
                              int degree, double r, const TOptions& opts = {});

// Monte Carlo route: (1/2) E int e dt.
stochastic::McEstimate characteristic_T_mc(const geometry::ManifoldModel& model,
                                           const target::HoloMap& map, int degree, double r,
                                           std::uint64_t n_paths, std::uint64_t seed,
                                           int threads = 0);

// T(r, f^* K_{P^n}) = -(n+1) T(r, O(1)).
double canonical_characteristic(const geometry::ManifoldModel& model, const target::HoloMap& map,
                                double r, const TOptions& opts = {});

// Curvature characteristic of the domain, T(r, R_M) = E int s_M(X_t) dt.
// Deterministic for the homogeneous models (s_M is constant); the MC variant
// evaluates s_M along paths.
double ricci_characteristic(const geometry::ManifoldModel& model, double r);
stochastic::McEstimate ricci_characteristic_mc(const geometry::ManifoldModel& model, double r,
                                               std::uint64_t n_paths, std::uint64_t seed,
                                               int threads = 0);

// Proximity of one divisor component.
stochastic::McEstimate proximity_mc(const geometry::ManifoldModel& model,
                                    const target::HoloMap& map, const target::LineBundleFS& bundle,
                                    const target::HomogPoly& poly, double r, std::uint64_t n_paths,
                                    std::uint64_t seed, int threads = 0);

struct CountingResult {
  double N = 0.0;
  double N_trunc = 0.0;     // multiplicities truncated at one
  int zeros_found = 0;      // distinct solution points in the chart ball (m = 1)
  int order_at_origin = 0;
  bool boundary_adjusted = false;
};

// Counting function of f^* (component). For m = 1 zeros come from the
// argument principle; for m >= 2 the component must be a hyperplane and the
// map the identity chart embedding, and the count is the exact Green-weighted
// area of the solution slice (the metric is unitarily invariant, so the slice
// integral reduces to one dimension).
CountingResult counting_N(const geometry::ManifoldModel& model, const target::HoloMap& map,
                          const target::HomogPoly& poly, double r);

// Verification route for m >= 2: epsilon-smoothed Laplacian of
// (1/2) log(|F|^2 + eps^2) integrated against the Green function, fixed eps.
double counting_N_smoothed(const geometry::ManifoldModel& model, const target::HoloMap& map,
                           const target::HomogPoly& poly, double r, double eps);

// Ramification counting: zeros of the chart Jacobian of the lift (m = 1; the
// identity embedding has no ramification for any m).
CountingResult counting_ramification(const geometry::ManifoldModel& model,
                                     const target::HoloMap& map, double r);

struct FmtRow {
  double r = 0.0;
  double T = 0.0;          // quadrature, bundle degree included
  double T_mc = 0.0;
  double T_mc_se = 0.0;
  double exit_time = 0.0;
  double exit_time_se = 0.0;
  std::vector<double> proximity;
  std::vector<double> proximity_se;
  std::vector<double> N;
  std::vector<double> N_trunc;
  std::vector<double> residual;  // m + N - T, should be flat in r
};

struct FmtReport {
  std::vector<FmtRow> rows;
  std::vector<double> predicted_constant;  // -log ||s_j(f(o))||
  std::vector<double> max_deviation;       // over the grid, per component
  std::vector<double> max_allowed;         // 3 * se + quadrature allowance
  bool ok = true;
};

// First-main-identity scan over a radius grid: every component's residual
// m_j + N_j - T must sit on its predicted constant within Monte Carlo error.
FmtReport fmt_check(const geometry::ManifoldModel& model, const target::HoloMap& map,
                    const target::SncDivisor& divisor, double varsigma,
                    const std::vector<double>& radii, std::uint64_t n_paths, std::uint64_t seed,
                    int threads = 0, const TOptions& opts = {});

}  // namespace nevlab::nevanlinna
