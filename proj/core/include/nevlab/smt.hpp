#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nevlab/complexmat.hpp"
#include "nevlab/geometry.hpp"
#include "nevlab/nevanlinna.hpp"
#include "nevlab/target.hpp"

namespace nevlab::smt {

// The two pieces of wedge algebra everything below leans on, kept as plain
// linear algebra so they stay independently checkable.
//
// m * (phi wedge alpha^{m-1}) / alpha^m, computed as the linear coefficient
// of det(g + s phi) via exact polynomial interpolation at s = 0..m, divided
// by det g. For a Hermitian pair this equals Tr(g^{-1} phi); the wedge route
// deliberately avoids that shortcut so the identity is a real test.
double mixed_form_trace(const CMat& g, const CMat& phi);

// (1/m) Tr(g^{-1} phi) - (det phi / det g)^{1/m}: nonnegative whenever g is
// positive definite and phi semi-positive (arithmetic vs geometric mean of
// the relative eigenvalues).
double det_trace_gap(const CMat& g, const CMat& phi);

// Singular volume machinery for an equidimensional nondegenerate map
// f : M^m -> P^m and an snc divisor D = D_1 + ... + D_q whose components are
// degree-d sections of O(d), so D itself is cut by a section of L = O(qd).
// The density of the twisted volume form against the manifold volume is
//   xi_lambda = (qd)^m (1+|u|^2)^{-(m+1)} |det J|^2 prod_j ||s_j o f||^{-2(1-lambda)} / det g,
// with u the affine coordinates of f in the chart holding it and J = du/dz.
// The value is chart-independent; the log form stays usable near the divisor
// (-inf at ramification points, +inf on the divisor itself).
double log_xi_density(const geometry::ManifoldModel& model, const target::HoloMap& map,
                      const target::SncDivisor& divisor, double lambda, const CVec& z);

// Comparison form on the target, in the chart-0 affine coordinates w = (1,u):
//   eta = (1+q) lambda (qd) H_FS + sum_j [ A_j ddbar(rho_j) + B_j v_j v_j^H ],
// where rho_j = log ||s_j||^2, t_j = ||s_j||^{2 lambda}, A_j = lambda t/(1+t),
// B_j = lambda^2 t/(1+t)^2, and v_j the gradient of rho_j. Off the divisor
// ddbar(rho_j) = -d H_FS, so eta >= lambda qd H_FS stays positive definite.
CMat eta_matrix(const target::SncDivisor& divisor, double lambda, const CVec& u);

// log of  lambda^{n+k+shift} (qd)^n prod_j ||s_j||^{-2(1-lambda)} det H_FS / det eta
// at the chart-0 affine point u (k = crossing number). The Jacobian of any
// map cancels from this ratio, so the pointwise comparison of xi against the
// pulled-back eta-volume is a purely target-side quantity. Returns +inf on
// the divisor; shift != 0 deliberately mistunes the lambda exponent (used to
// confirm the bound is sharp in lambda).
double log_probe_ratio(const target::SncDivisor& divisor, double lambda, const CVec& u,
                       int exponent_shift = 0);

struct LangProbe {
  double b_hat = 0.0;  // sup of the probe ratio over points and lambda
  std::vector<double> lambda_grid;
  std::vector<double> max_by_lambda;  // should be O(1) uniformly in lambda
  int n_probes = 0;
};

// Estimates the constant in the pointwise bound
//   xi_lambda <= (b / lambda^{n+k}) * (eta-volume density)
// by maximizing the probe ratio over random points, points pushed toward each
// component, and points near pairwise crossings, across a lambda grid.
LangProbe lang_bound_probe(const target::SncDivisor& divisor, std::uint64_t seed,
                           int n_random = 400, int n_near = 8);

struct PointwiseCheck {
  double max_ratio = 0.0;  // worst LHS/RHS over sampled points and lambda
  double budget = 0.0;     // the b constant used on the right-hand side
  int n_points = 0;
  bool ok = false;         // max_ratio <= 1
};

// Verifies the trace-form pointwise bound
//   xi^{1/m} <= ((q+1) b^{1/m} / (2m lambda^{k/m})) e_{f*c1(L)}
//             + (b^{1/m} / (4m lambda^{1+k/m})) sum_j Lap_M log(1+||s_j o f||^{2 lambda})
// at random and near-divisor points, sweeping lambda over {0.5, 0.1, 0.02}
// with b = budget. `exponent_shift` perturbs the lambda exponent of the
// Laplacian term; a nonzero shift must break the bound (mutation hook).
PointwiseCheck xi_pointwise_check(const geometry::ManifoldModel& model,
                                  const target::HoloMap& map, const target::SncDivisor& divisor,
                                  double budget, std::uint64_t seed, int n_random = 200,
                                  int exponent_shift = 0);

struct OccupationBound {
  double T = 0.0;          // T(r, O(qd)), quadrature
  double lambda = 0.0;     // 1 / max(T, e)
  double B = 0.0;          // (1 + q + q log2/2) b^{1/m} / m
  double bound = 0.0;      // B * T^{1+k/m}
  double empirical = 0.0;  // E int_0^tau xi^{1/m} dt, Monte Carlo
  double se = 0.0;
  double clipped_time = 0.0;
  bool ok = false;
};

// Occupation form of the key lemma: with lambda = 1/T(r) the expected path
// integral of xi^{1/m} is controlled by T^{1+k/m}. The chain is the pointwise
// bound above, the determinant-trace inequality, and the Dynkin identity for
// log(1 + ||s||^{2 lambda}) (each term bounded by log 2).
OccupationBound xi_occupation_check(const geometry::ManifoldModel& model,
                                    const target::HoloMap& map, const target::SncDivisor& divisor,
                                    double r, double b_hat, std::uint64_t n_paths,
                                    std::uint64_t seed, int threads = 0,
                                    const nevanlinna::TOptions& opts = {});

struct CurrentIdentity {
  double lhs = 0.0;  // (1/2) E[log xi(X_tau)] - (1/2) log xi(o), origin regularized
  double lhs_se = 0.0;
  double t_canonical = 0.0;
  double n_ram = 0.0;
  double t1 = 0.0;
  double sum_N = 0.0;
  double t_ricci = 0.0;
  double rhs = 0.0;  // T_K + N_ram + (1-lambda)(q d T_1 - sum_j N_j) + (1/2) T_R
  double residual = 0.0;
  double allowed = 0.0;
  bool ok = false;
};

// Exact stochastic form of the second-main-theorem current equation: applying
// the Dynkin identity to log xi collects every term of the theory in one
// testable equation (canonical characteristic, ramification and divisor
// counting with their origin atoms, and the curvature characteristic).
CurrentIdentity current_identity_check(const geometry::ManifoldModel& model,
                                       const target::HoloMap& map,
                                       const target::SncDivisor& divisor, double lambda, double r,
                                       std::uint64_t n_paths, std::uint64_t seed, int threads = 0,
                                       const nevanlinna::TOptions& opts = {});

struct SmtRow {
  double r = 0.0;
  double T1 = 0.0;      // T(r, O(1))
  double TL = 0.0;      // total-degree characteristic, d_tot * T1
  double sum_N = 0.0;   // sum_j N_j
  double sum_N1 = 0.0;  // sum_j N^{[1]}_j
  double lhs = 0.0;     // (d_tot - m - 1) T1 - sum_N1
  double x_log_T = 0.0;
  double x_slow = 0.0;  // log+log T + (-kappa) r^2 + log+log r
  double rhs = 0.0;
  bool exceptional = false;
};

struct SmtCase {
  std::string model_id;
  std::string map_id;
  std::string divisor_id;
  int m = 1;
  int k = 1;
  int degree_total = 1;
  std::vector<SmtRow> rows;
  double a_fit = 0.0;
  double c_fit = 0.0;
  double exceptional_fraction = 0.0;  // r-measure of violating cells / grid span
  double beta = 0.0;  // fitted slope of lhs against log+ T; NaN if T never grew
  bool ok = false;
};

// Second-main-theorem inequality scan:
//   (d_tot - m - 1) T_1(r) - sum_j N^{[1]}_j(r)
//     <= (m+k)/2 log+ T + A (log+log T + (-kappa) r^2 + log+log r) + c
// with (A, c) fitted on the first half of the grid, inflated, and validated
// on the second half (violating cells may cover at most 5% of the span).
SmtCase smt_case(const geometry::ManifoldModel& model, const target::HoloMap& map,
                 const target::SncDivisor& divisor, const std::vector<double>& radii,
                 const nevanlinna::TOptions& opts = {});

struct DefectReport {
  std::vector<double> theta;      // truncated defect per component
  std::vector<double> ratio_max;  // max over the top decade of N^{[1]} / (d T1)
  double sum = 0.0;
  double bound = 0.0;       // (m+1)/d
  double gamma_last = 0.0;  // (-kappa) r^2 / TL at the largest radius
  bool growth_ok = false;   // curvature negligible against growth; the bound
                            // is only asserted when this holds
  bool ok = false;
};

// Truncated defects theta_j = 1 - limsup N^{[1]}_j / (d T_1), estimated by the
// max ratio over the top decade of radii, and the defect sum against (m+1)/d.
DefectReport defect_estimate(const geometry::ManifoldModel& model, const target::HoloMap& map,
                             const target::SncDivisor& divisor, const std::vector<double>& radii,
                             const nevanlinna::TOptions& opts = {});

struct SmtCatalogEntry {
  std::string model;
  std::string map;
  std::string divisor;
  double r_min = 2.0;
  double r_max = 30.0;
  int n_radii = 14;
};

// The standard (model, map, divisor) triples the inequality scan runs on:
// entire curves into P^1 over flat C, bounded maps on the Poincare disk, and
// linear embeddings of C^2 and the complex hyperbolic ball into P^2.
const std::vector<SmtCatalogEntry>& smt_catalog();

}  // namespace nevlab::smt
