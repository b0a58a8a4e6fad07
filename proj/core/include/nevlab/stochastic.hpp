#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nevlab/geometry.hpp"
#include "nevlab/parallel.hpp"
#include "nevlab/rng.hpp"

namespace nevlab::stochastic {

// Brownian motion generated by half the Laplace-Beltrami operator, simulated
// by Euler-Maruyama in the global holomorphic chart. On a Kähler manifold the
// generator has no first-order part in holomorphic coordinates, so a step is
//   z <- z + sqrt(dt) * C(z) * (xi + i eta),  C C^H = conj(g)^{-1},
// with xi, eta independent standard normal vectors. On the flat model the
// increments are exact.

struct StepPolicy {
  double dt0 = 1e-3;        // base step; for_exit_radius sets 1e-3 * r^2
  double shrink_c = 0.1;    // dt <= shrink_c * dist(X, sphere)^2 near the boundary
  double dt_min = 1e-12;    // hard floor, guards against step underflow
  std::uint64_t max_steps = 2'000'000;

  static StepPolicy for_exit_radius(double r) {
    StepPolicy p;
    p.dt0 = 1e-3 * r * r;
    p.dt_min = 1e-12 * std::max(1.0, r * r);
    return p;
  }
};

// A path functional: either the occupation integral int_0^tau f(X_t) dt or a
// boundary evaluation f(X_tau). Occupation integrands with singularities carry
// a mask distance; time spent where singular_distance < delta_mask is dropped
// from the integral and reported separately.
struct FunctionalSpec {
  enum class Kind { Occupation, Hitting };
  Kind kind = Kind::Occupation;
  std::string name;
  std::function<double(const CVec&)> f;
  std::function<double(const CVec&)> singular_distance;  // optional mask
  double delta_mask = 1e-6;
};

struct ExitSample {
  CVec exit_point;
  double exit_time = 0.0;
  std::uint64_t steps = 0;
  bool abandoned = false;                 // hit the step budget
  std::vector<double> functional_values;  // one per requested spec
  std::vector<double> clipped_time;       // occupation time inside the mask
};

// Simulates one path from the base point to the exit of the geodesic ball of
// radius r. The sphere crossing is located by bisection along the last
// increment. Throws on non-finite state (numerical failure).
ExitSample simulate_exit(const geometry::ManifoldModel& model, double r,
                         const std::vector<FunctionalSpec>& specs, Rng& rng,
                         const StepPolicy& policy);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_paths = 0;
  double clipped_time_mean = 0.0;  // for masked occupation functionals
  std::uint64_t abandoned = 0;     // resampled paths (counted, not included)
};

struct EnsembleResult {
  std::vector<McEstimate> estimates;            // one per spec
  McEstimate exit_time;                         // estimate of E[tau_r]
  std::vector<std::vector<double>> per_path;    // [spec][path], for coupled statistics
  std::vector<double> exit_times;               // [path]
  std::vector<CVec> exit_points;                // filled when requested
};

// Runs n_paths independent paths (substream i for path i), evaluating all
// specs on the same ensemble. Deterministic for fixed (seed, n_paths):
// per-path values are written into path-indexed slots and reduced by
// fixed-order pairwise summation, so results do not depend on threads.
// Paths that exhaust the step budget are resampled from substreams beyond
// n_paths; more than 1% abandoned is an error.
EnsembleResult run_ensemble(const geometry::ManifoldModel& model, double r,
                            const std::vector<FunctionalSpec>& specs, std::uint64_t n_paths,
                            std::uint64_t seed, const StepPolicy& policy, int threads = 0,
                            bool keep_exit_points = false);

McEstimate estimate_occupation(const geometry::ManifoldModel& model, double r,
                               const FunctionalSpec& spec, std::uint64_t n_paths,
                               std::uint64_t seed, int threads = 0);

McEstimate estimate_hitting(const geometry::ManifoldModel& model, double r,
                            const std::function<double(const CVec&)>& psi, std::uint64_t n_paths,
                            std::uint64_t seed, int threads = 0);

// Dynkin residual for a smooth field u:
//   E[u(X_tau)] - u(o) - (1/2) E[int_0^tau (Lu)(X_t) dt],
// computed per path on a common ensemble so the standard error reflects the
// coupled fluctuations. Should vanish within Monte-Carlo error.
McEstimate dynkin_residual(const geometry::ManifoldModel& model, double r,
                           const geometry::SmoothField& u, std::uint64_t n_paths,
                           std::uint64_t seed, int threads = 0);

}  // namespace nevlab::stochastic
