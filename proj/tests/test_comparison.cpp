#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "nevlab/comparison.hpp"
#include "nevlab/geometry.hpp"

using namespace nevlab;

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

TEST_SUITE("comparison") {

TEST_CASE("flat profile integrates to G(t) = t") {
  auto sol = comparison::solve_G([](double) { return 0.0; }, 10.0, 1e-10, 64, "zero");
  for (double t : {0.0, 0.37, 1.0, 2.5, 7.91, 10.0}) {
    CHECK(std::abs(sol.eval_G(t) - t) < 1e-12);
    CHECK(std::abs(sol.eval_G_prime(t) - 1.0) < 1e-12);
  }
}

TEST_CASE("constant curvature matches sinh") {
  auto sol = comparison::solve_G([](double) { return -1.0; }, 10.0);
  for (double t : {0.1, 0.5, 1.0, 3.0, 6.2, 10.0}) {
    CHECK(rel_err(sol.eval_G(t), std::sinh(t)) < 1e-8);
    CHECK(rel_err(sol.eval_G_prime(t), std::cosh(t)) < 1e-8);
  }
  auto sol4 = comparison::solve_G([](double) { return -4.0; }, 8.0);
  for (double t : {0.25, 1.0, 4.0, 8.0})
    CHECK(rel_err(sol4.eval_G(t), 0.5 * std::sinh(2.0 * t)) < 1e-8);
}

TEST_CASE("decaying curvature has a closed-form solution") {
  // kappa(t) = -1/(1+t)^2 turns the equation into an Euler equation; the
  // normalized solution is [(1+t)^phi - (1+t)^{1-phi}] / sqrt(5) with phi the
  // golden ratio (phi(phi-1) = 1).
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  auto kappa = [](double t) { return -1.0 / ((1.0 + t) * (1.0 + t)); };
  auto sol = comparison::solve_G(kappa, 10.0);
  for (double t : {0.2, 1.0, 3.7, 10.0}) {
    const double want = (std::pow(1.0 + t, phi) - std::pow(1.0 + t, 1.0 - phi)) / std::sqrt(5.0);
    CHECK(rel_err(sol.eval_G(t), want) < 1e-8);
  }
}

TEST_CASE("growth bounds hold for every admissible profile") {
  std::vector<std::function<double(double)>> profiles = {
      [](double) { return 0.0; },
      [](double) { return -1.0; },
      [](double) { return -4.0; },
      [](double t) { return -1.0 / ((1.0 + t) * (1.0 + t)); },
  };
  for (const auto& kappa : profiles) {
    auto sol = comparison::solve_G(kappa, 10.0);
    for (int m : {1, 2, 3}) {
      auto report = comparison::check_G_bounds(sol, kappa, m);
      CHECK(report.ok);
      CHECK(report.slack_lower >= -1e-10);
      CHECK(report.slack_integral >= -1e-10);
      CHECK(report.slack_upper >= -1e-10);
    }
  }
}

TEST_CASE("integral of G^{1-2m} against closed forms") {
  auto flat = comparison::solve_G([](double) { return 0.0; }, 20.0);
  CHECK(rel_err(comparison::integral_G_power(flat, 1.0, 10.0, 1), std::log(10.0)) < 1e-9);
  CHECK(rel_err(comparison::integral_G_power(flat, 1.0, 10.0, 2), 0.5 * (1.0 - 1e-2)) < 1e-9);

  // m = 1 hyperbolic: int_1^r dt/sinh t = log(tanh(r/2)/tanh(1/2)).
  auto hyp = comparison::solve_G([](double) { return -1.0; }, 20.0);
  const double want = std::log(std::tanh(5.0) / std::tanh(0.5));
  CHECK(rel_err(comparison::integral_G_power(hyp, 1.0, 10.0, 1), want) < 1e-8);
}

TEST_CASE("euclidean green function and radial quadrature agree") {
  const double omega3 = 2.0 * std::numbers::pi * std::numbers::pi;
  CHECK(rel_err(comparison::green_euclidean(1, 10.0, 2.0), std::log(5.0) / std::numbers::pi) <
        1e-13);
  CHECK(rel_err(comparison::green_euclidean(2, 10.0, 2.0), (0.25 - 0.01) / omega3) < 1e-13);

  for (int m : {1, 2, 3}) {
    auto model = geometry::parse_model("flat:" + std::to_string(m));
    for (double s : {0.5, 2.0, 7.0})
      CHECK(rel_err(comparison::green_radial(model, 10.0, s),
                    comparison::green_euclidean(m, 10.0, s)) < 1e-8);
  }

  CHECK(rel_err(comparison::harmonic_density_bound(1, 2.0), 1.0 / (2.0 * std::numbers::pi * 2.0)) <
        1e-13);
}

TEST_CASE("flat green comparison constant is log(r/eta)/pi at every probe") {
  auto model = geometry::parse_model("flat:1");
  auto sol = comparison::solve_G([](double) { return 0.0; }, 12.0);
  auto probe = comparison::green_comparison_probe(model, sol, 1.0, 10.0, {2.0, 5.0, 8.0});
  CHECK(probe.n_probes == 3);
  // g_r(x) = log(r/r_x)/pi and the integral ratio is log(r/eta)/log(r/r_x),
  // so the probe collapses to the constant log(r/eta)/pi.
  CHECK(rel_err(probe.c_hat, std::log(10.0) / std::numbers::pi) < 1e-6);
  CHECK(probe.c_hat > 0.6);
  CHECK(probe.c_hat < 0.9);
  CHECK_THROWS_AS(comparison::green_comparison_probe(model, sol, 10.0, 1.0, {0.5}),
                  std::invalid_argument);
}

TEST_CASE("borel scan flags only genuinely fast cells") {
  std::vector<double> r(201), expT(201);
  for (int i = 0; i <= 200; ++i) {
    r[i] = 1.0 + 9.0 * i / 200.0;
    expT[i] = std::exp(r[i]);
  }
  auto clean = comparison::borel_check(r, expT, 1.0);
  CHECK(clean.violation_measure == 0.0);
  CHECK(clean.grid_span == doctest::Approx(9.0));

  // One cell with a jump well above T (log T)^2 must be flagged, and only it.
  std::vector<double> g = {1.0, 1.1, 1.2, 1.3};
  std::vector<double> T = {2.72, 8.0, 8.1, 8.2};
  auto scan = comparison::borel_check(g, T, 1.0);
  CHECK(scan.violation_cells.size() == 1);
  CHECK(scan.violation_measure == doctest::Approx(0.1));
  CHECK(scan.violation_cells[0].first == doctest::Approx(1.0));

  CHECK_THROWS_AS(comparison::borel_check({1.0}, {2.0}, 1.0), std::invalid_argument);
}

TEST_CASE("growth regulator pinned value and budget") {
  // gamma = e^2, kappa = 0, r = 1, m = 1, delta = 1:
  // F = (log+ gamma * log+(gamma (log gamma)^2))^2 = (2 (2 + log 4))^2.
  auto out = comparison::calculus_F(std::exp(2.0), 0.0, 1.0, 1, 1.0);
  const double want = std::pow(2.0 * (2.0 + std::log(4.0)), 2.0);
  CHECK(rel_err(out.F, want) < 1e-12);
  CHECK(rel_err(out.log_F, std::log(want)) < 1e-12);
  CHECK(rel_err(out.budget, std::log(2.0)) < 1e-12);

  // Iterated-log budget stays tiny even when F is astronomically large.
  auto big = comparison::calculus_F(1e12, -1.0, 50.0, 2, 0.5);
  CHECK(big.log_F > 1.0);
  CHECK(big.budget < 10.0);
  CHECK(big.budget >= comparison::log_plus(std::log(1e12)));

  CHECK_THROWS_AS(comparison::calculus_F(10.0, 1.0, 1.0, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(comparison::calculus_F(10.0, 0.0, 1.0, 1, 0.0), std::invalid_argument);
}

}  // TEST_SUITE
