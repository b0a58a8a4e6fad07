#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "nevlab/geometry.hpp"
#include "nevlab/nevanlinna.hpp"
#include "nevlab/quadrature.hpp"
#include "nevlab/target.hpp"

using namespace nevlab;
using target::HomogPoly;
using target::ProjectivePoint;

TEST_SUITE("nevanlinna") {

TEST_CASE("expected exit times in closed form") {
  CHECK(nevanlinna::expected_exit_time(geometry::parse_model("flat:1"), 3.0) ==
        doctest::Approx(4.5).epsilon(1e-10));
  CHECK(nevanlinna::expected_exit_time(geometry::parse_model("flat:2"), 2.0) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(nevanlinna::expected_exit_time(geometry::parse_model("poincare"), 1.0) ==
        doctest::Approx(4.0 * std::log(std::cosh(0.5))).epsilon(1e-9));
  // Scaling the metric by sigma^2 scales times by sigma^2 at radius r/sigma.
  CHECK(nevanlinna::expected_exit_time(geometry::parse_model("poincare:scale=2"), 1.0) ==
        doctest::Approx(16.0 * std::log(std::cosh(0.25))).epsilon(1e-9));
}

TEST_CASE("characteristic of the identity chart is (1/2) log(1+r^2)") {
  auto model = geometry::parse_model("flat:1");
  auto id = target::parse_map("map:id", 1);
  for (double r : {0.5, 2.0, 10.0}) {
    const double want = 0.5 * std::log(1.0 + r * r);
    CHECK(nevanlinna::characteristic_T(model, id, 1, r) == doctest::Approx(want).epsilon(1e-8));
    CHECK(nevanlinna::characteristic_T(model, id, 3, r) ==
          doctest::Approx(3.0 * want).epsilon(1e-8));
    CHECK(nevanlinna::characteristic_T_shell(model, id, 1, r) ==
          doctest::Approx(want).epsilon(1e-7));
  }
}

TEST_CASE("characteristic of z^2 is (1/2) log(1+r^4)") {
  auto model = geometry::parse_model("flat:1");
  auto sq = target::parse_map("map:sq", 1);
  for (double r : {1.5, 4.0}) {
    const double want = 0.5 * std::log(1.0 + std::pow(r, 4.0));
    CHECK(nevanlinna::characteristic_T(model, sq, 1, r) == doctest::Approx(want).epsilon(1e-7));
  }
}

TEST_CASE("characteristic of exp matches the circle average") {
  auto model = geometry::parse_model("flat:1");
  auto exp_map = target::parse_map("map:exp", 1);
  const double r = 30.0;
  // Green-Jensen on P^1: T(r) = avg_theta (1/2) log((1+e^{2 r cos}) / 2).
  const double want = quadrature::integrate(
                          [&](double th) {
                            const double x = 2.0 * r * std::cos(th);
                            // log(1+e^x) without overflow
                            const double l1p = x > 0.0 ? x + std::log1p(std::exp(-x))
                                                       : std::log1p(std::exp(x));
                            return 0.5 * (l1p - std::log(2.0));
                          },
                          0.0, 2.0 * std::numbers::pi, 64) /
                      (2.0 * std::numbers::pi);
  const double got = nevanlinna::characteristic_T(model, exp_map, 1, r);
  CHECK(got == doctest::Approx(want).epsilon(1e-5));
  CHECK(got == doctest::Approx(9.207).epsilon(1e-3));
  CHECK(nevanlinna::characteristic_T_shell(model, exp_map, 1, 5.0) ==
        doctest::Approx(nevanlinna::characteristic_T(model, exp_map, 1, 5.0)).epsilon(1e-5));
}

TEST_CASE("characteristic routes agree on the curved ball") {
  auto model = geometry::parse_model("chball:2");
  auto id = target::parse_map("map:id", 2);
  const double q = nevanlinna::characteristic_T(model, id, 1, 0.8);
  const double s = nevanlinna::characteristic_T_shell(model, id, 1, 0.8);
  CHECK(q == doctest::Approx(s).epsilon(1e-5));
  CHECK(q > 0.0);
}

TEST_CASE("monte carlo characteristic agrees with quadrature") {
  auto model = geometry::parse_model("flat:1");
  auto id = target::parse_map("map:id", 1);
  auto est = nevanlinna::characteristic_T_mc(model, id, 1, 2.0, 3000, 614);
  CHECK(std::abs(est.mean - 0.5 * std::log(5.0)) < 5.0 * est.std_error);
}

TEST_CASE("canonical and curvature characteristics") {
  auto flat1 = geometry::parse_model("flat:1");
  auto flat2 = geometry::parse_model("flat:2");
  auto id1 = target::parse_map("map:id", 1);
  auto id2 = target::parse_map("map:id", 2);
  CHECK(nevanlinna::canonical_characteristic(flat1, id1, 2.0) ==
        doctest::Approx(-2.0 * nevanlinna::characteristic_T(flat1, id1, 1, 2.0)).epsilon(1e-12));
  CHECK(nevanlinna::canonical_characteristic(flat2, id2, 1.0) ==
        doctest::Approx(-3.0 * nevanlinna::characteristic_T(flat2, id2, 1, 1.0)).epsilon(1e-12));

  CHECK(nevanlinna::ricci_characteristic(flat2, 3.0) == 0.0);
  const double tau = nevanlinna::expected_exit_time(geometry::parse_model("poincare"), 2.0);
  CHECK(nevanlinna::ricci_characteristic(geometry::parse_model("poincare"), 2.0) ==
        doctest::Approx(-tau).epsilon(1e-9));
  auto chb = geometry::parse_model("chball:2");
  CHECK(nevanlinna::ricci_characteristic(chb, 0.9) ==
        doctest::Approx(-12.0 * nevanlinna::expected_exit_time(chb, 0.9)).epsilon(1e-9));
  auto mc = nevanlinna::ricci_characteristic_mc(geometry::parse_model("poincare"), 2.0, 3000, 88);
  CHECK(std::abs(mc.mean - (-tau)) < 5.0 * mc.std_error);
}

TEST_CASE("counting on the line: green weights at the zeros") {
  auto model = geometry::parse_model("flat:1");
  auto id = target::parse_map("map:id", 1);

  auto at1 = HomogPoly::vanishing_at(ProjectivePoint::affine(cplx(1.0, 0.0)));
  auto c = nevanlinna::counting_N(model, id, at1, 10.0);
  CHECK(c.N == doctest::Approx(std::log(10.0)).epsilon(1e-9));
  CHECK(c.N_trunc == doctest::Approx(c.N).epsilon(1e-12));
  CHECK(c.zeros_found == 1);
  CHECK(c.order_at_origin == 0);

  // Zero at the base point enters through the Robin constant, log r here.
  auto at0 = HomogPoly::vanishing_at(ProjectivePoint::affine(cplx(0.0, 0.0)));
  auto c0 = nevanlinna::counting_N(model, id, at0, 5.0);
  CHECK(c0.order_at_origin == 1);
  CHECK(c0.N == doctest::Approx(std::log(5.0)).epsilon(1e-9));

  // No preimages in the ball.
  auto far = HomogPoly::vanishing_at(ProjectivePoint::affine(cplx(7.0, 0.0)));
  CHECK(nevanlinna::counting_N(model, id, far, 2.0).N == 0.0);

  // e^z = 1 at 2 pi i k: N(30) = log 30 + 2 sum_{k=1}^{4} log(30/(2 pi k)).
  auto exp_map = target::parse_map("map:exp", 1);
  double want = std::log(30.0);
  for (int k = 1; k <= 4; ++k) want += 2.0 * std::log(30.0 / (2.0 * std::numbers::pi * k));
  auto ce = nevanlinna::counting_N(model, exp_map, at1, 30.0);
  CHECK(ce.N == doctest::Approx(want).epsilon(1e-8));
  CHECK(ce.N == doctest::Approx(9.5517).epsilon(1e-4));
  CHECK(ce.zeros_found == 8);
  CHECK(ce.order_at_origin == 1);
}

TEST_CASE("counting on the hyperbolic disk uses its green function") {
  auto model = geometry::parse_model("poincare");
  auto id = target::parse_map("map:id", 1);
  auto poly = HomogPoly::vanishing_at(ProjectivePoint::affine(cplx(0.3, 0.0)));
  auto c = nevanlinna::counting_N(model, id, poly, 2.0);
  CHECK(c.N == doctest::Approx(std::log(std::tanh(1.0) / 0.3)).epsilon(1e-8));
}

TEST_CASE("counting in higher dimension integrates the solution slice") {
  auto model = geometry::parse_model("flat:2");
  auto id = target::parse_map("map:id", 2);

  // Unit-circle hyperplane 1 + t z1 + t^2 z2 sits at distance 1/sqrt(2).
  auto hyp = target::parse_divisor("p2:hyp:3");
  const double r = 4.0, delta = 1.0 / std::sqrt(2.0);
  const double want = std::log(r / delta) + delta * delta / (2.0 * r * r) - 0.5;
  for (const auto& comp : hyp.components) {
    auto c = nevanlinna::counting_N(model, id, comp.poly, r);
    CHECK(c.N == doctest::Approx(want).epsilon(1e-7));
    CHECK(c.N_trunc == doctest::Approx(c.N).epsilon(1e-12));
  }

  // The smoothed-Laplacian route converges to the same number.
  const auto& poly = hyp.components[0].poly;
  const double exact = nevanlinna::counting_N(model, id, poly, r).N;
  const double coarse = nevanlinna::counting_N_smoothed(model, id, poly, r, 1e-1);
  const double fine = nevanlinna::counting_N_smoothed(model, id, poly, r, 1e-2);
  CHECK(std::abs(fine - exact) < std::abs(coarse - exact));
  CHECK(std::abs(fine - exact) < 5e-3);

  // A coordinate hyperplane passes through the base point: rejected.
  auto coords = target::parse_divisor("p2:coords");
  CHECK_THROWS(nevanlinna::counting_N(model, id, coords.components[1].poly, r));
}

TEST_CASE("ramification counting") {
  auto model = geometry::parse_model("flat:1");
  auto sq = target::parse_map("map:sq", 1);
  auto c = nevanlinna::counting_ramification(model, sq, 5.0);
  CHECK(c.order_at_origin == 1);
  CHECK(c.N == doctest::Approx(std::log(5.0)).epsilon(1e-9));

  auto id = target::parse_map("map:id", 1);
  CHECK(nevanlinna::counting_ramification(model, id, 5.0).N == 0.0);
}

TEST_CASE("proximity against the closed form on a circle") {
  // Divisor at 0, identity map: ||s(f(X_tau))|| is constant on |z| = r, so
  // m(r) = -log varsigma - log r + (1/2) log(1+r^2) with zero variance.
  auto model = geometry::parse_model("flat:1");
  auto id = target::parse_map("map:id", 1);
  target::LineBundleFS bundle{1, 0.5};
  auto at0 = HomogPoly::vanishing_at(ProjectivePoint::affine(cplx(0.0, 0.0)));
  auto est = nevanlinna::proximity_mc(model, id, bundle, at0, 2.0, 2000, 99);
  const double want = std::log(2.0) - std::log(2.0) + 0.5 * std::log(5.0);
  CHECK(std::abs(est.mean - want) < std::max(5.0 * est.std_error, 1e-4));
}

TEST_CASE("first main identity: residual is flat across radii") {
  auto model = geometry::parse_model("flat:1");
  auto id = target::parse_map("map:id", 1);
  auto divisor = target::parse_divisor("p1:points=[2]");
  auto report = nevanlinna::fmt_check(model, id, divisor, 0.5, {2.0, 4.0, 8.0}, 1500, 515);
  CHECK(report.ok);
  REQUIRE(report.rows.size() == 3);
  REQUIRE(report.max_deviation.size() == 1);
  CHECK(report.max_deviation[0] <= report.max_allowed[0]);
  // -log ||s_2([1:0])|| = -log(0.5 * 2 / sqrt(5))
  CHECK(report.predicted_constant[0] ==
        doctest::Approx(-std::log(1.0 / std::sqrt(5.0))).epsilon(1e-6));
  for (const auto& row : report.rows) {
    CHECK(std::isfinite(row.residual[0]));
    CHECK(row.T > 0.0);
  }
}

}  // TEST_SUITE
