#include <cmath>
#include <functional>

#include "doctest.h"
#include "nevlab/geometry.hpp"
#include "nevlab/rng.hpp"

using namespace nevlab;
using geometry::ManifoldModel;
using geometry::parse_model;

namespace {

// Hand-rolled mixed second derivative d^2/dz_a dzbar_b of a real scalar,
// independent of the library's stencil.
cplx mixed_dd(const std::function<double(const CVec&)>& f, const CVec& z, int a, int b,
              double h) {
  auto shift = [&](cplx da, cplx db) {
    CVec w = z;
    w[a] += da;
    w[b] += db;
    return f(w);
  };
  // d/dzbar_b first (conjugate-holomorphic direction), then d/dz_a.
  auto dbar = [&](cplx da) {
    const cplx fx = (shift(da, h) - shift(da, -h)) / (2.0 * h);
    const cplx fy = (shift(da, cplx(0, h)) - shift(da, cplx(0, -h))) / (2.0 * h);
    return 0.5 * (fx + cplx(0, 1) * fy);
  };
  const cplx gx = (dbar(h) - dbar(-h)) / (2.0 * h);
  const cplx gy = (dbar(cplx(0, h)) - dbar(cplx(0, -h))) / (2.0 * h);
  return 0.5 * (gx - cplx(0, 1) * gy);
}

CVec random_chart_point(Rng& rng, const ManifoldModel& model, double spread) {
  CVec z(model.m);
  for (int i = 0; i < model.m; ++i) z[i] = spread * cplx(rng.normal(), rng.normal());
  if (std::isfinite(model.chart_radius()) && z.norm() > 0.6) {
    const double s = 0.6 / z.norm();
    for (int i = 0; i < model.m; ++i) z[i] *= s;
  }
  return z;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("flat metric is the identity") {
  const auto model = parse_model("flat:2");
  const CVec z{cplx(0.3, -1.2), cplx(2.0, 0.1)};
  const CMat g = geometry::metric_at(model, z);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(g(i, j) - (i == j ? cplx(1) : cplx(0))) < 1e-15);
}

TEST_CASE("poincare metric closed form") {
  const auto model = parse_model("poincare");
  for (double rho : {0.0, 0.3, 0.8}) {
    const CVec z{cplx(rho * 0.6, rho * 0.8)};
    const double expect = 4.0 / ((1.0 - rho * rho) * (1.0 - rho * rho));
    CHECK(geometry::metric_at(model, z)(0, 0).real() == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("ball metric matches the potential hessian") {
  // g = ddbar(-log(1 - |z|^2)), differentiated by hand:
  // g_ab = delta_ab/(1-|z|^2) + zbar_a z_b/(1-|z|^2)^2.
  const auto model = parse_model("chball:2");
  const CVec z{cplx(0.25, -0.1), cplx(-0.3, 0.35)};
  const double s = 1.0 - z.norm2();
  const CMat g = geometry::metric_at(model, z);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const cplx expect = (a == b ? 1.0 / s : 0.0) + std::conj(z[a]) * z[b] / (s * s);
      CHECK(std::abs(g(a, b) - expect) < 1e-12);
    }

  // And against a finite-difference hessian of the potential itself.
  auto potential = [](const CVec& w) { return -std::log(1.0 - w.norm2()); };
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      CHECK(std::abs(g(a, b) - mixed_dd(potential, z, a, b, 1e-4)) < 1e-6);
}

TEST_CASE("complex ricci against a finite-difference log-det oracle") {
  Rng rng(11);
  for (const char* id : {"poincare", "chball:1", "chball:2"}) {
    const auto model = parse_model(id);
    for (int rep = 0; rep < 3; ++rep) {
      const CVec z = random_chart_point(rng, model, 0.25);
      auto log_det = [&](const CVec& w) {
        return std::log(geometry::metric_at(model, w).det().real());
      };
      const CMat ric = geometry::complex_ricci_at(model, z);
      for (int a = 0; a < model.m; ++a)
        for (int b = 0; b < model.m; ++b)
          CHECK(std::abs(ric(a, b) + mixed_dd(log_det, z, a, b, 1e-4)) < 2e-5);
    }
  }
}

TEST_CASE("curvature constants") {
  CHECK(geometry::kappa_profile(parse_model("flat:1"), 3.0) == 0.0);
  CHECK(geometry::kappa_profile(parse_model("flat:3"), 3.0) == 0.0);
  CHECK(geometry::kappa_profile(parse_model("poincare"), 2.0) == doctest::Approx(-1.0));
  // Bergman ball: Ricci lower bound -2(m+1)/(2m-1).
  CHECK(geometry::kappa_profile(parse_model("chball:1"), 1.0) == doctest::Approx(-4.0));
  CHECK(geometry::kappa_profile(parse_model("chball:2"), 1.0) == doctest::Approx(-2.0));
  CHECK(geometry::kappa_profile(parse_model("chball:3"), 1.0) == doctest::Approx(-8.0 / 5.0));

  CHECK(geometry::scalar_curvature(parse_model("flat:2"), CVec(2)) == 0.0);
  CHECK(geometry::scalar_curvature(parse_model("poincare"), CVec(1)) == doctest::Approx(-1.0));
  // -2m(m+1) for the ball models.
  CHECK(geometry::scalar_curvature(parse_model("chball:2"), CVec(2)) == doctest::Approx(-12.0));

  // curvature_scale sigma multiplies distances, so curvatures shrink by sigma^2.
  CHECK(geometry::kappa_profile(parse_model("poincare:scale=2"), 1.0) ==
        doctest::Approx(-0.25));
}

TEST_CASE("scalar curvature saturates the einstein bound") {
  Rng rng(12);
  for (const char* id : {"poincare", "chball:2", "chball:3"}) {
    const auto model = parse_model(id);
    const CVec z = random_chart_point(rng, model, 0.2);
    const double s = geometry::scalar_curvature(model, z);
    const double rm = geometry::ricci_lower_bound(model, z);
    CHECK(s == doctest::Approx(model.m * rm).epsilon(1e-9));
  }
}

TEST_CASE("distance and sphere chart radius invert each other") {
  Rng rng(13);
  for (const char* id : {"flat:2", "poincare", "chball:2"}) {
    const auto model = parse_model(id);
    const CVec z = random_chart_point(rng, model, 0.3);
    const double r = geometry::distance_to_base(model, z);
    CHECK(geometry::chart_radius_of_sphere(model, r) == doctest::Approx(z.norm()).epsilon(1e-12));
  }
  CHECK(geometry::distance_to_base(parse_model("poincare"), CVec{cplx(0.5, 0)}) ==
        doctest::Approx(2.0 * std::atanh(0.5)));
  CHECK(geometry::distance_to_base(parse_model("chball:1"), CVec{cplx(0.5, 0)}) ==
        doctest::Approx(std::atanh(0.5)));
}

TEST_CASE("geodesic sphere areas") {
  const double t = 0.7;
  CHECK(geometry::sphere_area(parse_model("flat:1"), t) == doctest::Approx(2 * M_PI * t));
  CHECK(geometry::sphere_area(parse_model("flat:2"), t) ==
        doctest::Approx(2 * M_PI * M_PI * t * t * t));
  CHECK(geometry::sphere_area(parse_model("poincare"), t) ==
        doctest::Approx(2 * M_PI * std::sinh(t)));
  // Bergman ball m=2: omega_3 sinh^3(t) cosh(t).
  CHECK(geometry::sphere_area(parse_model("chball:2"), t) ==
        doctest::Approx(2 * M_PI * M_PI * std::pow(std::sinh(t), 3) * std::cosh(t)));
}

TEST_CASE("laplacian closed forms") {
  geometry::SmoothField norm2;
  norm2.name = "norm2";
  norm2.value = [](const CVec& z) { return z.norm2(); };

  CHECK(geometry::laplace_beltrami(parse_model("flat:1"), norm2, CVec(1)) ==
        doctest::Approx(4.0).epsilon(1e-6));
  CHECK(geometry::laplace_beltrami(parse_model("flat:3"), norm2,
                                   CVec{cplx(0.2, 0), cplx(0, 0.1), cplx(0.3, 0.3)}) ==
        doctest::Approx(12.0).epsilon(1e-6));

  // The hyperbolic potentials solve clean equations: on the disk
  // Lap(-log(1-|z|^2)) = 1 + |z|^2/(...)? No: with g = 4/(1-|z|^2)^2,
  // Lap u = (1-|z|^2)^2 u_zzbar, and u_zzbar = 1/(1-|z|^2)^2, so Lap u = 1.
  geometry::SmoothField pot;
  pot.name = "potential";
  pot.value = [](const CVec& z) { return -std::log(1.0 - z.norm2()); };
  CHECK(geometry::laplace_beltrami(parse_model("poincare"), pot, CVec{cplx(0.4, -0.2)}) ==
        doctest::Approx(1.0).epsilon(1e-5));
  // On the ball the potential's hessian is the metric itself: Lap = 4m.
  CHECK(geometry::laplace_beltrami(parse_model("chball:2"), pot,
                                   CVec{cplx(0.3, 0.1), cplx(-0.2, 0.2)}) ==
        doctest::Approx(8.0).epsilon(1e-5));
}

TEST_CASE("diffusion factor squares to the inverse metric") {
  Rng rng(14);
  for (const char* id : {"flat:2", "poincare", "chball:2"}) {
    const auto model = parse_model(id);
    const CVec z = random_chart_point(rng, model, 0.3);
    const CMat c = geometry::diffusion_factor(model, z);
    const CMat prod = c * c.adjoint();
    const CMat ginv = geometry::inverse_metric_at(model, z);
    for (int a = 0; a < model.m; ++a)
      for (int b = 0; b < model.m; ++b)
        CHECK(std::abs(prod(a, b) - std::conj(ginv(a, b))) < 1e-12);
  }
}

TEST_CASE("model parsing rejects junk") {
  CHECK_THROWS_AS((void)parse_model("flat:0"), std::invalid_argument);
  CHECK_THROWS_AS((void)parse_model("flat:5"), std::invalid_argument);
  CHECK_THROWS_AS((void)parse_model("torus"), std::invalid_argument);
  CHECK_THROWS_AS((void)parse_model("poincare:scale=-1"), std::invalid_argument);
}

}  // TEST_SUITE
