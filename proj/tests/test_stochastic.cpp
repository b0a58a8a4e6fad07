#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "nevlab/geometry.hpp"
#include "nevlab/rng.hpp"
#include "nevlab/stats.hpp"
#include "nevlab/stochastic.hpp"

using namespace nevlab;

TEST_SUITE("stochastic") {

TEST_CASE("generator moments and determinism") {
  Rng rng(42);
  const int n = 200000;
  double su = 0.0, su2 = 0.0, sn = 0.0, sn2 = 0.0, sn4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    su += u;
    su2 += u * u;
    const double g = rng.normal();
    sn += g;
    sn2 += g * g;
    sn4 += g * g * g * g;
  }
  CHECK(std::abs(su / n - 0.5) < 0.005);
  CHECK(std::abs(su2 / n - 1.0 / 3.0) < 0.005);
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(std::abs(sn2 / n - 1.0) < 0.02);
  CHECK(std::abs(sn4 / n - 3.0) < 0.15);

  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  Rng s0 = Rng::substream(7, 0), s1 = Rng::substream(7, 1), s0b = Rng::substream(7, 0);
  CHECK(s0.next() != s1.next());
  CHECK(Rng::substream(7, 0).next() == s0b.next());
}

TEST_CASE("flat exit times match r^2 / 2m") {
  auto model = geometry::parse_model("flat:1");
  auto policy = stochastic::StepPolicy::for_exit_radius(1.0);
  auto res = stochastic::run_ensemble(model, 1.0, {}, 4000, 1234, policy, 0);
  CHECK(res.exit_time.n_paths == 4000);
  CHECK(std::abs(res.exit_time.mean - 0.5) < 5.0 * res.exit_time.std_error);
  CHECK(res.exit_time.mean <= 2.0 / 1.0 + 3.0 * res.exit_time.std_error);

  auto model2 = geometry::parse_model("flat:2");
  auto policy2 = stochastic::StepPolicy::for_exit_radius(2.0);
  auto res2 = stochastic::run_ensemble(model2, 2.0, {}, 2000, 99, policy2, 0);
  CHECK(std::abs(res2.exit_time.mean - 1.0) < 5.0 * res2.exit_time.std_error);
}

TEST_CASE("hyperbolic exit time matches 4 log cosh(r/2)") {
  auto model = geometry::parse_model("poincare");
  auto policy = stochastic::StepPolicy::for_exit_radius(1.0);
  auto res = stochastic::run_ensemble(model, 1.0, {}, 3000, 2024, policy, 0);
  const double want = 4.0 * std::log(std::cosh(0.5));
  CHECK(std::abs(res.exit_time.mean - want) < 5.0 * res.exit_time.std_error);
  // Exit time on a negatively curved model is uniformly bounded by 2 r^2.
  CHECK(res.exit_time.mean <= 2.0 + 3.0 * res.exit_time.std_error);
}

TEST_CASE("occupation integrals reproduce green-function quadrature") {
  auto model = geometry::parse_model("flat:1");

  // E int_0^tau |z|^2 dt = int g_r |z|^2 dV = r^4 / 8.
  stochastic::FunctionalSpec quad;
  quad.kind = stochastic::FunctionalSpec::Kind::Occupation;
  quad.name = "abs2";
  quad.f = [](const CVec& z) { return z.norm2(); };
  auto est = stochastic::estimate_occupation(model, 2.0, quad, 4000, 5150);
  CHECK(std::abs(est.mean - 2.0) < 5.0 * est.std_error);
  CHECK(est.abandoned == 0);

  // Masked logarithmic singularity: E int log(1/|z|) dt = 1/2 at r = 1, and
  // the time clipped near the pole is negligible at delta = 1e-6.
  stochastic::FunctionalSpec logf;
  logf.name = "log1z";
  logf.f = [](const CVec& z) { return -0.5 * std::log(z.norm2()); };
  logf.singular_distance = [](const CVec& z) { return z.norm(); };
  logf.delta_mask = 1e-6;
  auto lest = stochastic::estimate_occupation(model, 1.0, logf, 4000, 777);
  CHECK(std::abs(lest.mean - 0.5) < 5.0 * lest.std_error);
  // Paths start at the pole, so exactly the first step of each is clipped.
  CHECK(lest.clipped_time_mean > 0.0);
  CHECK(lest.clipped_time_mean <= 3e-3);
}

TEST_CASE("dynkin residual vanishes for smooth fields") {
  geometry::SmoothField abs2;
  abs2.name = "abs2";
  abs2.value = [](const CVec& z) { return z.norm2(); };
  abs2.complex_hessian = [](const CVec& z) { return CMat::identity(z.size()); };
  auto model2 = geometry::parse_model("flat:2");
  auto r2 = stochastic::dynkin_residual(model2, 1.5, abs2, 3000, 31);
  CHECK(std::abs(r2.mean) < std::max(5.0 * r2.std_error, 0.01));

  // Harmonic field, finite-difference Hessian path: both sides vanish.
  geometry::SmoothField re1;
  re1.name = "re_z1";
  re1.value = [](const CVec& z) { return z[0].real(); };
  auto model1 = geometry::parse_model("flat:1");
  auto r1 = stochastic::dynkin_residual(model1, 1.0, re1, 2000, 32);
  CHECK(std::abs(r1.mean) < std::max(5.0 * r1.std_error, 0.01));

  // Potential of the hyperbolic metric: L u = 1, so the residual couples the
  // exit-time estimate against the boundary average.
  geometry::SmoothField pot;
  pot.name = "hyperbolic_potential";
  pot.value = [](const CVec& z) { return -std::log(1.0 - z.norm2()); };
  pot.complex_hessian = [](const CVec& z) {
    const double w = 1.0 - z.norm2();
    CMat h = CMat::identity(z.size()) * cplx(1.0 / w, 0.0);
    for (int a = 0; a < z.size(); ++a)
      for (int b = 0; b < z.size(); ++b) h(a, b) += std::conj(z[a]) * z[b] / cplx(w * w, 0.0);
    return h;
  };
  auto model_h = geometry::parse_model("poincare");
  auto rh = stochastic::dynkin_residual(model_h, 1.2, pot, 3000, 33);
  CHECK(std::abs(rh.mean) < std::max(5.0 * rh.std_error, 0.01));
}

TEST_CASE("exit law on the flat disk is uniform in angle") {
  auto model = geometry::parse_model("flat:1");
  auto policy = stochastic::StepPolicy::for_exit_radius(1.0);
  const std::uint64_t n = 20000;
  auto res = stochastic::run_ensemble(model, 1.0, {}, n, 4242, policy, 0, true);
  REQUIRE(res.exit_points.size() == n);

  const int bins = 16;
  std::vector<double> count(bins, 0.0);
  double sum_cos = 0.0;
  for (const auto& z : res.exit_points) {
    const double theta = std::atan2(z[0].imag(), z[0].real());
    int b = static_cast<int>((theta + std::numbers::pi) / (2.0 * std::numbers::pi) * bins);
    b = std::clamp(b, 0, bins - 1);
    count[b] += 1.0;
    sum_cos += std::cos(theta);
    CHECK(std::abs(z.norm() - 1.0) < 1e-6);
  }
  const double expected = static_cast<double>(n) / bins;
  double chi2 = 0.0;
  for (double c : count) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(stats::chi2_sf(chi2, bins - 1) > 1e-3);
  CHECK(std::abs(sum_cos / static_cast<double>(n)) < 0.02);
}

TEST_CASE("ensembles are bit-identical across seeds and thread counts") {
  auto model = geometry::parse_model("flat:2");
  auto policy = stochastic::StepPolicy::for_exit_radius(1.0);
  stochastic::FunctionalSpec spec;
  spec.name = "norm2";
  spec.f = [](const CVec& z) { return z.norm2(); };

  auto a = stochastic::run_ensemble(model, 1.0, {spec}, 500, 9001, policy, 1);
  auto b = stochastic::run_ensemble(model, 1.0, {spec}, 500, 9001, policy, 3);
  CHECK(a.exit_time.mean == b.exit_time.mean);
  CHECK(a.exit_time.std_error == b.exit_time.std_error);
  CHECK(a.estimates[0].mean == b.estimates[0].mean);
  REQUIRE(a.exit_times.size() == b.exit_times.size());
  for (std::size_t i = 0; i < a.exit_times.size(); ++i)
    CHECK(a.exit_times[i] == b.exit_times[i]);

  auto c = stochastic::run_ensemble(model, 1.0, {spec}, 500, 9002, policy, 1);
  CHECK(a.exit_time.mean != c.exit_time.mean);

  Rng r1 = Rng::substream(9001, 3);
  auto s1 = stochastic::simulate_exit(model, 1.0, {spec}, r1, policy);
  Rng r2 = Rng::substream(9001, 3);
  auto s2 = stochastic::simulate_exit(model, 1.0, {spec}, r2, policy);
  CHECK(s1.exit_time == s2.exit_time);
  CHECK(s1.functional_values[0] == s2.functional_values[0]);
  CHECK(s1.steps == s2.steps);
}

TEST_CASE("step policy scales with the exit radius") {
  auto p = stochastic::StepPolicy::for_exit_radius(4.0);
  CHECK(p.dt0 == doctest::Approx(1.6e-2));
  CHECK(p.dt_min >= 1e-12);
}

}  // TEST_SUITE
