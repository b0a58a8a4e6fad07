#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "nevlab/complexmat.hpp"
#include "nevlab/geometry.hpp"
#include "nevlab/nevanlinna.hpp"
#include "nevlab/rng.hpp"
#include "nevlab/smt.hpp"
#include "nevlab/target.hpp"

using namespace nevlab;

namespace {

CMat random_matrix(Rng& rng, int m) {
  CMat a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = cplx(rng.normal(), rng.normal());
  return a;
}

CMat random_pd(Rng& rng, int m, double ridge) {
  const CMat a = random_matrix(rng, m);
  return a * a.adjoint() + CMat::identity(m) * cplx(ridge, 0.0);
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i)
    r[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return r;
}

}  // namespace

TEST_SUITE("smt") {

TEST_CASE("wedge coefficient equals the relative trace") {
  Rng rng(321);
  for (int m = 1; m <= 4; ++m) {
    for (int trial = 0; trial < 500; ++trial) {
      const CMat g = random_pd(rng, m, 0.1);
      CMat phi = random_pd(rng, m, 0.0);
      if (trial % 3 == 0) phi = phi - CMat::identity(m) * cplx(0.5, 0.0);  // indefinite is fine
      const double want = trace_against(g, phi).real();
      CHECK(std::abs(smt::mixed_form_trace(g, phi) - want) <=
            1e-10 * std::max(1.0, std::abs(want)));
    }
  }
  CHECK_THROWS(smt::mixed_form_trace(CMat(2, 2), CMat(2, 2)));  // singular g
}

TEST_CASE("determinant-trace gap is a true gap") {
  Rng rng(654);
  for (int m = 1; m <= 3; ++m) {
    for (int trial = 0; trial < 500; ++trial) {
      const CMat g = random_pd(rng, m, 0.05);
      const CMat phi = random_pd(rng, m, 0.0);
      CHECK(smt::det_trace_gap(g, phi) >= -1e-12);
    }
    // Equality exactly when phi is proportional to g.
    const CMat g = random_pd(rng, m, 0.2);
    CHECK(std::abs(smt::det_trace_gap(g, g * cplx(1.7, 0.0))) < 1e-10);
  }
}

TEST_CASE("xi density: hand value, chart independence, singular limits") {
  auto flat1 = geometry::parse_model("flat:1");
  auto id1 = target::parse_map("map:id", 1);
  auto at0 = target::parse_divisor("p1:points=[0]");

  // q = d = 1, u = z, J = 1:
  // log xi = -2 log(1+rho^2) - 2(1-lambda) log rho + (1-lambda) log(1+rho^2).
  const double rho = 2.0;
  const double want = -1.5 * std::log(5.0) - std::log(2.0);
  CHECK(smt::log_xi_density(flat1, id1, at0, 0.5, CVec{cplx(rho, 0.0)}) ==
        doctest::Approx(want).epsilon(1e-12));

  // On the divisor the density blows up; at a ramification point it vanishes.
  CHECK(std::isinf(smt::log_xi_density(flat1, id1, at0, 0.5, CVec{cplx(0.0, 0.0)})));
  auto sq = target::parse_map("map:sq", 1);
  auto at1 = target::parse_divisor("p1:points=[1,-1]");
  CHECK(smt::log_xi_density(flat1, sq, at1, 0.5, CVec{cplx(0.0, 0.0)}) ==
        -std::numeric_limits<double>::infinity());

  // Continuity across the chart seam |z| = 1.
  auto near = smt::log_xi_density(flat1, id1, at0, 0.3, CVec{cplx(1.0 - 1e-7, 0.0)});
  auto past = smt::log_xi_density(flat1, id1, at0, 0.3, CVec{cplx(1.0 + 1e-7, 0.0)});
  CHECK(std::abs(near - past) < 1e-5);

  auto flat2 = geometry::parse_model("flat:2");
  auto id2 = target::parse_map("map:id", 2);
  auto hyp = target::parse_divisor("p2:hyp:3");
  auto near2 = smt::log_xi_density(flat2, id2, hyp, 0.3, CVec{cplx(1.0 - 1e-6, 0.0), cplx(0.4, 0.0)});
  auto past2 = smt::log_xi_density(flat2, id2, hyp, 0.3, CVec{cplx(1.0 + 1e-6, 0.0), cplx(0.4, 0.0)});
  CHECK(std::abs(near2 - past2) < 1e-4);
}

TEST_CASE("comparison form dominates its fubini-study floor") {
  auto hyp = target::parse_divisor("p2:hyp:3");
  Rng rng(99);
  for (double lambda : {0.5, 0.1, 0.02}) {
    for (int trial = 0; trial < 40; ++trial) {
      CVec u(2), zv(2);
      for (int i = 0; i < 2; ++i) {
        u[i] = 1.5 * cplx(rng.normal(), rng.normal());
        zv[i] = cplx(rng.normal(), rng.normal());
      }
      const CMat eta = smt::eta_matrix(hyp, lambda, u);
      const CMat H = target::fs_affine_matrix(u);
      // z^H eta z >= lambda (qd) z^H H z, and eta is Hermitian psd.
      cplx qe(0.0, 0.0), qh(0.0, 0.0);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          qe += std::conj(zv[a]) * eta(a, b) * zv[b];
          qh += std::conj(zv[a]) * H(a, b) * zv[b];
        }
      CHECK(std::abs(qe.imag()) < 1e-12 * std::abs(qe.real()));
      CHECK(qe.real() >= lambda * 3.0 * qh.real() * (1.0 - 1e-10));
      CHECK(std::abs(eta(0, 1) - std::conj(eta(1, 0))) < 1e-12);
    }
  }
}

TEST_CASE("probe ratio: divisor blowup and exponent bookkeeping") {
  auto pts = target::parse_divisor("p1:points=[0,inf,1]");
  CHECK(std::isinf(smt::log_probe_ratio(pts, 0.1, CVec{cplx(1.0, 0.0)})));
  const CVec u{cplx(0.4, 0.7)};
  for (double lambda : {0.5, 0.02}) {
    const double base = smt::log_probe_ratio(pts, lambda, u, 0);
    const double shifted = smt::log_probe_ratio(pts, lambda, u, 1);
    CHECK(shifted - base == doctest::Approx(std::log(lambda)).epsilon(1e-12));
  }
}

TEST_CASE("lang probe is deterministic and flat across lambda") {
  for (const auto* id : {"p1:points=[0,inf,1]", "p2:coords", "p2:hyp:3"}) {
    auto divisor = target::parse_divisor(id);
    auto probe = smt::lang_bound_probe(divisor, 2718, 150, 6);
    auto probe2 = smt::lang_bound_probe(divisor, 2718, 150, 6);
    CHECK(probe.b_hat == probe2.b_hat);
    CHECK(probe.b_hat > 0.0);
    REQUIRE(probe.lambda_grid.size() == probe.max_by_lambda.size());

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < probe.lambda_grid.size(); ++i) {
      const double l = probe.lambda_grid[i];
      if (l == 0.5 || l == 0.1 || l == 0.02) {
        lo = std::min(lo, probe.max_by_lambda[i]);
        hi = std::max(hi, probe.max_by_lambda[i]);
      }
    }
    CHECK(hi / lo < 10.0);
    CHECK(probe.b_hat >= hi);
  }
}

TEST_CASE("pointwise bound holds with the probed budget and breaks when mistuned") {
  auto model = geometry::parse_model("flat:1");
  auto map = target::parse_map("map:exp", 1);
  auto divisor = target::parse_divisor("p1:points=[0,inf]");
  const double b_hat = smt::lang_bound_probe(divisor, 7, 200, 8).b_hat;

  auto check = smt::xi_pointwise_check(model, map, divisor, 2.0 * b_hat, 11, 150);
  CHECK(check.ok);
  CHECK(check.max_ratio <= 1.0);
  CHECK(check.n_points > 0);

  auto broken = smt::xi_pointwise_check(model, map, divisor, 2.0 * b_hat, 11, 150, -1);
  CHECK_FALSE(broken.ok);
  CHECK(broken.max_ratio > 1.0);
}

TEST_CASE("occupation bound controls the path integral of xi^{1/m}") {
  auto model = geometry::parse_model("flat:1");
  auto map = target::parse_map("map:exp", 1);
  auto divisor = target::parse_divisor("p1:points=[0,inf]");
  const double b_hat = smt::lang_bound_probe(divisor, 7, 200, 8).b_hat;

  auto occ = smt::xi_occupation_check(model, map, divisor, 5.0, 2.0 * b_hat, 1200, 4711);
  CHECK(occ.ok);
  CHECK(occ.empirical <= occ.bound);
  CHECK(occ.T == doctest::Approx(2.0 * nevanlinna::characteristic_T(model, map, 1, 5.0))
                     .epsilon(1e-12));
  const double T_eff = std::max(occ.T, std::numbers::e);
  CHECK(occ.lambda == doctest::Approx(1.0 / T_eff).epsilon(1e-12));
  CHECK(occ.B == doctest::Approx((3.0 + std::log(2.0)) * 2.0 * b_hat).epsilon(1e-12));
  CHECK(occ.bound == doctest::Approx(occ.B * std::pow(T_eff, 2.0)).epsilon(1e-12));
}

TEST_CASE("stochastic current identity balances every characteristic") {
  auto model = geometry::parse_model("flat:1");
  auto map = target::parse_map("map:exp", 1);
  auto divisor = target::parse_divisor("p1:points=[0,inf]");
  auto idt = smt::current_identity_check(model, map, divisor, 0.1, 10.0, 1200, 2025);
  CHECK(idt.ok);
  CHECK(std::abs(idt.residual) <= idt.allowed);
  CHECK(idt.rhs == doctest::Approx(idt.t_canonical + idt.n_ram +
                                   0.9 * (2.0 * idt.t1 - idt.sum_N) + 0.5 * idt.t_ricci)
                       .epsilon(1e-12));
  CHECK(idt.t_ricci == 0.0);
}

TEST_CASE("inequality scan validates out of sample") {
  auto model = geometry::parse_model("flat:1");
  auto map = target::parse_map("map:exp", 1);
  auto divisor = target::parse_divisor("p1:points=[0,inf,1]");
  auto c = smt::smt_case(model, map, divisor, log_grid(3.0, 30.0, 10));
  CHECK(c.ok);
  CHECK(c.exceptional_fraction <= 0.05);
  CHECK(c.m == 1);
  CHECK(c.k == 1);
  CHECK(c.degree_total == 3);
  REQUIRE(c.rows.size() == 10);
  for (const auto& row : c.rows) {
    CHECK(row.TL == doctest::Approx(3.0 * row.T1).epsilon(1e-12));
    CHECK(row.lhs == doctest::Approx((3.0 - 2.0) * row.T1 - row.sum_N1).epsilon(1e-12));
  }
  CHECK_FALSE(std::isnan(c.beta));
  CHECK(c.beta < 1.2);

  auto sq_case = smt::smt_case(model, target::parse_map("map:sq", 1),
                               target::parse_divisor("p1:points=[1,-1]"),
                               log_grid(2.0, 50.0, 10));
  CHECK(sq_case.ok);

  auto curved = smt::smt_case(geometry::parse_model("chball:2"), target::parse_map("map:id", 2),
                              target::parse_divisor("p2:hyp:3"), log_grid(0.9, 3.5, 8));
  CHECK(curved.ok);
  CHECK(curved.exceptional_fraction <= 0.05);
}

TEST_CASE("catalog triples all parse and keep sane windows") {
  const auto& cases = smt::smt_catalog();
  CHECK(cases.size() == 9);
  for (const auto& entry : cases) {
    auto model = geometry::parse_model(entry.model);
    auto divisor = target::parse_divisor(entry.divisor);
    auto map = target::parse_map(entry.map, model.m);
    CHECK(map.n_target == divisor.n);
    CHECK(entry.r_min < entry.r_max);
    CHECK(entry.n_radii >= 8);
  }
}

TEST_CASE("defects of the exponential hit the sum bound") {
  auto model = geometry::parse_model("flat:1");
  auto radii = log_grid(3.0, 30.0, 12);
  auto rep = smt::defect_estimate(model, target::parse_map("map:exp", 1),
                                  target::parse_divisor("p1:points=[0,inf]"), radii);
  REQUIRE(rep.theta.size() == 2);
  CHECK(rep.theta[0] == 1.0);
  CHECK(rep.theta[1] == 1.0);
  CHECK(rep.sum == 2.0);
  CHECK(rep.bound == doctest::Approx(2.0));
  CHECK(rep.growth_ok);
  CHECK(rep.ok);

  auto ramified = smt::defect_estimate(model, target::parse_map("map:sq", 1),
                                       target::parse_divisor("p1:points=[1,-1]"),
                                       log_grid(2.0, 50.0, 12));
  CHECK(ramified.sum <= ramified.bound + 1e-9);
  for (double th : ramified.theta) CHECK(th < 0.2);
}

}  // TEST_SUITE
