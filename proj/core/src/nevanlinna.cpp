#include "nevlab/nevanlinna.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nevlab/comparison.hpp"
#include "nevlab/quadrature.hpp"
#include "nevlab/zeros.hpp"

namespace nevlab::nevanlinna {

namespace {

double radial_distance(const geometry::ManifoldModel& model, double s) {
  CVec z(model.m);
  z[0] = s;
  return geometry::distance_to_base(model, z);
}

int circle_points(const geometry::ManifoldModel& model, double s_max, const TOptions& opts) {
  // Pulled-back densities of maps with exponential growth concentrate in an
  // angular window of width ~1/s, so the circle average refines with s_max.
  const int scaled = 24 * static_cast<int>(std::ceil(s_max));
  return std::max(opts.min_angles_1d, scaled);
}

quadrature::SphereRule sphere_rule_for(const geometry::ManifoldModel& model, double s_max,
                                       const TOptions& opts) {
  if (model.m == 1) return quadrature::sphere_rule(1, 1, circle_points(model, s_max, opts));
  return quadrature::sphere_rule(model.m, opts.action_panels, opts.angle_points);
}

// int_{|z| < s} e * det g  over the chart against Lebesgue measure
double energy_in_chart_ball(const geometry::ManifoldModel& model, const target::HoloMap& map,
                            int degree, double s, const quadrature::SphereRule& rule,
                            int panels) {
  auto shell = [&](double t) {
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      CVec z(model.m);
      for (int i = 0; i < model.m; ++i) z[i] = t * rule.points[k][i];
      acc += rule.weights[k] * target::chern_density(model, map, z, degree) *
             geometry::metric_at(model, z).det().real();
    }
    return acc * std::pow(t, 2 * model.m - 1);
  };
  return quadrature::integrate_graded(shell, 0.0, s, panels);
}

// Robin-type regularization of the Green weight at the base point:
//   robin(r) = lim_{s -> 0} [ pi g_r(dist(s)) + log s ],
// which is log r on the flat model. Zeros sitting at the base point enter the
// counting function with this weight (the first main identity stays exact).
double robin_constant(const geometry::ManifoldModel& model, double r) {
  const double s0 = 1e-8;
  return std::numbers::pi * comparison::green_radial(model, r, radial_distance(model, s0)) +
         std::log(s0);
}

struct LinearComponent {
  cplx c0;
  CVec normal;       // coefficients of w_1..w_m
  double norm = 0.0; // |normal|
};

LinearComponent linear_data(const target::HomogPoly& poly, int m) {
  if (poly.degree() != 1)
    throw std::invalid_argument("counting in m >= 2 needs hyperplane components");
  CVec w0(m + 1);
  const CVec c = poly.grad(w0);  // constant gradient of a linear form
  LinearComponent lin;
  lin.c0 = c[0];
  lin.normal = CVec(m);
  for (int i = 0; i < m; ++i) lin.normal[i] = c[i + 1];
  lin.norm = lin.normal.norm();
  return lin;
}

// Orthonormal basis whose first vector turns F = c0 + <normal, z> into
// c0 + |normal| * zeta along the first coordinate.
std::vector<CVec> slice_frame(const CVec& normal) {
  const int m = normal.size();
  CVec v(m);
  for (int i = 0; i < m; ++i) v[i] = std::conj(normal[i]) / normal.norm();
  std::vector<CVec> basis{v};
  for (int i = 0; i < m && static_cast<int>(basis.size()) < m; ++i) {
    CVec e(m);
    e[i] = 1.0;
    for (const auto& b : basis) {
      const cplx c = hdot(e, b);
      for (int k = 0; k < m; ++k) e[k] -= c * b[k];
    }
    const double n = e.norm();
    if (n < 1e-6) continue;
    for (int k = 0; k < m; ++k) e[k] /= n;
    basis.push_back(e);
  }
  if (static_cast<int>(basis.size()) != m)
    throw std::runtime_error("slice_frame: could not complete the basis");
  return basis;
}

CVec slice_point(const std::vector<CVec>& frame, const cplx& zeta, double rho) {
  const int m = frame[0].size();
  CVec z(m);
  for (int i = 0; i < m; ++i) z[i] = zeta * frame[0][i] + (m > 1 ? rho * frame[1][i] : 0.0);
  return z;
}

double transverse_angular_factor(int m, double rho) {
  // Lebesgue measure of C^{m-1} in polar form: 2 pi rho (m=2), 2 pi^2 rho^3 (m=3)
  if (m == 2) return 2.0 * std::numbers::pi * rho;
  return 2.0 * std::numbers::pi * std::numbers::pi * rho * rho * rho;
}

}  // namespace

double expected_exit_time(const geometry::ManifoldModel& model, double r) {
  auto ball_volume = [&](double t) {
    return quadrature::integrate([&](double s) { return geometry::sphere_area(model, s); }, 0.0,
                                 t, 12);
  };
  auto integrand = [&](double t) {
    return t == 0.0 ? 0.0 : ball_volume(t) / geometry::sphere_area(model, t);
  };
  return 2.0 * quadrature::integrate(integrand, 0.0, r, 24);
}

double characteristic_T(const geometry::ManifoldModel& model, const target::HoloMap& map,
                        int degree, double r, const TOptions& opts) {
  const double s_max = geometry::chart_radius_of_sphere(model, r);
  const auto rule = sphere_rule_for(model, s_max, opts);
  auto shell = [&](double s) {
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      CVec z(model.m);
      for (int i = 0; i < model.m; ++i) z[i] = s * rule.points[k][i];
      acc += rule.weights[k] * target::chern_density(model, map, z, degree) *
             geometry::metric_at(model, z).det().real();
    }
    return acc * std::pow(s, 2 * model.m - 1) *
           comparison::green_radial(model, r, radial_distance(model, s));
  };
  return 0.5 * quadrature::integrate_graded(shell, 0.0, s_max, opts.radial_panels);
}

double characteristic_T_shell(const geometry::ManifoldModel& model, const target::HoloMap& map,
                              int degree, double r, const TOptions& opts) {
  const auto rule = sphere_rule_for(model, geometry::chart_radius_of_sphere(model, r), opts);
  auto integrand = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double s = geometry::chart_radius_of_sphere(model, t);
    const double A = energy_in_chart_ball(model, map, degree, s, rule, 16);
    return A / geometry::sphere_area(model, t);
  };
  return quadrature::integrate(integrand, 0.0, r, 12);
}

stochastic::McEstimate characteristic_T_mc(const geometry::ManifoldModel& model,
                                           const target::HoloMap& map, int degree, double r,
                                           std::uint64_t n_paths, std::uint64_t seed,
                                           int threads) {
  stochastic::FunctionalSpec spec;
  spec.kind = stochastic::FunctionalSpec::Kind::Occupation;
  spec.name = "chern_energy";
  spec.f = [&model, &map, degree](const CVec& z) {
    return target::chern_density(model, map, z, degree);
  };
  auto est = stochastic::estimate_occupation(model, r, spec, n_paths, seed, threads);
  est.mean *= 0.5;
  est.std_error *= 0.5;
  return est;
}

double canonical_characteristic(const geometry::ManifoldModel& model, const target::HoloMap& map,
                                double r, const TOptions& opts) {
  return -(map.n_target + 1) * characteristic_T(model, map, 1, r, opts);
}

double ricci_characteristic(const geometry::ManifoldModel& model, double r) {
  // s_M is constant on the homogeneous models, so the occupation integral is
  // the scalar curvature times the expected exit time.
  const CVec o(model.m);
  return geometry::scalar_curvature(model, o) * expected_exit_time(model, r);
}

stochastic::McEstimate ricci_characteristic_mc(const geometry::ManifoldModel& model, double r,
                                               std::uint64_t n_paths, std::uint64_t seed,
                                               int threads) {
  stochastic::FunctionalSpec spec;
  spec.kind = stochastic::FunctionalSpec::Kind::Occupation;
  spec.name = "scalar_curvature";
  spec.f = [&model](const CVec& z) { return geometry::scalar_curvature(model, z); };
  return stochastic::estimate_occupation(model, r, spec, n_paths, seed, threads);
}

stochastic::McEstimate proximity_mc(const geometry::ManifoldModel& model,
                                    const target::HoloMap& map, const target::LineBundleFS& bundle,
                                    const target::HomogPoly& poly, double r, std::uint64_t n_paths,
                                    std::uint64_t seed, int threads) {
  return stochastic::estimate_hitting(
      model, r,
      [&](const CVec& z) { return -target::log_section_norm(bundle, poly, map.lift(z)); },
      n_paths, seed, threads);
}

CountingResult counting_N(const geometry::ManifoldModel& model, const target::HoloMap& map,
                          const target::HomogPoly& poly, double r) {
  CountingResult out;
  if (model.m == 1) {
    const double s_max = geometry::chart_radius_of_sphere(model, r);
    const auto zs = zeros::find_zeros(target::composed_scalar(poly, map),
                                      target::composed_scalar_derivative(poly, map), s_max);
    out.zeros_found = static_cast<int>(zs.zeros.size());
    out.order_at_origin = zs.order_at_origin;
    out.boundary_adjusted = zs.boundary_adjusted;
    if (zs.order_at_origin > 0) {
      const double w = robin_constant(model, r);
      out.N += zs.order_at_origin * w;
      out.N_trunc += w;
    }
    for (const auto& z : zs.zeros) {
      const double d = geometry::distance_to_base(model, CVec{z.location});
      const double w = std::numbers::pi * comparison::green_radial(model, r, d);
      out.N += z.multiplicity * std::max(w, 0.0);
      out.N_trunc += std::max(w, 0.0);
    }
    return out;
  }

  if (map.id != "map:id")
    throw std::invalid_argument("counting in m >= 2 needs the identity embedding");
  const int m = model.m;
  const auto lin = linear_data(poly, m);
  if (lin.norm == 0.0) return out;  // zero set is the chart hyperplane at infinity
  const cplx zeta0 = -lin.c0 / lin.norm;
  const double s_max = geometry::chart_radius_of_sphere(model, r);
  if (std::abs(zeta0) >= s_max) return out;
  if (std::abs(zeta0) < 1e-12)
    throw std::invalid_argument("counting: solution slice passes through the base point");

  const auto frame = slice_frame(lin.normal);
  const double rho_max = std::sqrt(s_max * s_max - std::norm(zeta0));
  auto density = [&](double rho) {
    const CVec z = slice_point(frame, zeta0, rho);
    const CMat G = geometry::metric_at(model, z);
    // induced Hermitian form on the slice tangents frame[1..m-1]
    CMat H(m - 1, m - 1);
    for (int a = 1; a < m; ++a)
      for (int b = 1; b < m; ++b) {
        cplx s(0.0, 0.0);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) s += G(i, j) * frame[a][i] * std::conj(frame[b][j]);
        H(a - 1, b - 1) = s;
      }
    const double green = comparison::green_radial(model, r, geometry::distance_to_base(model, z));
    return H.det().real() * transverse_angular_factor(m, rho) * std::max(green, 0.0);
  };
  out.N = std::numbers::pi * quadrature::integrate(density, 0.0, rho_max, 24);
  out.N_trunc = out.N;  // transverse hyperplane slices are reduced
  return out;
}

double counting_N_smoothed(const geometry::ManifoldModel& model, const target::HoloMap& map,
                           const target::HomogPoly& poly, double r, double eps) {
  if (model.m == 1)
    throw std::invalid_argument("smoothed counting is the m >= 2 verification route");
  if (map.id != "map:id")
    throw std::invalid_argument("smoothed counting needs the identity embedding");
  const int m = model.m;
  const auto lin = linear_data(poly, m);
  if (lin.norm == 0.0) return 0.0;
  const cplx zeta0 = -lin.c0 / lin.norm;
  const auto frame = slice_frame(lin.normal);
  const double s_max = geometry::chart_radius_of_sphere(model, r);

  auto tube = [&](const cplx& zeta) {
    const double z2 = std::norm(zeta);
    if (z2 >= s_max * s_max * (1.0 - 1e-14)) return 0.0;
    const double rho_max = std::sqrt(s_max * s_max - z2);
    auto w = [&](double rho) {
      const CVec z = slice_point(frame, zeta, rho);
      const CMat Ginv = geometry::inverse_metric_at(model, z);
      const double detg = geometry::metric_at(model, z).det().real();
      cplx F = lin.c0;
      for (int i = 0; i < m; ++i) F += lin.normal[i] * z[i];
      cplx Q(0.0, 0.0);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) Q += Ginv(j, i) * lin.normal[i] * std::conj(lin.normal[j]);
      const double D = std::norm(F) + eps * eps;
      const double green =
          comparison::green_radial(model, r, geometry::distance_to_base(model, z));
      return std::max(green, 0.0) * eps * eps * Q.real() * detg / (D * D) *
             transverse_angular_factor(m, rho);
    };
    return quadrature::integrate(w, 0.0, rho_max, 12);
  };
  return quadrature::polar_integral(tube, zeta0, eps / lin.norm, std::abs(zeta0) + s_max, 48);
}

CountingResult counting_ramification(const geometry::ManifoldModel& model,
                                     const target::HoloMap& map, double r) {
  CountingResult out;
  if (map.id == "map:id") return out;  // linear chart embedding, no ramification
  if (model.m != 1)
    throw std::invalid_argument("ramification counting is implemented for m = 1 maps");
  auto jac = [map](cplx z) {
    const CVec w = map.lift(CVec{z});
    const CMat dw = map.lift_jac(CVec{z});
    return target::chart_jacobian(w, dw, 0).det();
  };
  auto djac = [jac](cplx z) {
    const double h = 1e-6 * (1.0 + std::abs(z));
    return (jac(z + h) - jac(z - h)) / (2.0 * h);
  };
  const double s_max = geometry::chart_radius_of_sphere(model, r);
  const auto zs = zeros::find_zeros(jac, djac, s_max);
  out.zeros_found = static_cast<int>(zs.zeros.size());
  out.order_at_origin = zs.order_at_origin;
  out.boundary_adjusted = zs.boundary_adjusted;
  if (zs.order_at_origin > 0) {
    const double w = robin_constant(model, r);
    out.N += zs.order_at_origin * w;
    out.N_trunc += w;
  }
  for (const auto& z : zs.zeros) {
    const double d = geometry::distance_to_base(model, CVec{z.location});
    const double w = std::numbers::pi * comparison::green_radial(model, r, d);
    out.N += z.multiplicity * std::max(w, 0.0);
    out.N_trunc += std::max(w, 0.0);
  }
  return out;
}

FmtReport fmt_check(const geometry::ManifoldModel& model, const target::HoloMap& map,
                    const target::SncDivisor& divisor, double varsigma,
                    const std::vector<double>& radii, std::uint64_t n_paths, std::uint64_t seed,
                    int threads, const TOptions& opts) {
  const int q = divisor.q();
  target::LineBundleFS bundle{divisor.degree, varsigma};
  FmtReport report;

  // Reference constants -log||s_j(f(o))||; a base point on the divisor is
  // regularized consistently with the counting function's origin weight.
  const CVec o(model.m);
  for (int j = 0; j < q; ++j) {
    const double at_o = target::log_section_norm(bundle, divisor.components[j].poly, map.lift(o));
    if (std::isfinite(at_o)) {
      report.predicted_constant.push_back(-at_o);
    } else {
      const auto c = counting_N(model, map, divisor.components[j].poly, radii.front());
      CVec z_eval(model.m);
      z_eval[0] = 1e-6;
      const double near_o =
          target::log_section_norm(bundle, divisor.components[j].poly, map.lift(z_eval));
      report.predicted_constant.push_back(-(near_o - c.order_at_origin * std::log(1e-6)));
    }
  }

  std::vector<stochastic::FunctionalSpec> specs;
  {
    stochastic::FunctionalSpec occ;
    occ.kind = stochastic::FunctionalSpec::Kind::Occupation;
    occ.name = "chern_energy";
    occ.f = [&model, &map, &divisor](const CVec& z) {
      return target::chern_density(model, map, z, divisor.degree);
    };
    specs.push_back(occ);
    for (int j = 0; j < q; ++j) {
      stochastic::FunctionalSpec hit;
      hit.kind = stochastic::FunctionalSpec::Kind::Hitting;
      hit.name = divisor.components[j].label;
      const target::HomogPoly poly = divisor.components[j].poly;
      hit.f = [&model, &map, bundle, poly](const CVec& z) {
        return -target::log_section_norm(bundle, poly, map.lift(z));
      };
      specs.push_back(hit);
    }
  }

  std::vector<double> worst_dev(q, 0.0), worst_allowed(q, 0.0);
  for (std::size_t ir = 0; ir < radii.size(); ++ir) {
    const double r = radii[ir];
    FmtRow row;
    row.r = r;
    row.T = divisor.degree * characteristic_T(model, map, 1, r, opts);
    auto ens = stochastic::run_ensemble(model, r, specs, n_paths, seed + ir,
                                        stochastic::StepPolicy::for_exit_radius(r), threads);
    row.T_mc = 0.5 * ens.estimates[0].mean;
    row.T_mc_se = 0.5 * ens.estimates[0].std_error;
    row.exit_time = ens.exit_time.mean;
    row.exit_time_se = ens.exit_time.std_error;
    for (int j = 0; j < q; ++j) {
      row.proximity.push_back(ens.estimates[1 + j].mean);
      row.proximity_se.push_back(ens.estimates[1 + j].std_error);
      const auto c = counting_N(model, map, divisor.components[j].poly, r);
      row.N.push_back(c.N);
      row.N_trunc.push_back(c.N_trunc);
      const double resid = row.proximity[j] + c.N - row.T;
      row.residual.push_back(resid);
      const double dev = std::abs(resid - report.predicted_constant[j]);
      const double allowed = 3.0 * row.proximity_se[j] + 0.025 * (1.0 + 0.1 * std::abs(row.T));
      if (dev > worst_dev[j]) worst_dev[j] = dev;
      if (allowed > worst_allowed[j]) worst_allowed[j] = allowed;
      if (dev > allowed) report.ok = false;
    }
    report.rows.push_back(std::move(row));
  }
  report.max_deviation = worst_dev;
  report.max_allowed = worst_allowed;
  return report;
}

}  // namespace nevlab::nevanlinna
