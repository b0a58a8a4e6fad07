#include "nevlab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "nevlab/comparison.hpp"
#include "nevlab/geometry.hpp"
#include "nevlab/io.hpp"
#include "nevlab/nevanlinna.hpp"
#include "nevlab/quadrature.hpp"
#include "nevlab/smt.hpp"
#include "nevlab/stats.hpp"
#include "nevlab/stochastic.hpp"
#include "nevlab/target.hpp"

namespace nevlab::runner {

namespace {

using config::Config;

struct Sink {
  std::filesystem::path dir;
  std::string hash;
  std::uint64_t seed = 1;
  bool timestamp = true;
};

Sink prepare(const RunOptions& opts) {
  Sink s;
  s.hash = opts.cfg.hash_hex();
  s.seed = static_cast<std::uint64_t>(opts.cfg.get_int("seed", 1));
  s.dir = opts.out_root / (opts.subcommand + "-" + s.hash);
  std::filesystem::create_directories(s.dir);
  s.timestamp = !opts.reproducible;
  return s;
}

void require_seed(const Config& cfg, const std::string& what) {
  if (!cfg.has("seed"))
    throw std::invalid_argument("seed is required for " + what + " (pass --seed)");
}

std::string fmt1(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

// ---------------------------------------------------------------- ode-check

int run_ode_check(const RunOptions& opts) {
  const Config& cfg = opts.cfg;
  const Sink sink = prepare(opts);
  const int m = static_cast<int>(cfg.get_int("ode.m", 1));
  const double t_max = cfg.get_double("ode.t_max", 10.0);
  const double tol = cfg.get_double("ode.tol", 1e-10);

  struct Profile {
    std::string id;
    std::function<double(double)> kappa;
  };
  std::vector<Profile> profiles = {
      {"kappa=0", [](double) { return 0.0; }},
      {"kappa=-1", [](double) { return -1.0; }},
      {"kappa=-4", [](double) { return -4.0; }},
      {"kappa=-1/(1+t)^2", [](double t) { return -1.0 / ((1.0 + t) * (1.0 + t)); }},
  };
  if (cfg.has("model")) {
    const auto model = geometry::parse_model(cfg.require_string("model"));
    profiles.push_back({model.id() + ":kappa",
                        [model](double t) { return geometry::kappa_profile(model, t); }});
  }

  io::CsvWriter csv(sink.dir / "ode_check.csv", sink.hash, sink.seed, sink.timestamp);
  csv.header({"profile", "r", "G", "G_prime", "slack_lower", "slack_integral", "slack_upper"});

  bool all_ok = true;
  for (const auto& p : profiles) {
    const auto sol = comparison::solve_G(p.kappa, t_max, tol, 256, p.id);
    const auto rep = comparison::check_G_bounds(sol, p.kappa, m);

    double acc = 0.0;  // int_1^r G^{1-2m}, accumulated on the dense grid
    double prev_r = 1.0;
    io::Series s_g{p.id + " G", {}, {}}, s_lo{"t", {}, {}}, s_hi{"upper bound", {}, {}};
    for (std::size_t i = 0; i < sol.r_grid.size(); ++i) {
      const double r = sol.r_grid[i];
      if (r > 1.0) {
        acc += comparison::integral_G_power(sol, prev_r, r, m);
        prev_r = r;
      }
      const double upper = r * std::exp(r * std::sqrt(std::max(0.0, -p.kappa(r))));
      const double slack_lower = sol.G[i] - r;
      const double slack_integral = r >= 1.0 ? std::log(r) - acc : 0.0;
      const double slack_upper = upper - sol.G[i];
      csv.row_cells({p.id, io::format_double(r), io::format_double(sol.G[i]),
                     io::format_double(sol.G_prime[i]), io::format_double(slack_lower),
                     io::format_double(slack_integral), io::format_double(slack_upper)});
      s_g.x.push_back(r);
      s_g.y.push_back(sol.G[i]);
      s_lo.x.push_back(r);
      s_lo.y.push_back(r);
      s_hi.x.push_back(r);
      s_hi.y.push_back(upper);
    }
    io::PlotOptions po;
    po.title = "comparison solution, " + p.id;
    po.x_label = "r";
    po.y_label = "G";
    std::string slug = p.id;
    for (char& c : slug)
      if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    io::write_svg_plot(sink.dir / ("ode_" + slug + ".svg"), {s_g, s_lo, s_hi}, po);

    bool profile_ok = rep.ok;
    double sinh_err = 0.0;  // relative: 8 significant digits over the whole span
    if (p.id == "kappa=-1") {
      for (std::size_t i = 0; i < sol.r_grid.size(); ++i) {
        const double exact = std::sinh(sol.r_grid[i]);
        sinh_err = std::max(sinh_err, std::abs(sol.G[i] - exact) / std::max(1.0, exact));
      }
      profile_ok = profile_ok && sinh_err <= 1e-8;
    }
    std::cout << "ode-check " << p.id << ": slack_lower=" << fmt1(rep.slack_lower)
              << " slack_integral=" << fmt1(rep.slack_integral)
              << " slack_upper=" << fmt1(rep.slack_upper);
    if (p.id == "kappa=-1") std::cout << " sinh_err=" << fmt1(sinh_err);
    std::cout << (profile_ok ? "  [ok]" : "  [FAIL]") << "\n";
    all_ok = all_ok && profile_ok;
  }

  // Exceptional-set and growth-regulator demos from the same suite.
  {
    std::vector<double> rg, tv;
    for (int i = 0; i <= 200; ++i) {
      rg.push_back(1.0 + 9.0 * i / 200.0);
      tv.push_back(std::exp(rg.back()));
    }
    const auto scan = comparison::borel_check(rg, tv, 0.5);
    const auto F = comparison::calculus_F(std::exp(2.0), 0.0, 1.0, 1, 1.0);
    std::cout << "ode-check borel: violation=" << fmt1(scan.violation_measure) << " of span "
              << fmt1(scan.grid_span) << "; calculus_F(e^2)=" << fmt1(F.F)
              << " budget=" << fmt1(F.budget) << "\n";
  }
  return all_ok ? kExitOk : kExitCheckFailed;
}

// ----------------------------------------------------------------- bm-check

// Quadrature oracle for the occupation integral of a radial integrand:
// int_{B_r} g_r(o,x) f(|x|) dV.
double radial_green_integral(const geometry::ManifoldModel& model, double r,
                             const std::function<double(double)>& f) {
  const double s_max = geometry::chart_radius_of_sphere(model, r);
  const int m = model.m;
  auto integrand = [&](double s) {
    if (s <= 0.0) return 0.0;
    CVec z(m);
    z[0] = cplx(s, 0.0);
    const double green =
        comparison::green_radial(model, r, geometry::distance_to_base(model, z));
    const double detg = geometry::metric_at(model, z).det().real();
    return green * f(s) * detg * geometry::unit_sphere_area(m) * std::pow(s, 2 * m - 1);
  };
  return quadrature::integrate_graded(integrand, 0.0, s_max, 24);
}

int run_bm_check(const RunOptions& opts) {
  const Config& cfg = opts.cfg;
  require_seed(cfg, "bm-check");
  const Sink sink = prepare(opts);
  const auto model = geometry::parse_model(cfg.get_string("model", "flat:1"));
  const auto radii = cfg.get_list("bm.radii", {1.0, 2.0, 4.0});
  const auto n_paths = static_cast<std::uint64_t>(cfg.get_int("n_paths", 10000));

  io::CsvWriter csv(sink.dir / "bm_check.csv", sink.hash, sink.seed, sink.timestamp);
  csv.header({"name", "r", "mean", "se", "n_paths", "oracle", "z"});
  bool all_ok = true;
  auto emit = [&](const std::string& name, double r, double mean, double se, double oracle) {
    const double z = se > 0.0 ? (mean - oracle) / se : 0.0;
    csv.row_tagged(name, {r, mean, se, static_cast<double>(n_paths), oracle, z});
    const bool ok = std::abs(z) <= 3.0;
    std::cout << "bm-check " << name << " r=" << fmt1(r) << ": mean=" << fmt1(mean) << " oracle="
              << fmt1(oracle) << " z=" << fmt1(z) << (ok ? "  [ok]" : "  [FAIL]") << "\n";
    all_ok = all_ok && ok;
  };

  struct RadialSpec {
    std::string name;
    std::function<double(double)> f;
  };
  const std::vector<RadialSpec> occupations = {
      {"occ:s2", [](double s) { return s * s; }},
      {"occ:s4", [](double s) { return s * s * s * s; }},
      {"occ:gauss", [](double s) { return std::exp(-s * s); }},
      {"occ:cauchy", [](double s) { return 1.0 / (1.0 + s * s); }},
      {"occ:cos", [](double s) { return std::cos(s); }},
  };

  for (std::size_t ir = 0; ir < radii.size(); ++ir) {
    const double r = radii[ir];
    std::vector<stochastic::FunctionalSpec> specs;
    for (const auto& o : occupations) {
      stochastic::FunctionalSpec spec;
      spec.kind = stochastic::FunctionalSpec::Kind::Occupation;
      spec.name = o.name;
      spec.f = [f = o.f](const CVec& z) { return f(z.norm()); };
      specs.push_back(std::move(spec));
    }
    const auto policy = stochastic::StepPolicy::for_exit_radius(r);
    const auto ens = stochastic::run_ensemble(model, r, specs, n_paths, sink.seed + ir, policy,
                                              opts.threads);
    emit("exit_time", r, ens.exit_time.mean, ens.exit_time.std_error,
         nevanlinna::expected_exit_time(model, r));
    const double exit_bound = 2.0 * r * r / (2.0 * model.m - 1.0);
    const bool bound_ok =
        ens.exit_time.mean <= exit_bound + 3.0 * ens.exit_time.std_error;
    std::cout << "bm-check exit_bound r=" << fmt1(r) << ": mean=" << fmt1(ens.exit_time.mean)
              << " <= " << fmt1(exit_bound) << (bound_ok ? "  [ok]" : "  [FAIL]") << "\n";
    all_ok = all_ok && bound_ok;
    for (std::size_t i = 0; i < occupations.size(); ++i)
      emit(occupations[i].name, r, ens.estimates[i].mean, ens.estimates[i].std_error,
           radial_green_integral(model, r, occupations[i].f));

    std::vector<geometry::SmoothField> fields(3);
    fields[0].name = "norm2";
    fields[0].value = [](const CVec& z) { return z.norm2(); };
    fields[1].name = "re_z0";
    fields[1].value = [](const CVec& z) { return z[0].real(); };
    fields[2].name = "log1p_norm2";
    fields[2].value = [](const CVec& z) { return std::log1p(z.norm2()); };
    for (auto& f : fields)
      f.complex_hessian = [value = f.value](const CVec& z) {
        return geometry::fd_complex_hessian(value, z);
      };
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto res = stochastic::dynkin_residual(model, r, fields[i], n_paths,
                                                   sink.seed + 1000 + 10 * ir + i, opts.threads);
      emit("dynkin:" + fields[i].name, r, res.mean, res.std_error, 0.0);
    }
  }

  // Exit-law isotropy on the circle (the harmonic measure of the disk).
  if (model.m == 1) {
    const double r = cfg.get_double("bm.harmonic_r", 1.0);
    const auto n_h = static_cast<std::uint64_t>(cfg.get_int("bm.harmonic_paths", 100000));
    const int bins = 64;
    const auto policy = stochastic::StepPolicy::for_exit_radius(r);
    const auto ens = stochastic::run_ensemble(model, r, {}, n_h, sink.seed + 77, policy,
                                              opts.threads, true);
    std::vector<double> count(bins, 0.0);
    for (const auto& p : ens.exit_points) {
      double a = std::arg(p[0]) / (2.0 * std::numbers::pi) + 0.5;
      int b = std::min(bins - 1, static_cast<int>(a * bins));
      count[b] += 1.0;
    }
    const double mu = static_cast<double>(n_h) / bins;
    double chi2 = 0.0, worst = 0.0;
    for (int b = 0; b < bins; ++b) {
      chi2 += (count[b] - mu) * (count[b] - mu) / mu;
      worst = std::max(worst, (count[b] - mu) / std::sqrt(mu));
    }
    const double p_value = stats::chi2_sf(chi2, bins - 1);
    const double allowance = 3.42;  // 99% Poisson band with a Bonferroni factor over 64 bins
    const bool ok = p_value > 0.001 && worst <= allowance;
    csv.row_tagged("harmonic_chi2", {r, chi2, 0.0, static_cast<double>(n_h),
                                     static_cast<double>(bins - 1), 0.0});
    csv.row_tagged("harmonic_p", {r, p_value, 0.0, static_cast<double>(n_h), 0.0, 0.0});
    csv.row_tagged("harmonic_worst_bin_z", {r, worst, 0.0, static_cast<double>(n_h), 0.0, 0.0});
    std::cout << "bm-check harmonic r=" << fmt1(r) << ": chi2=" << fmt1(chi2) << " p="
              << fmt1(p_value) << " worst_bin_z=" << fmt1(worst)
              << (ok ? "  [ok]" : "  [FAIL]") << "\n";
    all_ok = all_ok && ok;
  }
  return all_ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------- fmt

int run_fmt(const RunOptions& opts) {
  const Config& cfg = opts.cfg;
  require_seed(cfg, "fmt");
  const Sink sink = prepare(opts);
  const auto model = geometry::parse_model(cfg.get_string("model", "flat:1"));
  const auto map = target::parse_map(cfg.get_string("map", "map:id"), model.m);
  const auto divisor = target::parse_divisor(cfg.get_string("divisor", "p1:points=[1]"));
  const double varsigma = cfg.get_double("varsigma", 0.5);
  const auto radii = config::radius_grid(cfg, 2.0, 50.0, 12);
  const auto n_paths = static_cast<std::uint64_t>(cfg.get_int("n_paths", 2000));

  const auto report = nevanlinna::fmt_check(model, map, divisor, varsigma, radii, n_paths,
                                            sink.seed, opts.threads);

  io::CsvWriter csv(sink.dir / "fmt.csv", sink.hash, sink.seed, sink.timestamp);
  csv.header({"component", "r", "T", "T_se", "m", "m_se", "N", "N1", "ricci", "ricci_se",
              "method", "residual", "predicted"});
  std::vector<io::Series> series;
  for (int j = 0; j < divisor.q(); ++j) {
    io::Series resid{divisor.components[j].label + " residual", {}, {}};
    io::Series pred{divisor.components[j].label + " predicted", {}, {}};
    for (const auto& row : report.rows) {
      const double ricci = nevanlinna::ricci_characteristic(model, row.r);
      csv.row_cells({divisor.components[j].label, io::format_double(row.r),
                     io::format_double(row.T), io::format_double(row.T_mc_se),
                     io::format_double(row.proximity[j]), io::format_double(row.proximity_se[j]),
                     io::format_double(row.N[j]), io::format_double(row.N_trunc[j]),
                     io::format_double(ricci), io::format_double(0.0), "quad+mc",
                     io::format_double(row.residual[j]),
                     io::format_double(report.predicted_constant[j])});
      resid.x.push_back(row.r);
      resid.y.push_back(row.residual[j]);
      pred.x.push_back(row.r);
      pred.y.push_back(report.predicted_constant[j]);
    }
    series.push_back(resid);
    series.push_back(pred);
    std::cout << "fmt " << divisor.components[j].label
              << ": max|residual-predicted|=" << fmt1(report.max_deviation[j])
              << " allowed=" << fmt1(report.max_allowed[j])
              << (report.max_deviation[j] <= report.max_allowed[j] ? "  [ok]" : "  [FAIL]")
              << "\n";
  }
  io::PlotOptions po;
  po.title = "first main identity residuals, " + model.id() + " " + map.id;
  po.x_label = "r";
  po.y_label = "m + N - T";
  io::write_svg_plot(sink.dir / "fmt_residuals.svg", series, po);
  return report.ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------- smt

int run_smt(const RunOptions& opts) {
  const Config& cfg = opts.cfg;
  const Sink sink = prepare(opts);
  const auto model = geometry::parse_model(cfg.get_string("model", "flat:1"));
  const auto map = target::parse_map(cfg.get_string("map", "map:exp"), model.m);
  const auto divisor =
      target::parse_divisor(cfg.get_string("divisor", "p1:points=[0,inf,1]"));
  const auto radii = config::radius_grid(cfg, 3.0, 30.0, 14);

  double b_hat = cfg.get_double("smt.b_hat", 0.0);
  if (b_hat <= 0.0) {
    const auto probe = smt::lang_bound_probe(divisor, sink.seed * 2 + 1);
    b_hat = probe.b_hat;
  }

  const auto result = smt::smt_case(model, map, divisor, radii);
  bool all_ok = result.ok;

  io::CsvWriter csv(sink.dir / "smt.csv", sink.hash, sink.seed, sink.timestamp);
  csv.header({"r", "T1", "TL", "sum_N", "sum_N1", "lhs", "rhs", "exceptional"});
  io::Series s_lhs{"lhs", {}, {}}, s_rhs{"rhs", {}, {}};
  io::PlotOptions po;
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& row = result.rows[i];
    csv.row({row.r, row.T1, row.TL, row.sum_N, row.sum_N1, row.lhs, row.rhs,
             row.exceptional ? 1.0 : 0.0});
    s_lhs.x.push_back(row.r);
    s_lhs.y.push_back(row.lhs);
    s_rhs.x.push_back(row.r);
    s_rhs.y.push_back(row.rhs);
    if (row.exceptional) {
      const double lo = i > 0 ? std::sqrt(result.rows[i - 1].r * row.r) : row.r;
      const double hi =
          i + 1 < result.rows.size() ? std::sqrt(row.r * result.rows[i + 1].r) : row.r;
      po.shaded_x.emplace_back(lo, hi);
    }
  }
  po.title = "second main inequality, " + model.id() + " " + map.id + " " + divisor.id;
  po.x_label = "r";
  po.y_label = "value";
  io::write_svg_plot(sink.dir / "smt.svg", {s_lhs, s_rhs}, po);

  std::cout << "smt summary {\"case\": \"" << result.model_id << "|" << result.map_id << "|"
            << result.divisor_id << "\", \"b_hat\": " << fmt1(b_hat)
            << ", \"a_fit\": " << fmt1(result.a_fit) << ", \"c_fit\": " << fmt1(result.c_fit)
            << ", \"exceptional_fraction\": " << fmt1(result.exceptional_fraction)
            << ", \"beta\": " << fmt1(result.beta) << "}"
            << (result.ok ? "  [ok]" : "  [FAIL]") << "\n";

  if (cfg.get_bool("smt.pointwise", true)) {
    const auto pw = smt::xi_pointwise_check(model, map, divisor, 2.0 * b_hat, sink.seed + 5,
                                            static_cast<int>(cfg.get_int("smt.pw_points", 200)));
    std::cout << "smt pointwise: max_ratio=" << fmt1(pw.max_ratio) << " budget="
              << fmt1(pw.budget) << " points=" << pw.n_points
              << (pw.ok ? "  [ok]" : "  [FAIL]") << "\n";
    all_ok = all_ok && pw.ok;
  }
  if (cfg.get_bool("smt.occupation", false)) {
    require_seed(cfg, "smt occupation check");
    const double r = cfg.get_double("smt.occ_r", radii[radii.size() / 2]);
    const auto n_paths = static_cast<std::uint64_t>(cfg.get_int("n_paths", 2000));
    const auto occ = smt::xi_occupation_check(model, map, divisor, r, 2.0 * b_hat, n_paths,
                                              sink.seed + 9, opts.threads);
    std::cout << "smt occupation r=" << fmt1(r) << ": empirical=" << fmt1(occ.empirical)
              << " bound=" << fmt1(occ.bound) << " clipped=" << fmt1(occ.clipped_time)
              << (occ.ok ? "  [ok]" : "  [FAIL]") << "\n";
    all_ok = all_ok && occ.ok;
  }
  if (cfg.get_bool("smt.identity", false)) {
    require_seed(cfg, "smt identity check");
    const double r = cfg.get_double("smt.id_r", radii[radii.size() / 2]);
    const double lambda = cfg.get_double("smt.lambda", 0.05);
    const auto n_paths = static_cast<std::uint64_t>(cfg.get_int("n_paths", 2000));
    const auto id = smt::current_identity_check(model, map, divisor, lambda, r, n_paths,
                                                sink.seed + 13, opts.threads);
    std::cout << "smt identity r=" << fmt1(r) << ": lhs=" << fmt1(id.lhs) << " rhs="
              << fmt1(id.rhs) << " residual=" << fmt1(id.residual) << " allowed="
              << fmt1(id.allowed) << (id.ok ? "  [ok]" : "  [FAIL]") << "\n";
    all_ok = all_ok && id.ok;
  }
  return all_ok ? kExitOk : kExitCheckFailed;
}

// ------------------------------------------------------------------- defect

int run_defect(const RunOptions& opts) {
  const Config& cfg = opts.cfg;
  const Sink sink = prepare(opts);
  const auto model = geometry::parse_model(cfg.get_string("model", "flat:1"));
  const auto map = target::parse_map(cfg.get_string("map", "map:exp"), model.m);
  const auto divisor = target::parse_divisor(cfg.get_string("divisor", "p1:points=[0,inf]"));
  const auto radii = config::radius_grid(cfg, 3.0, 30.0, 12);

  io::CsvWriter csv(sink.dir / "defect.csv", sink.hash, sink.seed, sink.timestamp);
  std::vector<std::string> head = {"r", "T1"};
  for (const auto& comp : divisor.components) head.push_back("ratio_" + comp.label);
  csv.header(head);
  std::vector<io::Series> series(divisor.q());
  for (int j = 0; j < divisor.q(); ++j)
    series[j].label = divisor.components[j].label;
  for (double r : radii) {
    const double T1 = nevanlinna::characteristic_T(model, map, 1, r);
    std::vector<double> row = {r, T1};
    for (int j = 0; j < divisor.q(); ++j) {
      const auto c = nevanlinna::counting_N(model, map, divisor.components[j].poly, r);
      const double ratio = c.N_trunc / (divisor.degree * T1);
      row.push_back(ratio);
      series[j].x.push_back(r);
      series[j].y.push_back(ratio);
    }
    csv.row(row);
  }
  io::PlotOptions po;
  po.title = "truncated counting ratios, " + model.id() + " " + map.id + " " + divisor.id;
  po.x_label = "r";
  po.y_label = "N1 / (d T1)";
  io::write_svg_plot(sink.dir / "defect.svg", series, po);

  const auto rep = smt::defect_estimate(model, map, divisor, radii);
  for (int j = 0; j < divisor.q(); ++j)
    std::cout << "defect " << divisor.components[j].label << ": theta=" << fmt1(rep.theta[j])
              << "\n";
  std::cout << "defect sum=" << fmt1(rep.sum) << " bound=" << fmt1(rep.bound)
            << " growth_ok=" << (rep.growth_ok ? "yes" : "no (bound not asserted)")
            << (rep.ok ? "  [ok]" : "  [FAIL]") << "\n";
  return rep.ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- calibrate

int run_calibrate(const RunOptions& opts) {
  const Sink sink = prepare(opts);
  nlohmann::json j;

  // Green comparison constants, frozen from probes at r(x) >= 2 eta.
  for (const std::string mid : {"flat:1", "flat:2", "poincare", "chball:2"}) {
    const auto model = geometry::parse_model(mid);
    const double r = model.is_flat() ? 10.0 : 6.0;
    const double eta = 1.0;
    const auto sol = comparison::solve_G(
        [&model](double t) { return geometry::kappa_profile(model, t); }, r, 1e-10, 256,
        mid + ":kappa");
    const std::vector<double> probe_radii = {2.0, 2.5, 3.0, 4.0, 5.0};
    const auto probe = comparison::green_comparison_probe(model, sol, eta, r, probe_radii);
    j["green_comparison"][mid] = {{"eta", probe.eta},
                                  {"r", probe.r},
                                  {"c_hat", probe.c_hat},
                                  {"frozen", probe.c_hat / 2.0},
                                  {"n_probes", probe.n_probes}};
    std::cout << "calibrate green " << mid << ": c_hat=" << fmt1(probe.c_hat) << "\n";
  }

  // Pointwise singular-volume constants per divisor, with the x2 safety
  // factor, and the derived occupation constants for the equidimensional case.
  for (const std::string did :
       {"p1:points=[0,inf,1]", "p1:points=[1,-1]", "p2:coords", "p2:hyp:3", "p2:hyp:4",
        "p1:fermat:4", "p2:fermat:3"}) {
    const auto divisor = target::parse_divisor(did);
    const auto probe = smt::lang_bound_probe(divisor, sink.seed * 2 + 1);
    const int n = divisor.n;
    const int q = divisor.q();
    const double frozen = 2.0 * probe.b_hat;
    const double B =
        (1.0 + q + q * std::log(2.0) / 2.0) * std::pow(frozen, 1.0 / n) / n;
    j["lang"][did] = {{"b_hat", probe.b_hat},
                      {"frozen", frozen},
                      {"B_frozen", B},
                      {"n_probes", probe.n_probes},
                      {"lambda_grid", probe.lambda_grid},
                      {"max_by_lambda", probe.max_by_lambda}};
    std::cout << "calibrate lang " << did << ": b_hat=" << fmt1(probe.b_hat)
              << " (probes=" << probe.n_probes << ")\n";
  }

  // Inequality-scan fits for the standard catalog.
  for (const auto& entry : smt::smt_catalog()) {
    const auto model = geometry::parse_model(entry.model);
    const auto map = target::parse_map(entry.map, model.m);
    const auto divisor = target::parse_divisor(entry.divisor);
    Config grid_cfg;
    grid_cfg.set("grid.r_min", io::format_double(entry.r_min));
    grid_cfg.set("grid.r_max", io::format_double(entry.r_max));
    grid_cfg.set("grid.count", std::to_string(entry.n_radii));
    const auto radii = config::radius_grid(grid_cfg, entry.r_min, entry.r_max, entry.n_radii);
    const auto result = smt::smt_case(model, map, divisor, radii);
    const std::string key = entry.model + "|" + entry.map + "|" + entry.divisor;
    j["smt_fits"][key] = {{"a_fit", result.a_fit},
                          {"c_fit", result.c_fit},
                          {"beta", std::isfinite(result.beta) ? result.beta : -1.0},
                          {"exceptional_fraction", result.exceptional_fraction},
                          {"ok", result.ok}};
    std::cout << "calibrate smt " << key << ": a=" << fmt1(result.a_fit)
              << " c=" << fmt1(result.c_fit) << " exc=" << fmt1(result.exceptional_fraction)
              << "\n";
  }

  std::ofstream out(sink.dir / "calibration.json");
  if (!out) throw std::runtime_error("cannot write calibration.json");
  out << j.dump(2) << "\n";
  std::cout << "calibrate: wrote " << (sink.dir / "calibration.json").string() << "\n";
  return kExitOk;
}

}  // namespace

int run(const RunOptions& opts) {
  if (opts.subcommand == "ode-check") return run_ode_check(opts);
  if (opts.subcommand == "bm-check") return run_bm_check(opts);
  if (opts.subcommand == "fmt") return run_fmt(opts);
  if (opts.subcommand == "smt") return run_smt(opts);
  if (opts.subcommand == "defect") return run_defect(opts);
  if (opts.subcommand == "calibrate") return run_calibrate(opts);
  throw std::invalid_argument("unknown subcommand: " + opts.subcommand);
}

}  // namespace nevlab::runner
