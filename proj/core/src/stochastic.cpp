#include "nevlab/stochastic.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include "nevlab/rng.hpp"

namespace nevlab::stochastic {

namespace {

bool finite(const CVec& z) {
  for (int i = 0; i < z.size(); ++i)
    if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag())) return false;
  return true;
}

// Distance that treats points at or beyond the chart boundary as infinitely
// far. The exit sphere lies strictly inside the chart, so this makes the
// crossing predicate well defined even for a rare overshooting increment.
double dist_safe(const geometry::ManifoldModel& model, const CVec& z) {
  const double cr = model.chart_radius();
  if (std::isfinite(cr) && z.norm2() >= cr * cr)
    return std::numeric_limits<double>::infinity();
  return geometry::distance_to_base(model, z);
}

CVec lerp(const CVec& a, const CVec& b, double s) {
  CVec out(a.size());
  for (int i = 0; i < a.size(); ++i) out[i] = a[i] + s * (b[i] - a[i]);
  return out;
}

}  // namespace

ExitSample simulate_exit(const geometry::ManifoldModel& model, double r,
                         const std::vector<FunctionalSpec>& specs, Rng& rng,
                         const StepPolicy& policy) {
  if (!(r > 0.0)) throw std::invalid_argument("simulate_exit: radius must be positive");
  const int m = model.m;
  CVec z(m);
  double t = 0.0;

  ExitSample out;
  out.functional_values.assign(specs.size(), 0.0);
  out.clipped_time.assign(specs.size(), 0.0);

  // Left-endpoint rule for occupation integrals; time inside a singular mask
  // is dropped from the integral and accounted separately.
  auto accumulate = [&](const CVec& x, double dt) {
    for (std::size_t k = 0; k < specs.size(); ++k) {
      const FunctionalSpec& sp = specs[k];
      if (sp.kind != FunctionalSpec::Kind::Occupation) continue;
      if (sp.singular_distance && sp.singular_distance(x) < sp.delta_mask) {
        out.clipped_time[k] += dt;
      } else {
        out.functional_values[k] += sp.f(x) * dt;
      }
    }
  };

  for (std::uint64_t step = 0;; ++step) {
    if (step >= policy.max_steps) {
      out.abandoned = true;
      out.exit_point = z;
      out.exit_time = t;
      out.steps = step;
      return out;
    }

    const double gap = r - geometry::distance_to_base(model, z);
    double dt = std::min(policy.dt0, policy.shrink_c * gap * gap);
    dt = std::max(dt, policy.dt_min);

    const CMat C = geometry::diffusion_factor(model, z);
    CVec zeta(m);
    for (int i = 0; i < m; ++i) zeta[i] = cplx(rng.normal(), rng.normal());
    const CVec w = C * zeta;
    const double root_dt = std::sqrt(dt);
    CVec z_next(m);
    for (int i = 0; i < m; ++i) z_next[i] = z[i] + root_dt * w[i];
    if (!finite(z_next))
      throw std::runtime_error("simulate_exit: path state became non-finite");

    if (dist_safe(model, z_next) >= r) {
      // Bisect the crossing parameter along the last increment.
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (dist_safe(model, lerp(z, z_next, mid)) >= r) hi = mid; else lo = mid;
      }
      accumulate(z, hi * dt);
      t += hi * dt;
      out.exit_point = lerp(z, z_next, hi);
      out.exit_time = t;
      out.steps = step + 1;
      break;
    }

    accumulate(z, dt);
    t += dt;
    z = z_next;
  }

  for (std::size_t k = 0; k < specs.size(); ++k)
    if (specs[k].kind == FunctionalSpec::Kind::Hitting)
      out.functional_values[k] = specs[k].f(out.exit_point);
  return out;
}

EnsembleResult run_ensemble(const geometry::ManifoldModel& model, double r,
                            const std::vector<FunctionalSpec>& specs, std::uint64_t n_paths,
                            std::uint64_t seed, const StepPolicy& policy, int threads,
                            bool keep_exit_points) {
  if (n_paths == 0) throw std::invalid_argument("run_ensemble: n_paths must be positive");
  const std::size_t n = static_cast<std::size_t>(n_paths);
  const std::size_t n_specs = specs.size();

  EnsembleResult res;
  res.per_path.assign(n_specs, std::vector<double>(n, 0.0));
  res.exit_times.assign(n, 0.0);
  if (keep_exit_points) res.exit_points.assign(n, CVec());
  std::vector<std::vector<double>> clipped(n_specs, std::vector<double>(n, 0.0));
  std::atomic<std::uint64_t> abandoned{0};

  // Path i draws from substream i; a path that exhausts its step budget is
  // redrawn from substream i + attempt * n_paths, which keeps the resampling
  // deterministic for any thread count.
  constexpr int kMaxAttempts = 4;
  parallel_for(n, threads, [&](std::size_t i) {
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxAttempts)
        throw std::runtime_error("run_ensemble: a path hit the step budget repeatedly");
      Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i) +
                                         static_cast<std::uint64_t>(attempt) * n_paths);
      ExitSample s = simulate_exit(model, r, specs, rng, policy);
      if (s.abandoned) {
        abandoned.fetch_add(1, std::memory_order_relaxed);
        continue;
      }
      for (std::size_t k = 0; k < n_specs; ++k) {
        res.per_path[k][i] = s.functional_values[k];
        clipped[k][i] = s.clipped_time[k];
      }
      res.exit_times[i] = s.exit_time;
      if (keep_exit_points) res.exit_points[i] = s.exit_point;
      return;
    }
  });

  const std::uint64_t bad = abandoned.load();
  if (static_cast<double>(bad) > 0.01 * static_cast<double>(n_paths))
    throw std::runtime_error("run_ensemble: more than 1% of paths hit the step budget; "
                             "increase max_steps or reduce the radius");

  res.estimates.resize(n_specs);
  for (std::size_t k = 0; k < n_specs; ++k) {
    const MeanSe ms = mean_se(res.per_path[k]);
    McEstimate& e = res.estimates[k];
    e.mean = ms.mean;
    e.std_error = ms.se;
    e.n_paths = n_paths;
    e.clipped_time_mean = pairwise_sum(clipped[k]) / static_cast<double>(n);
    e.abandoned = bad;
  }
  {
    const MeanSe ms = mean_se(res.exit_times);
    res.exit_time.mean = ms.mean;
    res.exit_time.std_error = ms.se;
    res.exit_time.n_paths = n_paths;
    res.exit_time.abandoned = bad;
  }
  return res;
}

McEstimate estimate_occupation(const geometry::ManifoldModel& model, double r,
                               const FunctionalSpec& spec, std::uint64_t n_paths,
                               std::uint64_t seed, int threads) {
  auto res = run_ensemble(model, r, {spec}, n_paths, seed, StepPolicy::for_exit_radius(r),
                          threads);
  return res.estimates[0];
}

McEstimate estimate_hitting(const geometry::ManifoldModel& model, double r,
                            const std::function<double(const CVec&)>& psi, std::uint64_t n_paths,
                            std::uint64_t seed, int threads) {
  FunctionalSpec spec;
  spec.kind = FunctionalSpec::Kind::Hitting;
  spec.name = "hitting";
  spec.f = psi;
  auto res = run_ensemble(model, r, {spec}, n_paths, seed, StepPolicy::for_exit_radius(r),
                          threads);
  return res.estimates[0];
}

McEstimate dynkin_residual(const geometry::ManifoldModel& model, double r,
                           const geometry::SmoothField& u, std::uint64_t n_paths,
                           std::uint64_t seed, int threads) {
  FunctionalSpec occ;
  occ.kind = FunctionalSpec::Kind::Occupation;
  occ.name = "laplacian";
  occ.f = [&model, &u](const CVec& z) { return geometry::laplace_beltrami(model, u, z); };

  FunctionalSpec hit;
  hit.kind = FunctionalSpec::Kind::Hitting;
  hit.name = u.name;
  hit.f = u.value;

  auto res = run_ensemble(model, r, {occ, hit}, n_paths, seed,
                          StepPolicy::for_exit_radius(r), threads);
  const double u0 = u.value(CVec(model.m));

  const std::size_t n = res.per_path[0].size();
  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i)
    resid[i] = res.per_path[1][i] - u0 - 0.5 * res.per_path[0][i];

  const MeanSe ms = mean_se(resid);
  McEstimate e;
  e.mean = ms.mean;
  e.std_error = ms.se;
  e.n_paths = n_paths;
  e.abandoned = res.exit_time.abandoned;
  return e;
}

}  // namespace nevlab::stochastic
