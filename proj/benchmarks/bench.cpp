#include <benchmark/benchmark.h>

#include <cmath>

#include "nevlab/comparison.hpp"
#include "nevlab/geometry.hpp"
#include "nevlab/quadrature.hpp"
#include "nevlab/rng.hpp"
#include "nevlab/smt.hpp"
#include "nevlab/stochastic.hpp"
#include "nevlab/target.hpp"
#include "nevlab/zeros.hpp"

using namespace nevlab;

static void BM_solve_G(benchmark::State& state) {
  const double a2 = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto sol = comparison::solve_G([a2](double) { return -a2; }, 10.0);
    benchmark::DoNotOptimize(sol.G.back());
  }
}
BENCHMARK(BM_solve_G)->Arg(1)->Arg(4);

static void BM_metric_at(benchmark::State& state) {
  const auto model = geometry::parse_model(state.range(0) == 1 ? "poincare" : "chball:2");
  CVec z(model.m);
  z[0] = cplx(0.3, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(geometry::metric_at(model, z));
  }
}
BENCHMARK(BM_metric_at)->Arg(1)->Arg(2);

static void BM_exit_path(benchmark::State& state) {
  const auto model = geometry::parse_model(state.range(0) == 1 ? "flat:1" : "chball:2");
  const double r = state.range(0) == 1 ? 2.0 : 0.8;
  const auto policy = stochastic::StepPolicy::for_exit_radius(r);
  std::uint64_t i = 0, steps = 0;
  for (auto _ : state) {
    Rng rng = Rng::substream(1234, i++);
    const auto sample = stochastic::simulate_exit(model, r, {}, rng, policy);
    steps += sample.steps;
    benchmark::DoNotOptimize(sample.exit_time);
  }
  state.counters["steps/s"] =
      benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_exit_path)->Arg(1)->Arg(2);

static void BM_log_xi_density(benchmark::State& state) {
  const auto model = geometry::parse_model("flat:2");
  const auto map = target::parse_map("map:id", 2);
  const auto divisor = target::parse_divisor("p2:hyp:3");
  const CVec z{cplx(0.7, 0.1), cplx(-0.2, 0.4)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(smt::log_xi_density(model, map, divisor, 0.1, z));
  }
}
BENCHMARK(BM_log_xi_density);

static void BM_ball_integral(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto rule = quadrature::sphere_rule(m, 8, 12);
  for (auto _ : state) {
    const double v = quadrature::ball_integral(
        m, 1.0, rule, [](const CVec& z) { return std::exp(-z.norm2()); }, 16);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_ball_integral)->Arg(1)->Arg(2);

static void BM_find_zeros(benchmark::State& state) {
  for (auto _ : state) {
    auto zs = zeros::find_zeros([](cplx z) { return std::exp(z) - 1.0; },
                                [](cplx z) { return std::exp(z); }, 15.0);
    benchmark::DoNotOptimize(zs.total());
  }
}
BENCHMARK(BM_find_zeros);

BENCHMARK_MAIN();
