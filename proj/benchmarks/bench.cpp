#include <benchmark/benchmark.h>

#include "grushin/bounds.hpp"
#include "grushin/carleman.hpp"
#include "grushin/sampling.hpp"
#include "grushin/ucp.hpp"

using namespace grushin;

namespace {

const GrushinSpace s111(1, 1, 1.0);

CoefficientPtr example(const GrushinSpace& s) { return std::make_shared<ExampleCoefficients>(s, ExampleParams{}); }

std::vector<Point> cloud(std::size_t n) {
  SampleSpec spec;
  spec.count = n;
  return sample_cloud(s111, spec);
}

}  // namespace

static void GaugeJets3(benchmark::State& st) {
  const auto pts = cloud(256);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(GaugeJets(s111, pts[i++ % pts.size()]).third(0, 1, 1));
}
BENCHMARK(GaugeJets3);

static void QuadOracleThirdDerivative(benchmark::State& st) {
  const auto pts = cloud(64);
  const ScalarField rho = rho_field(s111);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(fd_oracle(s111, rho, pts[i++ % pts.size()], {0, 1, 1}).value);
}
BENCHMARK(QuadOracleThirdDerivative);

static void BoundRatios(benchmark::State& st) {
  const auto A = example(s111);
  const auto pts = cloud(256);
  const auto tests = commutator_test_functions(s111);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(bound_ratios(*A, pts[i++ % pts.size()], tests));
}
BENCHMARK(BoundRatios);

static void CarlemanSweepOneFunction(benchmark::State& st) {
  const DegenerateOperator op(example(s111));
  const auto u = standard_suite(s111, 0.5).front();
  CarlemanSettings set;
  for (auto _ : st)
    benchmark::DoNotOptimize(evaluate_function(op, u, {CarlemanKind::est1, CarlemanKind::har1}, {20, 40, 80, 160}, set));
}
BENCHMARK(CarlemanSweepOneFunction)->Unit(benchmark::kMillisecond);

static void UcpLinearSolve(benchmark::State& st) {
  const DegenerateOperator op(example(s111));
  const FDGrid g{int(st.range(0)), 1.0};
  for (auto _ : st)
    benchmark::DoNotOptimize(solve_linear(op, PotentialSpec::bounded_kpsi(10), {0.25, 1.0}, oscillatory_boundary, g).residual);
  st.counters["unknowns"] = double(st.range(0) * st.range(0));
}
BENCHMARK(UcpLinearSolve)->Arg(33)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
