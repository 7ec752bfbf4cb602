#include <benchmark/benchmark.h>

#include <cmath>

#include "tas/kernel.hpp"
#include "tas/operators.hpp"
#include "tas/sandpile.hpp"

namespace {

tas::LatticeField sample_field(int n, int half) {
  tas::LatticeField f(n, tas::Box::centered(half));
  for (int j = -half; j <= half; ++j)
    for (int i = -half; i <= half; ++i) f.at(i, j) = std::exp(-double(i * i + j * j) / (half * half));
  return f;
}

void BM_ApplyLSerial(benchmark::State& st) {
  const int n = int(st.range(0));
  const tas::JumpLaw law = tas::build_jump_law({1.5, 1.0, 2.0, n});
  const tas::LatticeField f = sample_field(n, 16 * n);
  for (auto _ : st) benchmark::DoNotOptimize(tas::apply_L_discrete_field_serial(f, law));
}

void BM_ApplyLParallel(benchmark::State& st) {
  const int n = int(st.range(0));
  const tas::JumpLaw law = tas::build_jump_law({1.5, 1.0, 2.0, n});
  const tas::LatticeField f = sample_field(n, 16 * n);
  for (auto _ : st) benchmark::DoNotOptimize(tas::apply_L_discrete_field(f, law));
}

tas::LatticeField point_mass(int n, double m) {
  tas::LatticeField rho(n, tas::Box::centered(12 * n));
  rho.at(0, 0) = m * n * n;
  return rho;
}

void BM_TwoPhaseSerial(benchmark::State& st) {
  const int n = int(st.range(0));
  const tas::JumpLaw law = tas::build_jump_law({1.5, 1.0, 2.0, n});
  tas::ToppleSchedule sched;
  sched.policy = tas::SchedulePolicy::parallel;
  for (auto _ : st) {
    tas::SandpileState s = tas::initialize_from_field(point_mass(n, 50.0), law);
    benchmark::DoNotOptimize(tas::stabilize_parallel_serial(s, law, sched));
  }
}

void BM_TwoPhaseParallel(benchmark::State& st) {
  const int n = int(st.range(0));
  const tas::JumpLaw law = tas::build_jump_law({1.5, 1.0, 2.0, n});
  tas::ToppleSchedule sched;
  sched.policy = tas::SchedulePolicy::parallel;
  for (auto _ : st) {
    tas::SandpileState s = tas::initialize_from_field(point_mass(n, 50.0), law);
    benchmark::DoNotOptimize(tas::stabilize(s, law, sched));
  }
}

void BM_RasterSweep(benchmark::State& st) {
  const int n = int(st.range(0));
  const tas::JumpLaw law = tas::build_jump_law({1.5, 1.0, 2.0, n});
  tas::ToppleSchedule sched;
  for (auto _ : st) {
    tas::SandpileState s = tas::initialize_from_field(point_mass(n, 50.0), law);
    benchmark::DoNotOptimize(tas::stabilize(s, law, sched));
  }
}

}  // namespace

BENCHMARK(BM_ApplyLSerial)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplyLParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TwoPhaseSerial)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TwoPhaseParallel)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RasterSweep)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
