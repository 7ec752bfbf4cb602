#include <doctest.h>

#include <cmath>

#include "tas/error.hpp"
#include "tas/experiments.hpp"
#include "tas/operators.hpp"
#include "tas/sandpile.hpp"

using namespace tas;

namespace {

JumpLaw law_at(int n) { return build_jump_law({1.5, 1.0, 2.0, n}); }

LatticeField point(int n, int half, double m) {
  LatticeField rho(n, Box::centered(half));
  rho.at(0, 0) = m;
  return rho;
}

}  // namespace

TEST_CASE("empty density is a no-op") {
  const JumpLaw law = law_at(1);
  Density d;
  d.support_radius = 1.0;
  SandpileState s = initialize_from_density(d, 1, law);
  const StabilizationReport r = stabilize(s, law, {});
  CHECK(r.topplings == 0);
  CHECK(s.odometer.max() == 0.0);
}

TEST_CASE("illegal topple") {
  const JumpLaw law = law_at(1);
  SandpileState s = initialize_from_field(point(1, 10, 1.0), law);
  CHECK_THROWS_AS(topple(s, 0, 0, law), IllegalTopple);
}

TEST_CASE("single topple of mass 2") {
  const JumpLaw law = law_at(2);
  const LatticeField rho = point(2, 20, 2.0);
  SandpileState s = initialize_from_field(rho, law);
  const double e = topple(s, 0, 0, law);
  CHECK(e == 1.0);
  CHECK(s.mass.at(0, 0) == 1.0);
  for (std::size_t k = 0; k < law.size(); ++k) CHECK(s.mass.at(law.support[k].dx, law.support[k].dy) == law.prob[k]);
  CHECK(s.mass.sum() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.odometer.at(0, 0) == doctest::Approx(1.0 / law.n_alpha()).epsilon(1e-15));
  CHECK(residual(rho, s, law) < 1e-15);
  // second moment grows by exactly e n^{-alpha}
  CHECK(second_moment(s.mass, law) - second_moment(rho, law) == doctest::Approx(e / law.n_alpha()).epsilon(1e-13));
}

TEST_CASE("sub-unit density does not topple") {
  const JumpLaw law = law_at(1);
  LatticeField rho(1, Box::centered(8));
  for (int j = -3; j <= 3; ++j)
    for (int i = -3; i <= 3; ++i) rho.at(i, j) = 0.9;
  SandpileState s = initialize_from_field(rho, law);
  CHECK(stabilize(s, law, {}).topplings == 0);
  CHECK(s.mass.values() == rho.values());
  CHECK(residual(rho, s, law) == 0.0);
}

TEST_CASE("point mass stabilizes with conservation and bounds") {
  for (int n : {1, 2}) {
    const JumpLaw law = law_at(n);
    const LatticeField rho = point(n, 20 * n, 50.0);
    SandpileState s = initialize_from_field(rho, law);
    ToppleSchedule sched;
    const StabilizationReport r = stabilize(s, law, sched);
    CHECK(s.mass.max() <= 1.0 + sched.tol);
    CHECK(s.mass.sum() == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(residual(rho, s, law) <= 10.0 * n * n * sched.tol);
    CHECK(r.invariants.odometer_monotone);
    CHECK(r.invariants.mass_nonnegative);
    CHECK(r.invariants.max_mass_drift <= 1e-12);
    CHECK(r.invariants.max_second_moment_defect <= 1e-8);
    CHECK(r.invariants.checkpoints >= 1);
  }
}

TEST_CASE("all schedules reach the same final state") {
  const JumpLaw law = law_at(1);
  const LatticeField rho = point(1, 20, 80.0);
  std::vector<SandpileState> out;
  for (SchedulePolicy p : {SchedulePolicy::sweep, SchedulePolicy::greedy, SchedulePolicy::random, SchedulePolicy::parallel}) {
    SandpileState s = initialize_from_field(rho, law);
    ToppleSchedule sched;
    sched.policy = p;
    stabilize(s, law, sched);
    out.push_back(s);
  }
  for (std::size_t k = 1; k < out.size(); ++k) {
    CHECK(LatticeField::sup_distance(out[0].mass, out[k].mass) <= 1e-8);
    CHECK(LatticeField::sup_distance(out[0].odometer, out[k].odometer) <= 1e-8);
  }
}

TEST_CASE("identical schedules are bitwise reproducible") {
  const JumpLaw law = law_at(1);
  const LatticeField rho = point(1, 20, 40.0);
  for (SchedulePolicy p : {SchedulePolicy::random, SchedulePolicy::greedy}) {
    ToppleSchedule sched;
    sched.policy = p;
    SandpileState a = initialize_from_field(rho, law), b = initialize_from_field(rho, law);
    stabilize(a, law, sched);
    stabilize(b, law, sched);
    CHECK(a.mass.values() == b.mass.values());
    CHECK(a.odometer.values() == b.odometer.values());
  }
}

TEST_CASE("two-phase schedule: OpenMP and serial reference agree bitwise") {
  const JumpLaw law = law_at(2);
  const LatticeField rho = point(2, 40, 120.0);
  ToppleSchedule sched;
  sched.policy = SchedulePolicy::parallel;
  SandpileState a = initialize_from_field(rho, law), b = initialize_from_field(rho, law);
  stabilize(a, law, sched);
  stabilize_parallel_serial(b, law, sched);
  CHECK(a.mass.values() == b.mass.values());
  CHECK(a.odometer.values() == b.odometer.values());
}

TEST_CASE("box growth") {
  const JumpLaw law = law_at(1);
  const LatticeField big = point(1, 20, 60.0);
  const LatticeField tiny = point(1, 3, 60.0);
  ToppleSchedule sched;
  SandpileState a = initialize_from_field(big, law), b = initialize_from_field(tiny, law);
  stabilize(a, law, sched);
  stabilize(b, law, sched);
  CHECK(b.growths > 0);
  CHECK(LatticeField::sup_distance(a.mass, b.mass) <= 1e-8);
  sched.allow_growth = false;
  SandpileState c = initialize_from_field(tiny, law);
  CHECK_THROWS_AS(stabilize(c, law, sched), OutOfBox);
}

TEST_CASE("two-mass scenario initial mass and box") {
  const JumpLaw law = law_at(1);
  const SandpileState s = initialize_from_density(two_mass_density(), 1, law);
  CHECK(s.mass.sum() == 2000.0);
  CHECK(s.mass.at(-12, 0) == 700.0);
  CHECK(s.mass.at(12, 0) == 1300.0);
  Density bad = two_mass_density();
  bad.support_radius = 5.0;
  CHECK_THROWS_AS(initialize_from_density(bad, 1, law), UnboundedSupport);
}

TEST_CASE("schedule validation and names") {
  ToppleSchedule s;
  s.tol = 0.0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  for (SchedulePolicy p : {SchedulePolicy::sweep, SchedulePolicy::greedy, SchedulePolicy::random, SchedulePolicy::parallel})
    CHECK(schedule_policy_from_string(to_string(p)) == p);
  CHECK_THROWS_AS(schedule_policy_from_string("heap"), ValidationError);
}
