#include <doctest.h>

#include <cmath>

#include "tas/error.hpp"
#include "tas/obstacle.hpp"
#include "tas/operators.hpp"
#include "tas/sandpile.hpp"

using namespace tas;

namespace {

struct Fixture {
  JumpLaw law;
  GreenEvaluator eval;
  explicit Fixture(int n)
      : law(build_jump_law({1.5, 1.0, 2.0, n})), eval(law, limit_constants(1.5, 1.0, 2.0)) {}
};

LatticeField point(int n, int half, double m) {
  LatticeField rho(n, Box::centered(half));
  rho.at(0, 0) = m;
  return rho;
}

}  // namespace

TEST_CASE("obstacle of the zero density") {
  Fixture f(2);
  const LatticeField rho(2, Box::centered(6));
  const LatticeField g = build_obstacle(rho, f.law, f.eval);
  for (int j = -6; j <= 6; ++j)
    for (int i = -6; i <= 6; ++i) CHECK(g.at(i, j) == -(double(i) * i + double(j) * j) / 4.0 / f.law.sigma2_n);
}

TEST_CASE("obstacle satisfies L gamma = rho - 1 and is symmetric") {
  Fixture f(1);
  const LatticeField rho = point(1, 15, 50.0);
  const LatticeField g = build_obstacle(rho, f.law, f.eval);
  const LatticeField Lg = apply_L_discrete_field(g, f.law);
  const Box inner = rho.box().shrunk(f.law.reach);
  for (int j = inner.j0; j <= inner.j1; ++j)
    for (int i = inner.i0; i <= inner.i1; ++i) CHECK(std::fabs(Lg.at(i, j) - (rho.at(i, j) - 1.0)) < 1e-9);
  for (int i = 0; i <= 6; ++i)
    for (int j = 0; j <= 6; ++j) {
      CHECK(g.at(i, j) == doctest::Approx(g.at(-i, j)).epsilon(1e-13));
      CHECK(g.at(i, j) == doctest::Approx(g.at(j, -i)).epsilon(1e-12));
    }
}

TEST_CASE("superharmonic and constant obstacles are their own majorants") {
  const JumpLaw law = build_jump_law({1.5, 1.0, 2.0, 1});
  for (int kind = 0; kind < 2; ++kind) {
    ObstacleProblem p;
    p.law = law;
    p.omega_box = Box::centered(8);
    p.gamma = LatticeField(1, p.omega_box.grown(law.reach));
    for (int j = p.gamma.box().j0; j <= p.gamma.box().j1; ++j)
      for (int i = p.gamma.box().i0; i <= p.gamma.box().i1; ++i)
        p.gamma.at(i, j) = kind == 0 ? -(double(i) * i + double(j) * j) : 2.5;
    p.rho = LatticeField(1, p.gamma.box());
    p.s = p.gamma;
    const MajorantReport r = solve_majorant(p);
    CHECK(p.s.values() == p.gamma.values());
    CHECK(odometer_from_obstacle(p).max() == 0.0);
    CHECK(r.monotone);
  }
}

TEST_CASE("obstacle route reproduces the simulated odometer") {
  Fixture f(1);
  const LatticeField rho = point(1, 15, 50.0);
  SandpileState s = initialize_from_field(rho, f.law);
  stabilize(s, f.law, {});
  for (MajorantScheme scheme : {MajorantScheme::jacobi, MajorantScheme::gauss_seidel}) {
    MajorantOptions o;
    o.scheme = scheme;
    const ObstacleSolution sol = solve_obstacle(rho, f.law, f.eval, o);
    const double umax = s.odometer.max();
    CHECK(LatticeField::sup_distance(sol.odometer, s.odometer) <= 1e-3 * umax);
    CHECK(LatticeField::sup_distance(sol.odometer, s.odometer) <= 1e-8 * umax);
    CHECK(LatticeField::sup_distance(sol.final_distribution, s.mass) <= 1e-6);
    CHECK(sol.final_distribution.sum() == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(sol.final_distribution.max() <= 1.0 + 1e-8);
    CHECK(sol.report.monotone);
    CHECK(sol.report.complementarity <= 10.0 * o.tol);
    CHECK(sol.report.clip == 0.0);
    CHECK(sol.odometer.min() >= 0.0);
  }
}

TEST_CASE("sub-unit density has zero odometer") {
  Fixture f(1);
  LatticeField rho(1, Box::centered(10));
  for (int j = -2; j <= 2; ++j)
    for (int i = -2; i <= 2; ++i) rho.at(i, j) = 0.8;
  const ObstacleSolution sol = solve_obstacle(rho, f.law, f.eval);
  CHECK(sol.odometer.max() <= 1e-9);
  CHECK(LatticeField::sup_distance(sol.final_distribution, sol.problem.rho) <= 1e-9);
}

TEST_CASE("Omega is enlarged when the odometer reaches its edge") {
  Fixture f(1);
  const LatticeField rho = point(1, 15, 50.0);
  const ObstacleSolution wide = solve_obstacle(rho, f.law, f.eval);
  const ObstacleSolution grown = solve_obstacle(rho, f.law, f.eval, {}, Box::centered(3));
  CHECK(grown.report.omega_doublings > 0);
  CHECK(LatticeField::sup_distance(wide.odometer, grown.odometer) <= 1e-8);
  MajorantOptions strict;
  strict.max_doublings = 0;
  CHECK_THROWS_AS(solve_obstacle(rho, f.law, f.eval, strict, Box::centered(3)), NonConvergent);
}

TEST_CASE("density outside Omega is rejected") {
  Fixture f(1);
  const LatticeField rho = point(1, 15, 5.0);
  CHECK_THROWS_AS(make_obstacle_problem(rho, f.law, f.eval, Box{2, 5, 2, 5}), UnboundedSupport);
}
