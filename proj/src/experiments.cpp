#include "tas/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "tas/error.hpp"

namespace tas {

Density two_mass_density() {
  Density d;
  d.points = {{-12.0, 0.0, 700.0}, {12.0, 0.0, 1300.0}};
  d.support_radius = 12.5;
  return d;
}

Density smooth_bump_density() {
  Density d;
  d.bumps = {{0.0, 0.0, 1.5, 4.0}};
  d.support_radius = 1.5;
  return d;
}

std::vector<PlateauBump> default_test_functions() {
  return {{0.0, 0.0, 0.5, 1.0}, {1.5, 0.0, 0.3, 0.9}, {0.8, 0.8, 0.2, 0.6}};
}

SimulationRun run_simulation(const Density& rho, const KernelParams& kernel, int n, const ToppleSchedule& schedule) {
  const auto t0 = std::chrono::steady_clock::now();
  SimulationRun run;
  run.n = n;
  KernelParams p = kernel;
  p.n = n;
  run.law = build_jump_law(p);
  run.state = initialize_from_density(rho, n, run.law);
  run.rho = run.state.mass;
  run.report = stabilize(run.state, run.law, schedule);
  run.residual = residual(run.rho, run.state, run.law);
  const double m0 = run.rho.sum();
  run.mass_defect = m0 > 0.0 ? std::fabs(run.state.mass.sum() - m0) / m0 : 0.0;
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

WeakStarReport run_weak_star_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  WeakStarReport rep;
  rep.n_list = cfg.n_list;
  rep.test_functions = cfg.test_functions.empty() ? default_test_functions() : cfg.test_functions;
  for (int n : cfg.n_list) {
    const SimulationRun run = run_simulation(cfg.scenario, cfg.kernel, n, cfg.schedule);
    std::vector<double> row;
    for (const PlateauBump& phi : rep.test_functions) row.push_back(pair_with(run.state.mass, phi));
    rep.pairings.push_back(row);
    rep.total_mass.push_back(run.state.mass.sum() / (double(n) * n));
  }
  rep.pass = rep.n_list.size() >= 3;
  for (std::size_t f = 0; f < rep.test_functions.size(); ++f) {
    std::vector<double> d;
    for (std::size_t k = 0; k + 1 < rep.pairings.size(); ++k)
      d.push_back(std::fabs(rep.pairings[k + 1][f] - rep.pairings[k][f]));
    bool dec = true;
    for (std::size_t k = 0; k + 1 < d.size(); ++k) dec = dec && d[k + 1] < d[k];
    rep.differences.push_back(d);
    rep.strictly_decreasing.push_back(dec);
    rep.pass = rep.pass && dec;
  }
  return rep;
}

AbelianReport run_abelian_check(const ExperimentConfig& cfg) {
  cfg.validate();
  AbelianReport rep;
  rep.policies = cfg.abelian_policies;
  rep.threshold = 100.0 * cfg.schedule.tol;
  std::vector<SandpileState> states;
  for (SchedulePolicy pol : cfg.abelian_policies) {
    ToppleSchedule s = cfg.schedule;
    s.policy = pol;
    states.push_back(run_simulation(cfg.scenario, cfg.kernel, cfg.n_list.front(), s).state);
  }
  for (std::size_t a = 0; a < states.size(); ++a)
    for (std::size_t b = a + 1; b < states.size(); ++b) {
      rep.max_nu_difference =
          std::max(rep.max_nu_difference, LatticeField::sup_distance(states[a].mass, states[b].mass));
      rep.max_u_difference =
          std::max(rep.max_u_difference, LatticeField::sup_distance(states[a].odometer, states[b].odometer));
    }
  rep.pass = rep.max_nu_difference <= rep.threshold && rep.max_u_difference <= rep.threshold;
  return rep;
}

}  // namespace tas
