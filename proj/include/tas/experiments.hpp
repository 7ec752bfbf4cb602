#pragma once

#include <string>
#include <vector>

#include "tas/config.hpp"
#include "tas/kernel.hpp"
#include "tas/sandpile.hpp"
#include "tas/scenario.hpp"

namespace tas {

// Two point masses 700 and 1300 at (-12, 0) and (12, 0), for n = 1.
Density two_mass_density();
// C^infinity bump of radius 1.5 and height 4 at the origin.
Density smooth_bump_density();
// Plateau test functions covering the interior, the free boundary and an off-center patch.
std::vector<PlateauBump> default_test_functions();

struct SimulationRun {
  int n = 1;
  JumpLaw law;
  LatticeField rho;
  SandpileState state;
  StabilizationReport report;
  double residual = 0.0;  // sup |nu - rho - L u|
  double mass_defect = 0.0;  // |sum nu - sum rho| / sum rho
  double seconds = 0.0;
};

SimulationRun run_simulation(const Density& rho, const KernelParams& kernel, int n, const ToppleSchedule& schedule);

struct WeakStarReport {
  std::vector<int> n_list;
  std::vector<PlateauBump> test_functions;
  std::vector<std::vector<double>> pairings;     // [n index][phi index]
  std::vector<std::vector<double>> differences;  // [phi index][k] = |P(n_{k+1}) - P(n_k)|
  std::vector<bool> strictly_decreasing;         // per phi
  std::vector<double> total_mass;                // per n
  bool pass = false;
};

WeakStarReport run_weak_star_experiment(const ExperimentConfig& config);

struct AbelianReport {
  std::vector<SchedulePolicy> policies;
  double max_nu_difference = 0.0;
  double max_u_difference = 0.0;
  double threshold = 0.0;  // 100 * tol
  bool pass = false;
};

// Stabilizes the scenario at n_list[0] under every configured policy.
AbelianReport run_abelian_check(const ExperimentConfig& config);

}  // namespace tas
