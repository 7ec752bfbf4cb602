#pragma once

#include <string>

#include "tas/green.hpp"
#include "tas/kernel.hpp"
#include "tas/lattice.hpp"
#include "tas/scenario.hpp"

namespace tas {

enum class MajorantScheme { jacobi, gauss_seidel };

std::string to_string(MajorantScheme s);
MajorantScheme majorant_scheme_from_string(const std::string& s);

struct MajorantOptions {
  MajorantScheme scheme = MajorantScheme::jacobi;
  double tol = 1e-10;                  // bound on the estimated distance to the fixed point
  long long max_iterations = 5'000'000;
  int max_doublings = 4;               // Omega enlargements before giving up
};

struct ObstacleProblem {
  LatticeField rho;    // on omega_box grown by the jump reach
  LatticeField gamma;  // same box
  LatticeField s;      // majorant, equal to gamma outside omega_box
  Box omega_box;
  JumpLaw law;
  double tol = 1e-10;
};

struct MajorantReport {
  long long iterations = 0;
  double final_change = 0.0;
  double contraction = 0.0;  // last observed ratio of successive changes
  bool monotone = true;      // iterates nondecreasing
  int omega_doublings = 0;
  double complementarity = 0.0;  // max over Omega of min(s - gamma, -L s / n^alpha)
  double clip = 0.0;             // largest negative s - gamma clipped away
};

// gamma_n(x) = -|x|^2 / sigma_{M,n}^2 - (1/n^2) sum_y G_{M,n}(x - y) rho_n(y) on the box of rho_field.
LatticeField build_obstacle(const LatticeField& rho_field, const JumpLaw& law, const GreenEvaluator& eval);

// Problem on Omega; rho is restricted or padded to Omega grown by the jump reach.
ObstacleProblem make_obstacle_problem(const LatticeField& rho_field, const JumpLaw& law, const GreenEvaluator& eval,
                                      const Box& omega, double tol = 1e-10);

// Projected iteration s <- max(gamma, P s) on Omega from s = gamma, P the jump
// average. Throws NonConvergent when the budget runs out.
MajorantReport solve_majorant(ObstacleProblem& problem, const MajorantOptions& options = {});

// u = s - gamma, negative round-off clipped to 0.
LatticeField odometer_from_obstacle(const ObstacleProblem& problem);

// nu = rho + L_{M,n} u.
LatticeField final_distribution_from_obstacle(const ObstacleProblem& problem);

struct ObstacleSolution {
  ObstacleProblem problem;
  MajorantReport report;
  LatticeField odometer;
  LatticeField final_distribution;
};

// Solve on the a-priori box, doubling Omega while the odometer reaches its edge.
ObstacleSolution solve_obstacle(const LatticeField& rho_field, const JumpLaw& law, const GreenEvaluator& eval,
                                const MajorantOptions& options = {}, Box omega = {0, -1, 0, -1});
ObstacleSolution solve_obstacle(const Density& rho, int n, const JumpLaw& law, const GreenEvaluator& eval,
                                const MajorantOptions& options = {});

}  // namespace tas
