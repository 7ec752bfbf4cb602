#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tas/kernel.hpp"
#include "tas/lattice.hpp"
#include "tas/scenario.hpp"

namespace tas {

enum class SchedulePolicy { sweep, greedy, random, parallel };

std::string to_string(SchedulePolicy p);
SchedulePolicy schedule_policy_from_string(const std::string& s);

struct ToppleSchedule {
  SchedulePolicy policy = SchedulePolicy::sweep;
  std::uint64_t seed = 42;
  double tol = 1e-10;
  long long max_sweeps = 5'000'000;
  long long stall_sweeps = 20'000;  // sweeps without a new best max-excess before NonTermination
  long long checkpoint_every = 0;   // 0: ceil(box area / 1e4)
  bool allow_growth = true;         // enlarge the box when mass would leave it

  void validate() const;
  bool operator==(const ToppleSchedule&) const = default;
};

// Odometer convention: u(x) = n^{-alpha} * (mass emitted from x), the scaling
// for which nu = rho + L_{M,n} u and u = s - gamma hold exactly at every n.
struct SandpileState {
  int n = 1;
  LatticeField mass;
  LatticeField odometer;
  long long sweeps = 0;
  long long topplings = 0;
  double emitted_total = 0.0;
  int growths = 0;
};

struct InvariantLog {
  double initial_mass = 0.0;
  double max_mass_drift = 0.0;         // relative
  double max_second_moment_defect = 0.0;  // |W_k - W_0 - sum u_k| / W_0
  bool odometer_monotone = true;
  bool mass_nonnegative = true;
  int checkpoints = 0;
};

struct StabilizationReport {
  long long sweeps = 0;
  long long topplings = 0;
  double emitted_total = 0.0;
  double final_max_excess = 0.0;
  InvariantLog invariants;
};

SandpileState initialize_from_density(const Density& rho, int n, const JumpLaw& law);
SandpileState initialize_from_field(const LatticeField& rho, const JumpLaw& law);

// Legal toppling of a full site; returns the excess emitted.
double topple(SandpileState& state, int i, int j, const JumpLaw& law);

StabilizationReport stabilize(SandpileState& state, const JumpLaw& law, const ToppleSchedule& schedule);

// Serial reference of the two-phase parallel sweep (used for benchmarking and tests).
StabilizationReport stabilize_parallel_serial(SandpileState& state, const JumpLaw& law,
                                              const ToppleSchedule& schedule);

// sup over sites whose stencil stays in the box of |nu - rho - L_{M,n} u|.
double residual(const LatticeField& rho, const SandpileState& state, const JumpLaw& law);

// W = sum_x nu(x) |x|^2 / sigma^2_{M,n}, x in macroscopic units.
double second_moment(const LatticeField& mass, const JumpLaw& law);

}  // namespace tas
