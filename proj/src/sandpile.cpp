#include "tas/sandpile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tas/error.hpp"
#include "tas/kahan.hpp"
#include "tas/operators.hpp"

namespace tas {

std::string to_string(SchedulePolicy p) {
  switch (p) {
    case SchedulePolicy::sweep: return "sweep";
    case SchedulePolicy::greedy: return "greedy";
    case SchedulePolicy::random: return "random";
    case SchedulePolicy::parallel: return "parallel";
  }
  return "sweep";
}

SchedulePolicy schedule_policy_from_string(const std::string& s) {
  if (s == "sweep" || s == "raster") return SchedulePolicy::sweep;
  if (s == "greedy") return SchedulePolicy::greedy;
  if (s == "random") return SchedulePolicy::random;
  if (s == "parallel") return SchedulePolicy::parallel;
  throw ValidationError("unknown schedule policy '" + s + "'");
}

void ToppleSchedule::validate() const {
  if (!(tol > 0.0)) throw ValidationError("schedule tol must be positive");
  if (max_sweeps < 1) throw ValidationError("schedule max_sweeps must be positive");
  if (stall_sweeps < 1) throw ValidationError("schedule stall_sweeps must be positive");
  if (checkpoint_every < 0) throw ValidationError("schedule checkpoint_every must be nonnegative");
}

SandpileState initialize_from_field(const LatticeField& rho, const JumpLaw& law) {
  if (rho.n() != law.params.n) throw MismatchedRefinement("density n differs from jump law n");
  for (double v : rho.values())
    if (v < 0.0) throw ValidationError("initial density must be nonnegative");
  SandpileState s;
  s.n = rho.n();
  s.mass = rho;
  s.mass.set_outside_value(0.0);
  s.odometer = LatticeField(rho.n(), rho.box());
  return s;
}

SandpileState initialize_from_density(const Density& rho, int n, const JumpLaw& law) {
  const Box box = default_box(rho, n, law.params.M);
  return initialize_from_field(sample_density(rho, n, box), law);
}

namespace {

// Grows the box so that the stencil around (i, j) fits.
void ensure_room(SandpileState& s, int i, int j, int reach, bool allow) {
  const Box inner = s.mass.box().shrunk(reach);
  if (inner.contains(i, j)) return;
  if (!allow) throw OutOfBox("toppling at (" + std::to_string(i) + "," + std::to_string(j) + ") leaves the box");
  const Box& b = s.mass.box();
  const int pad = std::max(reach, std::max(b.width(), b.height()) / 4);
  Box nb = Box::hull(b, Box{i - reach, i + reach, j - reach, j + reach}).grown(pad);
  s.mass = s.mass.reboxed(nb);
  s.odometer = s.odometer.reboxed(nb);
  ++s.growths;
}

void topple_unchecked(SandpileState& s, int i, int j, const JumpLaw& law, double na_inv) {
  double* m = s.mass.values().data();
  const std::size_t c = s.mass.index(i, j);
  const double e = m[c] - 1.0;
  m[c] = 1.0;
  const std::ptrdiff_t W = s.mass.box().width();
  for (std::size_t k = 0; k < law.support.size(); ++k)
    m[std::ptrdiff_t(c) + std::ptrdiff_t(law.support[k].dy) * W + law.support[k].dx] += e * law.prob[k];
  s.odometer.values()[c] += e * na_inv;
  s.emitted_total += e;
  ++s.topplings;
}

struct Checker {
  const JumpLaw& law;
  const ToppleSchedule& sched;
  InvariantLog log;
  double W0 = 0.0;
  LatticeField last_odometer;
  long long every = 1;

  Checker(const SandpileState& s, const JumpLaw& l, const ToppleSchedule& sc) : law(l), sched(sc) {
    log.initial_mass = s.mass.sum();
    W0 = second_moment(s.mass, law);
    last_odometer = s.odometer;
    every = sc.checkpoint_every > 0 ? sc.checkpoint_every
                                    : std::max<long long>(1, (long long)std::ceil(double(s.mass.box().area()) / 1e4));
  }

  void check(const SandpileState& s) {
    ++log.checkpoints;
    const double m = s.mass.sum();
    log.max_mass_drift = std::max(log.max_mass_drift, std::fabs(m - log.initial_mass) / std::max(log.initial_mass, 1e-300));
    const double W = second_moment(s.mass, law);
    const double U = s.odometer.sum();
    if (W0 > 0.0) log.max_second_moment_defect = std::max(log.max_second_moment_defect, std::fabs(W - W0 - U) / W0);
    for (double v : s.mass.values())
      if (v < 0.0) log.mass_nonnegative = false;
    const Box& b = s.odometer.box();
    for (int j = b.j0; j <= b.j1; ++j)
      for (int i = b.i0; i <= b.i1; ++i)
        if (s.odometer.at(i, j) < last_odometer.get(i, j)) log.odometer_monotone = false;
    last_odometer = s.odometer;
  }
};

double max_excess(const LatticeField& m) {
  double e = 0.0;
  for (double v : m.values()) e = std::max(e, v - 1.0);
  return e;
}

struct StallGuard {
  double best = std::numeric_limits<double>::infinity();
  long long since = 0;
  void update(double excess, long long limit) {
    if (excess < best) {
      best = excess;
      since = 0;
    } else if (++since > limit) {
      throw NonTermination("max excess stalled at " + std::to_string(excess));
    }
  }
};

void run_sweep(SandpileState& s, const JumpLaw& law, const ToppleSchedule& sc, Checker& chk) {
  const double na_inv = 1.0 / law.n_alpha();
  const double thr = 1.0 + sc.tol;
  StallGuard guard;
  Box active = s.mass.box();
  while (true) {
    Box next{0, -1, 0, -1};
    bool any = false;
    for (int j = active.j0; j <= active.j1; ++j)
      for (int i = active.i0; i <= active.i1; ++i) {
        if (!s.mass.box().contains(i, j) || s.mass.at(i, j) <= thr) continue;
        ensure_room(s, i, j, law.reach, sc.allow_growth);
        topple_unchecked(s, i, j, law, na_inv);
        const Box touched{i - law.reach, i + law.reach, j - law.reach, j + law.reach};
        next = any ? Box::hull(next, touched) : touched;
        any = true;
      }
    if (!any) break;
    ++s.sweeps;
    if (s.sweeps % chk.every == 0) chk.check(s);
    if (s.sweeps >= sc.max_sweeps) throw NonTermination("sweep budget exhausted");
    guard.update(max_excess(s.mass), sc.stall_sweeps);
    active = next;
  }
}

void run_random(SandpileState& s, const JumpLaw& law, const ToppleSchedule& sc, Checker& chk) {
  const double na_inv = 1.0 / law.n_alpha();
  const double thr = 1.0 + sc.tol;
  std::mt19937_64 rng(sc.seed);
  StallGuard guard;
  std::vector<std::pair<int, int>> full;
  while (true) {
    full.clear();
    const Box& b = s.mass.box();
    for (int j = b.j0; j <= b.j1; ++j)
      for (int i = b.i0; i <= b.i1; ++i)
        if (s.mass.at(i, j) > thr) full.emplace_back(i, j);
    if (full.empty()) break;
    std::shuffle(full.begin(), full.end(), rng);
    for (auto [i, j] : full) {
      if (s.mass.at(i, j) <= thr) continue;
      ensure_room(s, i, j, law.reach, sc.allow_growth);
      topple_unchecked(s, i, j, law, na_inv);
    }
    ++s.sweeps;
    if (s.sweeps % chk.every == 0) chk.check(s);
    if (s.sweeps >= sc.max_sweeps) throw NonTermination("sweep budget exhausted");
    guard.update(max_excess(s.mass), sc.stall_sweeps);
  }
}

void run_greedy(SandpileState& s, const JumpLaw& law, const ToppleSchedule& sc, Checker& chk) {
  const double na_inv = 1.0 / law.n_alpha();
  const double thr = 1.0 + sc.tol;
  constexpr int kLevels = 160;
  constexpr int kOffset = 100;  // level = floor(log2 excess) + kOffset
  auto level_of = [&](double excess) {
    const int l = std::ilogb(excess) + kOffset;
    return std::clamp(l, 0, kLevels - 1);
  };
  std::vector<std::vector<std::pair<int, int>>> buckets(kLevels);
  LatticeField queued(s.n, s.mass.box(), -1.0, -1.0);
  auto push = [&](int i, int j) {
    const double m = s.mass.at(i, j);
    if (m <= thr) return;
    const int l = level_of(m - 1.0);
    if (queued.at(i, j) >= l) return;
    queued.at(i, j) = l;
    buckets[l].emplace_back(i, j);
  };
  {
    const Box& b = s.mass.box();
    for (int j = b.j0; j <= b.j1; ++j)
      for (int i = b.i0; i <= b.i1; ++i) push(i, j);
  }
  StallGuard guard;
  std::vector<std::pair<int, int>> batch;
  int top = kLevels - 1;
  long long since_tick = 0;
  while (true) {
    while (top >= 0 && buckets[top].empty()) --top;
    if (top < 0) break;
    const int level = top;
    batch.swap(buckets[level]);
    buckets[level].clear();
    for (auto [i, j] : batch) {
      if (queued.at(i, j) != level) continue;
      queued.at(i, j) = -1.0;
      if (s.mass.at(i, j) <= thr) continue;
      const Box before = s.mass.box();
      ensure_room(s, i, j, law.reach, sc.allow_growth);
      if (!(s.mass.box() == before)) queued = queued.reboxed(s.mass.box());
      topple_unchecked(s, i, j, law, na_inv);
      for (const Offset& o : law.support) {
        push(i + o.dx, j + o.dy);
        top = std::max(top, static_cast<int>(queued.at(i + o.dx, j + o.dy)));
      }
      // One sweep-equivalent per box-area topplings.
      if (++since_tick >= static_cast<long long>(s.mass.box().area())) {
        since_tick = 0;
        ++s.sweeps;
        if (s.sweeps % chk.every == 0) chk.check(s);
        if (s.sweeps >= sc.max_sweeps) throw NonTermination("sweep budget exhausted");
        guard.update(max_excess(s.mass), sc.stall_sweeps);
      }
    }
    batch.clear();
  }
}

// Two-phase sweep: every full site topples once from a frozen snapshot.
void run_two_phase(SandpileState& s, const JumpLaw& law, const ToppleSchedule& sc, Checker& chk, bool parallel) {
  const double na_inv = 1.0 / law.n_alpha();
  const double thr = 1.0 + sc.tol;
  const int R = law.reach;
  StallGuard guard;
  while (true) {
    // Make room first so the snapshot never needs to grow mid-phase.
    {
      const Box& b = s.mass.box();
      const Box inner = b.shrunk(R);
      int gi0 = 0, gi1 = -1, gj0 = 0, gj1 = -1;
      bool grow = false;
      for (int j = b.j0; j <= b.j1; ++j)
        for (int i = b.i0; i <= b.i1; ++i)
          if (s.mass.at(i, j) > thr && !inner.contains(i, j)) {
            if (!grow) gi0 = gi1 = i, gj0 = gj1 = j;
            gi0 = std::min(gi0, i), gi1 = std::max(gi1, i), gj0 = std::min(gj0, j), gj1 = std::max(gj1, j);
            grow = true;
          }
      if (grow) {
        ensure_room(s, gi0, gj0, R, sc.allow_growth);
        ensure_room(s, gi1, gj1, R, sc.allow_growth);
      }
    }
    const Box b = s.mass.box();
    const int W = b.width();
    std::vector<double> E(b.area(), 0.0);
    double* m = s.mass.values().data();
    double* u = s.odometer.values().data();
    long long count = 0;
#pragma omp parallel for reduction(+ : count) schedule(static) if (parallel)
    for (int j = b.j0; j <= b.j1; ++j)
      for (int i = b.i0; i <= b.i1; ++i) {
        const std::size_t c = std::size_t(j - b.j0) * W + std::size_t(i - b.i0);
        if (m[c] > thr) {
          E[c] = m[c] - 1.0;
          m[c] = 1.0;
          u[c] += E[c] * na_inv;
          ++count;
        }
      }
    if (count == 0) break;
    KahanSum emitted;
    for (double e : E) emitted += e;
    s.emitted_total += emitted.value();
    s.topplings += count;
#pragma omp parallel for schedule(static) if (parallel)
    for (int j = b.j0; j <= b.j1; ++j)
      for (int i = b.i0; i <= b.i1; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < law.support.size(); ++k) {
          const int a = i - law.support[k].dx, c2 = j - law.support[k].dy;
          if (a < b.i0 || a > b.i1 || c2 < b.j0 || c2 > b.j1) continue;
          acc += law.prob[k] * E[std::size_t(c2 - b.j0) * W + std::size_t(a - b.i0)];
        }
        m[std::size_t(j - b.j0) * W + std::size_t(i - b.i0)] += acc;
      }
    ++s.sweeps;
    if (s.sweeps % chk.every == 0) chk.check(s);
    if (s.sweeps >= sc.max_sweeps) throw NonTermination("sweep budget exhausted");
    guard.update(max_excess(s.mass), sc.stall_sweeps);
  }
}

StabilizationReport finish(const SandpileState& s, Checker& chk, long long sweeps0, long long topplings0,
                           double emitted0) {
  chk.check(s);
  StabilizationReport r;
  r.sweeps = s.sweeps - sweeps0;
  r.topplings = s.topplings - topplings0;
  r.emitted_total = s.emitted_total - emitted0;
  r.final_max_excess = std::max(0.0, max_excess(s.mass));
  r.invariants = chk.log;
  return r;
}

}  // namespace

double topple(SandpileState& state, int i, int j, const JumpLaw& law) {
  if (!state.mass.box().contains(i, j) || !(state.mass.at(i, j) > 1.0))
    throw IllegalTopple("site (" + std::to_string(i) + "," + std::to_string(j) + ") is not full");
  ensure_room(state, i, j, law.reach, false);
  const double e = state.mass.at(i, j) - 1.0;
  topple_unchecked(state, i, j, law, 1.0 / law.n_alpha());
  return e;
}

StabilizationReport stabilize(SandpileState& state, const JumpLaw& law, const ToppleSchedule& schedule) {
  schedule.validate();
  if (state.n != law.params.n) throw MismatchedRefinement("state n differs from jump law n");
  Checker chk(state, law, schedule);
  const long long s0 = state.sweeps, t0 = state.topplings;
  const double e0 = state.emitted_total;
  switch (schedule.policy) {
    case SchedulePolicy::sweep: run_sweep(state, law, schedule, chk); break;
    case SchedulePolicy::greedy: run_greedy(state, law, schedule, chk); break;
    case SchedulePolicy::random: run_random(state, law, schedule, chk); break;
    case SchedulePolicy::parallel: run_two_phase(state, law, schedule, chk, true); break;
  }
  return finish(state, chk, s0, t0, e0);
}

StabilizationReport stabilize_parallel_serial(SandpileState& state, const JumpLaw& law,
                                              const ToppleSchedule& schedule) {
  schedule.validate();
  Checker chk(state, law, schedule);
  const long long s0 = state.sweeps, t0 = state.topplings;
  const double e0 = state.emitted_total;
  run_two_phase(state, law, schedule, chk, false);
  return finish(state, chk, s0, t0, e0);
}

double residual(const LatticeField& rho, const SandpileState& state, const JumpLaw& law) {
  const Box& b = state.mass.box();
  const LatticeField r = rho.reboxed(b);
  const LatticeField Lu = apply_L_discrete_field(state.odometer, law);
  const Box inner = b.shrunk(law.reach);
  double d = 0.0;
  for (int j = inner.j0; j <= inner.j1; ++j)
    for (int i = inner.i0; i <= inner.i1; ++i)
      d = std::max(d, std::fabs(state.mass.at(i, j) - r.at(i, j) - Lu.at(i, j)));
  return d;
}

double second_moment(const LatticeField& mass, const JumpLaw& law) {
  const Box& b = mass.box();
  const double n2 = double(mass.n()) * mass.n();
  KahanSum s;
  for (int j = b.j0; j <= b.j1; ++j)
    for (int i = b.i0; i <= b.i1; ++i) {
      const double v = mass.at(i, j);
      if (v != 0.0) s += v * (double(i) * i + double(j) * j) / n2;
    }
  return s.value() / law.sigma2_n;
}

}  // namespace tas
