#include "tas/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tas/error.hpp"
#include "tas/operators.hpp"

namespace tas {

std::string to_string(MajorantScheme s) { return s == MajorantScheme::jacobi ? "jacobi" : "gauss-seidel"; }

MajorantScheme majorant_scheme_from_string(const std::string& s) {
  if (s == "jacobi") return MajorantScheme::jacobi;
  if (s == "gauss-seidel" || s == "gauss_seidel") return MajorantScheme::gauss_seidel;
  throw ValidationError("unknown majorant scheme '" + s + "'");
}

LatticeField build_obstacle(const LatticeField& rho_field, const JumpLaw& law, const GreenEvaluator& eval) {
  if (rho_field.n() != law.params.n) throw MismatchedRefinement("density n differs from jump law n");
  const Box& b = rho_field.box();
  struct Src {
    int i, j;
    double m;
  };
  std::vector<Src> src;
  int far = 0;
  for (int j = b.j0; j <= b.j1; ++j)
    for (int i = b.i0; i <= b.i1; ++i)
      if (double m = rho_field.at(i, j); m != 0.0) {
        src.push_back({i, j, m});
        far = std::max({far, std::abs(i - b.i0), std::abs(i - b.i1), std::abs(j - b.j0), std::abs(j - b.j1)});
      }
  LatticeField gamma(law.params.n, b);
  const double n = law.params.n;
  const double inv_s2 = 1.0 / law.sigma2_n;
  const DiscreteGreen* G = src.empty() ? nullptr : &eval.discrete(far);
#pragma omp parallel for schedule(dynamic)
  for (int j = b.j0; j <= b.j1; ++j)
    for (int i = b.i0; i <= b.i1; ++i) {
      double conv = 0.0;
      for (const Src& y : src) conv += G->value(i - y.i, j - y.j) * y.m;
      gamma.at(i, j) = -(double(i) * i + double(j) * j) / (n * n) * inv_s2 - conv / (n * n);
    }
  return gamma;
}

ObstacleProblem make_obstacle_problem(const LatticeField& rho_field, const JumpLaw& law, const GreenEvaluator& eval,
                                      const Box& omega, double tol) {
  const Box outer = omega.grown(law.reach);
  const Box rb = rho_field.box();
  for (int j = rb.j0; j <= rb.j1; ++j)
    for (int i = rb.i0; i <= rb.i1; ++i)
      if (rho_field.at(i, j) != 0.0 && !omega.contains(i, j))
        throw UnboundedSupport("density support is not inside Omega");
  ObstacleProblem p;
  p.rho = rho_field.reboxed(outer);
  p.gamma = build_obstacle(p.rho, law, eval);
  p.s = p.gamma;
  p.omega_box = omega;
  p.law = law;
  p.tol = tol;
  return p;
}

MajorantReport solve_majorant(ObstacleProblem& problem, const MajorantOptions& options) {
  const JumpLaw& law = problem.law;
  const Box outer = problem.gamma.box();
  const Box om = problem.omega_box;
  const int W = outer.width();
  const std::size_t K = law.support.size();
  std::vector<std::ptrdiff_t> shift(K);
  for (std::size_t k = 0; k < K; ++k)
    shift[k] = std::ptrdiff_t(law.support[k].dy) * W + law.support[k].dx;

  // Iterate on u = s - gamma: u <- max(0, P u + (P gamma - gamma)), u = 0 off Omega.
  const std::vector<double>& g = problem.gamma.values();
  std::vector<double> f(g.size(), 0.0), u(g.size(), 0.0), next;
  for (int j = om.j0; j <= om.j1; ++j)
    for (int i = om.i0; i <= om.i1; ++i) {
      const std::size_t c = problem.gamma.index(i, j);
      double acc = 0.0;
      for (std::size_t k = 0; k < K; ++k) acc += law.prob[k] * (g[std::ptrdiff_t(c) + shift[k]] - g[c]);
      f[c] = acc;
    }
  for (std::size_t c = 0; c < u.size(); ++c) u[c] = problem.s.values()[c] - g[c];
  for (int j = outer.j0; j <= outer.j1; ++j)
    for (int i = outer.i0; i <= outer.i1; ++i)
      if (!om.contains(i, j)) u[problem.gamma.index(i, j)] = 0.0;
      else u[problem.gamma.index(i, j)] = std::max(0.0, u[problem.gamma.index(i, j)]);

  MajorantReport rep;
  const bool jacobi = options.scheme == MajorantScheme::jacobi;
  if (jacobi) next = u;
  double prev_change = std::numeric_limits<double>::infinity();
  while (true) {
    double change = 0.0;
    bool mono = true;
    std::vector<double>& dst = jacobi ? next : u;
#pragma omp parallel for reduction(max : change) reduction(&& : mono) schedule(static) if (jacobi)
    for (int j = om.j0; j <= om.j1; ++j)
      for (int i = om.i0; i <= om.i1; ++i) {
        const std::size_t c = std::size_t(j - outer.j0) * W + std::size_t(i - outer.i0);
        double acc = f[c];
        for (std::size_t k = 0; k < K; ++k) acc += law.prob[k] * u[std::ptrdiff_t(c) + shift[k]];
        const double v = std::max(0.0, acc);
        const double d = v - u[c];
        if (d < -1e-12 * std::max(1.0, std::fabs(u[c]))) mono = false;
        change = std::max(change, std::fabs(d));
        dst[c] = v;
      }
    if (jacobi) u.swap(next);
    ++rep.iterations;
    rep.monotone = rep.monotone && mono;
    rep.final_change = change;
    const double q = change / prev_change;
    rep.contraction = q;
    prev_change = change;
    if (change == 0.0) break;
    if (rep.iterations > 1 && q < 1.0 && change * q / (1.0 - q) < options.tol) break;
    if (rep.iterations >= options.max_iterations)
      throw NonConvergent("majorant iteration did not converge; change " + std::to_string(change) +
                          ", try a larger Omega");
  }
  for (std::size_t c = 0; c < u.size(); ++c) problem.s.values()[c] = g[c] + u[c];

  // min(s - gamma, -L s / n^alpha) with -L s / n^alpha = -(P u - u + f).
  double comp = 0.0;
  for (int j = om.j0; j <= om.j1; ++j)
    for (int i = om.i0; i <= om.i1; ++i) {
      const std::size_t c = problem.gamma.index(i, j);
      double acc = f[c] - u[c];
      for (std::size_t k = 0; k < K; ++k) acc += law.prob[k] * u[std::ptrdiff_t(c) + shift[k]];
      comp = std::max(comp, std::min(u[c], -acc));
    }
  rep.complementarity = comp;
  return rep;
}

LatticeField odometer_from_obstacle(const ObstacleProblem& problem) {
  LatticeField u = problem.s - problem.gamma;
  for (double& v : u.values()) v = std::max(v, 0.0);
  return u;
}

LatticeField final_distribution_from_obstacle(const ObstacleProblem& problem) {
  LatticeField u = odometer_from_obstacle(problem);
  LatticeField nu = apply_L_discrete_field(u, problem.law);
  nu += problem.rho;
  return nu;
}

namespace {

double clip_of(const ObstacleProblem& p) {
  double clip = 0.0;
  for (std::size_t c = 0; c < p.s.values().size(); ++c)
    clip = std::max(clip, p.gamma.values()[c] - p.s.values()[c]);
  return clip;
}

bool touches_edge(const LatticeField& u, const Box& omega, int reach, double tol) {
  const Box inner = omega.shrunk(reach);
  for (int j = omega.j0; j <= omega.j1; ++j)
    for (int i = omega.i0; i <= omega.i1; ++i)
      if (!inner.contains(i, j) && u.at(i, j) > tol) return true;
  return false;
}

}  // namespace

ObstacleSolution solve_obstacle(const LatticeField& rho_field, const JumpLaw& law, const GreenEvaluator& eval,
                                const MajorantOptions& options, Box omega) {
  if (omega.empty()) omega = rho_field.box();
  for (int attempt = 0;; ++attempt) {
    ObstacleSolution sol;
    sol.problem = make_obstacle_problem(rho_field, law, eval, omega, options.tol);
    bool converged = true;
    try {
      sol.report = solve_majorant(sol.problem, options);
    } catch (const NonConvergent&) {
      if (attempt >= options.max_doublings) throw;
      converged = false;
    }
    if (converged) {
      sol.report.omega_doublings = attempt;
      sol.report.clip = clip_of(sol.problem);
      sol.odometer = odometer_from_obstacle(sol.problem);
      if (!touches_edge(sol.odometer, omega, law.reach, options.tol)) {
        sol.final_distribution = final_distribution_from_obstacle(sol.problem);
        return sol;
      }
      if (attempt >= options.max_doublings)
        throw NonConvergent("odometer reaches the edge of Omega after " + std::to_string(attempt) + " doublings");
    }
    const int hw = std::max({omega.width(), omega.height()}) / 2 + 1;
    omega = Box::hull(omega, Box::centered(2 * hw));
  }
}

ObstacleSolution solve_obstacle(const Density& rho, int n, const JumpLaw& law, const GreenEvaluator& eval,
                                const MajorantOptions& options) {
  const Box box = default_box(rho, n, law.params.M);
  return solve_obstacle(sample_density(rho, n, box), law, eval, options, box);
}

}  // namespace tas
