#include "tas/operators.hpp"

#include <cmath>
#include <numbers>

#include "tas/error.hpp"

namespace tas {

namespace {

void check_n(const LatticeField& f, const JumpLaw& law) {
  if (f.n() != law.params.n) throw MismatchedRefinement("field n differs from jump law n");
}

// One row of the stencil application; interior sites avoid bounds checks.
void apply_row(const LatticeField& f, const JumpLaw& law, double na, int j, LatticeField& out) {
  const Box& b = f.box();
  const int R = law.reach;
  const bool row_interior = j - R >= b.j0 && j + R <= b.j1;
  const std::size_t m = law.support.size();
  const int W = b.width();
  const double* base = f.values().data();
  for (int i = b.i0; i <= b.i1; ++i) {
    const double fx = f.at(i, j);
    double s = 0.0;
    if (row_interior && i - R >= b.i0 && i + R <= b.i1) {
      const double* center = base + f.index(i, j);
      for (std::size_t k = 0; k < m; ++k) {
        const Offset& o = law.support[k];
        s += law.prob[k] * (center[std::ptrdiff_t(o.dy) * W + o.dx] - fx);
      }
    } else {
      for (std::size_t k = 0; k < m; ++k) {
        const Offset& o = law.support[k];
        s += law.prob[k] * (f.get(i + o.dx, j + o.dy) - fx);
      }
    }
    out.at(i, j) = na * s;
  }
}

}  // namespace

double apply_L_discrete(const LatticeField& f, const JumpLaw& law, int i, int j) {
  check_n(f, law);
  const double fx = f.get(i, j);
  double s = 0.0;
  for (std::size_t k = 0; k < law.support.size(); ++k)
    s += law.prob[k] * (f.get(i + law.support[k].dx, j + law.support[k].dy) - fx);
  return law.n_alpha() * s;
}

LatticeField apply_L_discrete_field_serial(const LatticeField& f, const JumpLaw& law) {
  check_n(f, law);
  LatticeField out(f.n(), f.box(), 0.0, 0.0);
  const double na = law.n_alpha();
  for (int j = f.box().j0; j <= f.box().j1; ++j) apply_row(f, law, na, j, out);
  return out;
}

LatticeField apply_L_discrete_field(const LatticeField& f, const JumpLaw& law) {
  check_n(f, law);
  LatticeField out(f.n(), f.box(), 0.0, 0.0);
  const double na = law.n_alpha();
  const int j0 = f.box().j0, j1 = f.box().j1;
#pragma omp parallel for schedule(static)
  for (int j = j0; j <= j1; ++j) apply_row(f, law, na, j, out);
  return out;
}

double apply_L_discrete_function(const Function2D& f, const JumpLaw& law, int i, int j) {
  const double n = law.params.n;
  const double x = i / n, y = j / n;
  const double fx = f(x, y);
  double s = 0.0;
  for (std::size_t k = 0; k < law.support.size(); ++k)
    s += law.prob[k] * (f(x + law.support[k].dx / n, y + law.support[k].dy / n) - fx);
  return law.n_alpha() * s;
}

namespace {

// Graded polar quadrature with `refine` extra subdivisions of every panel.
double polar_second_difference(const Function2D& f, double x, double y, double alpha, double M,
                               const QuadratureConfig& quad, int refine) {
  const GaussRule& g = gauss_legendre(quad.panel_order);
  const double fx = f(x, y);
  const int ang_panels = 4 << refine;
  const int rad_panels = 1 << refine;
  auto angular = [&](double rho) {
    // Symmetrized difference is pi-periodic in the angle.
    return integrate_panels(
        [&](double phi) {
          const double cx = rho * std::cos(phi), cy = rho * std::sin(phi);
          return f(x + cx, y + cy) + f(x - cx, y - cy) - 2.0 * fx;
        },
        0.0, std::numbers::pi, ang_panels, g);
  };
  double total = 0.0;
  double prev = 0.0, last = 0.0;
  double hi = M;
  for (int l = 0; l < quad.radial_levels; ++l) {
    const double lo = 0.5 * hi;
    prev = last;
    last = integrate_panels([&](double rho) { return angular(rho) * std::pow(rho, -1.0 - alpha); }, lo, hi,
                            rad_panels, g);
    total += last;
    hi = lo;
  }
  // Remaining disk: level contributions behave like A q^l + B (q/4)^l with q = 2^{alpha-2}.
  const double q = std::pow(2.0, alpha - 2.0);
  const double q4 = q / 4.0;
  if (quad.radial_levels >= 2) {
    // Solve prev = A + B, last = A q + B q4 (levels renumbered from prev).
    const double B = (last - q * prev) / (q4 - q);
    const double A = prev - B;
    total += A * q * q / (1.0 - q) + B * q4 * q4 / (1.0 - q4);
  } else {
    total += last * q / (1.0 - q);
  }
  return total;
}

}  // namespace

double apply_L_continuous(const Function2D& f, double x, double y, double c, double alpha, double M,
                          const QuadratureConfig& quad) {
  // (c/2) * 2 * int_0^M rho^{-1-alpha} int_0^pi (...) dphi drho
  double prev = c * polar_second_difference(f, x, y, alpha, M, quad, 0);
  for (int r = 1; r <= quad.max_refinements; ++r) {
    const double cur = c * polar_second_difference(f, x, y, alpha, M, quad, r);
    if (std::fabs(cur - prev) <= quad.tol * std::max(1.0, std::fabs(cur))) return cur;
    prev = cur;
  }
  throw QuadratureFailure("continuous operator quadrature did not stabilize");
}

RateTable laplacian_convergence_report(const Function2D& f, double half_width, const std::vector<int>& n_list,
                                       double alpha, double r, double M, double c, const QuadratureConfig& quad) {
  RateTable t;
  t.n_list = n_list;
  for (int n : n_list) {
    const JumpLaw law = build_jump_law({alpha, r, M, n});
    const int h = static_cast<int>(std::floor(half_width * n + 1e-12));
    std::vector<double> err(std::size_t(2 * h + 1) * std::size_t(2 * h + 1), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int j = -h; j <= h; ++j)
      for (int i = -h; i <= h; ++i) {
        const double lc = apply_L_continuous(f, double(i) / n, double(j) / n, c, alpha, M, quad);
        const double ld = apply_L_discrete_function(f, law, i, j);
        err[std::size_t(j + h) * std::size_t(2 * h + 1) + std::size_t(i + h)] = std::fabs(lc - ld);
      }
    double e = 0.0;
    for (double v : err) e = std::max(e, v);
    t.errors.push_back(e);
  }
  std::vector<double> ns(n_list.begin(), n_list.end());
  t.slope = loglog_slope(ns, t.errors);
  t.strictly_decreasing = true;
  for (std::size_t k = 1; k < t.errors.size(); ++k)
    if (!(t.errors[k] < t.errors[k - 1])) t.strictly_decreasing = false;
  return t;
}

}  // namespace tas
