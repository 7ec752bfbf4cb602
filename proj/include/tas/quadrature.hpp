#pragma once

#include <span>
#include <vector>

namespace tas {

struct QuadratureConfig {
  int radial_levels = 14;  // dyadic radial levels before the analytic inner-disk tail
  int panel_order = 16;
  double tol = 1e-8;
  int max_refinements = 6;

  void validate() const;
  bool operator==(const QuadratureConfig&) const = default;
};

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

// Gauss-Legendre rule of the given order (cached, thread safe).
const GaussRule& gauss_legendre(int order);

// Integral of f over [a, b] split into `panels` equal Gauss-Legendre panels.
template <typename F>
double integrate_panels(F&& f, double a, double b, int panels, const GaussRule& g) {
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double s = 0.0;
    for (std::size_t k = 0; k < g.x.size(); ++k) s += g.w[k] * f(mid + 0.5 * h * g.x[k]);
    total += 0.5 * h * s;
  }
  return total;
}

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace tas
