#include "tas/special.hpp"

#include <cmath>
#include <stdexcept>

namespace tas {

double riemann_zeta(double s) {
  if (s == 1.0 || s <= 0.0) throw std::domain_error("riemann_zeta: s must be positive and != 1");
  const double eta = alternating_sum([s](int k) { return std::pow(k + 1.0, -s); }, 48);
  return eta / (1.0 - std::pow(2.0, 1.0 - s));
}

double dirichlet_beta(double s) {
  if (s <= 0.0) throw std::domain_error("dirichlet_beta: s must be positive");
  return alternating_sum([s](int k) { return std::pow(2.0 * k + 1.0, -s); }, 48);
}

double epstein_zeta_z2(double s) {
  // Z(s) = 4 zeta(s/2) beta(s/2)
  return 4.0 * riemann_zeta(s / 2.0) * dirichlet_beta(s / 2.0);
}

double bessel_phi_series(double t, double alpha) {
  if (t <= 0.0) return 0.0;
  const double q = t * t / 4.0;
  double term = 1.0;  // q^m / (m!)^2
  double sum = 0.0;
  for (int m = 1; m < 200; ++m) {
    term *= q / (static_cast<double>(m) * m);
    const double add = term / (2.0 * m - alpha);
    sum += (m % 2 == 1) ? add : -add;
    if (add < 1e-18 * std::fabs(sum)) break;
  }
  return sum * std::pow(t, -alpha);
}

double bessel_j0(double x) { return ::j0(x); }

}  // namespace tas
