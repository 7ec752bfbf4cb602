#pragma once

#include <cmath>

namespace tas {

// Sum of an alternating series sum_{k>=0} (-1)^k a(k), accelerated with the
// Cohen-Rodriguez Villegas-Zagier weights. Accurate to ~1e-15 for completely
// monotone a(k).
template <typename F>
double alternating_sum(F a, int terms = 40);

// Riemann zeta for real s != 1, s > 0, through the Dirichlet eta function.
double riemann_zeta(double s);

// Dirichlet beta function beta(s) = sum_k (-1)^k (2k+1)^{-s}, s > 0.
double dirichlet_beta(double s);

// Epstein zeta of the square lattice, Z(s) = sum_{z != 0} |z|^{-s}, analytically
// continued to 0 < s < 2 as the constant term of the sum minus the disk integral.
double epstein_zeta_z2(double s);

// Phi(t) = int_0^t (1 - J0(u)) u^{-1-alpha} du, series form valid for moderate t.
double bessel_phi_series(double t, double alpha);

double bessel_j0(double x);

template <typename F>
double alternating_sum(F a, int terms) {
  const int n = terms;
  double d = std::pow(3.0 + std::sqrt(8.0), n);
  d = (d + 1.0 / d) / 2.0;
  double b = -1.0;
  double c = -d;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    c = b - c;
    s += c * a(k);
    b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0));
  }
  return s / d;
}

}  // namespace tas
