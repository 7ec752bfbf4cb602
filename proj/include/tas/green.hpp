#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "tas/kernel.hpp"
#include "tas/lattice.hpp"
#include "tas/quadrature.hpp"

namespace tas {

// psi_{M,n}(theta) = n^alpha sum_y p_n(y) (1 - cos(theta . y)).
double psi_discrete(double tx, double ty, const JumpLaw& law);

// Radial profile of the continuous symbol: psi_M(theta) = 2 pi c |theta|^alpha Phi(M |theta|),
// Phi(t) = int_0^t (1 - J0(u)) u^{-1-alpha} du.
class ContinuousSymbol {
 public:
  ContinuousSymbol(double alpha, double c, double M, double t_max);

  double phi(double t) const;
  double phi_infinity() const { return phi_inf_; }
  double psi(double rho) const;  // psi_M at |theta| = rho
  double psi(double tx, double ty) const;
  double alpha() const { return alpha_; }
  double M() const { return M_; }
  double c() const { return c_; }

 private:
  double alpha_, c_, M_;
  double h_ = 0.5;
  double t_series_ = 1.0;
  double t_max_;
  double phi_inf_;
  std::vector<double> cum_;  // Phi at t_series_ + k h
};

// G_{M,n} on a window of (1/n)Z^2, through the periodic Green function on an
// N-torus plus a quadratic correction and one Richardson step in N.
class DiscreteGreen {
 public:
  // Values available for |i|, |j| <= window (lattice units).
  DiscreteGreen(const JumpLaw& law, int window, int torus_n = 0, std::array<int, 2> x0 = {1, 0});

  // Lattice Green function normalized to vanish at n x0; solves L~G = -delta.
  double lattice_value(int i, int j) const;
  // G_{M,n}(i/n, j/n) = n^{2-alpha} lattice_value(i, j).
  double value(int i, int j) const;
  int window() const { return window_; }
  int torus_size() const { return N_; }
  // Richardson error estimate, in the units of value().
  double error_estimate() const { return err_; }
  const JumpLaw& law() const { return law_; }
  // Window as a field, for operator checks.
  LatticeField as_field() const;

 private:
  std::vector<double> torus_table(int N) const;

  JumpLaw law_;
  int window_;
  int N_;
  double scale_;
  double err_ = 0.0;
  std::vector<double> table_;  // (window+1)^2, first quadrant, lattice units
};

// G_M by the radial Hankel form
//   G_M(x) = (1/2pi) int_0^inf (J0(rho|x|) - J0(rho|x0|)) rho / psi_M(rho) drho,
// with the |theta|^{-alpha} part integrated in closed form.
class ContinuousGreen {
 public:
  ContinuousGreen(const LimitConstants& L, const QuadratureConfig& quad, double cutoff = 2000.0);

  double value(double radius) const;
  double value(double x, double y) const;
  // h_M(x) = (2 / (pi sigma_M^2)) int_1^{|x|/M} J0(t)/t dt.
  double h_M(double radius) const;
  // -(alpha^2/((2pi)^2 c)) + (2/(pi sigma_M^2)) log M - g(x0/M)/M^{2-alpha}, with g from the near-field form.
  double delta_M() const;
  double near_field_coefficient() const;  // alpha^2 / ((2pi)^2 c)
  const ContinuousSymbol& symbol() const { return symbol_; }
  const LimitConstants& limits() const { return L_; }

 private:
  struct Grid {
    double width = 0.0;
    double R = 0.0;
    std::vector<double> x, w, inv_psi_minus_leading;
  };
  const Grid& grid_for(double radius, double R) const;
  double integrate(double radius, double R) const;

  LimitConstants L_;
  QuadratureConfig quad_;
  double cutoff_;
  ContinuousSymbol symbol_;
  double K_alpha_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<int, int>, std::unique_ptr<Grid>> grids_;
  mutable std::map<double, double> cache_;
};

struct GreenEvaluator {
  GreenEvaluator(const JumpLaw& law, const LimitConstants& limits, const QuadratureConfig& quad = {},
                 std::array<double, 2> x0 = {1.0, 0.0});

  JumpLaw law;
  LimitConstants limits;
  std::array<double, 2> x0;
  QuadratureConfig quad;

  // Ensures the discrete table covers |i|, |j| <= window.
  const DiscreteGreen& discrete(int window) const;
  const ContinuousGreen& continuous() const;

 private:
  mutable std::mutex mu_;
  mutable std::shared_ptr<DiscreteGreen> discrete_;
  mutable std::shared_ptr<ContinuousGreen> continuous_;
};

double green_discrete(int i, int j, const GreenEvaluator& eval);
double green_continuous(double x, double y, const GreenEvaluator& eval);

struct SeriesOracleResult {
  std::vector<double> value;        // sum_{m<=N} (p^m(0) - p^m(x)), extrapolated in N
  std::vector<double> uncertainty;  // tail and truncation estimate
  int steps = 0;
};

// Potential kernel a(x) = sum_m (p^m(0) - p^m(x)) of the n = 1 walk by repeated
// stencil convolution. The Fourier-side Green function equals a(x0) - a(x).
SeriesOracleResult green_discrete_series_oracle(const JumpLaw& law, const std::vector<std::array<int, 2>>& points,
                                                int steps, double accuracy = 1e-6);

struct AsymptoticsReport {
  std::vector<double> near_radii, near_remainder;  // (G_M - A(|x|^{a-2} - 1)) M^{2-a}
  double near_fit = 0.0;                           // fitted bound on the inner radii
  double near_max = 0.0;
  bool near_pass = false;
  std::vector<double> far_radii, far_remainder;  // (G_M + 2/(pi s^2) log|x| - h_M - delta) |x|^{2-a}
  double delta_fit = 0.0;
  double delta_exact = 0.0;
  double far_fit = 0.0;
  double far_max = 0.0;
  bool far_pass = false;
  double h_M_at_M = 0.0;
};

// Near radii should lie in (0, M) and far radii in (M, inf). A remainder is
// judged bounded when its sup over all radii stays within `margin` times the
// sup over the fit radii (the first half of each list).
AsymptoticsReport green_asymptotics_report(const ContinuousGreen& g, const std::vector<double>& near_radii,
                                           const std::vector<double>& far_radii, double margin = 2.0);

struct GreenRateRow {
  int n = 0;
  double beta_n = 0.0;
  double c_n = 0.0;
  double error_corrected = 0.0;    // with +beta_n log|x|
  double error_uncorrected = 0.0;  // beta_n = 0
  double error_opposite = 0.0;     // with -beta_n log|x|
  double torus_error = 0.0;
  std::vector<double> g_discrete, g_continuous;
};

struct GreenRateReport {
  std::vector<std::array<double, 2>> samples;
  std::vector<GreenRateRow> rows;
  double slope_corrected = 0.0;
  double slope_uncorrected = 0.0;
  double slope_opposite = 0.0;
  double slope_beta = 0.0;
};

GreenRateReport green_convergence_report(double alpha, double r, double M, const std::vector<int>& n_list,
                                         const std::vector<std::array<double, 2>>& samples,
                                         const QuadratureConfig& quad = {});

}  // namespace tas
