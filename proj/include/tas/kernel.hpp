#pragma once

#include <cstdint>
#include <vector>

namespace tas {

struct KernelParams {
  double alpha = 1.5;
  double r = 1.0;  // inner cut, lattice units
  double M = 2.0;  // outer cut, macroscopic
  int n = 1;

  // Throws ValidationError on an inadmissible combination (k_1 <= 0 included).
  void validate() const;
  bool operator==(const KernelParams&) const = default;
};

struct Offset {
  int dx = 0;
  int dy = 0;
};

// Corrected truncated alpha-stable jump law on (1/n)Z^2. Offsets are stored in
// lattice units: the jump y corresponds to (dx, dy) / n.
struct JumpLaw {
  KernelParams params;
  std::vector<Offset> support;
  std::vector<double> prob;
  double c_n = 0.0;
  double k_n = 0.0;
  double sigma2_n = 0.0;  // L_{M,n}|x|^2
  int reach = 0;          // max |dx|, |dy| over the support

  std::size_t size() const { return support.size(); }
  double n_alpha() const;
  // Lattice-unit variance sum_z p(z)|z|^2.
  double lattice_variance() const;
};

struct LimitConstants {
  double alpha = 0.0;
  double r = 0.0;
  double M = 0.0;
  double k = 0.0;
  double c = 0.0;
  double sigma2_M = 0.0;
  double c_alpha = 0.0;
  double c_alpha_tilde = 0.0;
  double k_richardson = 0.0;  // extrapolated k_n, cross-check of k
};

// Area of [x0,x1]x[y0,y1] inside the disk of radius R about the origin.
double rect_disk_area(double x0, double x1, double y0, double y1, double R);

// Area of the unit square centered at the integer point (i, j) inside B_R.
double unit_square_disk_area(int i, int j, double R);

// F_n at the lattice point (i/n, j/n): n^2 times the area of its square inside
// the annulus A_{r/n,M}. Equivalently the unit-square area at (i,j) inside
// B_{Mn} minus B_r.
double square_region_fraction(int i, int j, int n, double r, double M);

// k_n from its defining sum.
double compute_k(const KernelParams& p);

// k_n accumulated ring by ring from B_r outward.
double compute_k_telescoped(const KernelParams& p, double ring_width = 1.0);

JumpLaw build_jump_law(const KernelParams& p);

LimitConstants limit_constants(double alpha, double r, double M, int extrapolation_depth = 5,
                               double tol = 1e-3);

// Smallest r on the grid r0, r0 + step, ... with k_1 > 0 for the given alpha, M.
double find_admissible_r(double alpha, double M, double r0 = 0.75, double step = 0.25);

}  // namespace tas
