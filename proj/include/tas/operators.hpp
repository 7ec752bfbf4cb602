#pragma once

#include <functional>
#include <vector>

#include "tas/kernel.hpp"
#include "tas/lattice.hpp"
#include "tas/quadrature.hpp"

namespace tas {

using Function2D = std::function<double(double, double)>;

// n^alpha sum_y p_n(y) (f(x+y) - f(x)) at lattice site (i, j).
double apply_L_discrete(const LatticeField& f, const JumpLaw& law, int i, int j);

// Same operator on every site of the box. Sites within law.reach of the box
// edge read f.outside_value() for offsets leaving the box.
LatticeField apply_L_discrete_field(const LatticeField& f, const JumpLaw& law);
// Single-threaded reference implementation of apply_L_discrete_field.
LatticeField apply_L_discrete_field_serial(const LatticeField& f, const JumpLaw& law);

// L_{M,n} applied to a function sampled on the fly, at (i/n, j/n).
double apply_L_discrete_function(const Function2D& f, const JumpLaw& law, int i, int j);

// (c/2) int_{B_M} (f(x+y) + f(x-y) - 2f(x)) / |y|^{2+alpha} dy.
double apply_L_continuous(const Function2D& f, double x, double y, double c, double alpha, double M,
                          const QuadratureConfig& quad);

struct RateTable {
  std::vector<int> n_list;
  std::vector<double> errors;
  double slope = 0.0;
  bool strictly_decreasing = false;
};

// sup over sites of [-half_width, half_width]^2 of |L_M f - L_{M,n} f|.
RateTable laplacian_convergence_report(const Function2D& f, double half_width, const std::vector<int>& n_list,
                                       double alpha, double r, double M, double c, const QuadratureConfig& quad);

}  // namespace tas
