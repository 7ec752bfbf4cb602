#pragma once

#include <string>
#include <vector>

#include "tas/lattice.hpp"

namespace tas {

struct PointMass {
  double x = 0.0, y = 0.0;
  double mass = 0.0;  // mass placed on the nearest lattice site
  bool operator==(const PointMass&) const = default;
};

// height * exp(1 - 1/(1 - s^2)) with s = |x - center| / radius, zero for s >= 1.
struct SmoothBump {
  double cx = 0.0, cy = 0.0;
  double radius = 1.0;
  double height = 1.0;
  double operator()(double x, double y) const;
  bool operator==(const SmoothBump&) const = default;
};

// Initial density: point masses plus smooth bumps, with a declared support radius.
struct Density {
  std::vector<PointMass> points;
  std::vector<SmoothBump> bumps;
  double support_radius = 0.0;  // about the origin, macroscopic units

  double smooth_part(double x, double y) const;
  bool empty() const { return points.empty() && bumps.empty(); }
  bool operator==(const Density&) const = default;
};

// Lattice index of the nearest site to x on (1/n)Z, ties broken to the right.
int nearest_site(double x, int n);

// rho^{n,::} on the given box. Throws UnboundedSupport for mass outside the
// declared support radius.
LatticeField sample_density(const Density& rho, int n, const Box& box);

// Total macroscopic mass (1/n^2) sum rho_n of the sampled density.
double lattice_mass(const LatticeField& rho);

// Working box for a run: support plus an occupied-disk estimate plus the jump range.
Box default_box(const Density& rho, int n, double M);

// C^infinity plateau bump: 1 on B(center, inner), 0 outside B(center, outer).
struct PlateauBump {
  double cx = 0.0, cy = 0.0;
  double inner = 0.5, outer = 1.0;
  double operator()(double x, double y) const;
  bool operator==(const PlateauBump&) const = default;
};

// <nu^square, phi> = sum_x nu(x) int_{x^square} phi, 2x2 Gauss rule per square.
double pair_with(const LatticeField& nu, const PlateauBump& phi);

}  // namespace tas
