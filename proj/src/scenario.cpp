#include "tas/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tas/error.hpp"
#include "tas/kahan.hpp"

namespace tas {

double SmoothBump::operator()(double x, double y) const {
  const double s2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (radius * radius);
  if (s2 >= 1.0) return 0.0;
  return height * std::exp(1.0 - 1.0 / (1.0 - s2));
}

double Density::smooth_part(double x, double y) const {
  double v = 0.0;
  for (const auto& b : bumps) v += b(x, y);
  return v;
}

int nearest_site(double x, int n) { return static_cast<int>(std::ceil(x * n - 0.5)); }

LatticeField sample_density(const Density& rho, int n, const Box& box) {
  LatticeField f(n, box);
  const double R = rho.support_radius;
  const double slack = 0.5 * std::sqrt(2.0) / n + 1e-12;
  for (int j = box.j0; j <= box.j1; ++j)
    for (int i = box.i0; i <= box.i1; ++i) {
      const double x = double(i) / n, y = double(j) / n;
      const double v = rho.smooth_part(x, y);
      if (v != 0.0 && std::hypot(x, y) > R + slack)
        throw UnboundedSupport("density is nonzero outside the declared support radius");
      f.at(i, j) = v;
    }
  for (const auto& p : rho.points) {
    if (std::hypot(p.x, p.y) > R + slack) throw UnboundedSupport("point mass outside the declared support radius");
    const int i = nearest_site(p.x, n), j = nearest_site(p.y, n);
    if (!box.contains(i, j)) throw UnboundedSupport("point mass outside the lattice box");
    f.at(i, j) += p.mass;
  }
  return f;
}

double lattice_mass(const LatticeField& rho) { return rho.sum() / (double(rho.n()) * rho.n()); }

Box default_box(const Density& rho, int n, double M) {
  // Total mass bound: point masses plus bump heights times their disk areas.
  double mass = 0.0;
  for (const auto& p : rho.points) mass += p.mass / (double(n) * n);
  for (const auto& b : rho.bumps) mass += b.height * std::numbers::pi * b.radius * b.radius;
  const double occupied = std::sqrt(mass / std::numbers::pi);
  const double half = rho.support_radius + 1.25 * occupied + 2.0 * M + 1.0;
  return Box::centered(static_cast<int>(std::ceil(half * n)));
}

double PlateauBump::operator()(double x, double y) const {
  const double s = std::hypot(x - cx, y - cy);
  if (s <= inner) return 1.0;
  if (s >= outer) return 0.0;
  auto f = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double t = (outer - s) / (outer - inner);
  return f(t) / (f(t) + f(1.0 - t));
}

double pair_with(const LatticeField& nu, const PlateauBump& phi) {
  const int n = nu.n();
  const double h = 1.0 / n;
  const double g = 0.5 / std::sqrt(3.0);
  const Box& b = nu.box();
  KahanSum s;
  for (int j = b.j0; j <= b.j1; ++j)
    for (int i = b.i0; i <= b.i1; ++i) {
      const double v = nu.at(i, j);
      if (v == 0.0) continue;
      const double x = i * h, y = j * h;
      const double q = phi(x - g * h, y - g * h) + phi(x + g * h, y - g * h) + phi(x - g * h, y + g * h) +
                       phi(x + g * h, y + g * h);
      s += v * q * 0.25 * h * h;
    }
  return s.value();
}

}  // namespace tas
