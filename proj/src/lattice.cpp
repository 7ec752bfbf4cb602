#include "tas/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tas/error.hpp"
#include "tas/kahan.hpp"

namespace tas {

Box Box::hull(const Box& a, const Box& b) {
  return {std::min(a.i0, b.i0), std::max(a.i1, b.i1), std::min(a.j0, b.j0), std::max(a.j1, b.j1)};
}

LatticeField::LatticeField(int n, Box box, double fill, double outside)
    : n_(n), box_(box), outside_(outside) {
  if (n < 1) throw ValidationError("lattice refinement must be positive");
  if (box.empty()) throw ValidationError("lattice box must be at least 1x1");
  values_.assign(box.area(), fill);
}

double LatticeField::sum() const {
  KahanSum s;
  for (double v : values_) s += v;
  return s.value();
}

double LatticeField::max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values_) m = std::max(m, v);
  return m;
}

double LatticeField::min() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values_) m = std::min(m, v);
  return m;
}

LatticeField LatticeField::reboxed(const Box& b) const {
  LatticeField out(n_, b, outside_, outside_);
  for (int j = b.j0; j <= b.j1; ++j)
    for (int i = b.i0; i <= b.i1; ++i)
      if (box_.contains(i, j)) out.at(i, j) = at(i, j);
  return out;
}

void LatticeField::check_compatible(const LatticeField& o) const {
  if (o.n_ != n_) throw MismatchedRefinement("fields have different n");
  if (!(o.box_ == box_)) throw ValidationError("fields have different boxes");
}

LatticeField& LatticeField::operator+=(const LatticeField& o) {
  check_compatible(o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  outside_ += o.outside_;
  return *this;
}

LatticeField& LatticeField::operator-=(const LatticeField& o) {
  check_compatible(o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  outside_ -= o.outside_;
  return *this;
}

LatticeField& LatticeField::operator*=(double s) {
  for (double& v : values_) v *= s;
  outside_ *= s;
  return *this;
}

LatticeField LatticeField::pointwise_max(const LatticeField& a, const LatticeField& b) {
  a.check_compatible(b);
  LatticeField out = a;
  for (std::size_t k = 0; k < out.values_.size(); ++k) out.values_[k] = std::max(a.values_[k], b.values_[k]);
  out.outside_ = std::max(a.outside_, b.outside_);
  return out;
}

double LatticeField::sup_distance(const LatticeField& a, const LatticeField& b) {
  if (a.n_ != b.n_) throw MismatchedRefinement("fields have different n");
  const Box h = Box::hull(a.box_, b.box_);
  double d = 0.0;
  for (int j = h.j0; j <= h.j1; ++j)
    for (int i = h.i0; i <= h.i1; ++i) d = std::max(d, std::fabs(a.get(i, j) - b.get(i, j)));
  return d;
}

}  // namespace tas
