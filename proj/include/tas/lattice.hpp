#pragma once

#include <cstddef>
#include <vector>

namespace tas {

// Inclusive integer rectangle of lattice sites (i, j), standing for (i/n, j/n).
struct Box {
  int i0 = 0, i1 = 0, j0 = 0, j1 = 0;

  int width() const { return i1 - i0 + 1; }
  int height() const { return j1 - j0 + 1; }
  std::size_t area() const { return std::size_t(width()) * std::size_t(height()); }
  bool contains(int i, int j) const { return i >= i0 && i <= i1 && j >= j0 && j <= j1; }
  Box grown(int m) const { return {i0 - m, i1 + m, j0 - m, j1 + m}; }
  Box shrunk(int m) const { return grown(-m); }
  bool empty() const { return i1 < i0 || j1 < j0; }
  bool operator==(const Box&) const = default;

  static Box centered(int half_width) { return {-half_width, half_width, -half_width, half_width}; }
  static Box hull(const Box& a, const Box& b);
};

// Real field on a finite box of (1/n)Z^2, constant outside the box.
class LatticeField {
 public:
  LatticeField() = default;
  LatticeField(int n, Box box, double fill = 0.0, double outside = 0.0);

  int n() const { return n_; }
  const Box& box() const { return box_; }
  double outside_value() const { return outside_; }
  void set_outside_value(double v) { outside_ = v; }

  std::size_t index(int i, int j) const {
    return std::size_t(j - box_.j0) * std::size_t(box_.width()) + std::size_t(i - box_.i0);
  }
  double& at(int i, int j) { return values_[index(i, j)]; }
  double at(int i, int j) const { return values_[index(i, j)]; }
  // Value with the outside convention.
  double get(int i, int j) const { return box_.contains(i, j) ? values_[index(i, j)] : outside_; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double sum() const;
  double max() const;
  double min() const;
  // Site coordinates in macroscopic units.
  double x(int i) const { return double(i) / n_; }

  // Copy onto a different box, filling new sites with the outside value.
  LatticeField reboxed(const Box& b) const;

  LatticeField& operator+=(const LatticeField& o);
  LatticeField& operator-=(const LatticeField& o);
  LatticeField& operator*=(double s);
  friend LatticeField operator+(LatticeField a, const LatticeField& b) { return a += b; }
  friend LatticeField operator-(LatticeField a, const LatticeField& b) { return a -= b; }
  friend LatticeField operator*(double s, LatticeField a) { return a *= s; }

  static LatticeField pointwise_max(const LatticeField& a, const LatticeField& b);
  // sup |a - b| over the union of both boxes using the outside convention.
  static double sup_distance(const LatticeField& a, const LatticeField& b);

 private:
  void check_compatible(const LatticeField& o) const;

  int n_ = 1;
  Box box_{};
  double outside_ = 0.0;
  std::vector<double> values_;
};

}  // namespace tas
