#pragma once

#include <cmath>

namespace tas {

// Neumaier variant of Kahan summation; safe when addends exceed the running sum.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  KahanSum& operator+=(double v) {
    add(v);
    return *this;
  }
  double value() const { return sum + comp; }
};

}  // namespace tas
