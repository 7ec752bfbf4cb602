#include "tas/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tas/error.hpp"
#include "tas/kahan.hpp"
#include "tas/special.hpp"

namespace tas {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfDiag = 0.70710678118654752440;

// Antiderivative of sqrt(R^2 - x^2) on [0, R].
double chord_primitive(double x, double R) {
  x = std::min(x, R);
  return 0.5 * (x * std::sqrt(std::max(R * R - x * x, 0.0)) + R * R * std::asin(x / R));
}

// Area of {x >= x0, y >= y0, x^2 + y^2 <= R^2} for x0, y0 >= 0.
double corner_area(double x0, double y0, double R) {
  if (x0 * x0 + y0 * y0 >= R * R) return 0.0;
  const double x1 = std::sqrt(R * R - y0 * y0);
  return chord_primitive(x1, R) - chord_primitive(x0, R) - y0 * (x1 - x0);
}

// First-quadrant rectangle [a,b]x[c,d], 0 <= a < b, 0 <= c < d.
double quadrant_area(double a, double b, double c, double d, double R) {
  return corner_area(a, c, R) - corner_area(b, c, R) - corner_area(a, d, R) + corner_area(b, d, R);
}

// Reflects [a,b] into nonnegative pieces.
int fold_interval(double a, double b, double out[2][2]) {
  if (a >= 0.0) {
    out[0][0] = a;
    out[0][1] = b;
    return 1;
  }
  if (b <= 0.0) {
    out[0][0] = -b;
    out[0][1] = -a;
    return 1;
  }
  out[0][0] = 0.0;
  out[0][1] = -a;
  out[1][0] = 0.0;
  out[1][1] = b;
  return 2;
}

double disk_integral_pow(double R, double alpha) {
  // int_{B_R} |w|^{-alpha} dw
  return 2.0 * kPi * std::pow(R, 2.0 - alpha) / (2.0 - alpha);
}

int square_reach(double R) { return static_cast<int>(std::ceil(R + kHalfDiag)) + 1; }

double k_admissibility(double alpha, double r, double M) {
  KernelParams p;
  p.alpha = alpha;
  p.r = r;
  p.M = M;
  p.n = 1;
  return compute_k(p);
}

}  // namespace

void KernelParams::validate() const {
  if (!(alpha > 1.0 && alpha < 2.0)) throw ValidationError("alpha must lie in (1,2)");
  if (n < 1) throw ValidationError("n must be a positive integer");
  if (!(M > 0.0)) throw ValidationError("M must be positive");
  if (!(r > 0.0)) throw ValidationError("r must be positive");
  if (!(r < M)) throw ValidationError("r must satisfy r < M");
  if (!(k_admissibility(alpha, r, M) > 0.0))
    throw ValidationError("k_1 must be positive for the chosen (alpha, r, M)");
}

double JumpLaw::n_alpha() const { return std::pow(static_cast<double>(params.n), params.alpha); }

double JumpLaw::lattice_variance() const {
  KahanSum s;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double d2 = double(support[i].dx) * support[i].dx + double(support[i].dy) * support[i].dy;
    s += prob[i] * d2;
  }
  return s.value();
}

double rect_disk_area(double x0, double x1, double y0, double y1, double R) {
  if (x1 <= x0 || y1 <= y0 || R <= 0.0) return 0.0;
  // Whole-rectangle classification first so interior squares are exact.
  const double fx = std::max(std::fabs(x0), std::fabs(x1));
  const double fy = std::max(std::fabs(y0), std::fabs(y1));
  if (fx * fx + fy * fy <= R * R) return (x1 - x0) * (y1 - y0);
  const double nx = (x0 <= 0.0 && x1 >= 0.0) ? 0.0 : std::min(std::fabs(x0), std::fabs(x1));
  const double ny = (y0 <= 0.0 && y1 >= 0.0) ? 0.0 : std::min(std::fabs(y0), std::fabs(y1));
  if (nx * nx + ny * ny >= R * R) return 0.0;
  double xs[2][2], ys[2][2];
  const int nxp = fold_interval(x0, x1, xs);
  const int nyp = fold_interval(y0, y1, ys);
  double area = 0.0;
  for (int a = 0; a < nxp; ++a)
    for (int b = 0; b < nyp; ++b) area += quadrant_area(xs[a][0], xs[a][1], ys[b][0], ys[b][1], R);
  return area;
}

double unit_square_disk_area(int i, int j, double R) {
  return rect_disk_area(i - 0.5, i + 0.5, j - 0.5, j + 0.5, R);
}

double square_region_fraction(int i, int j, int n, double r, double M) {
  const double outer = unit_square_disk_area(i, j, M * n);
  if (outer == 0.0) return 0.0;
  const double inner = unit_square_disk_area(i, j, r);
  return std::clamp(outer - inner, 0.0, 1.0);
}

double compute_k(const KernelParams& p) {
  const double R = p.M * p.n;
  const int reach = square_reach(R);
  KahanSum sum;
  for (int j = -reach; j <= reach; ++j)
    for (int i = -reach; i <= reach; ++i) {
      if (i == 0 && j == 0) continue;
      const double F = square_region_fraction(i, j, p.n, p.r, p.M);
      if (F == 0.0) continue;
      sum += F * std::pow(std::hypot(double(i), double(j)), -p.alpha);
    }
  return 0.25 * (disk_integral_pow(R, p.alpha) - sum.value());
}

double compute_k_telescoped(const KernelParams& p, double ring_width) {
  const double R = p.M * p.n;
  KahanSum total;
  total += disk_integral_pow(p.r, p.alpha);
  double inner = p.r;
  while (inner < R) {
    const double outer = std::min(inner + ring_width, R);
    total += disk_integral_pow(outer, p.alpha) - disk_integral_pow(inner, p.alpha);
    const int reach = square_reach(outer);
    KahanSum ring;
    for (int j = -reach; j <= reach; ++j)
      for (int i = -reach; i <= reach; ++i) {
        if (i == 0 && j == 0) continue;
        const double d = std::hypot(double(i), double(j));
        if (d + kHalfDiag <= inner || d - kHalfDiag >= outer) continue;
        const double dF = unit_square_disk_area(i, j, outer) - unit_square_disk_area(i, j, inner);
        if (dF != 0.0) ring += dF * std::pow(d, -p.alpha);
      }
    total += -ring.value();
    inner = outer;
  }
  return 0.25 * total.value();
}

JumpLaw build_jump_law(const KernelParams& p) {
  if (!(p.alpha > 1.0 && p.alpha < 2.0)) throw ValidationError("alpha must lie in (1,2)");
  if (p.n < 1) throw ValidationError("n must be a positive integer");
  JumpLaw law;
  law.params = p;
  law.k_n = compute_k(p);
  if (!(law.k_n > 0.0)) throw NonPositiveCorrection("k_n = " + std::to_string(law.k_n));

  const double R = p.M * p.n;
  const int reach = square_reach(R);
  // Weights computed once per dihedral orbit so mirrored offsets are bit-identical.
  auto weight = [&](int i, int j) {
    int a = std::abs(i), b = std::abs(j);
    if (a < b) std::swap(a, b);
    double w = square_region_fraction(a, b, p.n, p.r, p.M) *
               std::pow(std::hypot(double(a), double(b)), -(2.0 + p.alpha));
    if (b == 0 && a == 1) w += law.k_n;
    return w;
  };
  std::vector<double> w;
  for (int j = -reach; j <= reach; ++j)
    for (int i = -reach; i <= reach; ++i) {
      if (i == 0 && j == 0) continue;
      const double wi = weight(i, j);
      if (wi <= 0.0) continue;
      law.support.push_back({i, j});
      w.push_back(wi);
      law.reach = std::max({law.reach, std::abs(i), std::abs(j)});
    }
  KahanSum total;
  for (double v : w) total += v;
  law.c_n = 1.0 / total.value();
  law.prob.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) law.prob[i] = law.c_n * w[i];
  law.sigma2_n = std::pow(double(p.n), p.alpha - 2.0) * law.lattice_variance();
  return law;
}

LimitConstants limit_constants(double alpha, double r, double M, int extrapolation_depth, double tol) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw ValidationError("alpha must lie in (1,2)");
  LimitConstants L;
  L.alpha = alpha;
  L.r = r;
  L.M = M;
  // Inner-disk corrections: sum over squares meeting B_r.
  const int reach = square_reach(r);
  KahanSum s_alpha, s_2alpha;
  for (int j = -reach; j <= reach; ++j)
    for (int i = -reach; i <= reach; ++i) {
      if (i == 0 && j == 0) continue;
      const double Fr = unit_square_disk_area(i, j, r);
      if (Fr == 0.0) continue;
      const double d = std::hypot(double(i), double(j));
      s_alpha += Fr * std::pow(d, -alpha);
      s_2alpha += Fr * std::pow(d, -(2.0 + alpha));
    }
  L.k = 0.25 * (s_alpha.value() - epstein_zeta_z2(alpha));
  const double cinv = 4.0 * L.k + epstein_zeta_z2(2.0 + alpha) - s_2alpha.value();
  L.c = 1.0 / cinv;
  L.sigma2_M = 2.0 * kPi * L.c * std::pow(M, 2.0 - alpha) / (2.0 - alpha);
  const double K_alpha = std::pow(2.0, 1.0 - alpha) * std::tgamma(1.0 - alpha / 2.0) / std::tgamma(alpha / 2.0);
  L.c_alpha_tilde = 2.0 * kPi * K_alpha;
  L.c_alpha = L.c * L.c_alpha_tilde / (alpha * alpha);

  // Richardson on k_n with the known n^{-alpha} leading error.
  std::vector<double> ks;
  for (int d = 0; d <= extrapolation_depth; ++d) {
    KernelParams p{alpha, r, M, 1 << d};
    ks.push_back(compute_k(p));
  }
  const double f = std::pow(2.0, alpha);
  double prev = ks.back();
  if (ks.size() >= 2) {
    const std::size_t m = ks.size();
    L.k_richardson = (f * ks[m - 1] - ks[m - 2]) / (f - 1.0);
    prev = m >= 3 ? (f * ks[m - 2] - ks[m - 3]) / (f - 1.0) : ks[m - 2];
  } else {
    L.k_richardson = ks.back();
  }
  const double scale = std::max(1.0, std::fabs(L.k));
  if (std::fabs(L.k_richardson - L.k) > tol * scale || std::fabs(L.k_richardson - prev) > 10.0 * tol * scale)
    throw NonConvergent("extrapolated k_n " + std::to_string(L.k_richardson) +
                        " disagrees with lattice-sum limit " + std::to_string(L.k));
  return L;
}

double find_admissible_r(double alpha, double M, double r0, double step) {
  for (double r = r0; r < M; r += step)
    if (k_admissibility(alpha, r, M) > 0.0) return r;
  throw NonPositiveCorrection("no admissible r below M on the search grid");
}

}  // namespace tas
