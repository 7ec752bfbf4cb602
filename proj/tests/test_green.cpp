#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tas/error.hpp"
#include "tas/green.hpp"
#include "tas/operators.hpp"

using namespace tas;

namespace {

const LimitConstants& limits() {
  static const LimitConstants L = limit_constants(1.5, 1.0, 2.0);
  return L;
}

JumpLaw law_at(int n) { return build_jump_law({1.5, 1.0, 2.0, n}); }

}  // namespace

TEST_CASE("discrete symbol basics") {
  const JumpLaw law = law_at(2);
  CHECK(psi_discrete(0.0, 0.0, law) == 0.0);
  for (double a = -2 * std::numbers::pi; a <= 2 * std::numbers::pi; a += 0.37)
    for (double b = -2 * std::numbers::pi; b <= 2 * std::numbers::pi; b += 0.41) {
      const double v = psi_discrete(a, b, law);
      CHECK(v > 0.0);
      CHECK(v == doctest::Approx(psi_discrete(-a, -b, law)).epsilon(1e-14));
    }
}

TEST_CASE("continuous symbol: scaling and small-theta law") {
  const LimitConstants& L = limits();
  const ContinuousSymbol psiM(1.5, L.c, 2.0, 4000.0), psi1(1.5, L.c, 1.0, 4000.0);
  CHECK(psiM.psi(0.0) == 0.0);
  for (double t : {0.05, 0.3, 1.0, 4.0, 30.0})
    CHECK(psiM.psi(t) == doctest::Approx(std::pow(2.0, -1.5) * psi1.psi(2.0 * t)).epsilon(1e-12));
  // |psi_M - sigma^2 t^2 / 4| / t^4 bounded on t <= 1/(2M)
  double cmax = 0.0, cmin = 1e300;
  for (double t = 0.02; t <= 0.25; t += 0.01) {
    const double C = std::fabs(psiM.psi(t) - L.sigma2_M * t * t / 4.0) / std::pow(t, 4);
    cmax = std::max(cmax, C);
    cmin = std::min(cmin, C);
  }
  CHECK(cmax < 2.0 * cmin);
  // Phi(infinity) = K_alpha / alpha^2
  const double a = 1.5;
  const double K = std::pow(2.0, 1.0 - a) * std::tgamma(1.0 - a / 2) / std::tgamma(a / 2);
  CHECK(psiM.phi_infinity() == doctest::Approx(K / (a * a)).epsilon(1e-10));
  CHECK(psiM.phi(3000.0) == doctest::Approx(K / (a * a)).epsilon(1e-4));
}

TEST_CASE("discrete and continuous symbols agree to O(theta^4 / n^2)") {
  const LimitConstants& L = limits();
  const ContinuousSymbol psiM(1.5, L.c, 2.0, 4000.0);
  std::vector<double> C;
  for (int n : {1, 2, 4}) {
    const JumpLaw law = law_at(n);
    double c = 0.0;
    for (double t = 0.05; t <= 0.5; t += 0.05)
      for (double ang : {0.0, 0.4, 0.785398}) {
        const double tx = t * std::cos(ang), ty = t * std::sin(ang);
        c = std::max(c, std::fabs(psi_discrete(tx, ty, law) - law.c_n / L.c * psiM.psi(t)) * n * n / std::pow(t, 4));
      }
    C.push_back(c);
  }
  CHECK(C[1] < 2.0 * C[0]);
  CHECK(C[2] < 2.0 * C[0]);
}

TEST_CASE("discrete Green function solves L G = -n^2 delta") {
  for (int n : {1, 2}) {
    const JumpLaw law = law_at(n);
    const int W = 3 * law.reach + 6;
    const DiscreteGreen G(law, W);
    const LatticeField g = G.as_field();
    CHECK(G.value(n, 0) == 0.0);
    const double n2 = double(n) * n;
    const std::vector<std::array<int, 2>> pts{{1, 0}, {0, 1}, {1, 1}, {2, 0}, {2, 1}, {3, 0}, {-1, 2}, {3, -3}, {0, -4}, {4, 1}};
    for (auto [i, j] : pts) CHECK(std::fabs(apply_L_discrete(g, law, i, j)) <= 1e-5 * n2);
    CHECK(std::fabs(apply_L_discrete(g, law, 0, 0) + n2) <= 0.005 * n2);
    CHECK(std::fabs(apply_L_discrete(g, law, 0, 0) + n2) <= 1e-10 * n2);
  }
}

TEST_CASE("discrete Green function dihedral symmetry") {
  const DiscreteGreen G(law_at(2), 10);
  for (int i = -6; i <= 6; ++i)
    for (int j = -6; j <= 6; ++j) {
      const double v = G.value(i, j);
      CHECK(v == G.value(-i, j));
      CHECK(v == G.value(i, -j));
      CHECK(v == doctest::Approx(G.value(j, i)).epsilon(1e-12));
    }
}

TEST_CASE("series oracle agrees with the Fourier Green function") {
  const JumpLaw law = law_at(1);
  const DiscreteGreen G(law, 8);
  const std::vector<std::array<int, 2>> pts{{1, 0}, {0, 0}, {2, 0}, {1, 1}, {2, 1}, {0, 3}};
  const SeriesOracleResult o = green_discrete_series_oracle(law, pts, 512, 1e-4);
  CHECK(o.value[1] == 0.0);
  for (std::size_t k = 2; k < pts.size(); ++k) {
    const double series = o.value[0] - o.value[k];
    CHECK(std::fabs(series - G.lattice_value(pts[k][0], pts[k][1])) <= o.uncertainty[0] + o.uncertainty[k] + 1e-9);
  }
  const SeriesOracleResult sym = green_discrete_series_oracle(law, {{2, 1}, {-2, -1}}, 128, 1e-2);
  CHECK(sym.value[0] == doctest::Approx(sym.value[1]).epsilon(1e-13));
}

TEST_CASE("continuous Green function values") {
  const ContinuousGreen g(limits(), QuadratureConfig{});
  CHECK(g.value(1.0) == 0.0);
  CHECK(g.value(0.5) == doctest::Approx(0.474107200264).epsilon(1e-9));
  CHECK(g.value(1.5) == doctest::Approx(-0.2499398).epsilon(1e-6));
  CHECK(g.value(3.0) == doctest::Approx(-0.6756066).epsilon(1e-6));
  CHECK(g.value(0.0, 3.0) == doctest::Approx(g.value(3.0 / std::sqrt(2.0), 3.0 / std::sqrt(2.0))).epsilon(1e-12));
  CHECK(g.h_M(2.0) == 0.0);
}

TEST_CASE("continuous Green function scaling identity") {
  const LimitConstants& L = limits();
  LimitConstants L1 = L;
  L1.M = 1.0;
  L1.sigma2_M = 2.0 * std::numbers::pi * L.c / (2.0 - L.alpha);
  const ContinuousGreen gM(L, QuadratureConfig{}), g1(L1, QuadratureConfig{});
  for (double x : {0.7, 3.0}) {
    const double rhs = std::pow(2.0, L.alpha - 2.0) * (g1.value(x / 2.0) - g1.value(0.5));
    CHECK(gM.value(x) == doctest::Approx(rhs).epsilon(1e-7));
  }
}
