#include "tas/green.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tas/error.hpp"
#include "tas/kahan.hpp"
#include "tas/special.hpp"

namespace tas {

namespace {

constexpr double kPi = std::numbers::pi;

std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

int next_pow2(int v) {
  int p = 1;
  while (p < v) p <<= 1;
  return p;
}

double k_alpha(double alpha) {
  return std::pow(2.0, 1.0 - alpha) * std::tgamma(1.0 - alpha / 2.0) / std::tgamma(alpha / 2.0);
}

}  // namespace

double psi_discrete(double tx, double ty, const JumpLaw& law) {
  const double n = law.params.n;
  KahanSum s;
  for (std::size_t k = 0; k < law.support.size(); ++k) {
    const double h = 0.5 * (tx * law.support[k].dx + ty * law.support[k].dy) / n;
    const double sn = std::sin(h);
    s += law.prob[k] * 2.0 * sn * sn;
  }
  return law.n_alpha() * s.value();
}

// ---------------------------------------------------------------------------
// Continuous symbol

ContinuousSymbol::ContinuousSymbol(double alpha, double c, double M, double t_max)
    : alpha_(alpha), c_(c), M_(M), t_max_(std::max(t_max, 100.0)) {
  phi_inf_ = k_alpha(alpha) / (alpha * alpha);
  const GaussRule& g = gauss_legendre(16);
  const int panels = static_cast<int>(std::ceil((t_max_ - t_series_) / h_));
  cum_.resize(std::size_t(panels) + 1);
  cum_[0] = bessel_phi_series(t_series_, alpha);
  KahanSum acc;
  acc += cum_[0];
  for (int k = 0; k < panels; ++k) {
    const double a = t_series_ + k * h_;
    acc += integrate_panels([&](double u) { return (1.0 - bessel_j0(u)) * std::pow(u, -1.0 - alpha); }, a, a + h_,
                            1, g);
    cum_[std::size_t(k) + 1] = acc.value();
  }
  t_max_ = t_series_ + panels * h_;
}

double ContinuousSymbol::phi(double t) const {
  if (t <= t_series_) return bessel_phi_series(t, alpha_);
  if (t >= t_max_) {
    return phi_inf_ - std::pow(t, -alpha_) / alpha_ -
           std::sqrt(2.0 / kPi) * std::sin(t - kPi / 4.0) * std::pow(t, -alpha_ - 1.5);
  }
  const std::size_t k = static_cast<std::size_t>((t - t_series_) / h_);
  const double a = t_series_ + double(k) * h_;
  if (t == a) return cum_[k];
  const GaussRule& g = gauss_legendre(16);
  return cum_[k] +
         integrate_panels([&](double u) { return (1.0 - bessel_j0(u)) * std::pow(u, -1.0 - alpha_); }, a, t, 1, g);
}

double ContinuousSymbol::psi(double rho) const {
  rho = std::fabs(rho);
  if (rho == 0.0) return 0.0;
  return 2.0 * kPi * c_ * std::pow(rho, alpha_) * phi(rho * M_);
}

double ContinuousSymbol::psi(double tx, double ty) const { return psi(std::hypot(tx, ty)); }

// ---------------------------------------------------------------------------
// Discrete Green function

DiscreteGreen::DiscreteGreen(const JumpLaw& law, int window, int torus_n, std::array<int, 2> x0) : law_(law) {
  const int n = law.params.n;
  if (!((std::abs(x0[0]) == 1 && x0[1] == 0) || (x0[0] == 0 && std::abs(x0[1]) == 1)))
    throw ValidationError("reference point x0 must be an axis unit vector on the lattice");
  window_ = std::max(window, n);
  int N = torus_n > 0 ? next_pow2(torus_n) : next_pow2(std::max(256 * n, 64));
  N = std::max(N, next_pow2(4 * (window_ + law.reach + 2)));
  N_ = N;
  scale_ = std::pow(double(n), 2.0 - law.params.alpha);

  const std::vector<double> fine = torus_table(N);
  const std::vector<double> coarse = torus_table(N / 2);
  const int w1 = window_ + 1;
  table_.resize(std::size_t(w1) * std::size_t(w1));
  std::vector<double> raw_diff(table_.size());
  for (std::size_t k = 0; k < table_.size(); ++k) {
    table_[k] = (16.0 * fine[k] - coarse[k]) / 15.0;
    raw_diff[k] = (fine[k] - coarse[k]) / 15.0;
  }
  const std::size_t ref = std::size_t(n) * std::size_t(w1);  // (n, 0), symmetric in the axes
  const double t0 = table_[ref];
  const double d0 = raw_diff[ref];
  double err = 0.0;
  for (std::size_t k = 0; k < table_.size(); ++k) {
    table_[k] -= t0;
    err = std::max(err, std::fabs(raw_diff[k] - d0));
  }
  err_ = err * scale_;
}

std::vector<double> DiscreteGreen::torus_table(int N) const {
  const int m = N / 2 + 1;
  if (law_.reach >= N / 2) throw ValidationError("torus too small for the jump law");
  std::vector<double> buf(std::size_t(m) * std::size_t(m), 0.0);
  double* data = fftw_alloc_real(buf.size());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_r2r_2d(m, m, data, data, FFTW_REDFT00, FFTW_REDFT00, FFTW_ESTIMATE);
  }
  std::fill(data, data + buf.size(), 0.0);
  for (std::size_t k = 0; k < law_.support.size(); ++k) {
    const Offset& o = law_.support[k];
    if (o.dx >= 0 && o.dy >= 0) data[std::size_t(o.dx) * m + std::size_t(o.dy)] = law_.prob[k];
  }
  fftw_execute(plan);
  // 1/psi on the half torus; low modes recomputed directly to avoid cancellation.
  const int direct = std::min(m, 17);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double psi;
      if (a < direct && b < direct) {
        KahanSum s;
        for (std::size_t k = 0; k < law_.support.size(); ++k) {
          const double h = kPi * (double(a) * law_.support[k].dx + double(b) * law_.support[k].dy) / N;
          const double sn = std::sin(h);
          s += law_.prob[k] * 2.0 * sn * sn;
        }
        psi = s.value();
      } else {
        psi = 1.0 - data[std::size_t(a) * m + std::size_t(b)];
      }
      data[std::size_t(a) * m + std::size_t(b)] = (a == 0 && b == 0) ? 0.0 : 1.0 / psi;
    }
  fftw_execute(plan);
  const double var = law_.lattice_variance();
  const double inv_n2 = 1.0 / (double(N) * double(N));
  const int w1 = window_ + 1;
  std::vector<double> out(std::size_t(w1) * std::size_t(w1));
  for (int i = 0; i < w1; ++i)
    for (int j = 0; j < w1; ++j)
      out[std::size_t(i) * w1 + std::size_t(j)] =
          data[std::size_t(i) * m + std::size_t(j)] * inv_n2 - (double(i) * i + double(j) * j) * inv_n2 / var;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(data);
  return out;
}

double DiscreteGreen::lattice_value(int i, int j) const {
  i = std::abs(i);
  j = std::abs(j);
  if (i > window_ || j > window_) throw ValidationError("lattice point outside the Green window");
  return table_[std::size_t(i) * std::size_t(window_ + 1) + std::size_t(j)];
}

double DiscreteGreen::value(int i, int j) const { return scale_ * lattice_value(i, j); }

LatticeField DiscreteGreen::as_field() const {
  LatticeField f(law_.params.n, Box::centered(window_));
  for (int j = -window_; j <= window_; ++j)
    for (int i = -window_; i <= window_; ++i) f.at(i, j) = value(i, j);
  return f;
}

// ---------------------------------------------------------------------------
// Continuous Green function

ContinuousGreen::ContinuousGreen(const LimitConstants& L, const QuadratureConfig& quad, double cutoff)
    : L_(L),
      quad_(quad),
      cutoff_(cutoff),
      symbol_(L.alpha, L.c, L.M, cutoff * L.M * double(1 << std::min(quad.max_refinements, 6)) * 1.05 + 10.0),
      K_alpha_(k_alpha(L.alpha)) {}

double ContinuousGreen::near_field_coefficient() const { return L_.alpha * L_.alpha / (4.0 * kPi * kPi * L_.c); }

const ContinuousGreen::Grid& ContinuousGreen::grid_for(double radius, double R) const {
  // Panel width at most half an oscillation period of J0(rho |x|).
  const int klass = std::max(0, static_cast<int>(std::ceil(std::log2(std::max(radius, 1.0)))));
  const double width = std::min(0.5, kPi / double(1 << klass));
  const auto key = std::make_pair(klass, static_cast<int>(std::ceil(R / width)));
  std::lock_guard<std::mutex> lock(mu_);
  auto it = grids_.find(key);
  if (it != grids_.end()) return *it->second;
  auto g = std::make_unique<Grid>();
  g->width = width;
  g->R = width * key.second;
  const GaussRule& rule = gauss_legendre(16);
  const double alpha = L_.alpha;
  for (int p = 0; p < key.second; ++p) {
    const double mid = (p + 0.5) * width;
    for (std::size_t k = 0; k < rule.x.size(); ++k) {
      const double x = mid + 0.5 * width * rule.x[k];
      g->x.push_back(x);
      g->w.push_back(0.5 * width * rule.w[k]);
      g->inv_psi_minus_leading.push_back(1.0 / symbol_.psi(x) - 1.0 / (L_.c_alpha * std::pow(x, alpha)));
    }
  }
  return *grids_.emplace(key, std::move(g)).first->second;
}

double ContinuousGreen::integrate(double d, double R) const {
  const Grid& g = grid_for(d, R);
  KahanSum s;
  for (std::size_t k = 0; k < g.x.size(); ++k) {
    const double x = g.x[k];
    s += g.w[k] * (bessel_j0(x * d) - bessel_j0(x)) * x * g.inv_psi_minus_leading[k];
  }
  const double alpha = L_.alpha;
  // Leading oscillatory tail beyond R of h_inf / (c_alpha^2 rho^{2 alpha}).
  const double h_inf = 2.0 * kPi * L_.c * std::pow(L_.M, -alpha) / alpha;
  const double mu = 2.0 * alpha - 1.0;
  const double Rg = g.R;
  auto tail = [&](double a) {
    return -std::sqrt(2.0 / (kPi * a)) * std::sin(Rg * a - kPi / 4.0) * std::pow(Rg, -mu - 0.5) / a;
  };
  const double t = h_inf / (L_.c_alpha * L_.c_alpha) * (tail(d) - tail(1.0));
  const double leading = K_alpha_ * (std::pow(d, alpha - 2.0) - 1.0) / L_.c_alpha;
  return (s.value() + t + leading) / (2.0 * kPi);
}

double ContinuousGreen::value(double radius) const {
  if (!(radius > 0.0)) throw ValidationError("G_M is evaluated at x != 0");
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(radius);
    if (it != cache_.end()) return it->second;
  }
  if (radius == 1.0) return 0.0;
  double R = cutoff_;
  double prev = integrate(radius, R);
  double cur = prev;
  bool ok = false;
  for (int k = 0; k < std::min(quad_.max_refinements, 6); ++k) {
    R *= 2.0;
    cur = integrate(radius, R);
    if (std::fabs(cur - prev) <= quad_.tol) {
      ok = true;
      break;
    }
    prev = cur;
  }
  if (!ok) throw QuadratureFailure("G_M far-field integral did not stabilize at |x| = " + std::to_string(radius));
  std::lock_guard<std::mutex> lock(mu_);
  cache_[radius] = cur;
  return cur;
}

double ContinuousGreen::value(double x, double y) const { return value(std::hypot(x, y)); }

double ContinuousGreen::h_M(double radius) const {
  const double a = 1.0, b = radius / L_.M;
  if (a == b) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::fabs(b - a) / 0.5)));
  const double I = integrate_panels([](double t) { return bessel_j0(t) / t; }, a, b, panels, gauss_legendre(16));
  return 2.0 / (kPi * L_.sigma2_M) * I;
}

double ContinuousGreen::delta_M() const {
  // G_1 is the Green function of the same law with unit outer radius.
  LimitConstants L1 = L_;
  L1.M = 1.0;
  L1.sigma2_M = 2.0 * kPi * L_.c / (2.0 - L_.alpha);
  ContinuousGreen g1(L1, quad_, cutoff_);
  const double A = near_field_coefficient();
  const double Mpow = std::pow(L_.M, 2.0 - L_.alpha);
  const double g_x0 = g1.value(1.0 / L_.M) - A * Mpow;
  return -A + 2.0 / (kPi * L_.sigma2_M) * std::log(L_.M) - g_x0 / Mpow;
}

// ---------------------------------------------------------------------------

GreenEvaluator::GreenEvaluator(const JumpLaw& law_, const LimitConstants& limits_, const QuadratureConfig& quad_,
                               std::array<double, 2> x0_)
    : law(law_), limits(limits_), x0(x0_), quad(quad_) {
  if (std::fabs(std::hypot(x0[0], x0[1]) - 1.0) > 0.0) throw ValidationError("x0 must be a unit vector");
  quad.validate();
}

const DiscreteGreen& GreenEvaluator::discrete(int window) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!discrete_ || discrete_->window() < window)
    discrete_ = std::make_shared<DiscreteGreen>(law, window, 0,
                                                std::array<int, 2>{int(std::lround(x0[0])), int(std::lround(x0[1]))});
  return *discrete_;
}

const ContinuousGreen& GreenEvaluator::continuous() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!continuous_) continuous_ = std::make_shared<ContinuousGreen>(limits, quad);
  return *continuous_;
}

double green_discrete(int i, int j, const GreenEvaluator& eval) {
  const int w = std::max(std::abs(i), std::abs(j));
  return eval.discrete(w).value(i, j);
}

double green_continuous(double x, double y, const GreenEvaluator& eval) { return eval.continuous().value(x, y); }

// ---------------------------------------------------------------------------
// Series oracle

SeriesOracleResult green_discrete_series_oracle(const JumpLaw& law, const std::vector<std::array<int, 2>>& points,
                                                int steps, double accuracy) {
  if (steps < 16 || steps > 1000000) throw ValidationError("series cutoff must lie in [16, 1e6]");
  steps = (steps / 4) * 4;
  const double var1 = law.lattice_variance() / 2.0;  // per coordinate
  auto radius_at = [&](int m) {
    return std::min(m * law.reach, static_cast<int>(std::ceil(7.0 * std::sqrt(std::max(m, 1) * var1))) + law.reach);
  };
  const int H = radius_at(steps) + law.reach;
  for (const auto& p : points)
    if (std::max(std::abs(p[0]), std::abs(p[1])) > H / 2) throw ValidationError("oracle point too far from origin");
  const int W = 2 * H + 1;
  std::vector<double> q(std::size_t(W) * W, 0.0), next(q.size(), 0.0);
  auto idx = [&](int i, int j) { return std::size_t(j + H) * std::size_t(W) + std::size_t(i + H); };
  q[idx(0, 0)] = 1.0;
  std::vector<KahanSum> sums(points.size());
  std::vector<std::array<double, 3>> checkpoints(points.size());
  double trunc = 0.0;
  int prev_r = 0;
  for (int m = 0; m <= steps; ++m) {
    for (std::size_t k = 0; k < points.size(); ++k) sums[k] += q[idx(0, 0)] - q[idx(points[k][0], points[k][1])];
    if (m == steps / 4 || m == steps / 2 || m == steps)
      for (std::size_t k = 0; k < points.size(); ++k)
        checkpoints[k][m == steps / 4 ? 0 : (m == steps / 2 ? 1 : 2)] = sums[k].value();
    if (m == steps) break;
    const int r = radius_at(m + 1);
    double mass = 0.0;
#pragma omp parallel for reduction(+ : mass) schedule(static)
    for (int j = -r; j <= r; ++j)
      for (int i = -r; i <= r; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < law.support.size(); ++k) {
          const int a = i - law.support[k].dx, b = j - law.support[k].dy;
          if (std::abs(a) <= prev_r && std::abs(b) <= prev_r) s += law.prob[k] * q[idx(a, b)];
        }
        next[idx(i, j)] = s;
        mass += s;
      }
    double before = 0.0;
    for (int j = -prev_r; j <= prev_r; ++j)
      for (int i = -prev_r; i <= prev_r; ++i) before += q[idx(i, j)];
    trunc += std::max(0.0, before - mass) * next[idx(0, 0)];
    std::swap(q, next);
    prev_r = r;
  }
  SeriesOracleResult res;
  res.steps = steps;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& c = checkpoints[k];
    const double r1a = 2.0 * c[1] - c[0];
    const double r1b = 2.0 * c[2] - c[1];
    const double r2 = (4.0 * r1b - r1a) / 3.0;
    const bool origin = points[k][0] == 0 && points[k][1] == 0;
    res.value.push_back(origin ? 0.0 : r2);
    res.uncertainty.push_back(origin ? 0.0 : std::fabs(r2 - r1b) + trunc + 1e-12);
  }
  for (double u : res.uncertainty)
    if (u > accuracy) throw BudgetExceeded("series oracle uncertainty " + std::to_string(u) + " above requested " +
                                           std::to_string(accuracy));
  return res;
}

// ---------------------------------------------------------------------------
// Reports

AsymptoticsReport green_asymptotics_report(const ContinuousGreen& g, const std::vector<double>& near_radii,
                                           const std::vector<double>& far_radii, double margin) {
  AsymptoticsReport rep;
  const LimitConstants& L = g.limits();
  const double A = g.near_field_coefficient();
  const double Mpow = std::pow(L.M, 2.0 - L.alpha);
  rep.near_radii = near_radii;
  for (double d : near_radii) rep.near_remainder.push_back((g.value(d) - A * (std::pow(d, L.alpha - 2.0) - 1.0)) * Mpow);
  const std::size_t nh = std::max<std::size_t>(1, near_radii.size() / 2);
  for (std::size_t k = 0; k < rep.near_remainder.size(); ++k) {
    const double v = std::fabs(rep.near_remainder[k]);
    if (k < nh) rep.near_fit = std::max(rep.near_fit, v);
    rep.near_max = std::max(rep.near_max, v);
  }
  rep.near_pass = !near_radii.empty() && rep.near_max <= margin * rep.near_fit;

  rep.far_radii = far_radii;
  const double slope = 2.0 / (kPi * L.sigma2_M);
  std::vector<double> raw;
  double num = 0.0, den = 0.0;
  for (double d : far_radii) {
    raw.push_back(g.value(d) + slope * std::log(d) - g.h_M(d));
    const double w = std::pow(d, 2.0 * (2.0 - L.alpha));
    num += raw.back() * w;
    den += w;
  }
  rep.delta_fit = den > 0.0 ? num / den : 0.0;
  rep.delta_exact = g.delta_M();
  const std::size_t fh = std::max<std::size_t>(1, far_radii.size() / 2);
  for (std::size_t k = 0; k < far_radii.size(); ++k) {
    const double v = (raw[k] - rep.delta_fit) * std::pow(far_radii[k], 2.0 - L.alpha);
    rep.far_remainder.push_back(v);
    if (k < fh) rep.far_fit = std::max(rep.far_fit, std::fabs(v));
    rep.far_max = std::max(rep.far_max, std::fabs(v));
  }
  rep.far_pass = !far_radii.empty() && rep.far_max <= margin * rep.far_fit;
  rep.h_M_at_M = g.h_M(L.M);
  return rep;
}

GreenRateReport green_convergence_report(double alpha, double r, double M, const std::vector<int>& n_list,
                                         const std::vector<std::array<double, 2>>& samples,
                                         const QuadratureConfig& quad) {
  GreenRateReport rep;
  rep.samples = samples;
  const LimitConstants L = limit_constants(alpha, r, M);
  ContinuousGreen cont(L, quad);
  std::vector<double> gc;
  for (const auto& s : samples) gc.push_back(cont.value(s[0], s[1]));
  const double coef = 2.0 / (kPi * L.sigma2_M);
  for (int n : n_list) {
    const JumpLaw law = build_jump_law({alpha, r, M, n});
    int window = 0;
    std::vector<std::array<int, 2>> sites;
    for (const auto& s : samples) {
      const double a = s[0] * n, b = s[1] * n;
      if (std::fabs(a - std::round(a)) > 1e-9 || std::fabs(b - std::round(b)) > 1e-9)
        throw ValidationError("sample point not on the lattice (1/n)Z^2 for n = " + std::to_string(n));
      sites.push_back({int(std::lround(a)), int(std::lround(b))});
      window = std::max({window, std::abs(sites.back()[0]), std::abs(sites.back()[1])});
    }
    const DiscreteGreen dg(law, window);
    GreenRateRow row;
    row.n = n;
    row.c_n = law.c_n;
    row.beta_n = coef * (L.c / law.c_n - 1.0);
    row.torus_error = dg.error_estimate();
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const double gd = dg.value(sites[k][0], sites[k][1]);
      const double d = std::hypot(samples[k][0], samples[k][1]);
      const double w = 1.0 + std::pow(d, alpha - 2.0) + 1.0 / (d * d);
      const double diff = gc[k] - gd;
      row.g_discrete.push_back(gd);
      row.g_continuous.push_back(gc[k]);
      row.error_corrected = std::max(row.error_corrected, std::fabs(diff + row.beta_n * std::log(d)) / w);
      row.error_uncorrected = std::max(row.error_uncorrected, std::fabs(diff) / w);
      row.error_opposite = std::max(row.error_opposite, std::fabs(diff - row.beta_n * std::log(d)) / w);
    }
    rep.rows.push_back(row);
  }
  std::vector<double> ns, ec, eu, eo, eb;
  for (const auto& row : rep.rows) {
    ns.push_back(row.n);
    ec.push_back(row.error_corrected);
    eu.push_back(row.error_uncorrected);
    eo.push_back(row.error_opposite);
    eb.push_back(std::fabs(row.beta_n));
  }
  if (ns.size() >= 2) {
    rep.slope_corrected = loglog_slope(ns, ec);
    rep.slope_uncorrected = loglog_slope(ns, eu);
    rep.slope_opposite = loglog_slope(ns, eo);
    rep.slope_beta = loglog_slope(ns, eb);
  }
  return rep;
}

}  // namespace tas
