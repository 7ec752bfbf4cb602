// Command-line driver: kernel dumps, operator and Green function tables,
// sandpile and obstacle runs, and the convergence experiments.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <iostream>
#include <optional>

#include "tas/config.hpp"
#include "tas/error.hpp"
#include "tas/experiments.hpp"
#include "tas/green.hpp"
#include "tas/obstacle.hpp"
#include "tas/operators.hpp"
#include "tas/output.hpp"

#ifdef TAS_HAVE_OPENMP
#include <omp.h>
#endif

using namespace tas;
using nlohmann::json;

namespace {

struct Globals {
  std::string config_path;
  bool deterministic = false;
  int threads = 0;
  std::string out_dir;
};

struct KernelFlags {
  std::optional<double> alpha, r, M;
  std::optional<int> n;
  void add(CLI::App* app) {
    app->add_option("--alpha", alpha, "stability index in (1,2)");
    app->add_option("--r", r, "inner cut, lattice units");
    app->add_option("--M", M, "outer cut, macroscopic units");
    app->add_option("--n", n, "lattice refinement");
  }
};

class Context {
 public:
  Context(const std::string& command, const Globals& g, Density default_scenario, std::vector<int> default_n_list)
      : g_(g), command_(command) {
    if (!g.config_path.empty()) {
      cfg_ = parse_config(g.config_path);
    } else {
      cfg_.scenario = std::move(default_scenario);
      cfg_.n_list = std::move(default_n_list);
      cfg_.validate();
    }
    if (g.deterministic) cfg_.schedule.policy = SchedulePolicy::sweep;
    out_ = g.out_dir.empty() ? cfg_.outputs.dir : g.out_dir;
    ensure_directory(out_);
    report_["command"] = command;
    report_["config"] = emit_config(cfg_);
    report_["deterministic"] = g.deterministic;
  }

  ExperimentConfig& cfg() { return cfg_; }
  KernelParams kernel(const KernelFlags& f) {
    KernelParams p = cfg_.kernel;
    if (f.alpha) p.alpha = *f.alpha;
    if (f.r) p.r = *f.r;
    if (f.M) p.M = *f.M;
    p.n = f.n ? *f.n : cfg_.n_list.front();
    p.validate();
    report_["kernel"] = {{"alpha", p.alpha}, {"r", p.r}, {"M", p.M}, {"n", p.n}};
    return p;
  }
  std::string path(const std::string& name) const { return out_ + "/" + name; }
  json& report() { return report_; }
  double seconds_since_start() const {
    if (g_.deterministic) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  double timing(double s) const { return g_.deterministic ? 0.0 : s; }
  void csv(const std::vector<std::pair<std::string, const LatticeField*>>& fields, const std::string& name) {
    if (!cfg_.outputs.csv) return;
    write_fields_csv(path(name), fields);
    for (const auto& f : fields) report_["hashes"][name + ":" + f.first] = content_hash(*f.second);
  }
  void heatmap(const LatticeField& f, const std::string& name, int n) {
    if (!cfg_.outputs.png) return;
    report_["images"].push_back(render_heatmap(f, path(name), cfg_.outputs.colormap == "heat" ? Colormap::heat : Colormap::grayscale, {n, content_hash(emit_config(cfg_))}));
  }
  void finish(bool pass) {
    report_["pass"] = pass;
    report_["seconds"] = seconds_since_start();
    write_json(path(command_ + "_" + cfg_.outputs.report), report_);
  }

 private:
  const Globals& g_;
  std::string command_;
  ExperimentConfig cfg_;
  std::string out_;
  json report_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json invariants_json(const InvariantLog& log) {
  return {{"initial_mass", log.initial_mass},
          {"max_mass_drift", log.max_mass_drift},
          {"max_second_moment_defect", log.max_second_moment_defect},
          {"odometer_monotone", log.odometer_monotone},
          {"mass_nonnegative", log.mass_nonnegative},
          {"checkpoints", log.checkpoints}};
}

Function2D test_function(const std::string& name) {
  if (name == "gaussian") return [](double x, double y) { return std::exp(-(x * x + y * y)); };
  if (name == "bump") return [](double x, double y) { return SmoothBump{0.0, 0.0, 1.0, 1.0}(x, y); };
  throw ValidationError("unknown function '" + name + "' (gaussian | bump)");
}

int cmd_kernel_dump(const Globals& g, const KernelFlags& kf) {
  Context ctx("kernel", g, two_mass_density(), {1});
  const KernelParams p = ctx.kernel(kf);
  const JumpLaw law = build_jump_law(p);
  const LimitConstants L = limit_constants(p.alpha, p.r, p.M);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < law.support.size(); ++k)
    rows.push_back({double(law.support[k].dx), double(law.support[k].dy), law.prob[k]});
  write_table_csv(ctx.path("kernel_n" + std::to_string(p.n) + ".csv"), {"yx", "yy", "p"}, rows);
  ctx.report()["jump_law"] = {{"offsets", law.support.size()}, {"k_n", law.k_n},       {"c_n", law.c_n},
                              {"sigma2_n", law.sigma2_n},      {"reach", law.reach}};
  ctx.report()["limits"] = {{"k", L.k}, {"c", L.c}, {"sigma2_M", L.sigma2_M}, {"c_alpha", L.c_alpha},
                            {"k_richardson", L.k_richardson}};
  std::printf("offsets %zu  k_n %s  c_n %s  sigma2_n %s\nk %s  c %s  sigma2_M %s\n", law.support.size(),
              format_double(law.k_n).c_str(), format_double(law.c_n).c_str(), format_double(law.sigma2_n).c_str(),
              format_double(L.k).c_str(), format_double(L.c).c_str(), format_double(L.sigma2_M).c_str());
  ctx.finish(true);
  return 0;
}

LatticeField read_field_csv(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open field file '" + path + "'");
  std::vector<std::array<double, 3>> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == 'i' || line[0] == '#') continue;
    std::array<double, 3> v{};
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &v[0], &v[1], &v[2]) != 3)
      throw ParseError("expected i,j,value", lineno, 1);
    pts.push_back(v);
  }
  if (pts.empty()) throw ValidationError("field file '" + path + "' has no rows");
  Box b{int(pts[0][0]), int(pts[0][0]), int(pts[0][1]), int(pts[0][1])};
  for (const auto& v : pts) b = Box::hull(b, Box{int(v[0]), int(v[0]), int(v[1]), int(v[1])});
  LatticeField f(n, b);
  for (const auto& v : pts) f.at(int(v[0]), int(v[1])) = v[2];
  return f;
}

int cmd_op_apply(const Globals& g, const KernelFlags& kf, const std::string& fname, const std::string& field_path,
                 double half_width, bool continuous) {
  Context ctx("op", g, two_mass_density(), {1});
  const KernelParams p = ctx.kernel(kf);
  const JumpLaw law = build_jump_law(p);
  if (!field_path.empty()) {
    const LatticeField f = read_field_csv(field_path, p.n);
    const LatticeField Lf = apply_L_discrete_field(f, law);
    std::vector<std::vector<double>> rows;
    for (int j = f.box().j0; j <= f.box().j1; ++j)
      for (int i = f.box().i0; i <= f.box().i1; ++i) rows.push_back({double(i), double(j), f.at(i, j), Lf.at(i, j)});
    write_table_csv(ctx.path("op_field_n" + std::to_string(p.n) + ".csv"), {"i", "j", "value", "L_value"}, rows);
    ctx.report()["boundary_contaminated_width"] = law.reach;
    ctx.finish(true);
    return 0;
  }
  const Function2D f = test_function(fname);
  const int h = int(std::floor(half_width * p.n + 1e-12));
  const double c = continuous ? limit_constants(p.alpha, p.r, p.M).c : 0.0;
  std::vector<std::vector<double>> rows;
  for (int j = -h; j <= h; ++j)
    for (int i = -h; i <= h; ++i) {
      const double x = double(i) / p.n, y = double(j) / p.n;
      std::vector<double> row{double(i), double(j), x, y, f(x, y), apply_L_discrete_function(f, law, i, j)};
      if (continuous) row.push_back(apply_L_continuous(f, x, y, c, p.alpha, p.M, ctx.cfg().quadrature));
      rows.push_back(row);
    }
  std::vector<std::string> header{"i", "j", "x", "y", "f", "L_discrete"};
  if (continuous) header.push_back("L_continuous");
  write_table_csv(ctx.path("op_" + fname + "_n" + std::to_string(p.n) + ".csv"), header, rows);
  ctx.finish(true);
  return 0;
}

int cmd_green_table(const Globals& g, const KernelFlags& kf, int window, bool continuous) {
  Context ctx("green_table", g, two_mass_density(), {1});
  const KernelParams p = ctx.kernel(kf);
  const JumpLaw law = build_jump_law(p);
  const LimitConstants L = limit_constants(p.alpha, p.r, p.M);
  GreenEvaluator eval(law, L, ctx.cfg().quadrature);
  const DiscreteGreen& G = eval.discrete(window);
  const double beta = 2.0 / (std::numbers::pi * L.sigma2_M) * (L.c / law.c_n - 1.0);
  std::vector<std::vector<double>> rows;
  for (int j = 0; j <= window; ++j)
    for (int i = j; i <= window; ++i) {
      const double x = double(i) / p.n, y = double(j) / p.n;
      std::vector<double> row{double(p.n), x, y, G.value(i, j)};
      if (continuous) {
        if (i == 0 && j == 0) continue;
        const double gm = green_continuous(x, y, eval);
        row.insert(row.end(), {gm, beta, std::fabs(gm - G.value(i, j) + beta * std::log(std::hypot(x, y)))});
      }
      rows.push_back(row);
    }
  std::vector<std::string> header{"n", "x_1", "x_2", "G_discrete"};
  if (continuous) header.insert(header.end(), {"G_continuous", "beta_n", "corrected_error"});
  write_table_csv(ctx.path("green_n" + std::to_string(p.n) + ".csv"), header, rows);
  ctx.report()["torus_size"] = G.torus_size();
  ctx.report()["error_estimate"] = G.error_estimate();
  ctx.report()["beta_n"] = beta;
  ctx.finish(true);
  return 0;
}

int cmd_green_rate(const Globals& g, const KernelFlags& kf, std::vector<int> n_list) {
  Context ctx("green_rate", g, two_mass_density(), {1});
  const KernelParams p = ctx.kernel(kf);
  if (n_list.empty()) n_list = {2, 4, 8, 16};
  const std::vector<std::array<double, 2>> samples{{0.5, 0.0}, {0.5, 0.5}, {1.0, 1.0}, {1.5, 0.0},
                                                   {2.0, 0.5}, {3.0, 0.0}, {0.0, 2.0}};
  const GreenRateReport rep = green_convergence_report(p.alpha, p.r, p.M, n_list, samples, ctx.cfg().quadrature);
  std::vector<std::vector<double>> rows;
  for (const auto& r : rep.rows)
    rows.push_back({double(r.n), r.beta_n, r.c_n, r.error_corrected, r.error_uncorrected, r.error_opposite,
                    r.torus_error});
  write_table_csv(ctx.path("green_rate.csv"),
                  {"n", "beta_n", "c_n", "error_corrected", "error_uncorrected", "error_opposite", "torus_error"},
                  rows);
  ctx.report()["slopes"] = {{"corrected", rep.slope_corrected},
                            {"uncorrected", rep.slope_uncorrected},
                            {"opposite", rep.slope_opposite},
                            {"beta", rep.slope_beta}};
  std::printf("slope corrected %.4f  uncorrected %.4f  opposite-sign %.4f\n", rep.slope_corrected,
              rep.slope_uncorrected, rep.slope_opposite);
  ctx.finish(true);
  return 0;
}

int cmd_simulate(const Globals& g) {
  Context ctx("simulate", g, two_mass_density(), {1});
  const ExperimentConfig& cfg = ctx.cfg();
  bool pass = true;
  for (int n : cfg.n_list) {
    const SimulationRun run = run_simulation(cfg.scenario, cfg.kernel, n, cfg.schedule);
    const std::string tag = "n" + std::to_string(n);
    ctx.csv({{"rho", &run.rho}, {"nu", &run.state.mass}, {"u", &run.state.odometer}}, "simulate_" + tag + ".csv");
    ctx.heatmap(run.state.mass, "nu_" + tag + ".png", n);
    const double nu_max = run.state.mass.max();
    const bool ok = run.mass_defect <= 1e-12 && nu_max <= 1.0 + 1e-9 &&
                    run.residual <= 10.0 * n * n * cfg.schedule.tol && run.report.invariants.odometer_monotone &&
                    run.report.invariants.mass_nonnegative && run.report.invariants.max_second_moment_defect <= 1e-8;
    pass = pass && ok;
    ctx.report()["runs"].push_back({{"n", n},
                                    {"policy", to_string(cfg.schedule.policy)},
                                    {"sweeps", run.report.sweeps},
                                    {"topplings", run.report.topplings},
                                    {"box_growths", run.state.growths},
                                    {"mass_defect", run.mass_defect},
                                    {"max_nu", nu_max},
                                    {"max_u", run.state.odometer.max()},
                                    {"residual", run.residual},
                                    {"invariants", invariants_json(run.report.invariants)},
                                    {"tolerance", cfg.schedule.tol},
                                    {"seconds", ctx.timing(run.seconds)},
                                    {"pass", ok}});
    std::printf("n=%d sweeps %lld topplings %lld mass defect %.3g max nu %.12g residual %.3g %s\n", n,
                run.report.sweeps, run.report.topplings, run.mass_defect, nu_max, run.residual, ok ? "ok" : "FAIL");
  }
  ctx.finish(pass);
  return pass ? 0 : 1;
}

int cmd_obstacle(const Globals& g) {
  Context ctx("obstacle", g, two_mass_density(), {1});
  const ExperimentConfig& cfg = ctx.cfg();
  bool pass = true;
  for (int n : cfg.n_list) {
    KernelParams p = cfg.kernel;
    p.n = n;
    const JumpLaw law = build_jump_law(p);
    GreenEvaluator eval(law, limit_constants(p.alpha, p.r, p.M), cfg.quadrature);
    const auto t0 = std::chrono::steady_clock::now();
    const ObstacleSolution sol = solve_obstacle(cfg.scenario, n, law, eval, cfg.obstacle);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string tag = "n" + std::to_string(n);
    ctx.csv({{"gamma", &sol.problem.gamma},
             {"s", &sol.problem.s},
             {"u", &sol.odometer},
             {"nu", &sol.final_distribution}},
            "obstacle_" + tag + ".csv");
    ctx.heatmap(sol.final_distribution, "obstacle_nu_" + tag + ".png", n);
    const double m0 = sol.problem.rho.sum();
    const double defect = m0 > 0.0 ? std::fabs(sol.final_distribution.sum() - m0) / m0 : 0.0;
    const double nu_max = sol.final_distribution.max();
    const bool ok = sol.report.monotone && sol.report.complementarity <= 10.0 * cfg.obstacle.tol &&
                    defect <= 1e-9 && nu_max <= 1.0 + 1e-6;
    pass = pass && ok;
    ctx.report()["runs"].push_back({{"n", n},
                                    {"scheme", to_string(cfg.obstacle.scheme)},
                                    {"iterations", sol.report.iterations},
                                    {"contraction", sol.report.contraction},
                                    {"final_change", sol.report.final_change},
                                    {"monotone", sol.report.monotone},
                                    {"complementarity", sol.report.complementarity},
                                    {"clip", sol.report.clip},
                                    {"omega_doublings", sol.report.omega_doublings},
                                    {"mass_defect", defect},
                                    {"max_nu", nu_max},
                                    {"max_u", sol.odometer.max()},
                                    {"tolerance", cfg.obstacle.tol},
                                    {"seconds", ctx.timing(secs)},
                                    {"pass", ok}});
    std::printf("n=%d iterations %lld complementarity %.3g max u %.12g max nu %.12g %s\n", n, sol.report.iterations,
                sol.report.complementarity, sol.odometer.max(), nu_max, ok ? "ok" : "FAIL");
  }
  ctx.finish(pass);
  return pass ? 0 : 1;
}

int cmd_abelian(const Globals& g) {
  Context ctx("abelian", g, two_mass_density(), {1});
  const AbelianReport rep = run_abelian_check(ctx.cfg());
  std::vector<std::string> names;
  for (SchedulePolicy p : rep.policies) names.push_back(to_string(p));
  ctx.report()["abelian"] = {{"policies", names},
                             {"max_nu_difference", rep.max_nu_difference},
                             {"max_u_difference", rep.max_u_difference},
                             {"threshold", rep.threshold}};
  std::printf("sup|nu_i - nu_j| %.3g  sup|u_i - u_j| %.3g  threshold %.3g %s\n", rep.max_nu_difference,
              rep.max_u_difference, rep.threshold, rep.pass ? "ok" : "FAIL");
  ctx.finish(rep.pass);
  return rep.pass ? 0 : 1;
}

int cmd_weak_star(const Globals& g) {
  Context ctx("weak_star", g, smooth_bump_density(), {4, 8, 16});
  const WeakStarReport rep = run_weak_star_experiment(ctx.cfg());
  std::vector<std::string> header{"n"};
  for (std::size_t f = 0; f < rep.test_functions.size(); ++f) header.push_back("phi" + std::to_string(f));
  header.push_back("total_mass");
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < rep.n_list.size(); ++k) {
    std::vector<double> row{double(rep.n_list[k])};
    row.insert(row.end(), rep.pairings[k].begin(), rep.pairings[k].end());
    row.push_back(rep.total_mass[k]);
    rows.push_back(row);
  }
  write_table_csv(ctx.path("weak_star.csv"), header, rows);
  ctx.report()["weak_star"] = {{"pairings", rep.pairings},
                               {"differences", rep.differences},
                               {"strictly_decreasing", rep.strictly_decreasing}};
  for (std::size_t f = 0; f < rep.differences.size(); ++f) {
    std::printf("phi%zu differences", f);
    for (double d : rep.differences[f]) std::printf(" %.3e", d);
    std::printf(" %s\n", rep.strictly_decreasing[f] ? "decreasing" : "NOT decreasing");
  }
  ctx.finish(rep.pass);
  return rep.pass ? 0 : 1;
}

int cmd_laplacian_rate(const Globals& g, const KernelFlags& kf, const std::string& fname, double half_width,
                       std::vector<int> n_list) {
  Context ctx("laplacian_rate", g, two_mass_density(), {1});
  const KernelParams p = ctx.kernel(kf);
  if (n_list.empty()) n_list = {2, 4, 8, 16};
  const LimitConstants L = limit_constants(p.alpha, p.r, p.M);
  const RateTable t = laplacian_convergence_report(test_function(fname), half_width, n_list, p.alpha, p.r, p.M,
                                                   L.c, ctx.cfg().quadrature);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < t.n_list.size(); ++k) rows.push_back({double(t.n_list[k]), t.errors[k]});
  write_table_csv(ctx.path("laplacian_rate.csv"), {"n", "sup_error"}, rows);
  ctx.report()["slope"] = t.slope;
  ctx.report()["strictly_decreasing"] = t.strictly_decreasing;
  std::printf("slope %.4f  strictly decreasing %s\n", t.slope, t.strictly_decreasing ? "yes" : "no");
  ctx.finish(true);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated alpha-stable divisible sandpile: simulation, Green functions, obstacle problem"};
  app.footer(config_reference());
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "experiment config file");
  app.add_flag("--deterministic", g.deterministic, "serial raster toppling, single thread, timings omitted from reports");
  app.add_option("--threads", g.threads, "OpenMP thread count (0: runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", g.out_dir, "output directory (overrides [outputs] dir)");

  KernelFlags kf;
  std::string fname = "gaussian";
  double half_width = 1.0;
  int window = 16;
  bool continuous = false;
  std::vector<int> n_list;

  auto* kernel = app.add_subcommand("kernel", "jump law tables");
  kernel->require_subcommand(1);
  auto* kernel_dump = kernel->add_subcommand("dump", "write the jump law p_n and its constants");
  kf.add(kernel_dump);

  auto* op = app.add_subcommand("op", "operator evaluation");
  op->require_subcommand(1);
  auto* op_apply = op->add_subcommand("apply", "apply L_{M,n} (and optionally L_M) to a test function");
  kf.add(op_apply);
  std::string field_path;
  op_apply->add_option("--field", field_path, "CSV with columns i,j,value (overrides --function)");
  op_apply->add_option("--function", fname, "gaussian | bump");
  op_apply->add_option("--half-width", half_width, "half width of the sampled square");
  op_apply->add_flag("--continuous", continuous, "also evaluate L_M by quadrature");

  auto* green = app.add_subcommand("green", "Green function tables");
  green->require_subcommand(1);
  auto* green_table = green->add_subcommand("table", "G_{M,n} on a window of lattice points");
  kf.add(green_table);
  green_table->add_option("--window", window, "largest |i|, |j| in lattice units");
  green_table->add_flag("--continuous", continuous, "also evaluate G_M");
  auto* green_rate = green->add_subcommand("rate", "convergence of G_{M,n} to G_M");
  kf.add(green_rate);
  green_rate->add_option("--n-list", n_list, "refinements (default 2 4 8 16)");

  auto* simulate = app.add_subcommand("simulate", "stabilize the configured scenario for each n");
  auto* obstacle = app.add_subcommand("obstacle", "obstacle problem");
  obstacle->require_subcommand(1);
  auto* obstacle_solve = obstacle->add_subcommand("solve", "odometer from the least superharmonic majorant");
  auto* abelian = app.add_subcommand("abelian-check", "compare final states across toppling schedules");
  auto* weak = app.add_subcommand("weak-star", "pairings of nu_n with plateau test functions");
  auto* lap = app.add_subcommand("laplacian-rate", "sup |L_M f - L_{M,n} f| over n");
  kf.add(lap);
  lap->add_option("--function", fname, "gaussian | bump");
  lap->add_option("--half-width", half_width, "half width of the compared square");
  lap->add_option("--n-list", n_list, "refinements (default 2 4 8 16)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : int(ExitCode::usage);
  }

#ifdef TAS_HAVE_OPENMP
  if (g.deterministic) omp_set_num_threads(1);
  else if (g.threads > 0) omp_set_num_threads(g.threads);
#endif

  try {
    if (*kernel_dump) return cmd_kernel_dump(g, kf);
    if (*op_apply) return cmd_op_apply(g, kf, fname, field_path, half_width, continuous);
    if (*green_table) return cmd_green_table(g, kf, window, continuous);
    if (*green_rate) return cmd_green_rate(g, kf, n_list);
    if (*simulate) return cmd_simulate(g);
    if (*obstacle_solve) return cmd_obstacle(g);
    if (*abelian) return cmd_abelian(g);
    if (*weak) return cmd_weak_star(g);
    if (*lap) return cmd_laplacian_rate(g, kf, fname, half_width, n_list);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return int(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return int(ExitCode::failure);
  }
  return int(ExitCode::usage);
}
