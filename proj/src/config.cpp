#include "tas/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "tas/error.hpp"

namespace tas {

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::simulate: return "simulate";
    case RunMode::obstacle: return "obstacle";
    case RunMode::green_rate: return "green-rate";
    case RunMode::laplacian_rate: return "laplacian-rate";
    case RunMode::weak_star: return "weak-star";
    case RunMode::abelian_check: return "abelian-check";
  }
  return "simulate";
}

RunMode run_mode_from_string(const std::string& s) {
  for (RunMode m : {RunMode::simulate, RunMode::obstacle, RunMode::green_rate, RunMode::laplacian_rate,
                    RunMode::weak_star, RunMode::abelian_check})
    if (to_string(m) == s) return m;
  throw ValidationError("unknown mode '" + s + "'");
}

void ExperimentConfig::validate() const {
  KernelParams k = kernel;
  k.n = 1;
  k.validate();
  if (n_list.empty()) throw ValidationError("n_list must not be empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw ValidationError("n_list entries must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw ValidationError("n_list must be strictly increasing");
  }
  schedule.validate();
  quadrature.validate();
  if (!(obstacle.tol > 0.0)) throw ValidationError("obstacle tol must be positive");
  if (obstacle.max_iterations < 1) throw ValidationError("obstacle max_iterations must be positive");
  if (!std::isfinite(scenario.support_radius) || scenario.support_radius <= 0.0)
    throw ValidationError("scenario support_radius must be declared, positive and finite");
  for (const PointMass& p : scenario.points) {
    if (!(p.mass >= 0.0)) throw ValidationError("point masses must be nonnegative");
    if (std::hypot(p.x, p.y) > scenario.support_radius)
      throw ValidationError("point mass lies outside the declared support radius");
  }
  for (const SmoothBump& b : scenario.bumps) {
    if (!(b.radius > 0.0) || !(b.height >= 0.0)) throw ValidationError("bump radius must be positive, height nonnegative");
    if (std::hypot(b.cx, b.cy) + b.radius > scenario.support_radius)
      throw ValidationError("bump extends beyond the declared support radius");
  }
  for (const PlateauBump& t : test_functions)
    if (!(t.inner >= 0.0) || !(t.outer > t.inner)) throw ValidationError("test function needs 0 <= inner < outer");
  if (mode == RunMode::abelian_check && abelian_policies.size() < 2)
    throw ValidationError("abelian-check needs at least two policies");
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return kernel == o.kernel && scenario == o.scenario && n_list == o.n_list && schedule == o.schedule &&
         abelian_policies == o.abelian_policies && quadrature == o.quadrature &&
         obstacle.scheme == o.obstacle.scheme && obstacle.tol == o.obstacle.tol &&
         obstacle.max_iterations == o.obstacle.max_iterations && obstacle.max_doublings == o.obstacle.max_doublings &&
         test_functions == o.test_functions && outputs == o.outputs && mode == o.mode;
}

namespace {

struct Token {
  std::string text;
  int column;
};

std::vector<Token> split_words(const std::string& s, int base_column) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != ',') ++j;
    out.push_back({s.substr(i, j - i), base_column + int(i)});
    i = j;
  }
  return out;
}

double to_double(const Token& t, int line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (ec != std::errc() || p != t.text.data() + t.text.size() || !std::isfinite(v))
    throw ParseError("expected a number, got '" + t.text + "'", line, t.column);
  return v;
}

long long to_int(const Token& t, int line) {
  long long v = 0;
  auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (ec != std::errc() || p != t.text.data() + t.text.size())
    throw ParseError("expected an integer, got '" + t.text + "'", line, t.column);
  return v;
}

bool to_bool(const Token& t, int line) {
  if (t.text == "true" || t.text == "yes" || t.text == "1") return true;
  if (t.text == "false" || t.text == "no" || t.text == "0") return false;
  throw ParseError("expected true or false, got '" + t.text + "'", line, t.column);
}

using Setter = std::function<void(const std::vector<Token>&, int)>;

template <class T>
void with_one(const std::vector<Token>& v, int line, int col, T&& fn) {
  if (v.size() != 1) throw ParseError("expected exactly one value", line, col);
  fn(v[0]);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  bool saw_points = false, saw_bumps = false, saw_tests = false;
  cfg.scenario.support_radius = std::nan("");
  std::map<std::string, std::map<std::string, Setter>> keys;
  auto num = [](double& dst) {
    return [&dst](const std::vector<Token>& v, int line) { with_one(v, line, 1, [&](const Token& t) { dst = to_double(t, line); }); };
  };
  auto inum = [](auto& dst) {
    return [&dst](const std::vector<Token>& v, int line) {
      with_one(v, line, 1, [&](const Token& t) { dst = static_cast<std::remove_reference_t<decltype(dst)>>(to_int(t, line)); });
    };
  };
  auto flag = [](bool& dst) {
    return [&dst](const std::vector<Token>& v, int line) { with_one(v, line, 1, [&](const Token& t) { dst = to_bool(t, line); }); };
  };
  auto str = [](std::string& dst) {
    return [&dst](const std::vector<Token>& v, int line) { with_one(v, line, 1, [&](const Token& t) { dst = t.text; }); };
  };

  keys["kernel"]["alpha"] = num(cfg.kernel.alpha);
  keys["kernel"]["r"] = num(cfg.kernel.r);
  keys["kernel"]["M"] = num(cfg.kernel.M);

  keys["scenario"]["support_radius"] = num(cfg.scenario.support_radius);
  keys["scenario"]["point"] = [&](const std::vector<Token>& v, int line) {
    if (v.size() != 3) throw ParseError("point expects: x y mass", line, v.empty() ? 1 : v[0].column);
    if (!saw_points) cfg.scenario.points.clear(), saw_points = true;
    cfg.scenario.points.push_back({to_double(v[0], line), to_double(v[1], line), to_double(v[2], line)});
  };
  keys["scenario"]["bump"] = [&](const std::vector<Token>& v, int line) {
    if (v.size() != 4) throw ParseError("bump expects: cx cy radius height", line, v.empty() ? 1 : v[0].column);
    if (!saw_bumps) cfg.scenario.bumps.clear(), saw_bumps = true;
    cfg.scenario.bumps.push_back({to_double(v[0], line), to_double(v[1], line), to_double(v[2], line), to_double(v[3], line)});
  };

  keys["run"]["mode"] = [&](const std::vector<Token>& v, int line) {
    with_one(v, line, 1, [&](const Token& t) {
      try {
        cfg.mode = run_mode_from_string(t.text);
      } catch (const ValidationError&) {
        throw ParseError("unknown mode '" + t.text + "'", line, t.column);
      }
    });
  };
  keys["run"]["n_list"] = [&](const std::vector<Token>& v, int line) {
    cfg.n_list.clear();
    for (const Token& t : v) cfg.n_list.push_back(static_cast<int>(to_int(t, line)));
  };

  auto policy = [](const Token& t, int line) {
    try {
      return schedule_policy_from_string(t.text);
    } catch (const ValidationError&) {
      throw ParseError("unknown policy '" + t.text + "'", line, t.column);
    }
  };
  keys["schedule"]["policy"] = [&](const std::vector<Token>& v, int line) {
    with_one(v, line, 1, [&](const Token& t) { cfg.schedule.policy = policy(t, line); });
  };
  keys["schedule"]["seed"] = inum(cfg.schedule.seed);
  keys["schedule"]["tol"] = num(cfg.schedule.tol);
  keys["schedule"]["max_sweeps"] = inum(cfg.schedule.max_sweeps);
  keys["schedule"]["stall_sweeps"] = inum(cfg.schedule.stall_sweeps);
  keys["schedule"]["checkpoint_every"] = inum(cfg.schedule.checkpoint_every);
  keys["schedule"]["allow_growth"] = flag(cfg.schedule.allow_growth);
  keys["schedule"]["abelian_policies"] = [&](const std::vector<Token>& v, int line) {
    cfg.abelian_policies.clear();
    for (const Token& t : v) cfg.abelian_policies.push_back(policy(t, line));
  };

  keys["quadrature"]["radial_levels"] = inum(cfg.quadrature.radial_levels);
  keys["quadrature"]["panel_order"] = inum(cfg.quadrature.panel_order);
  keys["quadrature"]["tol"] = num(cfg.quadrature.tol);
  keys["quadrature"]["max_refinements"] = inum(cfg.quadrature.max_refinements);

  keys["obstacle"]["scheme"] = [&](const std::vector<Token>& v, int line) {
    with_one(v, line, 1, [&](const Token& t) {
      try {
        cfg.obstacle.scheme = majorant_scheme_from_string(t.text);
      } catch (const ValidationError&) {
        throw ParseError("unknown scheme '" + t.text + "'", line, t.column);
      }
    });
  };
  keys["obstacle"]["tol"] = num(cfg.obstacle.tol);
  keys["obstacle"]["max_iterations"] = inum(cfg.obstacle.max_iterations);
  keys["obstacle"]["max_doublings"] = inum(cfg.obstacle.max_doublings);

  keys["weak_star"]["test"] = [&](const std::vector<Token>& v, int line) {
    if (v.size() != 4) throw ParseError("test expects: cx cy inner outer", line, v.empty() ? 1 : v[0].column);
    if (!saw_tests) cfg.test_functions.clear(), saw_tests = true;
    cfg.test_functions.push_back({to_double(v[0], line), to_double(v[1], line), to_double(v[2], line), to_double(v[3], line)});
  };

  keys["outputs"]["dir"] = str(cfg.outputs.dir);
  keys["outputs"]["csv"] = flag(cfg.outputs.csv);
  keys["outputs"]["png"] = flag(cfg.outputs.png);
  keys["outputs"]["colormap"] = [&](const std::vector<Token>& v, int line) {
    with_one(v, line, 1, [&](const Token& t) {
      if (t.text != "grayscale" && t.text != "heat") throw ParseError("colormap must be grayscale or heat", line, t.column);
      cfg.outputs.colormap = t.text;
    });
  };
  keys["outputs"]["report"] = str(cfg.outputs.report);

  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto first = raw.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const int col = int(first) + 1;
    if (raw[first] == '[') {
      const auto close = raw.find(']', first);
      if (close == std::string::npos) throw ParseError("unterminated section header", line, col);
      if (raw.find_first_not_of(" \t", close + 1) != std::string::npos)
        throw ParseError("trailing text after section header", line, int(close) + 2);
      section = raw.substr(first + 1, close - first - 1);
      if (!keys.count(section)) throw ParseError("unknown section '" + section + "'", line, col + 1);
      continue;
    }
    const auto eq = raw.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line, col);
    if (section.empty()) throw ParseError("key outside of any section", line, col);
    std::string key = raw.substr(first, eq - first);
    key.erase(key.find_last_not_of(" \t") + 1);
    auto& sec = keys[section];
    auto it = sec.find(key);
    if (it == sec.end()) throw ParseError("unknown key '" + key + "' in [" + section + "]", line, col);
    std::vector<Token> vals = split_words(raw.substr(eq + 1), int(eq) + 2);
    if (vals.empty()) throw ParseError("missing value", line, int(eq) + 2);
    try {
      it->second(vals, line);
    } catch (ParseError& e) {
      if (e.column() == 1) throw ParseError("'" + key + "' expects exactly one value", line, vals[0].column);
      throw;
    }
  }
  if (std::isnan(cfg.scenario.support_radius)) throw ValidationError("scenario support_radius must be declared");
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "[kernel]\n"
    << "alpha = " << fmt(c.kernel.alpha) << "\n"
    << "r = " << fmt(c.kernel.r) << "\n"
    << "M = " << fmt(c.kernel.M) << "\n\n[scenario]\n"
    << "support_radius = " << fmt(c.scenario.support_radius) << "\n";
  for (const PointMass& p : c.scenario.points) o << "point = " << fmt(p.x) << " " << fmt(p.y) << " " << fmt(p.mass) << "\n";
  for (const SmoothBump& b : c.scenario.bumps)
    o << "bump = " << fmt(b.cx) << " " << fmt(b.cy) << " " << fmt(b.radius) << " " << fmt(b.height) << "\n";
  o << "\n[run]\nmode = " << to_string(c.mode) << "\nn_list =";
  for (int n : c.n_list) o << " " << n;
  o << "\n\n[schedule]\n"
    << "policy = " << to_string(c.schedule.policy) << "\n"
    << "seed = " << c.schedule.seed << "\n"
    << "tol = " << fmt(c.schedule.tol) << "\n"
    << "max_sweeps = " << c.schedule.max_sweeps << "\n"
    << "stall_sweeps = " << c.schedule.stall_sweeps << "\n"
    << "checkpoint_every = " << c.schedule.checkpoint_every << "\n"
    << "allow_growth = " << (c.schedule.allow_growth ? "true" : "false") << "\n"
    << "abelian_policies =";
  for (SchedulePolicy p : c.abelian_policies) o << " " << to_string(p);
  o << "\n\n[quadrature]\n"
    << "radial_levels = " << c.quadrature.radial_levels << "\n"
    << "panel_order = " << c.quadrature.panel_order << "\n"
    << "tol = " << fmt(c.quadrature.tol) << "\n"
    << "max_refinements = " << c.quadrature.max_refinements << "\n\n[obstacle]\n"
    << "scheme = " << to_string(c.obstacle.scheme) << "\n"
    << "tol = " << fmt(c.obstacle.tol) << "\n"
    << "max_iterations = " << c.obstacle.max_iterations << "\n"
    << "max_doublings = " << c.obstacle.max_doublings << "\n";
  if (!c.test_functions.empty()) {
    o << "\n[weak_star]\n";
    for (const PlateauBump& t : c.test_functions)
      o << "test = " << fmt(t.cx) << " " << fmt(t.cy) << " " << fmt(t.inner) << " " << fmt(t.outer) << "\n";
  }
  o << "\n[outputs]\n"
    << "dir = " << c.outputs.dir << "\n"
    << "csv = " << (c.outputs.csv ? "true" : "false") << "\n"
    << "png = " << (c.outputs.png ? "true" : "false") << "\n"
    << "colormap = " << c.outputs.colormap << "\n"
    << "report = " << c.outputs.report << "\n";
  return o.str();
}

std::string config_reference() {
  return R"(Config file: sections of `key = value` lines, `#` starts a comment.
Repeated keys (point, bump, test) accumulate; list values are space separated.

[kernel]      alpha = 1.5            in (1,2)
              r = 1                  inner cut, lattice units
              M = 2                  outer cut, macroscopic units
[scenario]    support_radius         required; bound on |x| for all mass
              point = x y mass       point mass on the nearest site
              bump = cx cy radius height
[run]         mode = simulate        simulate | obstacle | green-rate | laplacian-rate | weak-star | abelian-check
              n_list = 1             strictly increasing refinements
[schedule]    policy = sweep         sweep | greedy | random | parallel
              seed = 42
              tol = 1e-10            a site is full when its mass exceeds 1 + tol
              max_sweeps = 5000000
              stall_sweeps = 20000
              checkpoint_every = 0   0 picks ceil(box area / 1e4)
              allow_growth = true
              abelian_policies = sweep greedy random
[quadrature]  radial_levels = 14
              panel_order = 16
              tol = 1e-8
              max_refinements = 6
[obstacle]    scheme = jacobi        jacobi | gauss-seidel
              tol = 1e-10
              max_iterations = 5000000
              max_doublings = 4
[weak_star]   test = cx cy inner outer   plateau test function (default: three shipped bumps)
[outputs]     dir = out
              csv = true
              png = true
              colormap = grayscale   grayscale | heat, over [0, max(1, field max)]
              report = report.json
)";
}

}  // namespace tas
