#pragma once

#include <string>
#include <vector>

#include "tas/kernel.hpp"
#include "tas/obstacle.hpp"
#include "tas/quadrature.hpp"
#include "tas/sandpile.hpp"
#include "tas/scenario.hpp"

namespace tas {

enum class RunMode { simulate, obstacle, green_rate, laplacian_rate, weak_star, abelian_check };

std::string to_string(RunMode m);
RunMode run_mode_from_string(const std::string& s);

struct OutputConfig {
  std::string dir = "out";
  bool csv = true;
  bool png = true;
  std::string colormap = "grayscale";  // grayscale | heat
  std::string report = "report.json";
  bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
  KernelParams kernel;  // kernel.n is ignored; runs use n_list
  Density scenario;
  std::vector<int> n_list{1};
  ToppleSchedule schedule;
  std::vector<SchedulePolicy> abelian_policies{SchedulePolicy::sweep, SchedulePolicy::greedy, SchedulePolicy::random};
  QuadratureConfig quadrature;
  MajorantOptions obstacle;
  std::vector<PlateauBump> test_functions;
  OutputConfig outputs;
  RunMode mode = RunMode::simulate;

  // Throws ValidationError naming the violated invariant.
  void validate() const;
  bool operator==(const ExperimentConfig& o) const;
};

// Sectioned key/value text:
//   # comment
//   [section]
//   key = value
// Unknown sections or keys are ParseErrors.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);
std::string emit_config(const ExperimentConfig& cfg);

// Documentation of every key and its default, for --help.
std::string config_reference();

}  // namespace tas
