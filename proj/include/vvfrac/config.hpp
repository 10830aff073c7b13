#pragma once

#include "vvfrac/viscosity.hpp"

#include <string>
#include <vector>

namespace vvfrac {

enum class RunMode { SolveOnce, ErrOnly, EvolveViscous, EvolveVV, Parametrize };

const char* mode_name(RunMode m);
// Throws ConfigError for unknown names.
RunMode parse_mode(const std::string& name);

struct ErrSettings {
  double t = -1.0;  // negative selects T
  std::vector<double> radius_factors{1.0, 2.0};
  double fd_delta = 1e-3;
  double fd_radius_fraction = 0.6;
  bool fd_remesh = false;
  double oracle_tol = 0.02;
  double cutoff_tol = 0.01;
  double positivity_rel = 1e-8;
};

struct ViscositySettings {
  double epsilon = 0.0;   // single-run viscosity; 0 selects epsilon0
  double epsilon0 = 0.0;  // top of the ladder; 0 selects default_epsilon0
  int members = 4;
};

struct CheckSettings {
  double griffith_tol = 1e-3;
  double hausdorff_tol = 0.05;
  double densify_tol = 1e-3;
  double slope_floor = 1e-6;
  double param_tol = 0.02;
  int plateau_samples = 4;
};

struct ScenarioConfig {
  std::string units = "nondimensional";
  RunMode mode = RunMode::SolveOnce;
  EvolutionContext context;
  CrackSet initial;
  int k = 10;
  std::vector<double> time_nodes;  // overrides k when non-empty
  SearchConfig search;
  ViscositySettings viscosity;
  ErrSettings err;
  CheckSettings checks;
  int workers = 1;
  std::string output_dir = "out";
  std::string source_text;  // exact config bytes, for hashing

  TimeGrid grid() const;
  double epsilon0() const;
};

// All schema and hypothesis violations found in one pass.
struct ConfigParse {
  ScenarioConfig config;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

// `base_dir` resolves relative file references (amplitude tables).
ConfigParse parse_config_text(const std::string& text, const std::string& base_dir = ".");
ConfigParse parse_config_file(const std::string& path);
// Throws ConfigError listing every violation.
ScenarioConfig parse_config(const std::string& path);

}  // namespace vvfrac
