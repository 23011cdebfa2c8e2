#pragma once

// Flat key=value run configuration. '#' starts a comment; keys use dotted
// prefixes (drive1.omega, bath.R, sweep.axis_a.min). Every key has a
// default; unknown or repeated keys are errors that name the key and line.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "heom.hpp"
#include "model.hpp"
#include "observables.hpp"
#include "sweep.hpp"

namespace heom2q {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct IntegratorConfig {
  double dt = 1e-3;
  int depth = 20;
  int sample_every = 100;
  double cycles = 10.0;  // simulated time in units of the cycle period
  HierarchyNormalization normalization = HierarchyNormalization::correlation_matched;
};

struct ClockConfig {
  ClockMode mode = ClockMode::two_excitation;
  std::optional<double> tau_s;
};

struct GpConfig {
  int eigen_stride = 1;
};

struct SweepConfig {
  SweepAxis axis_a{SweepParameter::omegaD1, 0.0, 8.0, 41};
  SweepAxis axis_b{SweepParameter::omegaD2, 0.0, 8.0, 41};
  std::vector<int> cycles{1, 3, 5, 7};
  std::vector<ParameterBinding> locks;
};

struct ValidateConfig {
  double tau_end = 10.0;
  double pseudomode_tau_end = 5.0;
  int depth_b = 24;
  int fock_cutoff = 16;
  double dark_tol = 1e-6;
  double unitary_tol = 1e-8;
  double truncation_tol = 1e-6;
  double pseudomode_tol = 1e-3;
  double convergence_dt = 4e-3;
  double convergence_tau = 1.0;
  double ratio_min = 8.0;
  double ratio_max = 32.0;
};

struct RunConfig {
  ModelSpec model;
  InitialState state;
  ClockConfig clock;
  IntegratorConfig integrator;
  GpConfig gp;
  SweepConfig sweep;
  ValidateConfig validate;
  std::string output = "-";  // "-" is stdout; sweeps use it as a file prefix

  CycleClock resolve_clock() const { return CycleClock::make(clock.mode, model, clock.tau_s); }
  SweepSettings sweep_settings(int threads) const;
};

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string doc;
};

// Every fixed key with its default rendering and a one-line description.
// Locks use the open family sweep.lock.<parameter>.
const std::vector<ConfigKey>& config_keys();

RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

// Applies one assignment; `where` prefixes error messages.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value, const std::string& where = "");

// Canonical text: every key in a fixed order, doubles in shortest
// round-trip form so that parse(serialize(c)) reproduces c exactly.
std::string serialize_config(const RunConfig& cfg);

std::string to_string(HierarchyNormalization n);
HierarchyNormalization normalization_from_string(const std::string& s);

}  // namespace heom2q
