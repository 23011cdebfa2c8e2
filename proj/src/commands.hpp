#pragma once

// The four user-facing operations (run, gp, sweep, validate) and the file
// formats they emit. Exceptions are left to the caller, which maps them to
// exit codes: configuration problems (ConfigError, ModelError,
// StepConfigError, AlgebraError from inputs) versus integration failures
// (IntegrationError, GeometricPhaseError).

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "observables.hpp"
#include "sweep.hpp"
#include "trajectory.hpp"

namespace heom2q {

inline constexpr const char* kTrajectoryHeader =
    "tau,cycle,rho11,rho22,rho33,rho44,re_rho23,im_rho23,re_rho14,im_rho14,purity,concurrence";
inline constexpr const char* kGeometricPhaseHeader = "cycle,phi_wrapped,phi_cumulative";

// Scientific notation, 12 significant digits.
std::string format_sci(double v);

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory, const CycleClock& clock);
void write_gp_csv(std::ostream& os, const GeometricPhaseSeries& series);
void write_heatmap(std::ostream& os, const RunConfig& cfg, const SweepResult& result, std::size_t cycle_index);
std::string heatmap_path(const std::string& prefix, int cycle);

Trajectory run_trajectory(const RunConfig& cfg);
GeometricPhaseSeries run_geometric_phase(const RunConfig& cfg);
SweepResult run_config_sweep(const RunConfig& cfg, int threads, const SweepProgress& progress = {});

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool passed() const;
};

ValidationReport run_validation(const RunConfig& cfg);
void write_validation_text(std::ostream& os, const ValidationReport& report);
std::string validation_json(const ValidationReport& report);

}  // namespace heom2q
