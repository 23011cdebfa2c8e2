#pragma once

// Rectangular parameter sweeps: one independent hierarchy trajectory per
// grid cell, observables snapshotted at whole cycle counts. Cells are
// split into contiguous row blocks across worker threads and written back
// by grid index, so the result does not depend on the worker count.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heom.hpp"
#include "model.hpp"
#include "observables.hpp"

namespace heom2q {

enum class SweepParameter { omegaD1, omegaD2, J, Delta1, Delta2, R };

std::string to_string(SweepParameter p);
SweepParameter sweep_parameter_from_string(const std::string& s);

double get_parameter(const ModelSpec& spec, SweepParameter p);
void set_parameter(ModelSpec& spec, SweepParameter p, double value);

struct SweepAxis {
  SweepParameter parameter = SweepParameter::omegaD1;
  double min = 0.0;
  double max = 8.0;
  int points = 41;

  // Uniform spacing, both endpoints included; a single point sits at min.
  double value(int i) const;
  void validate(const char* name) const;
};

// target := value of `source` after the axes are applied, or := constant.
struct ParameterBinding {
  SweepParameter target = SweepParameter::omegaD2;
  std::optional<SweepParameter> source;
  double constant = 0.0;
};

// Produces the cell ModelSpec for axis values (a, b).
class SpecFactory {
 public:
  SpecFactory(ModelSpec base, SweepParameter axis_a, SweepParameter axis_b, std::vector<ParameterBinding> locks);
  ModelSpec at(double a, double b) const;

 private:
  ModelSpec base_;
  SweepParameter axis_a_, axis_b_;
  std::vector<ParameterBinding> locks_;
};

// Rejects duplicate targets, bindings onto a swept parameter and chains
// (a lock whose source is itself locked).
SpecFactory locked_axes(const ModelSpec& base, SweepParameter axis_a, SweepParameter axis_b,
                        std::span<const ParameterBinding> locks);

struct SweepSettings {
  int depth = 20;
  double dt = 1e-3;
  ClockMode clock_mode = ClockMode::explicit_period;
  std::optional<double> tau_s;
  std::vector<int> cycles{1};
  HierarchyNormalization normalization = HierarchyNormalization::correlation_matched;
  int threads = 1;
};

struct SweepCell {
  double a = 0.0, b = 0.0;
  bool ok = false;
  std::string status;             // "ok" or "failed: <reason>"
  std::vector<double> concurrence;  // one per requested cycle
  std::vector<double> purity;
};

struct SweepResult {
  SweepAxis axis_a, axis_b;
  SweepSettings settings;
  ModelSpec base;
  InitialState initial;
  std::vector<SweepCell> cells;  // row-major: a slow, b fast

  const SweepCell& at(int i, int j) const { return cells[static_cast<std::size_t>(i) * axis_b.points + j]; }
};

// Step index of the snapshot nearest to cycle N: round(N * tau_s / dt).
long snapshot_step(int cycle, double tau_s, double dt);

// One grid cell; exposed so single runs can be compared with sweep output.
SweepCell run_cell(const ModelSpec& spec, const InitialState& init, const SweepSettings& settings);

using SweepProgress = std::function<void(std::size_t done, std::size_t total)>;

SweepResult run_sweep(const ModelSpec& base, const InitialState& init, const SweepAxis& axis_a, const SweepAxis& axis_b,
                      std::span<const ParameterBinding> locks, const SweepSettings& settings,
                      const SweepProgress& progress = {});

}  // namespace heom2q
