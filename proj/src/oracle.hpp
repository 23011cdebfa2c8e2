#pragma once

// Independent cross-checks for the hierarchy propagator:
//  - direct RK4 propagation of the closed two-qubit system;
//  - an exact dilation of the Lorentzian bath into one damped harmonic
//    mode (non-rotating coupling g V (a + a^dag), Lindblad decay on a),
//    whose two-time correlation g^2 exp(-(kappa/2 + i Omega0) tau) is
//    matched to the bath correlation.

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

#include "algebra.hpp"
#include "model.hpp"
#include "trajectory.hpp"

namespace heom2q {

Trajectory unitary_propagate(const ModelSpec& spec, const CMatrix& rho0, double dt, double tau_end,
                             int sample_every = 1);

struct PseudomodeSpec {
  int fock_cutoff = 16;
  double g = std::sqrt(0.5);
  double mode_freq = 0.0;
  double mode_decay = 2.0;

  // Mode autocorrelation <(a + a^dag)(tau) (a + a^dag)(0)> g^2 in the vacuum.
  cplx correlation(double tau) const;

  // Coupling chosen so that g^2 equals `amplitude` (default: C(0) = R/2).
  static PseudomodeSpec matched(const ModelSpec& spec, int fock_cutoff, std::optional<double> amplitude = std::nullopt);
};

inline constexpr double kTopFockLimit = 1e-6;

struct PseudomodeResult {
  Trajectory trajectory;
  double max_top_fock_population = 0.0;
  bool cutoff_adequate() const { return max_top_fock_population <= kTopFockLimit; }
};

using DilatedObserver = std::function<void(double tau, const CMatrix& full)>;

// Dilated state ordering: system index slow, Fock index fast.
PseudomodeResult pseudomode_propagate(const ModelSpec& spec, const PseudomodeSpec& pm, const CMatrix& rho0, double dt,
                                      double tau_end, int sample_every = 1, const DilatedObserver& observer = {});

CMatrix partial_trace_mode(const CMatrix& full, int fock_cutoff);

struct ComparisonReport {
  double max_trace_distance = 0.0;
  double mean_trace_distance = 0.0;
  double max_purity_delta = 0.0;
  double max_concurrence_delta = 0.0;
  double max_population_delta = 0.0;
  std::size_t samples = 0;
};

// Both trajectories must share the same sample times (within 1e-9).
ComparisonReport compare(const Trajectory& a, const Trajectory& b);

}  // namespace heom2q
