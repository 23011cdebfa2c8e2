#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "model.hpp"
#include "trajectory.hpp"

namespace heom2q {

double purity(const CMatrix& rho);

// Wootters concurrence via the Hermitian form sqrt(rho) rho~ sqrt(rho);
// its eigenvalues are those of rho rho~.
double concurrence(const CMatrix& rho);

double trace_distance(const CMatrix& a, const CMatrix& b);

struct MatrixElements {
  double rho11 = 0.0, rho22 = 0.0, rho33 = 0.0, rho44 = 0.0;
  cplx rho23, rho14;
  double rho44_complement = 0.0;  // 1 - rho11 - rho22 - rho33
};

MatrixElements matrix_elements(const CMatrix& rho);

enum class ClockMode { one_excitation, two_excitation, explicit_period };

struct CycleClock {
  ClockMode mode = ClockMode::explicit_period;
  double tau_s = 1.0;

  double cycles(double tau) const { return tau / tau_s; }
  // Resolves the period from the carrier frequencies; explicit mode uses `period`.
  static CycleClock make(ClockMode mode, const ModelSpec& spec, std::optional<double> period = std::nullopt);
};

std::string to_string(ClockMode m);
ClockMode clock_mode_from_string(const std::string& s);

class GeometricPhaseError : public std::runtime_error {
 public:
  GeometricPhaseError(const std::string& what, double tau) : std::runtime_error(what), tau_(tau) {}
  double tau() const { return tau_; }

 private:
  double tau_;
};

// Mixed-state kinematic geometric phase over a window [start, now]:
//   arg sum_k sqrt(e_k(start) e_k(now)) <k(start)|k(now)> exp(-i sum_j arg<k(t_j)|k(t_j+1)>)
// The parallel-transport integral is the product of per-step overlap
// phases. Branches are followed by maximal-overlap matching.
class GeometricPhaseAccumulator {
 public:
  explicit GeometricPhaseAccumulator(const HermitianEig& start, double tau = 0.0);

  void advance(const HermitianEig& next, double tau);
  cplx weighted_sum() const;
  double phase() const;
  // Makes the current sample the new window start.
  void restart();

  bool degenerate_start() const { return degenerate_start_; }
  double min_active_overlap() const { return min_overlap_; }

 private:
  struct Branch {
    std::vector<cplx> start_vec, vec;
    double start_value = 0.0, value = 0.0;
    double transport = 0.0;  // accumulated sum of per-step overlap phases
  };
  bool is_active(std::size_t b) const;

  std::vector<Branch> branches_;
  double tau_ = 0.0;
  bool degenerate_start_ = false;
  double min_overlap_ = 1.0;
};

struct GeometricPhasePoint {
  int cycle = 0;
  double tau = 0.0;
  double phi_wrapped = 0.0;      // phase acquired during this cycle, in (-pi, pi]
  double phi_cumulative = 0.0;   // running sum of per-cycle phases
  double phi_from_origin = 0.0;  // window [0, tau], in (-pi, pi]
};

struct GeometricPhaseSeries {
  std::vector<GeometricPhasePoint> points;
  std::vector<std::string> notes;
};

struct TimedEig {
  double tau = 0.0;
  HermitianEig eig;
};

// Samples at cycle boundaries N*tau_s are taken as the nearest available
// sample; eigen_stride thins the overlap chain between boundaries.
GeometricPhaseSeries geometric_phase(const Trajectory& trajectory, const CycleClock& clock, int eigen_stride = 1);
GeometricPhaseSeries geometric_phase(std::span<const TimedEig> eigs, const CycleClock& clock);

// Maps to (-pi, pi]; values within kBranchCutTolerance above -pi become +pi.
inline constexpr double kBranchCutTolerance = 1e-9;
double wrap_phase(double phi);

}  // namespace heom2q
