#pragma once

// Truncated hierarchy of auxiliary density matrices for a single
// zero-temperature Lorentzian bath, propagated with fixed-step RK4.
//
//   d/dtau rho_n = -(i H(tau)^x + n.nu) rho_n
//                  - i sum_k V^x rho_{n+e_k}
//                  - i a sum_k n_k [V^x + (-1)^k V^o] rho_{n-e_k}
//
// with nu = (1 - i Omega0, 1 + i Omega0), square cutoff n1, n2 <= depth and
// terms leaving the cutoff dropped. The down-coupling amplitude `a` is set
// by HierarchyNormalization (see make_space).

#include <array>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "model.hpp"
#include "trajectory.hpp"

namespace heom2q {

using Mat4 = std::array<cplx, 16>;

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double tau) : std::runtime_error(what), tau_(tau) {}
  double tau() const { return tau_; }

 private:
  double tau_;
};

// Raised before integration starts when the step is outside the RK4
// stability region or otherwise unusable.
class StepConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class HierarchyNormalization {
  // Down-coupling amplitude C(0)/2 = R/4: the hierarchy is exact for the
  // bath correlation C(tau) = (R/2) exp(-(1 + i Omega0) tau).
  correlation_matched,
  // Down-coupling amplitude R/2 as printed in the original hierarchy
  // equation; equivalent to a bath correlation of amplitude R.
  literal,
};

struct HierarchySpace {
  int depth = 20;
  cplx nu1, nu2;
  double gamma0 = 1.0;
  double down_amplitude = 0.25;
  CMatrix V;

  std::size_t size() const { return static_cast<std::size_t>(depth + 1) * static_cast<std::size_t>(depth + 1); }
  std::size_t index(int n1, int n2) const { return static_cast<std::size_t>(n1) * (depth + 1) + n2; }
  // Amplitude of the exponential correlation the hierarchy reproduces.
  double effective_correlation_amplitude() const { return 2.0 * down_amplitude; }
};

HierarchySpace make_space(const ModelSpec& spec, int depth,
                          HierarchyNormalization norm = HierarchyNormalization::correlation_matched);

struct HierarchyState {
  double tau = 0.0;
  int depth = 0;
  std::vector<Mat4> matrices;

  const Mat4& at(int n1, int n2) const { return matrices[static_cast<std::size_t>(n1) * (depth + 1) + n2]; }
  Mat4& at(int n1, int n2) { return matrices[static_cast<std::size_t>(n1) * (depth + 1) + n2]; }
  CMatrix physical() const;
};

CMatrix to_cmatrix(const Mat4& m);
Mat4 to_mat4(const CMatrix& m);

HierarchyState init_hierarchy(const CMatrix& rho0, const HierarchySpace& space);

// Evaluates the hierarchy generator at time tau. Internally works on a
// planar layout (one zero-padded plane per matrix entry and re/im part)
// so that every term is a contiguous loop over hierarchy indices.
class HierarchyGenerator {
 public:
  HierarchyGenerator(const ModelSpec& spec, const HierarchySpace& space);

  void derivative(double tau, std::span<const Mat4> in, std::span<Mat4> out) const;
  const HierarchySpace& space() const { return space_; }
  const ModelSpec& spec() const { return spec_; }

  // Planar layout: plane p = 2*entry + (0 re | 1 im); cell (n1, n2) lives at
  // (n1 + 1) * width + (n2 + 1) with width = depth + 3. Padding stays zero.
  int width() const { return space_.depth + 3; }
  std::size_t plane_size() const { return static_cast<std::size_t>(width()) * width(); }
  std::size_t planar_size() const { return 32 * plane_size(); }
  std::size_t cell(int n1, int n2) const { return static_cast<std::size_t>(n1 + 1) * width() + (n2 + 1); }

  void to_planar(std::span<const Mat4> in, std::span<double> planar) const;
  void from_planar(std::span<const double> planar, std::span<Mat4> out) const;
  Mat4 element(std::span<const double> planar, int n1, int n2) const;
  void planar_derivative(double tau, std::span<const double> in, std::span<double> out) const;

 private:
  ModelSpec spec_;
  HierarchySpace space_;
  std::vector<double> damp_re_, damp_im_, left_w_, right_w_, mask_;
};

std::vector<Mat4> rhs(const HierarchyState& state, const ModelSpec& spec, const HierarchySpace& space, double tau);

// Throws StepConfigError when dt is not usable for this model/space.
void check_step(const ModelSpec& spec, const HierarchySpace& space, double dt);

HierarchyState step_rk4(const HierarchyState& state, const ModelSpec& spec, const HierarchySpace& space, double dt);

using SampleObserver = std::function<void(double tau, const HierarchyState&)>;

// Advances `state` to tau_end in steps of dt (last step shortened to land
// exactly on tau_end). The observer sees the initial state, every
// sample_every-th step and the final state.
void evolve(HierarchyState& state, const ModelSpec& spec, const HierarchySpace& space, double dt, double tau_end,
            int sample_every, const SampleObserver& observer);

Trajectory evolve(HierarchyState& state, const ModelSpec& spec, const HierarchySpace& space, double dt,
                  double tau_end, int sample_every);

// Same schedule as evolve; the observer fires only after the listed step
// indices (step k ends at tau0 + k*dt).
void evolve_at_steps(HierarchyState& state, const ModelSpec& spec, const HierarchySpace& space, double dt,
                     double tau_end, std::span<const long> steps, const SampleObserver& observer);

// Max trace distance between physical trajectories at depths na < nb.
double truncation_check(const ModelSpec& spec, const CMatrix& rho0, double dt, double tau_end, int na, int nb,
                        int sample_every = 100,
                        HierarchyNormalization norm = HierarchyNormalization::correlation_matched);

}  // namespace heom2q
