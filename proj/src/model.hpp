#pragma once

// System Hamiltonian, coupling operators, Lorentzian bath descriptors and
// initial states for two driven qubits. All quantities are dimensionless:
// energies in units of the bath width and time tau in units of its inverse.
//
// Basis order (shared by every module): index 0 = |11>, 1 = |10>,
// 2 = |01>, 3 = |00>, i.e. qubit 1 is the slow index of kron and each
// single-qubit space is ordered (|1>, |0>).

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

#include "algebra.hpp"

namespace heom2q {

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// omega(tau) = Omega + Delta * cos(omegaD * tau + phi)
struct DrivingProtocol {
  double Omega = 10.0;
  double Delta = 0.0;
  double omegaD = 0.0;
  double phi = 0.0;

  double frequency_at(double tau) const;
  void validate(const char* name) const;
};

struct BathSpec {
  double R = 1.0;                 // gamma0 / lambda
  std::optional<double> Omega0;   // peak position; defaults to mean of omega_i(0)
};

enum class Coupling { dipolar, dephasing };

struct ModelSpec {
  DrivingProtocol drive1;
  DrivingProtocol drive2;
  double J = 0.0;
  BathSpec bath;
  Coupling coupling = Coupling::dipolar;

  // Effective spectral peak: the override when present, else (omega1(0)+omega2(0))/2.
  double peak_frequency() const;
  void validate() const;
};

enum class StateKind { phi_plus, phi_minus, psi_plus, psi_minus, x_state, werner };

struct XStateEntries {
  double rho11 = 0.0, rho22 = 0.5, rho33 = 0.5, rho44 = 0.0;
  cplx rho23 = 0.5;
  cplx rho14 = 0.0;
};

struct InitialState {
  StateKind kind = StateKind::phi_plus;
  double p = 0.5;                          // entanglement weight
  double r = 1.0;                          // Werner mixing weight
  StateKind core = StateKind::phi_plus;    // Bell-like core for kind == werner
  XStateEntries x;                         // kind == x_state
};

CMatrix hamiltonian_at(const ModelSpec& spec, double tau);
CMatrix coupling_operator(const ModelSpec& spec);

double spectral_density(const BathSpec& bath, double peak, double omega);
inline double spectral_density(const ModelSpec& spec, double omega) {
  return spectral_density(spec.bath, spec.peak_frequency(), omega);
}

// C(tau) = (R/2) exp(-(1 + i*Omega0) tau), tau >= 0.
cplx correlation(const BathSpec& bath, double peak, double tau);
inline cplx correlation(const ModelSpec& spec, double tau) {
  return correlation(spec.bath, spec.peak_frequency(), tau);
}

// Bell-like ket sqrt(1-p)|01> +- sqrt(p)|10> or sqrt(1-p)|00> +- sqrt(p)|11>.
std::array<cplx, 4> bell_like(StateKind kind, double p);
CMatrix initial_state(const InitialState& init);

std::string to_string(Coupling c);
std::string to_string(StateKind k);
Coupling coupling_from_string(const std::string& s);
StateKind state_kind_from_string(const std::string& s);

}  // namespace heom2q
