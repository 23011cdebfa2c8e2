#include "model.hpp"

#include <cmath>
#include <numbers>

namespace heom2q {

double DrivingProtocol::frequency_at(double tau) const { return Omega + Delta * std::cos(omegaD * tau + phi); }

void DrivingProtocol::validate(const char* name) const {
  if (!(Omega > 0.0)) throw ModelError(std::string(name) + ".omega must be > 0");
  if (!(Delta >= 0.0)) throw ModelError(std::string(name) + ".delta must be >= 0");
  if (!(omegaD >= 0.0)) throw ModelError(std::string(name) + ".omega_d must be >= 0");
  if (!std::isfinite(phi)) throw ModelError(std::string(name) + ".phi must be finite");
}

double ModelSpec::peak_frequency() const {
  if (bath.Omega0) return *bath.Omega0;
  return 0.5 * (drive1.frequency_at(0.0) + drive2.frequency_at(0.0));
}

void ModelSpec::validate() const {
  drive1.validate("drive1");
  drive2.validate("drive2");
  if (!std::isfinite(J)) throw ModelError("J must be finite");
  if (!(bath.R >= 0.0) || !std::isfinite(bath.R)) throw ModelError("bath.R must be >= 0 (0 is the closed system)");
  if (bath.Omega0 && !std::isfinite(*bath.Omega0)) throw ModelError("bath.omega0 must be finite");
}

CMatrix hamiltonian_at(const ModelSpec& spec, double tau) {
  const double w1 = spec.drive1.frequency_at(tau);
  const double w2 = spec.drive2.frequency_at(tau);
  CMatrix h(4);
  h(0, 0) = w1 + w2;
  h(1, 1) = w1;
  h(2, 2) = w2;
  h(1, 2) = 0.5 * spec.J;
  h(2, 1) = 0.5 * spec.J;
  return h;
}

CMatrix coupling_operator(const ModelSpec& spec) {
  const CMatrix one = pauli::identity();
  const CMatrix s = spec.coupling == Coupling::dipolar ? pauli::x() : pauli::z();
  return kron(s, one) + kron(one, s);
}

double spectral_density(const BathSpec& bath, double peak, double omega) {
  const double d = omega - peak;
  return bath.R / (2.0 * std::numbers::pi) / (d * d + 1.0);
}

cplx correlation(const BathSpec& bath, double peak, double tau) {
  return 0.5 * bath.R * std::exp(-cplx(1.0, peak) * tau);
}

std::array<cplx, 4> bell_like(StateKind kind, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ModelError("state.p must lie in [0, 1]");
  const double a = std::sqrt(1.0 - p), b = std::sqrt(p);
  std::array<cplx, 4> ket{};
  switch (kind) {
    case StateKind::phi_plus: ket[2] = a; ket[1] = b; break;
    case StateKind::phi_minus: ket[2] = a; ket[1] = -b; break;
    case StateKind::psi_plus: ket[3] = a; ket[0] = b; break;
    case StateKind::psi_minus: ket[3] = a; ket[0] = -b; break;
    default: throw ModelError("bell_like: kind must be one of phi_plus, phi_minus, psi_plus, psi_minus");
  }
  return ket;
}

CMatrix initial_state(const InitialState& init) {
  if (!(init.r >= 0.0 && init.r <= 1.0)) throw ModelError("state.r must lie in [0, 1]");
  if (init.kind == StateKind::x_state) {
    const auto& x = init.x;
    CMatrix rho(4);
    rho(0, 0) = x.rho11;
    rho(1, 1) = x.rho22;
    rho(2, 2) = x.rho33;
    rho(3, 3) = x.rho44;
    rho(1, 2) = x.rho23;
    rho(2, 1) = std::conj(x.rho23);
    rho(0, 3) = x.rho14;
    rho(3, 0) = std::conj(x.rho14);
    const double tr = x.rho11 + x.rho22 + x.rho33 + x.rho44;
    if (std::abs(tr - 1.0) > 1e-12) throw ModelError("x_state: diagonal entries must sum to 1 (got " + std::to_string(tr) + ")");
    const HermitianEig eig = hermitian_eig(rho);
    if (eig.values.front() < -1e-12) {
      std::string report = "x_state: matrix is not positive semidefinite; eigenvalues";
      for (double v : eig.values) report += " " + std::to_string(v);
      throw ModelError(report);
    }
    return rho;
  }
  const StateKind core = init.kind == StateKind::werner ? init.core : init.kind;
  if (core == StateKind::werner || core == StateKind::x_state) throw ModelError("werner core must be a Bell-like state");
  const auto ket = bell_like(core, init.p);
  CMatrix rho = CMatrix::projector(ket) * init.r;
  const double mixed = (1.0 - init.r) / 4.0;
  for (std::size_t i = 0; i < 4; ++i) rho(i, i) += mixed;
  return rho;
}

std::string to_string(Coupling c) { return c == Coupling::dipolar ? "dipolar" : "dephasing"; }

std::string to_string(StateKind k) {
  switch (k) {
    case StateKind::phi_plus: return "phi_plus";
    case StateKind::phi_minus: return "phi_minus";
    case StateKind::psi_plus: return "psi_plus";
    case StateKind::psi_minus: return "psi_minus";
    case StateKind::x_state: return "x_state";
    case StateKind::werner: return "werner";
  }
  return "?";
}

Coupling coupling_from_string(const std::string& s) {
  if (s == "dipolar") return Coupling::dipolar;
  if (s == "dephasing") return Coupling::dephasing;
  throw ModelError("unknown coupling '" + s + "' (expected dipolar or dephasing)");
}

StateKind state_kind_from_string(const std::string& s) {
  for (StateKind k : {StateKind::phi_plus, StateKind::phi_minus, StateKind::psi_plus, StateKind::psi_minus,
                      StateKind::x_state, StateKind::werner}) {
    if (to_string(k) == s) return k;
  }
  throw ModelError("unknown state kind '" + s + "'");
}

}  // namespace heom2q
