#include "observables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace heom2q {

namespace {

constexpr double kWeightFloor = 1e-12;
constexpr double kOverlapFloor = 0.9;
constexpr double kDegenerateGap = 1e-9;

const CMatrix& spin_flip() {
  static const CMatrix yy = kron(pauli::y(), pauli::y());
  return yy;
}

}  // namespace

double purity(const CMatrix& rho) {
  // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
  double s = 0.0;
  for (const auto& v : rho.data()) s += std::norm(v);
  return s;
}

// Wootters' lambdas are the singular values of T_ij = v_i^T (sy x sy) v_j,
// where v_i = sqrt(p_i) e_i decompose rho. They are read off as the positive
// eigenvalues of [[0, T], [T^dagger, 0]]; squaring T would cost half the
// digits of any singular value near zero.
double concurrence(const CMatrix& rho) {
  CMatrix h = (rho + rho.adjoint()) * 0.5;
  const HermitianEig eig = hermitian_eig(h);
  std::array<std::array<cplx, 4>, 4> v{};
  for (std::size_t i = 0; i < 4; ++i) {
    const double w = std::sqrt(std::max(eig.values[i], 0.0));
    for (std::size_t a = 0; a < 4; ++a) v[i][a] = w * eig.vectors(a, i);
  }
  const CMatrix& yy = spin_flip();
  CMatrix block(8);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      cplx t = 0.0;
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) t += v[i][a] * yy(a, b) * v[j][b];
      block(i, 4 + j) = t;
      block(4 + j, i) = std::conj(t);
    }
  }
  const std::vector<double> s = hermitian_eig(block).values;  // ascending: -sigma..., +sigma...
  return std::max(0.0, s[7] - s[6] - s[5] - s[4]);
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  CMatrix d = a - b;
  d = (d + d.adjoint()) * 0.5;
  const HermitianEig eig = hermitian_eig(d);
  double s = 0.0;
  for (double v : eig.values) s += std::abs(v);
  return 0.5 * s;
}

MatrixElements matrix_elements(const CMatrix& rho) {
  MatrixElements m;
  m.rho11 = rho(0, 0).real();
  m.rho22 = rho(1, 1).real();
  m.rho33 = rho(2, 2).real();
  m.rho44 = rho(3, 3).real();
  m.rho23 = rho(1, 2);
  m.rho14 = rho(0, 3);
  m.rho44_complement = 1.0 - m.rho11 - m.rho22 - m.rho33;
  return m;
}

CycleClock CycleClock::make(ClockMode mode, const ModelSpec& spec, std::optional<double> period) {
  CycleClock c;
  c.mode = mode;
  const double two_pi = 2.0 * std::numbers::pi;
  switch (mode) {
    case ClockMode::one_excitation: {
      const double diff = std::abs(spec.drive2.Omega - spec.drive1.Omega);
      if (diff == 0.0) throw ModelError("one_excitation clock requires drive1.omega != drive2.omega");
      c.tau_s = two_pi / diff;
      break;
    }
    case ClockMode::two_excitation:
      c.tau_s = two_pi / (spec.drive1.Omega + spec.drive2.Omega);
      break;
    case ClockMode::explicit_period:
      if (!period || !(*period > 0.0)) throw ModelError("explicit clock requires clock.tau_s > 0");
      c.tau_s = *period;
      break;
  }
  return c;
}

std::string to_string(ClockMode m) {
  switch (m) {
    case ClockMode::one_excitation: return "one_excitation";
    case ClockMode::two_excitation: return "two_excitation";
    case ClockMode::explicit_period: return "explicit";
  }
  return "?";
}

ClockMode clock_mode_from_string(const std::string& s) {
  if (s == "one_excitation") return ClockMode::one_excitation;
  if (s == "two_excitation") return ClockMode::two_excitation;
  if (s == "explicit") return ClockMode::explicit_period;
  throw ModelError("unknown clock mode '" + s + "' (expected one_excitation, two_excitation or explicit)");
}

double wrap_phase(double phi) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(phi, two_pi);
  if (w > std::numbers::pi) w -= two_pi;
  // Phases that sit on the cut within rounding noise land on +pi.
  if (w <= -std::numbers::pi + kBranchCutTolerance) w += two_pi;
  return w;
}

GeometricPhaseAccumulator::GeometricPhaseAccumulator(const HermitianEig& start, double tau) : tau_(tau) {
  const std::size_t n = start.values.size();
  branches_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto& b = branches_[k];
    b.start_vec = b.vec = start.vector(k);
    b.start_value = b.value = start.values[k];
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const bool weighted = start.values[k] > kWeightFloor || start.values[k + 1] > kWeightFloor;
    if (weighted && start.values[k + 1] - start.values[k] < kDegenerateGap) degenerate_start_ = true;
  }
}

bool GeometricPhaseAccumulator::is_active(std::size_t b) const {
  if (branches_[b].start_value <= kWeightFloor || branches_[b].value <= kWeightFloor) return false;
  for (std::size_t o = 0; o < branches_.size(); ++o) {
    if (o != b && std::abs(branches_[o].value - branches_[b].value) < kDegenerateGap) return false;
  }
  return true;
}

void GeometricPhaseAccumulator::advance(const HermitianEig& next, double tau) {
  const std::size_t n = branches_.size();
  std::vector<std::vector<cplx>> cols(n);
  for (std::size_t j = 0; j < n; ++j) cols[j] = next.vector(j);

  struct Pair {
    double overlap, gap;
    std::size_t branch, col;
  };
  std::vector<Pair> pairs;
  pairs.reserve(n * n);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t j = 0; j < n; ++j)
      pairs.push_back({std::abs(inner(branches_[b].vec, cols[j])), std::abs(branches_[b].value - next.values[j]), b, j});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    if (x.overlap != y.overlap) return x.overlap > y.overlap;
    if (x.gap != y.gap) return x.gap < y.gap;
    if (x.branch != y.branch) return x.branch < y.branch;
    return x.col < y.col;
  });

  std::vector<int> assigned(n, -1);
  std::vector<bool> taken(n, false);
  for (const auto& p : pairs) {
    if (assigned[p.branch] >= 0 || taken[p.col]) continue;
    assigned[p.branch] = static_cast<int>(p.col);
    taken[p.col] = true;
  }

  std::vector<bool> active(n);
  for (std::size_t b = 0; b < n; ++b) active[b] = is_active(b);

  for (std::size_t b = 0; b < n; ++b) {
    auto& br = branches_[b];
    const auto& col = cols[static_cast<std::size_t>(assigned[b])];
    const cplx ov = inner(br.vec, col);
    const double value = next.values[static_cast<std::size_t>(assigned[b])];
    if (active[b] && value > kWeightFloor) {
      min_overlap_ = std::min(min_overlap_, std::abs(ov));
      if (std::abs(ov) < kOverlapFloor) {
        std::ostringstream msg;
        msg << "geometric phase: eigenvector branch " << b << " lost between tau=" << tau_ << " and tau=" << tau
            << " (overlap " << std::abs(ov) << " < " << kOverlapFloor
            << "); sample more densely or the eigenvalues cross";
        throw GeometricPhaseError(msg.str(), tau);
      }
    }
    br.transport += std::arg(ov);
    br.vec = col;
    br.value = value;
  }
  tau_ = tau;
}

cplx GeometricPhaseAccumulator::weighted_sum() const {
  cplx total = 0.0;
  for (const auto& b : branches_) {
    const double w = b.start_value * b.value;
    if (b.start_value <= kWeightFloor || b.value <= kWeightFloor) continue;
    const cplx ov = inner(b.start_vec, b.vec);
    total += std::sqrt(w) * std::abs(ov) * std::polar(1.0, std::arg(ov) - b.transport);
  }
  return total;
}

double GeometricPhaseAccumulator::phase() const { return wrap_phase(std::arg(weighted_sum())); }

void GeometricPhaseAccumulator::restart() {
  for (auto& b : branches_) {
    b.start_vec = b.vec;
    b.start_value = b.value;
    b.transport = 0.0;
  }
}

GeometricPhaseSeries geometric_phase(std::span<const TimedEig> eigs, const CycleClock& clock) {
  GeometricPhaseSeries out;
  if (eigs.empty()) return out;
  const double tau0 = eigs.front().tau;
  const double tau_end = eigs.back().tau;
  const int cycles = static_cast<int>(std::floor((tau_end - tau0) / clock.tau_s + 1e-9));

  // Nearest sample to each cycle boundary.
  std::vector<std::size_t> boundary;
  double worst_mismatch = 0.0;
  std::size_t cursor = 0;
  for (int c = 1; c <= cycles; ++c) {
    const double target = tau0 + c * clock.tau_s;
    while (cursor + 1 < eigs.size() && std::abs(eigs[cursor + 1].tau - target) <= std::abs(eigs[cursor].tau - target))
      ++cursor;
    boundary.push_back(cursor);
    worst_mismatch = std::max(worst_mismatch, std::abs(eigs[cursor].tau - target));
  }
  if (worst_mismatch > 1e-9 * std::max(1.0, clock.tau_s)) {
    out.notes.push_back("cycle boundaries taken at nearest samples (max time mismatch " +
                        std::to_string(worst_mismatch) + ")");
  }

  GeometricPhaseAccumulator per_cycle(eigs.front().eig, tau0);
  GeometricPhaseAccumulator from_origin(eigs.front().eig, tau0);
  if (per_cycle.degenerate_start()) {
    out.notes.push_back("initial state has degenerate weighted eigenvalues; branch basis chosen arbitrarily");
  }

  double cumulative = 0.0;
  std::size_t next_boundary = 0;
  for (std::size_t i = 1; i < eigs.size() && next_boundary < boundary.size(); ++i) {
    per_cycle.advance(eigs[i].eig, eigs[i].tau);
    from_origin.advance(eigs[i].eig, eigs[i].tau);
    if (i == boundary[next_boundary]) {
      GeometricPhasePoint p;
      p.cycle = static_cast<int>(next_boundary) + 1;
      p.tau = eigs[i].tau;
      p.phi_wrapped = per_cycle.phase();
      cumulative += p.phi_wrapped;
      p.phi_cumulative = cumulative;
      p.phi_from_origin = from_origin.phase();
      out.points.push_back(p);
      per_cycle.restart();
      ++next_boundary;
    }
  }
  return out;
}

GeometricPhaseSeries geometric_phase(const Trajectory& trajectory, const CycleClock& clock, int eigen_stride) {
  if (eigen_stride < 1) throw std::invalid_argument("eigen_stride must be >= 1");
  if (trajectory.empty()) return {};
  const double tau0 = trajectory.front().tau;
  // Keep every eigen_stride-th sample plus the samples nearest to each boundary.
  std::vector<bool> keep(trajectory.size(), false);
  for (std::size_t i = 0; i < trajectory.size(); i += static_cast<std::size_t>(eigen_stride)) keep[i] = true;
  keep.back() = true;
  const double tau_end = trajectory.back().tau;
  const int cycles = static_cast<int>(std::floor((tau_end - tau0) / clock.tau_s + 1e-9));
  std::size_t cursor = 0;
  for (int c = 1; c <= cycles; ++c) {
    const double target = tau0 + c * clock.tau_s;
    while (cursor + 1 < trajectory.size() &&
           std::abs(trajectory[cursor + 1].tau - target) <= std::abs(trajectory[cursor].tau - target))
      ++cursor;
    keep[cursor] = true;
  }
  std::vector<TimedEig> eigs;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    if (keep[i]) eigs.push_back({trajectory[i].tau, hermitian_eig(trajectory[i].rho)});
  }
  return geometric_phase(eigs, clock);
}

}  // namespace heom2q
