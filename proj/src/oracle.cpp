#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "observables.hpp"
#include "schedule.hpp"

namespace heom2q {

namespace {

bool finite(const CMatrix& m) {
  for (const auto& v : m.data())
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

// rho <- rho + h * k
void axpy(CMatrix& out, const CMatrix& y, double h, const CMatrix& k) {
  auto o = out.data();
  auto yy = y.data();
  auto kk = k.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = yy[i] + h * kk[i];
}

template <class Deriv>
void rk4_step(CMatrix& rho, double tau, double dt, const Deriv& deriv, CMatrix& k1, CMatrix& k2, CMatrix& k3,
              CMatrix& k4, CMatrix& tmp) {
  deriv(tau, rho, k1);
  axpy(tmp, rho, 0.5 * dt, k1);
  deriv(tau + 0.5 * dt, tmp, k2);
  axpy(tmp, rho, 0.5 * dt, k2);
  deriv(tau + 0.5 * dt, tmp, k3);
  axpy(tmp, rho, dt, k3);
  deriv(tau + dt, tmp, k4);
  auto r = rho.data();
  const double h6 = dt / 6.0, h3 = dt / 3.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] += h6 * (k1.data()[i] + k4.data()[i]) + h3 * (k2.data()[i] + k3.data()[i]);
}

struct SparseEntry {
  int row, col;
  double value;
};

std::vector<SparseEntry> real_sparse(const CMatrix& m) {
  std::vector<SparseEntry> out;
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c)
      if (m(r, c) != cplx{}) out.push_back({static_cast<int>(r), static_cast<int>(c), m(r, c).real()});
  return out;
}

}  // namespace

Trajectory unitary_propagate(const ModelSpec& spec, const CMatrix& rho0, double dt, double tau_end, int sample_every) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (sample_every < 1) throw std::invalid_argument("sample stride must be >= 1");
  auto deriv = [&](double tau, const CMatrix& rho, CMatrix& out) {
    const CMatrix h = hamiltonian_at(spec, tau);
    out = commutator(h, rho) * cplx(0.0, -1.0);
  };
  CMatrix rho = rho0, k1(4), k2(4), k3(4), k4(4), tmp(4);
  Trajectory out;
  detail::run_schedule(
      0.0, tau_end, dt, sample_every,
      [&](long, double t, double h) {
        rk4_step(rho, t, h, deriv, k1, k2, k3, k4, tmp);
        if (!finite(rho)) throw std::runtime_error("unitary_propagate: non-finite state at tau=" + std::to_string(t));
      },
      [&](long, double tau) { out.push_back({tau, rho}); });
  return out;
}

cplx PseudomodeSpec::correlation(double tau) const {
  return g * g * std::exp(-cplx(0.5 * mode_decay, mode_freq) * tau);
}

PseudomodeSpec PseudomodeSpec::matched(const ModelSpec& spec, int fock_cutoff, std::optional<double> amplitude) {
  PseudomodeSpec pm;
  pm.fock_cutoff = fock_cutoff;
  pm.g = std::sqrt(amplitude.value_or(0.5 * spec.bath.R));
  pm.mode_freq = spec.peak_frequency();
  pm.mode_decay = 2.0;
  return pm;
}

CMatrix partial_trace_mode(const CMatrix& full, int fock_cutoff) {
  const std::size_t f = static_cast<std::size_t>(fock_cutoff);
  const std::size_t ns = full.dim() / f;
  CMatrix out(ns);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t t = 0; t < ns; ++t)
      for (std::size_t m = 0; m < f; ++m) out(s, t) += full(s * f + m, t * f + m);
  return out;
}

PseudomodeResult pseudomode_propagate(const ModelSpec& spec, const PseudomodeSpec& pm, const CMatrix& rho0, double dt,
                                      double tau_end, int sample_every, const DilatedObserver& observer) {
  if (pm.fock_cutoff < 2) throw std::invalid_argument("fock_cutoff must be >= 2");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (sample_every < 1) throw std::invalid_argument("sample stride must be >= 1");
  const int f = pm.fock_cutoff;
  const int dim = 4 * f;
  const auto v = real_sparse(coupling_operator(spec));
  std::vector<double> sq(f + 1);
  for (int m = 0; m <= f; ++m) sq[m] = std::sqrt(static_cast<double>(m));

  // X = H rho with H = H_S(tau) x 1 + Omega0 1 x n + g V x (a + a^dag); the
  // generator is -i (X - X^dag) + kappa (a rho a^dag - {n, rho}/2).
  CMatrix x(dim);
  auto deriv = [&](double tau, const CMatrix& rho, CMatrix& out) {
    const auto hs = real_sparse(hamiltonian_at(spec, tau));
    std::fill(x.data().begin(), x.data().end(), cplx{});
    for (const auto& e : hs) {
      for (int m = 0; m < f; ++m) {
        const cplx* src = &rho(e.col * f + m, 0);
        cplx* dst = &x(e.row * f + m, 0);
        for (int c = 0; c < dim; ++c) dst[c] += e.value * src[c];
      }
    }
    for (int s = 0; s < 4; ++s)
      for (int m = 1; m < f; ++m) {
        const double w = pm.mode_freq * m;
        const cplx* src = &rho(s * f + m, 0);
        cplx* dst = &x(s * f + m, 0);
        for (int c = 0; c < dim; ++c) dst[c] += w * src[c];
      }
    for (const auto& e : v) {
      for (int m = 0; m < f; ++m) {
        cplx* dst = &x(e.row * f + m, 0);
        // (a + a^dag)|m'> couples row m to m-1 (via a^dag) and m+1 (via a)
        if (m > 0) {
          const double w = pm.g * e.value * sq[m];
          const cplx* src = &rho(e.col * f + m - 1, 0);
          for (int c = 0; c < dim; ++c) dst[c] += w * src[c];
        }
        if (m + 1 < f) {
          const double w = pm.g * e.value * sq[m + 1];
          const cplx* src = &rho(e.col * f + m + 1, 0);
          for (int c = 0; c < dim; ++c) dst[c] += w * src[c];
        }
      }
    }
    const double kappa = pm.mode_decay;
    for (int r = 0; r < dim; ++r) {
      const int mr = r % f;
      for (int c = 0; c < dim; ++c) {
        const int mc = c % f;
        const cplx diff = x(r, c) - std::conj(x(c, r));
        cplx val(diff.imag(), -diff.real());
        val -= 0.5 * kappa * (mr + mc) * rho(r, c);
        if (mr + 1 < f && mc + 1 < f) val += kappa * sq[mr + 1] * sq[mc + 1] * rho(r + 1, c + 1);
        out(r, c) = val;
      }
    }
  };

  CMatrix rho(dim);
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t) rho(s * f, t * f) = rho0(s, t);

  CMatrix k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  PseudomodeResult result;
  auto top_population = [&] {
    double p = 0.0;
    for (int s = 0; s < 4; ++s) p += rho(s * f + f - 1, s * f + f - 1).real();
    return p;
  };
  detail::run_schedule(
      0.0, tau_end, dt, sample_every,
      [&](long, double t, double h) {
        rk4_step(rho, t, h, deriv, k1, k2, k3, k4, tmp);
        if (!finite(rho)) throw std::runtime_error("pseudomode_propagate: non-finite state at tau=" + std::to_string(t));
        result.max_top_fock_population = std::max(result.max_top_fock_population, top_population());
      },
      [&](long, double tau) {
        result.trajectory.push_back({tau, partial_trace_mode(rho, f)});
        if (observer) observer(tau, rho);
      });
  return result;
}

ComparisonReport compare(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("compare: sample grids differ in length (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  ComparisonReport rep;
  rep.samples = a.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].tau - b[i].tau) > 1e-9 * std::max(1.0, std::abs(a[i].tau))) {
      throw std::invalid_argument("compare: sample grids differ at index " + std::to_string(i));
    }
    const double d = trace_distance(a[i].rho, b[i].rho);
    rep.max_trace_distance = std::max(rep.max_trace_distance, d);
    sum += d;
    rep.max_purity_delta = std::max(rep.max_purity_delta, std::abs(purity(a[i].rho) - purity(b[i].rho)));
    rep.max_concurrence_delta =
        std::max(rep.max_concurrence_delta, std::abs(concurrence(a[i].rho) - concurrence(b[i].rho)));
    for (std::size_t k = 0; k < 4; ++k)
      rep.max_population_delta =
          std::max(rep.max_population_delta, std::abs(a[i].rho(k, k).real() - b[i].rho(k, k).real()));
  }
  rep.mean_trace_distance = a.empty() ? 0.0 : sum / static_cast<double>(a.size());
  return rep;
}

}  // namespace heom2q
