#include "heom.hpp"

#include <algorithm>
#include <cmath>

#if defined(__SSE2__)
#include <pmmintrin.h>
#include <xmmintrin.h>
#endif

#include "observables.hpp"
#include "schedule.hpp"

namespace heom2q {

namespace {

bool all_finite(const Mat4& m) {
  for (const auto& v : m)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

// Reusable RK4 work buffers for one trajectory, in the planar layout.
class Rk4Stepper {
 public:
  explicit Rk4Stepper(const HierarchyGenerator& gen)
      : gen_(gen),
        k1_(gen.planar_size(), 0.0),
        k2_(k1_.size(), 0.0),
        k3_(k1_.size(), 0.0),
        k4_(k1_.size(), 0.0),
        tmp_(k1_.size(), 0.0) {}

  void step(std::vector<double>& y, double tau, double dt) {
    const std::size_t n = y.size();
    gen_.planar_derivative(tau, y, k1_);
    check(k1_, tau);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * dt * k1_[i];
    gen_.planar_derivative(tau + 0.5 * dt, tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * dt * k2_[i];
    gen_.planar_derivative(tau + 0.5 * dt, tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + dt * k3_[i];
    gen_.planar_derivative(tau + dt, tmp_, k4_);
    const double h6 = dt / 6.0, h3 = dt / 3.0;
    for (std::size_t i = 0; i < n; ++i) y[i] += h6 * (k1_[i] + k4_[i]) + h3 * (k2_[i] + k3_[i]);
  }

 private:
  void check(const std::vector<double>& d, double tau) const {
    double sum = 0.0;
    for (double v : d) sum += v * 0.0;
    if (std::isfinite(sum)) return;
    const std::size_t plane = gen_.plane_size();
    const int w = gen_.width();
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!std::isfinite(d[i])) {
        const int c = static_cast<int>(i % plane);
        throw IntegrationError("non-finite hierarchy derivative at tau=" + std::to_string(tau) + " index (" +
                                   std::to_string(c / w - 1) + "," + std::to_string(c % w - 1) + ")",
                               tau);
      }
    }
  }

  const HierarchyGenerator& gen_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace

CMatrix to_cmatrix(const Mat4& m) {
  CMatrix out(4);
  std::copy(m.begin(), m.end(), out.data().begin());
  return out;
}

Mat4 to_mat4(const CMatrix& m) {
  if (m.dim() != 4) throw AlgebraError("to_mat4: expected a 4x4 matrix");
  Mat4 out;
  std::copy(m.data().begin(), m.data().end(), out.begin());
  return out;
}

CMatrix HierarchyState::physical() const { return to_cmatrix(matrices.front()); }

HierarchySpace make_space(const ModelSpec& spec, int depth, HierarchyNormalization norm) {
  if (depth < 0) throw StepConfigError("truncation depth must be >= 0");
  HierarchySpace s;
  s.depth = depth;
  const double peak = spec.peak_frequency();
  s.nu1 = cplx(1.0, -peak);
  s.nu2 = cplx(1.0, peak);
  s.gamma0 = spec.bath.R;
  s.down_amplitude = norm == HierarchyNormalization::literal ? 0.5 * spec.bath.R : 0.25 * spec.bath.R;
  s.V = coupling_operator(spec);
  return s;
}

HierarchyState init_hierarchy(const CMatrix& rho0, const HierarchySpace& space) {
  HierarchyState st;
  st.depth = space.depth;
  st.matrices.assign(space.size(), Mat4{});
  st.matrices.front() = to_mat4(rho0);
  return st;
}

HierarchyGenerator::HierarchyGenerator(const ModelSpec& spec, const HierarchySpace& space)
    : spec_(spec), space_(space) {
  const CMatrix v = coupling_operator(spec);
  for (const auto& x : v.data())
    if (x.imag() != 0.0) throw std::logic_error("coupling operator must be real in the computational basis");
  const std::size_t ps = plane_size();
  damp_re_.assign(ps, 0.0);
  damp_im_.assign(ps, 0.0);
  left_w_.assign(ps, 0.0);
  right_w_.assign(ps, 0.0);
  mask_.assign(ps, 0.0);
  const double a2 = 2.0 * space_.down_amplitude;
  for (int n1 = 0; n1 <= space_.depth; ++n1) {
    for (int n2 = 0; n2 <= space_.depth; ++n2) {
      const std::size_t c = cell(n1, n2);
      const cplx d = static_cast<double>(n1) * space_.nu1 + static_cast<double>(n2) * space_.nu2;
      damp_re_[c] = d.real();
      damp_im_[c] = d.imag();
      left_w_[c] = a2 * n2;
      right_w_[c] = a2 * n1;
      mask_[c] = 1.0;
    }
  }
}

void HierarchyGenerator::to_planar(std::span<const Mat4> in, std::span<double> planar) const {
  const std::size_t ps = plane_size();
  std::fill(planar.begin(), planar.end(), 0.0);
  for (int n1 = 0; n1 <= space_.depth; ++n1)
    for (int n2 = 0; n2 <= space_.depth; ++n2) {
      const Mat4& m = in[space_.index(n1, n2)];
      const std::size_t c = cell(n1, n2);
      for (int e = 0; e < 16; ++e) {
        planar[(2 * e) * ps + c] = m[e].real();
        planar[(2 * e + 1) * ps + c] = m[e].imag();
      }
    }
}

Mat4 HierarchyGenerator::element(std::span<const double> planar, int n1, int n2) const {
  const std::size_t ps = plane_size();
  const std::size_t c = cell(n1, n2);
  Mat4 m;
  for (int e = 0; e < 16; ++e) m[e] = cplx(planar[(2 * e) * ps + c], planar[(2 * e + 1) * ps + c]);
  return m;
}

void HierarchyGenerator::from_planar(std::span<const double> planar, std::span<Mat4> out) const {
  for (int n1 = 0; n1 <= space_.depth; ++n1)
    for (int n2 = 0; n2 <= space_.depth; ++n2) out[space_.index(n1, n2)] = element(planar, n1, n2);
}

void HierarchyGenerator::derivative(double tau, std::span<const Mat4> in, std::span<Mat4> out) const {
  std::vector<double> pin(planar_size()), pout(planar_size(), 0.0);
  to_planar(in, pin);
  planar_derivative(tau, pin, pout);
  from_planar(pout, out);
}

namespace {

struct EntryTerms {
  double dh, jr, jc, l1, l2, r1, r2;
};

struct Planes {
  const double *x, *jr, *jc, *l1, *l2, *r1, *r2;
};

struct CellCoeffs {
  const double *dre, *dim, *wl, *wr, *mask;
};

// One matrix entry over the contiguous cell range [begin, end); padding
// cells inside the range are zeroed through the mask.
void entry_kernel(const EntryTerms& t, const Planes& pr, const Planes& pi, const CellCoeffs& cc, std::size_t begin,
                  std::size_t end, std::size_t w, double* __restrict ore, double* __restrict oim) {
  const double* __restrict dre = cc.dre;
  const double* __restrict dim = cc.dim;
  const double* __restrict wl = cc.wl;
  const double* __restrict wr = cc.wr;
  const double* __restrict mask = cc.mask;
  const double* __restrict xr = pr.x;
  const double* __restrict xi = pi.x;
  const double* __restrict jrr = pr.jr;
  const double* __restrict jri = pi.jr;
  const double* __restrict jcr = pr.jc;
  const double* __restrict jci = pi.jc;
  const double* __restrict l1r = pr.l1;
  const double* __restrict l1i = pi.l1;
  const double* __restrict l2r = pr.l2;
  const double* __restrict l2i = pi.l2;
  const double* __restrict r1r = pr.r1;
  const double* __restrict r1i = pi.r1;
  const double* __restrict r2r = pr.r2;
  const double* __restrict r2i = pi.r2;
  for (std::size_t i = begin; i < end; ++i) {
    const double left_r = t.l1 * (l1r[i + w] + l1r[i + 1] + wl[i] * l1r[i - 1]) +
                          t.l2 * (l2r[i + w] + l2r[i + 1] + wl[i] * l2r[i - 1]);
    const double left_i = t.l1 * (l1i[i + w] + l1i[i + 1] + wl[i] * l1i[i - 1]) +
                          t.l2 * (l2i[i + w] + l2i[i + 1] + wl[i] * l2i[i - 1]);
    const double right_r = t.r1 * (r1r[i + w] + r1r[i + 1] + wr[i] * r1r[i - w]) +
                           t.r2 * (r2r[i + w] + r2r[i + 1] + wr[i] * r2r[i - w]);
    const double right_i = t.r1 * (r1i[i + w] + r1i[i + 1] + wr[i] * r1i[i - w]) +
                           t.r2 * (r2i[i + w] + r2i[i + 1] + wr[i] * r2i[i - w]);
    const double diff_r = t.dh * xr[i] + t.jr * jrr[i] + t.jc * jcr[i] + left_r + right_r;
    const double diff_i = t.dh * xi[i] + t.jr * jri[i] + t.jc * jci[i] + left_i + right_i;
    // -i diff - (n.nu) rho
    ore[i] = mask[i] * (diff_i - (dre[i] * xr[i] - dim[i] * xi[i]));
    oim[i] = mask[i] * (-diff_r - (dre[i] * xi[i] + dim[i] * xr[i]));
  }
}

}  // namespace

// Basis index bits: value 2 flips qubit 1, value 1 flips qubit 2.
// H = diag(hd) + (J/2)(|1><2| + |2><1|); dipolar (V X)[r] = X[r^2] + X[r^1],
// dephasing V = diag(2, 0, 0, -2).
//   left  = up + 2a n2 rho_{n-e2}   (multiplied by V from the left)
//   right = up + 2a n1 rho_{n-e1}   (multiplied by V from the right)
//   d rho_n = -i (H rho - rho H + V left - right V) - (n.nu) rho
void HierarchyGenerator::planar_derivative(double tau, std::span<const double> in, std::span<double> out) const {
  const CMatrix h = hamiltonian_at(spec_, tau);
  double hd[4];
  for (int k = 0; k < 4; ++k) hd[k] = h(k, k).real();
  const double half_j = h(1, 2).real();
  const bool dipolar = spec_.coupling == Coupling::dipolar;
  constexpr double vz[4] = {2.0, 0.0, 0.0, -2.0};

  const std::size_t ps = plane_size();
  const int w = width();
  const int depth = space_.depth;
  const CellCoeffs coeffs{damp_re_.data(), damp_im_.data(), left_w_.data(), right_w_.data(), mask_.data()};
  const std::size_t begin = cell(0, 0), end = cell(depth, depth) + 1;


  struct Term {
    int entry;
    double coef;
  };
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const int e = 4 * r + c;
      const double dh = hd[r] - hd[c];
      // J couples rows/columns 1 <-> 2
      const Term jr{(r == 1 || r == 2) ? 4 * (3 - r) + c : e, (r == 1 || r == 2) ? half_j : 0.0};
      const Term jc{(c == 1 || c == 2) ? 4 * r + (3 - c) : e, (c == 1 || c == 2) ? -half_j : 0.0};
      Term l1, l2, r1, r2;
      if (dipolar) {
        l1 = {4 * (r ^ 2) + c, 1.0};
        l2 = {4 * (r ^ 1) + c, 1.0};
        r1 = {4 * r + (c ^ 2), -1.0};
        r2 = {4 * r + (c ^ 1), -1.0};
      } else {
        l1 = {e, vz[r]};
        l2 = {e, 0.0};
        r1 = {e, -vz[c]};
        r2 = {e, 0.0};
      }
      const EntryTerms t{dh, jr.coef, jc.coef, l1.coef, l2.coef, r1.coef, r2.coef};
      auto re = [&](int entry) { return in.data() + (2 * entry) * ps; };
      auto im = [&](int entry) { return in.data() + (2 * entry + 1) * ps; };
      const Planes pre{re(e), re(jr.entry), re(jc.entry), re(l1.entry), re(l2.entry), re(r1.entry), re(r2.entry)};
      const Planes pim{im(e), im(jr.entry), im(jc.entry), im(l1.entry), im(l2.entry), im(r1.entry), im(r2.entry)};
      entry_kernel(t, pre, pim, coeffs, begin, end, static_cast<std::size_t>(w), out.data() + (2 * e) * ps,
                   out.data() + (2 * e + 1) * ps);
    }
  }
}

std::vector<Mat4> rhs(const HierarchyState& state, const ModelSpec& spec, const HierarchySpace& space, double tau) {
  HierarchyGenerator gen(spec, space);
  std::vector<Mat4> out(space.size());
  gen.derivative(tau, state.matrices, out);
  for (std::size_t n = 0; n < out.size(); ++n) {
    if (!all_finite(out[n])) {
      throw IntegrationError("non-finite hierarchy derivative at tau=" + std::to_string(tau) + " index (" +
                                 std::to_string(n / (space.depth + 1)) + "," +
                                 std::to_string(n % (space.depth + 1)) + ")",
                             tau);
    }
  }
  return out;
}

void check_step(const ModelSpec& spec, const HierarchySpace& space, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw StepConfigError("dt must be a positive finite number");
  const int depth = space.depth;
  if (dt * 2.0 * depth >= 2.5) {
    throw StepConfigError("dt=" + std::to_string(dt) + " violates the stability guard dt*2*depth < 2.5");
  }
  // The hierarchy damping n.nu is complex; its modulus and the spread of
  // the system spectrum bound the stiffest mode RK4 must resolve.
  double wmax = 0.0;
  for (const auto* d : {&spec.drive1, &spec.drive2}) wmax = std::max(wmax, d->Omega + d->Delta);
  const double spread = 2.0 * wmax + std::abs(spec.J);
  const double damping = std::max(2.0 * depth, depth * std::abs(space.nu1));
  const double rate = damping + spread;
  if (dt * rate >= 2.5) {
    throw StepConfigError("dt=" + std::to_string(dt) + " exceeds the RK4 stability bound 2.5/" +
                          std::to_string(rate) + " for this model and depth");
  }
}

namespace {

// Deep auxiliaries scale like R^n and underflow into subnormals at weak
// coupling, which slows SSE/AVX arithmetic by an order of magnitude.
// Flushing them to zero changes nothing above 1e-308.
class FlushSubnormals {
 public:
#if defined(__SSE2__)
  FlushSubnormals() : saved_(_mm_getcsr()) {
    _MM_SET_FLUSH_ZERO_MODE(_MM_FLUSH_ZERO_ON);
    _MM_SET_DENORMALS_ZERO_MODE(_MM_DENORMALS_ZERO_ON);
  }
  ~FlushSubnormals() { _mm_setcsr(saved_); }

 private:
  unsigned saved_;
#endif
};

}  // namespace

HierarchyState step_rk4(const HierarchyState& state, const ModelSpec& spec, const HierarchySpace& space, double dt) {
  check_step(spec, space, dt);
  const FlushSubnormals ftz;
  HierarchyGenerator gen(spec, space);
  Rk4Stepper stepper(gen);
  std::vector<double> y(gen.planar_size());
  gen.to_planar(state.matrices, y);
  stepper.step(y, state.tau, dt);
  HierarchyState next = state;
  gen.from_planar(y, next.matrices);
  next.tau = state.tau + dt;
  return next;
}

namespace {

template <class Emit>
void run_planar(HierarchyState& state, const ModelSpec& spec, const HierarchySpace& space, double dt,
                double tau_end, int sample_every, Emit&& emit) {
  if (!(tau_end > state.tau)) throw StepConfigError("tau_end must exceed the current time");
  if (sample_every < 1) throw StepConfigError("sample stride must be >= 1");
  check_step(spec, space, dt);
  const FlushSubnormals ftz;
  HierarchyGenerator gen(spec, space);
  Rk4Stepper stepper(gen);
  std::vector<double> y(gen.planar_size());
  gen.to_planar(state.matrices, y);
  detail::run_schedule(
      state.tau, tau_end, dt, sample_every,
      [&](long k, double t, double h) {
        try {
          stepper.step(y, t, h);
        } catch (const IntegrationError& e) {
          throw IntegrationError(std::string(e.what()) + " (step " + std::to_string(k) + ")", e.tau());
        }
      },
      [&](long k, double tau) {
        state.tau = tau;
        emit(k, tau, [&] { gen.from_planar(y, state.matrices); });
      });
  gen.from_planar(y, state.matrices);
}

}  // namespace

void evolve(HierarchyState& state, const ModelSpec& spec, const HierarchySpace& space, double dt, double tau_end,
            int sample_every, const SampleObserver& observer) {
  run_planar(state, spec, space, dt, tau_end, sample_every, [&](long, double tau, auto&& sync) {
    if (!observer) return;
    sync();
    observer(tau, state);
  });
}

void evolve_at_steps(HierarchyState& state, const ModelSpec& spec, const HierarchySpace& space, double dt,
                     double tau_end, std::span<const long> steps, const SampleObserver& observer) {
  if (!std::is_sorted(steps.begin(), steps.end())) throw StepConfigError("snapshot steps must be ascending");
  std::size_t next = 0;
  run_planar(state, spec, space, dt, tau_end, 1, [&](long k, double tau, auto&& sync) {
    bool hit = false;
    while (next < steps.size() && steps[next] == k) {
      hit = true;
      ++next;
    }
    if (!hit || !observer) return;
    sync();
    observer(tau, state);
  });
}

Trajectory evolve(HierarchyState& state, const ModelSpec& spec, const HierarchySpace& space, double dt,
                  double tau_end, int sample_every) {
  Trajectory out;
  evolve(state, spec, space, dt, tau_end, sample_every,
         [&](double tau, const HierarchyState& s) { out.push_back({tau, s.physical()}); });
  return out;
}

double truncation_check(const ModelSpec& spec, const CMatrix& rho0, double dt, double tau_end, int na, int nb,
                        int sample_every, HierarchyNormalization norm) {
  if (!(na < nb)) throw StepConfigError("truncation_check requires na < nb");
  auto run = [&](int depth) {
    const HierarchySpace space = make_space(spec, depth, norm);
    HierarchyState st = init_hierarchy(rho0, space);
    return evolve(st, spec, space, dt, tau_end, sample_every);
  };
  const Trajectory a = run(na);
  const Trajectory b = run(nb);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, trace_distance(a[i].rho, b[i].rho));
  return worst;
}

}  // namespace heom2q
