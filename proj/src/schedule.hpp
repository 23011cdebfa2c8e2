#pragma once

#include <cmath>

namespace heom2q::detail {

// Fixed-step schedule shared by every propagator: steps of dt from tau0,
// the last one shortened so the run ends exactly at tau_end (a remainder
// below 1e-9*dt is absorbed into the previous step). Step times are
// computed as tau0 + k*dt, never accumulated.
template <class StepFn, class EmitFn>
void run_schedule(double tau0, double tau_end, double dt, int sample_every, StepFn&& step, EmitFn&& emit) {
  long steps = static_cast<long>(std::ceil((tau_end - tau0) / dt - 1e-9));
  if (steps < 1) steps = 1;
  emit(0L, tau0);
  for (long k = 0; k < steps; ++k) {
    const double t = tau0 + static_cast<double>(k) * dt;
    const bool last = k + 1 == steps;
    step(k, t, last ? tau_end - t : dt);
    if ((k + 1) % sample_every == 0 || last) emit(k + 1, last ? tau_end : tau0 + static_cast<double>(k + 1) * dt);
  }
}

}  // namespace heom2q::detail
