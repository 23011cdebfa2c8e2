#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "oracle.hpp"

namespace heom2q {

std::string format_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory, const CycleClock& clock) {
  os << kTrajectoryHeader << '\n';
  for (const auto& s : trajectory) {
    const MatrixElements m = matrix_elements(s.rho);
    const double fields[] = {s.tau,
                             clock.cycles(s.tau),
                             m.rho11,
                             m.rho22,
                             m.rho33,
                             m.rho44,
                             m.rho23.real(),
                             m.rho23.imag(),
                             m.rho14.real(),
                             m.rho14.imag(),
                             purity(s.rho),
                             concurrence(s.rho)};
    for (std::size_t i = 0; i < std::size(fields); ++i) os << (i ? "," : "") << format_sci(fields[i]);
    os << '\n';
  }
}

void write_gp_csv(std::ostream& os, const GeometricPhaseSeries& series) {
  os << kGeometricPhaseHeader << '\n';
  for (const auto& p : series.points) {
    os << p.cycle << ',' << format_sci(p.phi_wrapped) << ',' << format_sci(p.phi_cumulative) << '\n';
  }
}

std::string heatmap_path(const std::string& prefix, int cycle) { return prefix + "_N" + std::to_string(cycle) + ".csv"; }

void write_heatmap(std::ostream& os, const RunConfig& cfg, const SweepResult& result, std::size_t cycle_index) {
  const std::string a = to_string(result.axis_a.parameter);
  const std::string b = to_string(result.axis_b.parameter);
  os << "# cycle=" << result.settings.cycles.at(cycle_index) << '\n';
  os << "# axis_a=" << a << '\n' << "# axis_b=" << b << '\n';
  const CycleClock clock = CycleClock::make(result.settings.clock_mode, result.base, result.settings.tau_s);
  const int n = result.settings.cycles.at(cycle_index);
  os << "# tau_s=" << format_sci(clock.tau_s) << '\n';
  os << "# snapshot_tau=" << format_sci(static_cast<double>(snapshot_step(n, clock.tau_s, result.settings.dt)) * result.settings.dt)
     << '\n';
  std::string text = serialize_config(cfg);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl - pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
    line.erase(std::remove(line.begin(), line.end(), ' '), line.end());
    os << "# " << line << '\n';
  }
  os << a << ',' << b << ",concurrence,purity,status\n";
  for (const auto& cell : result.cells) {
    std::string status = cell.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    os << format_sci(cell.a) << ',' << format_sci(cell.b) << ',';
    if (cell.ok) {
      os << format_sci(cell.concurrence[cycle_index]) << ',' << format_sci(cell.purity[cycle_index]);
    } else {
      os << "nan,nan";
    }
    os << ',' << status << '\n';
  }
}

Trajectory run_trajectory(const RunConfig& cfg) {
  cfg.model.validate();
  const CycleClock clock = cfg.resolve_clock();
  if (!(cfg.integrator.cycles > 0.0)) throw ConfigError("integrator.cycles must be > 0");
  const HierarchySpace space = make_space(cfg.model, cfg.integrator.depth, cfg.integrator.normalization);
  HierarchyState state = init_hierarchy(initial_state(cfg.state), space);
  return evolve(state, cfg.model, space, cfg.integrator.dt, cfg.integrator.cycles * clock.tau_s,
                cfg.integrator.sample_every);
}

GeometricPhaseSeries run_geometric_phase(const RunConfig& cfg) {
  cfg.model.validate();
  const CycleClock clock = cfg.resolve_clock();
  const int cycles = static_cast<int>(std::floor(cfg.integrator.cycles + 1e-9));
  if (cycles < 1) throw ConfigError("integrator.cycles must cover at least one cycle for gp");
  if (cfg.gp.eigen_stride < 1) throw ConfigError("gp.eigen_stride must be >= 1");
  const double dt = cfg.integrator.dt;

  std::vector<long> steps{0};
  // The final sample must not fall short of the last boundary, or that cycle
  // would not count as completed.
  const long last = std::max(snapshot_step(cycles, clock.tau_s, dt),
                             static_cast<long>(std::ceil(cycles * clock.tau_s / dt - 1e-9)));
  if (last < 1) throw ConfigError("cycle period is shorter than half a step; reduce integrator.dt");
  for (long k = cfg.gp.eigen_stride; k < last; k += cfg.gp.eigen_stride) steps.push_back(k);
  for (int n = 1; n <= cycles; ++n) steps.push_back(snapshot_step(n, clock.tau_s, dt));
  steps.push_back(last);
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());

  const HierarchySpace space = make_space(cfg.model, cfg.integrator.depth, cfg.integrator.normalization);
  HierarchyState state = init_hierarchy(initial_state(cfg.state), space);
  std::vector<TimedEig> eigs;
  eigs.reserve(steps.size());
  evolve_at_steps(state, cfg.model, space, dt, static_cast<double>(last) * dt, steps,
                  [&](double tau, const HierarchyState& s) { eigs.push_back({tau, hermitian_eig(s.physical())}); });
  return geometric_phase(eigs, clock);
}

SweepResult run_config_sweep(const RunConfig& cfg, int threads, const SweepProgress& progress) {
  cfg.model.validate();
  return run_sweep(cfg.model, cfg.state, cfg.sweep.axis_a, cfg.sweep.axis_b, cfg.sweep.locks,
                   cfg.sweep_settings(threads), progress);
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

template <class Fn>
CheckResult guarded(const std::string& name, double bound, Fn&& fn) {
  CheckResult r;
  r.name = name;
  r.bound = bound;
  try {
    fn(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.value = std::nan("");
    r.detail = std::string("error: ") + e.what();
  }
  return r;
}

Trajectory heom_run(const ModelSpec& spec, const CMatrix& rho0, int depth, double dt, double tau_end, int stride,
                    HierarchyNormalization norm) {
  const HierarchySpace space = make_space(spec, depth, norm);
  HierarchyState st = init_hierarchy(rho0, space);
  return evolve(st, spec, space, dt, tau_end, stride);
}

std::string fmt_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

ValidationReport run_validation(const RunConfig& cfg) {
  const auto& v = cfg.validate;
  const auto& in = cfg.integrator;
  ValidationReport report;

  report.checks.push_back(guarded("dark_state", v.dark_tol, [&](CheckResult& r) {
    ModelSpec spec = cfg.model;
    spec.drive1 = {cfg.model.drive1.Omega, 0.0, 0.0, 0.0};
    spec.drive2 = spec.drive1;
    spec.J = 0.0;
    spec.coupling = Coupling::dipolar;
    InitialState init;
    init.kind = StateKind::phi_minus;
    const Trajectory tr = heom_run(spec, initial_state(init), in.depth, in.dt, v.tau_end, in.sample_every,
                                   in.normalization);
    for (const auto& s : tr) r.value = std::max(r.value, std::abs(concurrence(s.rho) - 1.0));
    r.passed = r.value < r.bound;
    r.detail = "resonant undriven phi_minus, max |C - 1| over " + std::to_string(tr.size()) + " samples";
  }));

  report.checks.push_back(guarded("unitary_limit", v.unitary_tol, [&](CheckResult& r) {
    ModelSpec spec = cfg.model;
    spec.bath.R = 1e-12;
    const CMatrix rho0 = initial_state(cfg.state);
    const Trajectory tr = heom_run(spec, rho0, in.depth, in.dt, v.tau_end, in.sample_every, in.normalization);
    const Trajectory ref = unitary_propagate(spec, rho0, in.dt, v.tau_end, in.sample_every);
    const ComparisonReport cmp = compare(tr, ref);
    const double p0 = purity(rho0);
    double drift = 0.0;
    for (const auto& s : tr) drift = std::max(drift, std::abs(purity(s.rho) - p0));
    r.value = std::max(cmp.max_trace_distance, drift);
    r.passed = r.value < r.bound;
    r.detail = "max trace distance " + fmt_value(cmp.max_trace_distance) + ", purity drift " + fmt_value(drift);
  }));

  report.checks.push_back(guarded("truncation", v.truncation_tol, [&](CheckResult& r) {
    r.value = truncation_check(cfg.model, initial_state(cfg.state), in.dt, v.tau_end, in.depth, v.depth_b,
                               in.sample_every, in.normalization);
    r.passed = r.value < r.bound;
    r.detail = "depth " + std::to_string(in.depth) + " vs " + std::to_string(v.depth_b);
  }));

  report.checks.push_back(guarded("dt_convergence", v.ratio_min, [&](CheckResult& r) {
    const CMatrix rho0 = initial_state(cfg.state);
    auto final_state = [&](double dt) {
      const Trajectory tr = heom_run(cfg.model, rho0, in.depth, dt, v.convergence_tau, 1 << 30, in.normalization);
      return tr.back().rho;
    };
    const double h = v.convergence_dt;
    const CMatrix a = final_state(h), b = final_state(h / 2), c = final_state(h / 4);
    const double e1 = max_abs(a - b), e2 = max_abs(b - c);
    r.value = e1 / e2;
    r.passed = r.value >= v.ratio_min && r.value <= v.ratio_max;
    r.detail = "error ratio at tau=" + fmt_value(v.convergence_tau) + " (dt=" + fmt_value(h) + ": " + fmt_value(e1) +
               ", dt/2: " + fmt_value(e2) + "), accepted range [" + fmt_value(v.ratio_min) + ", " +
               fmt_value(v.ratio_max) + "]";
  }));

  report.checks.push_back(guarded("pseudomode", v.pseudomode_tol, [&](CheckResult& r) {
    const CMatrix rho0 = initial_state(cfg.state);
    const HierarchySpace space = make_space(cfg.model, in.depth, in.normalization);
    const Trajectory tr = heom_run(cfg.model, rho0, in.depth, in.dt, v.pseudomode_tau_end, in.sample_every,
                                   in.normalization);
    const PseudomodeSpec pm =
        PseudomodeSpec::matched(cfg.model, v.fock_cutoff, space.effective_correlation_amplitude());
    const PseudomodeResult ref = pseudomode_propagate(cfg.model, pm, rho0, in.dt, v.pseudomode_tau_end, in.sample_every);
    const ComparisonReport cmp = compare(tr, ref.trajectory);
    r.value = cmp.max_trace_distance;
    r.passed = r.value < r.bound && ref.cutoff_adequate();
    r.detail = "max trace distance over tau <= " + fmt_value(v.pseudomode_tau_end) + ", top Fock population " +
               fmt_value(ref.max_top_fock_population) + (ref.cutoff_adequate() ? "" : " (cutoff inadequate)");
  }));

  return report;
}

void write_validation_text(std::ostream& os, const ValidationReport& report) {
  for (const auto& c : report.checks) {
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %-4s value=%.3e bound=%.3e  ", c.name.c_str(), c.passed ? "PASS" : "FAIL",
                  c.value, c.bound);
    os << line << c.detail << '\n';
  }
  const auto failed = std::count_if(report.checks.begin(), report.checks.end(), [](auto& c) { return !c.passed; });
  os << "summary: " << report.checks.size() - failed << " passed, " << failed << " failed\n";
}

std::string validation_json(const ValidationReport& report) {
  nlohmann::json j;
  j["passed"] = report.passed();
  for (const auto& c : report.checks) {
    nlohmann::json cj{{"name", c.name}, {"passed", c.passed}, {"bound", c.bound}, {"detail", c.detail}};
    cj["value"] = std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr);
    j["checks"].push_back(cj);
  }
  return j.dump(2);
}

}  // namespace heom2q
