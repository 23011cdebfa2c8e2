// Acceptance run: one PASS/FAIL line per criterion, with wall time and the
// measured quantity. Names given with --xfail are expected to fail; their
// FAIL line is still printed, and an unexpected PASS counts as a failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "heom.hpp"
#include "observables.hpp"
#include "oracle.hpp"

using namespace heom2q;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double time_limit;  // seconds; <= 0 means unbounded
  std::function<Outcome()> run;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

RunConfig recipe(const std::string& name) { return load_config(std::string(HEOM2Q_RECIPE_DIR) + "/" + name); }

ModelSpec fig2_baseline() {
  ModelSpec s;
  s.drive1 = {15.0, 4.0, 0.0, kPi};
  s.drive2 = {10.0, 7.0, 0.0, 0.0};
  s.bath.R = 1.0;
  return s;
}

InitialState state(StateKind k, double p = 0.5) {
  InitialState s;
  s.kind = k;
  s.p = p;
  return s;
}

double circular_distance(double a, double b) { return std::abs(wrap_phase(a - b)); }

Outcome dark_state() {
  ModelSpec spec;
  spec.drive1 = spec.drive2 = {10.0, 0.0, 0.0, 0.0};
  const HierarchySpace space = make_space(spec, 20);
  HierarchyState st = init_hierarchy(initial_state(state(StateKind::phi_minus)), space);
  double worst = 0.0;
  std::size_t n = 0;
  evolve(st, spec, space, 1e-3, 10.0, 1, [&](double, const HierarchyState& s) {
    worst = std::max(worst, std::abs(concurrence(s.physical()) - 1.0));
    ++n;
  });
  return {worst < 1e-6, "max |C - 1| = " + num(worst) + " over " + std::to_string(n) + " samples (bound 1e-6)"};
}

Outcome unitary_limit() {
  ModelSpec spec = fig2_baseline();
  spec.bath.R = 1e-12;
  double dist = 0.0, drift = 0.0;
  for (StateKind k : {StateKind::phi_plus, StateKind::phi_minus}) {
    const CMatrix rho0 = initial_state(state(k));
    const HierarchySpace space = make_space(spec, 20);
    HierarchyState st = init_hierarchy(rho0, space);
    const Trajectory tr = evolve(st, spec, space, 1e-3, 10.0, 100);
    const Trajectory ref = unitary_propagate(spec, rho0, 1e-3, 10.0, 100);
    dist = std::max(dist, compare(tr, ref).max_trace_distance);
    for (const auto& s : tr) drift = std::max(drift, std::abs(purity(s.rho) - purity(rho0)));
  }
  return {dist < 1e-8 && drift < 1e-8,
          "trace distance " + num(dist) + ", purity drift " + num(drift) + " (bounds 1e-8)"};
}

Outcome pseudomode() {
  const ModelSpec spec = fig2_baseline();
  const CMatrix rho0 = initial_state(state(StateKind::phi_plus));
  const HierarchySpace space = make_space(spec, 20);
  HierarchyState st = init_hierarchy(rho0, space);
  const Trajectory heom = evolve(st, spec, space, 1e-3, 5.0, 50);
  const PseudomodeResult pm = pseudomode_propagate(
      spec, PseudomodeSpec::matched(spec, 16, space.effective_correlation_amplitude()), rho0, 1e-3, 5.0, 50);
  const double d = compare(heom, pm.trajectory).max_trace_distance;
  return {d < 1e-3 && pm.cutoff_adequate(),
          "trace distance " + num(d) + " (bound 1e-3), top Fock population " + num(pm.max_top_fock_population)};
}

Outcome convergence() {
  const ModelSpec spec = fig2_baseline();
  const CMatrix rho0 = initial_state(state(StateKind::phi_plus));
  const double trunc = truncation_check(spec, rho0, 1e-3, 10.0, 20, 24, 100);
  auto final_state = [&](double dt) {
    const HierarchySpace space = make_space(spec, 20);
    HierarchyState st = init_hierarchy(rho0, space);
    evolve(st, spec, space, dt, 1.0, 1 << 30, {});
    return st.physical();
  };
  const CMatrix a = final_state(4e-3), b = final_state(2e-3), c = final_state(1e-3);
  const double ratio = max_abs(a - b) / max_abs(b - c);
  return {trunc < 1e-6 && ratio >= 8.0 && ratio <= 32.0,
          "depth 20 vs 24: " + num(trunc) + " (bound 1e-6); dt error ratio " + num(ratio) + " (range [8, 32])"};
}

Outcome purity_ordering() {
  RunConfig cfg = recipe("fig1.cfg");
  set_config_value(cfg, "integrator.cycles", "5");
  std::vector<double> p;
  std::string detail, troughs;
  for (const char* r : {"5", "1", "0.1", "0.01"}) {
    set_config_value(cfg, "bath.R", r);
    const Trajectory tr = run_trajectory(cfg);
    const auto low = std::min_element(tr.begin(), tr.end(),
                                      [](const Sample& a, const Sample& b) { return purity(a.rho) < purity(b.rho); });
    p.push_back(purity(tr.back().rho));
    detail += std::string(detail.empty() ? "" : ", ") + "P(R=" + r + ")=" + num(p.back());
    troughs += std::string(troughs.empty() ? "" : ", ") + num(purity(low->rho)) + " at N=" +
               num(cfg.resolve_clock().cycles(low->tau));
  }
  return {p[0] < p[1] && p[1] < p[2] && p[2] < p[3], "at N=5: " + detail + "; minima over N<=5: " + troughs};
}

Outcome dephasing_gp() {
  RunConfig base = recipe("fig12.cfg");
  set_config_value(base, "model.coupling", "dephasing");
  set_config_value(base, "integrator.cycles", "5");
  double worst = 0.0;
  int series = 0;
  for (bool driven : {false, true}) {
    for (const char* r : {"0.1", "1"}) {
      RunConfig cfg = base;
      set_config_value(cfg, "bath.R", r);
      if (driven) {
        set_config_value(cfg, "drive1.omega_d", "2");
        set_config_value(cfg, "drive2.omega_d", "3");
        set_config_value(cfg, "model.J", "1");
      }
      const GeometricPhaseSeries gp = run_geometric_phase(cfg);
      if (gp.points.size() != 5) return {false, "expected 5 cycles, got " + std::to_string(gp.points.size())};
      for (const auto& pt : gp.points) worst = std::max(worst, circular_distance(pt.phi_wrapped, kPi));
      ++series;
    }
  }
  return {worst < 0.02, "max distance from pi over " + std::to_string(series) + " series x 5 cycles: " + num(worst) +
                            " rad (bound 0.02)"};
}

Outcome closed_gp() {
  RunConfig cfg = recipe("fig12.cfg");
  set_config_value(cfg, "bath.R", "0");
  set_config_value(cfg, "integrator.cycles", "5");
  const GeometricPhaseSeries gp = run_geometric_phase(cfg);
  double worst = 0.0;
  for (const auto& pt : gp.points) worst = std::max(worst, circular_distance(pt.phi_wrapped, kPi));
  const double stair = gp.points.empty() ? NAN : std::abs(std::abs(gp.points.back().phi_cumulative) - 5.0 * kPi);
  return {gp.points.size() == 5 && worst < 1e-4 && stair < 5e-4,
          "max per-cycle distance from pi " + num(worst) + " rad (bound 1e-4), cumulative after 5 cycles off by " +
              num(stair)};
}

Outcome dipolar_gp() {
  RunConfig cfg = recipe("fig12.cfg");
  set_config_value(cfg, "bath.R", "1");
  set_config_value(cfg, "integrator.cycles", "1");
  const GeometricPhaseSeries gp = run_geometric_phase(cfg);
  if (gp.points.empty()) return {false, "no completed cycle"};
  const double phi = gp.points.front().phi_wrapped;
  return {std::abs(phi - kPi / 2.0) <= 0.2, "first-cycle GP " + num(phi) + " rad (band pi/2 +- 0.2)"};
}

struct SweepOptions {
  int points = 21;
  int threads = 1;
};

SweepResult sweep_recipe(const std::string& name, int cycle, const SweepOptions& opt, RunConfig& cfg) {
  cfg = recipe(name);
  set_config_value(cfg, "sweep.axis_a.points", std::to_string(opt.points));
  set_config_value(cfg, "sweep.axis_b.points", std::to_string(opt.points));
  set_config_value(cfg, "sweep.cycles", std::to_string(cycle));
  return run_config_sweep(cfg, opt.threads);
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += rx[i] / n, my += ry[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::size_t nonzero_cells(const SweepResult& r) {
  return static_cast<std::size_t>(
      std::count_if(r.cells.begin(), r.cells.end(), [](const SweepCell& c) { return c.ok && c.concurrence[0] > 1e-6; }));
}

Outcome sweep_trends(const SweepOptions& opt) {
  RunConfig cfg;
  const SweepResult f7 = sweep_recipe("fig7.cfg", 8, opt, cfg);
  const bool j_on_b = f7.axis_b.parameter == SweepParameter::J;
  const int nj = j_on_b ? f7.axis_b.points : f7.axis_a.points;
  const int other = j_on_b ? f7.axis_a.points : f7.axis_b.points;
  std::vector<double> js, means;
  int drops = 0;
  for (int j = 0; j < nj; ++j) {
    double m = 0.0;
    for (int i = 0; i < other; ++i) m += (j_on_b ? f7.at(i, j) : f7.at(j, i)).concurrence[0] / other;
    js.push_back(j_on_b ? f7.axis_b.value(j) : f7.axis_a.value(j));
    if (!means.empty() && m < means.back()) ++drops;
    means.push_back(m);
  }
  const double rho = spearman(js, means);

  const SweepResult a = sweep_recipe("fig3a.cfg", 5, opt, cfg);
  const SweepResult b = sweep_recipe("fig3b.cfg", 5, opt, cfg);
  const std::size_t na = nonzero_cells(a), nb = nonzero_cells(b);

  const bool fig7_ok = rho > 0.0;
  const bool fig3_ok = nb >= na;
  return {fig7_ok && fig3_ok,
          std::string("fig7 N=8: Spearman(J, column mean C) = ") + num(rho) + ", " + std::to_string(drops) +
              " decreasing steps, mean C " + num(means.front()) + " -> " + num(means.back()) + " [" +
              (fig7_ok ? "ok" : "fails") + "]; fig3 N=5 nonzero cells (C > 1e-6): (a) " + std::to_string(na) + ", (b) " +
              std::to_string(nb) + " of " + std::to_string(a.cells.size()) + " [" + (fig3_ok ? "ok" : "fails") +
              "]; grid " + std::to_string(opt.points) + "x" + std::to_string(opt.points) + ", " +
              std::to_string(opt.threads) + " thread(s)"};
}

// Random helpers built on the core algebra only.
CMatrix random_density(std::mt19937_64& rng, std::size_t rank) {
  std::normal_distribution<double> g;
  CMatrix a(4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < rank; ++c) a(r, c) = {g(rng), g(rng)};
  CMatrix rho = a * a.adjoint();
  return rho * (1.0 / rho.trace().real());
}

CMatrix random_qubit_unitary(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  const double t = 0.5 * u(rng), p = u(rng), l = u(rng), g = u(rng);
  CMatrix m(2);
  m(0, 0) = std::polar(std::cos(t), g);
  m(0, 1) = -std::polar(std::sin(t), g + l);
  m(1, 0) = std::polar(std::sin(t), g + p);
  m(1, 1) = std::polar(std::cos(t), g + p + l);
  return m;
}

Outcome properties() {
  std::ostringstream detail;
  bool ok = true;

  // Trace, Hermiticity and positivity along driven trajectories.
  double trace_err = 0.0, herm = 0.0, min_eig = 1.0;
  std::mt19937_64 rng(7);
  for (Coupling c : {Coupling::dipolar, Coupling::dephasing}) {
    ModelSpec spec = fig2_baseline();
    spec.drive1.omegaD = 2.0;
    spec.drive2.omegaD = 3.0;
    spec.J = 1.0;
    spec.coupling = c;
    const HierarchySpace space = make_space(spec, 20);
    for (std::size_t rank : {1u, 2u, 4u}) {
      HierarchyState st = init_hierarchy(random_density(rng, rank), space);
      evolve(st, spec, space, 1e-3, 3.0, 10, [&](double, const HierarchyState& s) {
        const CMatrix rho = s.physical();
        trace_err = std::max(trace_err, std::abs(rho.trace() - 1.0));
        herm = std::max(herm, hermiticity_defect(rho));
        min_eig = std::min(min_eig, hermitian_eig(rho).values.front());
      });
    }
  }
  ok &= trace_err < 1e-9 && herm < 1e-9 && min_eig > -1e-6;
  detail << "trace " << num(trace_err) << ", hermiticity " << num(herm) << ", min eigenvalue " << num(min_eig);

  // Local-unitary invariance of concurrence.
  double lu = 0.0;
  for (int t = 0; t < 500; ++t) {
    const CMatrix rho = random_density(rng, 1 + t % 4);
    const CMatrix u = kron(random_qubit_unitary(rng), random_qubit_unitary(rng));
    lu = std::max(lu, std::abs(concurrence(u * rho * u.adjoint()) - concurrence(rho)));
  }
  ok &= lu < 1e-9;
  detail << "; LU invariance " << num(lu);

  // Gauge invariance of the geometric phase.
  RunConfig cfg = recipe("fig12.cfg");
  set_config_value(cfg, "bath.R", "0.1");
  set_config_value(cfg, "integrator.cycles", "3");
  set_config_value(cfg, "integrator.sample_every", "5");
  const Trajectory tr = run_trajectory(cfg);
  const CycleClock clock = cfg.resolve_clock();
  std::vector<TimedEig> eigs;
  for (const auto& s : tr) eigs.push_back({s.tau, hermitian_eig(s.rho)});
  const GeometricPhaseSeries ref = geometric_phase(eigs, clock);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (auto& e : eigs)
    for (std::size_t c = 0; c < 4; ++c) {
      const cplx ph = std::polar(1.0, ang(rng));
      for (std::size_t r = 0; r < 4; ++r) e.eig.vectors(r, c) *= ph;
    }
  const GeometricPhaseSeries gauged = geometric_phase(eigs, clock);
  double gauge = ref.points.size() == gauged.points.size() && !ref.points.empty() ? 0.0 : INFINITY;
  for (std::size_t k = 0; k < std::min(ref.points.size(), gauged.points.size()); ++k)
    gauge = std::max(gauge, circular_distance(ref.points[k].phi_wrapped, gauged.points[k].phi_wrapped));
  ok &= gauge < 1e-8;
  detail << "; GP gauge " << num(gauge);

  // Sweep determinism: identical bytes for 1, 2 and 4 workers.
  RunConfig sw = recipe("fig3a.cfg");
  set_config_value(sw, "sweep.axis_a.points", "4");
  set_config_value(sw, "sweep.axis_b.points", "3");
  set_config_value(sw, "sweep.cycles", "1,2");
  std::string first;
  bool identical = true;
  for (int threads : {1, 2, 4}) {
    const SweepResult r = run_config_sweep(sw, threads);
    std::ostringstream os;
    for (std::size_t k = 0; k < r.settings.cycles.size(); ++k) write_heatmap(os, sw, r, k);
    if (threads == 1) first = os.str();
    identical &= os.str() == first;
  }
  ok &= identical;
  detail << "; sweep files " << (identical ? "bit-identical" : "DIFFER") << " across 1/2/4 workers";
  return {ok, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<std::string> xfail;
  bool full = false;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::string> only;
  app.add_option("--xfail", xfail, "Criterion expected to fail (repeatable)");
  app.add_flag("--full", full, "Sweep trends on the 41 x 41 grid instead of 21 x 21");
  app.add_option("--threads", threads, "Sweep worker threads")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "Run only the named criteria");
  CLI11_PARSE(app, argc, argv);

  const SweepOptions sweep{full ? 41 : 21, threads};
  const std::vector<Criterion> criteria{
      {"dark_state", 10, dark_state},
      {"unitary_limit", 10, unitary_limit},
      {"pseudomode", 120, pseudomode},
      {"truncation_and_step", 120, convergence},
      {"purity_ordering", 60, purity_ordering},
      {"dephasing_gp_pi", 60, dephasing_gp},
      {"closed_gp_staircase", 5, closed_gp},
      {"dipolar_gp_pi_half", 0, dipolar_gp},
      {"sweep_trends", full ? 1800.0 : 480.0, [&] { return sweep_trends(sweep); }},
      {"property_suites", 0, properties},
  };

  const std::set<std::string> expected(xfail.begin(), xfail.end());
  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = num(secs) + " s";
    if (c.time_limit > 0) {
      timing += " of " + num(c.time_limit) + " s";
      if (secs >= c.time_limit) {
        o.pass = false;
        o.detail += "; over the time limit";
      }
    }
    const bool xf = expected.count(c.name) > 0;
    std::string note;
    if (xf && !o.pass) note = " [expected failure]";
    if (xf && o.pass) note = " [unexpected pass]";
    if (o.pass == xf) ++unexpected;
    std::printf("%s %-20s (%s) %s%s\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), timing.c_str(), o.detail.c_str(),
                note.c_str());
    std::fflush(stdout);
  }
  return unexpected ? 1 : 0;
}
