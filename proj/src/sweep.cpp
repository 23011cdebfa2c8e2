#include "sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace heom2q {

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::omegaD1: return "omegaD1";
    case SweepParameter::omegaD2: return "omegaD2";
    case SweepParameter::J: return "J";
    case SweepParameter::Delta1: return "Delta1";
    case SweepParameter::Delta2: return "Delta2";
    case SweepParameter::R: return "R";
  }
  return "?";
}

SweepParameter sweep_parameter_from_string(const std::string& s) {
  for (auto p : {SweepParameter::omegaD1, SweepParameter::omegaD2, SweepParameter::J, SweepParameter::Delta1,
                 SweepParameter::Delta2, SweepParameter::R}) {
    if (to_string(p) == s) return p;
  }
  throw ModelError("unknown sweep parameter '" + s + "' (expected omegaD1, omegaD2, J, Delta1, Delta2 or R)");
}

double get_parameter(const ModelSpec& spec, SweepParameter p) {
  switch (p) {
    case SweepParameter::omegaD1: return spec.drive1.omegaD;
    case SweepParameter::omegaD2: return spec.drive2.omegaD;
    case SweepParameter::J: return spec.J;
    case SweepParameter::Delta1: return spec.drive1.Delta;
    case SweepParameter::Delta2: return spec.drive2.Delta;
    case SweepParameter::R: return spec.bath.R;
  }
  return 0.0;
}

void set_parameter(ModelSpec& spec, SweepParameter p, double value) {
  switch (p) {
    case SweepParameter::omegaD1: spec.drive1.omegaD = value; break;
    case SweepParameter::omegaD2: spec.drive2.omegaD = value; break;
    case SweepParameter::J: spec.J = value; break;
    case SweepParameter::Delta1: spec.drive1.Delta = value; break;
    case SweepParameter::Delta2: spec.drive2.Delta = value; break;
    case SweepParameter::R: spec.bath.R = value; break;
  }
}

double SweepAxis::value(int i) const {
  if (points == 1) return min;
  if (i == points - 1) return max;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(points - 1);
}

void SweepAxis::validate(const char* name) const {
  if (points < 1) throw ModelError(std::string(name) + ".points must be >= 1");
  if (!std::isfinite(min) || !std::isfinite(max)) throw ModelError(std::string(name) + " bounds must be finite");
  if (points > 1 && !(max > min)) throw ModelError(std::string(name) + " requires min < max when points > 1");
}

SpecFactory::SpecFactory(ModelSpec base, SweepParameter axis_a, SweepParameter axis_b,
                         std::vector<ParameterBinding> locks)
    : base_(std::move(base)), axis_a_(axis_a), axis_b_(axis_b), locks_(std::move(locks)) {}

ModelSpec SpecFactory::at(double a, double b) const {
  ModelSpec s = base_;
  set_parameter(s, axis_a_, a);
  set_parameter(s, axis_b_, b);
  const ModelSpec swept = s;
  for (const auto& l : locks_) set_parameter(s, l.target, l.source ? get_parameter(swept, *l.source) : l.constant);
  return s;
}

SpecFactory locked_axes(const ModelSpec& base, SweepParameter axis_a, SweepParameter axis_b,
                        std::span<const ParameterBinding> locks) {
  if (axis_a == axis_b) throw ModelError("sweep axes must use different parameters");
  std::vector<SweepParameter> targets;
  for (const auto& l : locks) {
    if (l.target == axis_a || l.target == axis_b) {
      throw ModelError("lock on " + to_string(l.target) + " conflicts with a swept axis");
    }
    if (std::find(targets.begin(), targets.end(), l.target) != targets.end()) {
      throw ModelError("conflicting locks on " + to_string(l.target));
    }
    if (l.source && *l.source == l.target) throw ModelError("lock on " + to_string(l.target) + " refers to itself");
    targets.push_back(l.target);
  }
  for (const auto& l : locks) {
    if (l.source && std::find(targets.begin(), targets.end(), *l.source) != targets.end()) {
      throw ModelError("lock on " + to_string(l.target) + " follows " + to_string(*l.source) +
                       ", which is itself locked");
    }
  }
  return SpecFactory(base, axis_a, axis_b, std::vector<ParameterBinding>(locks.begin(), locks.end()));
}

long snapshot_step(int cycle, double tau_s, double dt) { return std::lround(cycle * tau_s / dt); }

SweepCell run_cell(const ModelSpec& spec, const InitialState& init, const SweepSettings& settings) {
  SweepCell cell;
  try {
    spec.validate();
    const CycleClock clock = CycleClock::make(settings.clock_mode, spec, settings.tau_s);
    std::vector<long> steps;
    for (int n : settings.cycles) steps.push_back(snapshot_step(n, clock.tau_s, settings.dt));
    std::vector<long> sorted = steps;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.front() < 1) throw ModelError("requested cycle lies before the first integration step");

    const HierarchySpace space = make_space(spec, settings.depth, settings.normalization);
    HierarchyState state = init_hierarchy(initial_state(init), space);
    std::vector<double> c(sorted.size()), p(sorted.size());
    std::size_t idx = 0;
    evolve_at_steps(state, spec, space, settings.dt, static_cast<double>(sorted.back()) * settings.dt, sorted,
                    [&](double, const HierarchyState& s) {
                      const CMatrix rho = s.physical();
                      p[idx] = purity(rho);
                      c[idx] = concurrence(rho);
                      ++idx;
                    });
    for (long st : steps) {
      const auto k = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), st) - sorted.begin());
      cell.concurrence.push_back(c[k]);
      cell.purity.push_back(p[k]);
    }
    cell.ok = true;
    cell.status = "ok";
  } catch (const IntegrationError& e) {
    cell.status = std::string("failed: ") + e.what();
  } catch (const std::exception& e) {
    cell.status = std::string("failed: ") + e.what();
  }
  if (!cell.ok) {
    cell.concurrence.assign(settings.cycles.size(), std::nan(""));
    cell.purity.assign(settings.cycles.size(), std::nan(""));
  }
  return cell;
}

SweepResult run_sweep(const ModelSpec& base, const InitialState& init, const SweepAxis& axis_a, const SweepAxis& axis_b,
                      std::span<const ParameterBinding> locks, const SweepSettings& settings,
                      const SweepProgress& progress) {
  axis_a.validate("sweep.axis_a");
  axis_b.validate("sweep.axis_b");
  if (settings.cycles.empty()) throw ModelError("sweep.cycles must list at least one cycle");
  for (int n : settings.cycles)
    if (n < 1) throw ModelError("sweep.cycles entries must be >= 1");
  if (settings.threads < 1) throw ModelError("thread count must be >= 1");
  const SpecFactory factory = locked_axes(base, axis_a.parameter, axis_b.parameter, locks);

  SweepResult result;
  result.axis_a = axis_a;
  result.axis_b = axis_b;
  result.settings = settings;
  result.base = base;
  result.initial = init;
  const std::size_t rows = static_cast<std::size_t>(axis_a.points);
  const std::size_t cols = static_cast<std::size_t>(axis_b.points);
  result.cells.resize(rows * cols);

  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto work_rows = [&](std::size_t r0, std::size_t r1) {
    for (std::size_t i = r0; i < r1; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        const double a = axis_a.value(static_cast<int>(i));
        const double b = axis_b.value(static_cast<int>(j));
        SweepCell cell = run_cell(factory.at(a, b), init, settings);
        cell.a = a;
        cell.b = b;
        result.cells[i * cols + j] = std::move(cell);
        const std::size_t n = ++done;
        if (progress) {
          std::lock_guard lock(progress_mutex);
          progress(n, rows * cols);
        }
      }
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(settings.threads), rows);
  if (workers <= 1) {
    work_rows(0, rows);
    return result;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t r0 = rows * w / workers, r1 = rows * (w + 1) / workers;
    pool.emplace_back([&, w, r0, r1] {
      try {
        work_rows(r0, r1);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return result;
}

}  // namespace heom2q
