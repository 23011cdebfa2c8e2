#include "heom2q/heom2q.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "commands.hpp"

using namespace heom2q;

struct heom2q_config {
  RunConfig cfg;
};

struct heom2q_trajectory {
  Trajectory samples;
  CycleClock clock;
};

struct heom2q_gp_series {
  GeometricPhaseSeries series;
};

struct heom2q_sweep_result {
  RunConfig cfg;
  SweepResult result;
};

struct heom2q_report {
  ValidationReport report;
};

namespace {

thread_local std::string g_last_error;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

heom2q_status fail(heom2q_status s, std::string message) {
  g_last_error = std::move(message);
  return s;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
heom2q_status guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return HEOM2Q_OK;
  } catch (const IoError& e) {
    return fail(HEOM2Q_IO_ERROR, e.what());
  } catch (const IntegrationError& e) {
    return fail(HEOM2Q_INTEGRATION_ERROR, e.what());
  } catch (const GeometricPhaseError& e) {
    return fail(HEOM2Q_INTEGRATION_ERROR, e.what());
  } catch (const AlgebraError& e) {
    // Raised on a computed state, e.g. a concurrence of a non-positive matrix.
    return fail(HEOM2Q_INTEGRATION_ERROR, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(HEOM2Q_CONFIG_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(HEOM2Q_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(HEOM2Q_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(HEOM2Q_INTERNAL_ERROR, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class Writer>
void write_to(const std::string& path, Writer&& writer) {
  if (path == "-") {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  writer(f);
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

#define REQUIRE_ARG(cond)                                                           \
  do {                                                                              \
    if (!(cond)) return fail(HEOM2Q_INVALID_ARGUMENT, "null or invalid argument: " #cond); \
  } while (0)

}  // namespace

extern "C" {

const char* heom2q_version(void) { return "1.0.0"; }

const char* heom2q_last_error(void) { return g_last_error.c_str(); }

const char* heom2q_status_name(heom2q_status status) {
  switch (status) {
    case HEOM2Q_OK: return "ok";
    case HEOM2Q_INVALID_ARGUMENT: return "invalid argument";
    case HEOM2Q_CONFIG_ERROR: return "config error";
    case HEOM2Q_INTEGRATION_ERROR: return "integration failure";
    case HEOM2Q_VALIDATION_FAILED: return "validation failure";
    case HEOM2Q_IO_ERROR: return "i/o error";
    case HEOM2Q_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

void heom2q_string_free(char* s) { std::free(s); }

heom2q_status heom2q_config_new(heom2q_config** out) {
  REQUIRE_ARG(out);
  *out = nullptr;
  return guard([&] { *out = new heom2q_config{}; });
}

heom2q_status heom2q_config_parse(const char* text, const char* origin, heom2q_config** out) {
  REQUIRE_ARG(text && out);
  *out = nullptr;
  return guard([&] { *out = new heom2q_config{parse_config(text, origin ? origin : "<config>")}; });
}

heom2q_status heom2q_config_load(const char* path, heom2q_config** out) {
  REQUIRE_ARG(path && out);
  *out = nullptr;
  return guard([&] { *out = new heom2q_config{load_config(path)}; });
}

heom2q_status heom2q_config_set(heom2q_config* cfg, const char* key, const char* value) {
  REQUIRE_ARG(cfg && key && value);
  return guard([&] {
    RunConfig copy = cfg->cfg;  // leave cfg untouched on error
    set_config_value(copy, key, value);
    cfg->cfg = std::move(copy);
  });
}

heom2q_status heom2q_config_serialize(const heom2q_config* cfg, char** text) {
  REQUIRE_ARG(cfg && text);
  *text = nullptr;
  return guard([&] { *text = dup_string(serialize_config(cfg->cfg)); });
}

const char* heom2q_config_output(const heom2q_config* cfg) { return cfg ? cfg->cfg.output.c_str() : nullptr; }

heom2q_status heom2q_config_reference(char** text) {
  REQUIRE_ARG(text);
  *text = nullptr;
  return guard([&] {
    std::ostringstream os;
    for (const auto& k : config_keys()) os << k.name << " = " << k.default_value << "  # " << k.doc << '\n';
    os << "sweep.lock.<parameter> = <parameter or number>  # tie an unswept parameter to an axis or a constant\n";
    *text = dup_string(os.str());
  });
}

void heom2q_config_free(heom2q_config* cfg) { delete cfg; }

heom2q_status heom2q_run(const heom2q_config* cfg, heom2q_trajectory** out) {
  REQUIRE_ARG(cfg && out);
  *out = nullptr;
  return guard([&] {
    auto t = std::make_unique<heom2q_trajectory>();
    t->clock = cfg->cfg.resolve_clock();
    t->samples = run_trajectory(cfg->cfg);
    *out = t.release();
  });
}

size_t heom2q_trajectory_size(const heom2q_trajectory* t) { return t ? t->samples.size() : 0; }

heom2q_status heom2q_trajectory_sample(const heom2q_trajectory* t, size_t i, heom2q_sample* out) {
  REQUIRE_ARG(t && out && i < t->samples.size());
  return guard([&] {
    const Sample& s = t->samples[i];
    out->tau = s.tau;
    out->cycle = t->clock.cycles(s.tau);
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 4; ++c) {
        out->rho_re[4 * r + c] = s.rho(r, c).real();
        out->rho_im[4 * r + c] = s.rho(r, c).imag();
      }
    }
    out->purity = purity(s.rho);
    out->concurrence = concurrence(s.rho);
  });
}

heom2q_status heom2q_trajectory_write_csv(const heom2q_trajectory* t, const char* path) {
  REQUIRE_ARG(t && path);
  return guard([&] {
    std::ostringstream os;  // render fully first so a failure leaves no partial file
    write_trajectory_csv(os, t->samples, t->clock);
    write_to(path, [&](std::ostream& f) { f << os.str(); });
  });
}

void heom2q_trajectory_free(heom2q_trajectory* t) { delete t; }

heom2q_status heom2q_gp(const heom2q_config* cfg, heom2q_gp_series** out) {
  REQUIRE_ARG(cfg && out);
  *out = nullptr;
  return guard([&] { *out = new heom2q_gp_series{run_geometric_phase(cfg->cfg)}; });
}

size_t heom2q_gp_size(const heom2q_gp_series* g) { return g ? g->series.points.size() : 0; }

heom2q_status heom2q_gp_point(const heom2q_gp_series* g, size_t i, int* cycle, double* phi_wrapped, double* phi_cumulative) {
  REQUIRE_ARG(g && i < g->series.points.size());
  const auto& p = g->series.points[i];
  if (cycle) *cycle = p.cycle;
  if (phi_wrapped) *phi_wrapped = p.phi_wrapped;
  if (phi_cumulative) *phi_cumulative = p.phi_cumulative;
  return HEOM2Q_OK;
}

size_t heom2q_gp_note_count(const heom2q_gp_series* g) { return g ? g->series.notes.size() : 0; }

const char* heom2q_gp_note(const heom2q_gp_series* g, size_t i) {
  return g && i < g->series.notes.size() ? g->series.notes[i].c_str() : nullptr;
}

heom2q_status heom2q_gp_write_csv(const heom2q_gp_series* g, const char* path) {
  REQUIRE_ARG(g && path);
  return guard([&] {
    std::ostringstream os;
    write_gp_csv(os, g->series);
    write_to(path, [&](std::ostream& f) { f << os.str(); });
  });
}

void heom2q_gp_free(heom2q_gp_series* g) { delete g; }

heom2q_status heom2q_sweep(const heom2q_config* cfg, int threads, heom2q_progress_fn progress, void* user,
                           heom2q_sweep_result** out) {
  REQUIRE_ARG(cfg && out);
  *out = nullptr;
  return guard([&] {
    SweepProgress cb;
    if (progress) cb = [progress, user](std::size_t done, std::size_t total) { progress(done, total, user); };
    auto s = std::make_unique<heom2q_sweep_result>();
    s->cfg = cfg->cfg;
    s->result = run_config_sweep(cfg->cfg, threads, cb);
    *out = s.release();
  });
}

void heom2q_sweep_shape(const heom2q_sweep_result* s, size_t* rows, size_t* cols, size_t* cycles) {
  if (rows) *rows = s ? static_cast<size_t>(s->result.axis_a.points) : 0;
  if (cols) *cols = s ? static_cast<size_t>(s->result.axis_b.points) : 0;
  if (cycles) *cycles = s ? s->result.settings.cycles.size() : 0;
}

int heom2q_sweep_cycle(const heom2q_sweep_result* s, size_t k) {
  return s && k < s->result.settings.cycles.size() ? s->result.settings.cycles[k] : -1;
}

heom2q_status heom2q_sweep_cell(const heom2q_sweep_result* s, size_t i, size_t j, size_t k, double* a, double* b,
                                double* concurrence, double* purity, int* ok) {
  REQUIRE_ARG(s && i < static_cast<size_t>(s->result.axis_a.points) &&
              j < static_cast<size_t>(s->result.axis_b.points) && k < s->result.settings.cycles.size());
  const SweepCell& cell = s->result.at(static_cast<int>(i), static_cast<int>(j));
  if (a) *a = cell.a;
  if (b) *b = cell.b;
  if (concurrence) *concurrence = cell.concurrence[k];
  if (purity) *purity = cell.purity[k];
  if (ok) *ok = cell.ok ? 1 : 0;
  return HEOM2Q_OK;
}

size_t heom2q_sweep_failed_cells(const heom2q_sweep_result* s) {
  if (!s) return 0;
  size_t n = 0;
  for (const auto& c : s->result.cells) n += c.ok ? 0 : 1;
  return n;
}

heom2q_status heom2q_sweep_write(const heom2q_sweep_result* s, const char* prefix) {
  REQUIRE_ARG(s && prefix);
  if (std::strcmp(prefix, "-") == 0 || *prefix == '\0') {
    return fail(HEOM2Q_CONFIG_ERROR, "sweep output needs a file prefix (output.path or --out), not stdout");
  }
  return guard([&] {
    for (std::size_t k = 0; k < s->result.settings.cycles.size(); ++k) {
      std::ostringstream os;
      write_heatmap(os, s->cfg, s->result, k);
      write_to(heatmap_path(prefix, s->result.settings.cycles[k]), [&](std::ostream& f) { f << os.str(); });
    }
  });
}

void heom2q_sweep_free(heom2q_sweep_result* s) { delete s; }

heom2q_status heom2q_validate(const heom2q_config* cfg, heom2q_report** out) {
  REQUIRE_ARG(cfg && out);
  *out = nullptr;
  return guard([&] { *out = new heom2q_report{run_validation(cfg->cfg)}; });
}

int heom2q_report_passed(const heom2q_report* r) { return r && r->report.passed() ? 1 : 0; }

size_t heom2q_report_size(const heom2q_report* r) { return r ? r->report.checks.size() : 0; }

heom2q_status heom2q_report_check(const heom2q_report* r, size_t i, const char** name, int* passed, double* value,
                                  double* bound, const char** detail) {
  REQUIRE_ARG(r && i < r->report.checks.size());
  const CheckResult& c = r->report.checks[i];
  if (name) *name = c.name.c_str();
  if (passed) *passed = c.passed ? 1 : 0;
  if (value) *value = c.value;
  if (bound) *bound = c.bound;
  if (detail) *detail = c.detail.c_str();
  return HEOM2Q_OK;
}

heom2q_status heom2q_report_text(const heom2q_report* r, char** text) {
  REQUIRE_ARG(r && text);
  *text = nullptr;
  return guard([&] {
    std::ostringstream os;
    write_validation_text(os, r->report);
    *text = dup_string(os.str());
  });
}

heom2q_status heom2q_report_json(const heom2q_report* r, char** text) {
  REQUIRE_ARG(r && text);
  *text = nullptr;
  return guard([&] { *text = dup_string(validation_json(r->report)); });
}

void heom2q_report_free(heom2q_report* r) { delete r; }

}  // extern "C"
