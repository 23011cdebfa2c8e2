#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace heom2q {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out)) throw ConfigError("expected a finite number, got '" + v + "'");
  return out;
}

int to_int(const std::string& v) {
  int out = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError("expected an integer, got '" + v + "'");
  return out;
}

std::optional<double> to_optional(const std::string& v) {
  if (v == "auto") return std::nullopt;
  return to_double(v);
}

std::string fmt_optional(const std::optional<double>& v) { return v ? fmt(*v) : "auto"; }

std::vector<int> to_int_list(const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_int(trim(item)));
  if (out.empty()) throw ConfigError("expected a comma-separated integer list");
  return out;
}

std::string fmt_int_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

struct KeyDef {
  std::string name;
  const char* doc;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define REAL(key, field, doc) \
  KeyDef { key, doc, [](const RunConfig& c) { return fmt(c.field); }, [](RunConfig& c, const std::string& v) { c.field = to_double(v); } }
#define INT(key, field, doc) \
  KeyDef { key, doc, [](const RunConfig& c) { return std::to_string(c.field); }, [](RunConfig& c, const std::string& v) { c.field = to_int(v); } }

void add_drive(std::vector<KeyDef>& k, const char* prefix, DrivingProtocol ModelSpec::*drive) {
  const std::string p = prefix;
  auto field = [&](const std::string& suffix, double DrivingProtocol::*f, const char* doc) {
    k.push_back({p + "." + suffix, doc, [drive, f](const RunConfig& c) { return fmt(c.model.*drive.*f); },
                 [drive, f](RunConfig& c, const std::string& v) { c.model.*drive.*f = to_double(v); }});
  };
  field("omega", &DrivingProtocol::Omega, "carrier frequency Omega");
  field("delta", &DrivingProtocol::Delta, "detuning amplitude Delta");
  field("omega_d", &DrivingProtocol::omegaD, "driving frequency omega_D");
  field("phi", &DrivingProtocol::phi, "driving phase phi (rad)");
}

void add_axis(std::vector<KeyDef>& k, const char* prefix, SweepAxis SweepConfig::*axis) {
  const std::string p = prefix;
  k.push_back({p + ".parameter", "swept parameter: omegaD1, omegaD2, J, Delta1, Delta2, R",
               [axis](const RunConfig& c) { return to_string((c.sweep.*axis).parameter); },
               [axis](RunConfig& c, const std::string& v) { (c.sweep.*axis).parameter = sweep_parameter_from_string(v); }});
  k.push_back({p + ".min", "first grid value", [axis](const RunConfig& c) { return fmt((c.sweep.*axis).min); },
               [axis](RunConfig& c, const std::string& v) { (c.sweep.*axis).min = to_double(v); }});
  k.push_back({p + ".max", "last grid value", [axis](const RunConfig& c) { return fmt((c.sweep.*axis).max); },
               [axis](RunConfig& c, const std::string& v) { (c.sweep.*axis).max = to_double(v); }});
  k.push_back({p + ".points", "grid points, endpoints included; 1 evaluates min only",
               [axis](const RunConfig& c) { return std::to_string((c.sweep.*axis).points); },
               [axis](RunConfig& c, const std::string& v) { (c.sweep.*axis).points = to_int(v); }});
}

const std::vector<KeyDef>& key_defs() {
  static const std::vector<KeyDef> defs = [] {
    std::vector<KeyDef> k;
    add_drive(k, "drive1", &ModelSpec::drive1);
    add_drive(k, "drive2", &ModelSpec::drive2);
    k.push_back(REAL("model.J", model.J, "transverse coupling J"));
    k.push_back({"model.coupling", "dipolar or dephasing",
                 [](const RunConfig& c) { return to_string(c.model.coupling); },
                 [](RunConfig& c, const std::string& v) { c.model.coupling = coupling_from_string(v); }});
    k.push_back(REAL("bath.R", model.bath.R, "coupling ratio gamma0/lambda (0 = closed system)"));
    k.push_back({"bath.omega0", "spectral peak; auto = mean of omega_i(0)",
                 [](const RunConfig& c) { return fmt_optional(c.model.bath.Omega0); },
                 [](RunConfig& c, const std::string& v) { c.model.bath.Omega0 = to_optional(v); }});
    k.push_back({"state.kind", "phi_plus, phi_minus, psi_plus, psi_minus, x_state or werner",
                 [](const RunConfig& c) { return to_string(c.state.kind); },
                 [](RunConfig& c, const std::string& v) { c.state.kind = state_kind_from_string(v); }});
    k.push_back(REAL("state.p", state.p, "entanglement weight p"));
    k.push_back(REAL("state.r", state.r, "Werner mixing weight r"));
    k.push_back({"state.core", "Bell-like core of a Werner state",
                 [](const RunConfig& c) { return to_string(c.state.core); },
                 [](RunConfig& c, const std::string& v) { c.state.core = state_kind_from_string(v); }});
    k.push_back(REAL("state.rho11", state.x.rho11, "x_state population |11>"));
    k.push_back(REAL("state.rho22", state.x.rho22, "x_state population |10>"));
    k.push_back(REAL("state.rho33", state.x.rho33, "x_state population |01>"));
    k.push_back(REAL("state.rho44", state.x.rho44, "x_state population |00>"));
    k.push_back({"state.rho23_re", "x_state coherence <10|rho|01>, real part",
                 [](const RunConfig& c) { return fmt(c.state.x.rho23.real()); },
                 [](RunConfig& c, const std::string& v) { c.state.x.rho23.real(to_double(v)); }});
    k.push_back({"state.rho23_im", "x_state coherence <10|rho|01>, imaginary part",
                 [](const RunConfig& c) { return fmt(c.state.x.rho23.imag()); },
                 [](RunConfig& c, const std::string& v) { c.state.x.rho23.imag(to_double(v)); }});
    k.push_back({"state.rho14_re", "x_state coherence <11|rho|00>, real part",
                 [](const RunConfig& c) { return fmt(c.state.x.rho14.real()); },
                 [](RunConfig& c, const std::string& v) { c.state.x.rho14.real(to_double(v)); }});
    k.push_back({"state.rho14_im", "x_state coherence <11|rho|00>, imaginary part",
                 [](const RunConfig& c) { return fmt(c.state.x.rho14.imag()); },
                 [](RunConfig& c, const std::string& v) { c.state.x.rho14.imag(to_double(v)); }});
    k.push_back({"clock.mode", "one_excitation, two_excitation or explicit",
                 [](const RunConfig& c) { return to_string(c.clock.mode); },
                 [](RunConfig& c, const std::string& v) { c.clock.mode = clock_mode_from_string(v); }});
    k.push_back({"clock.tau_s", "cycle period for explicit mode; auto otherwise",
                 [](const RunConfig& c) { return fmt_optional(c.clock.tau_s); },
                 [](RunConfig& c, const std::string& v) { c.clock.tau_s = to_optional(v); }});
    k.push_back(REAL("integrator.dt", integrator.dt, "RK4 step"));
    k.push_back(INT("integrator.depth", integrator.depth, "hierarchy truncation depth per index"));
    k.push_back(INT("integrator.sample_every", integrator.sample_every, "output stride in steps"));
    k.push_back(REAL("integrator.cycles", integrator.cycles, "simulated time in cycles"));
    k.push_back({"integrator.normalization", "correlation_matched or literal",
                 [](const RunConfig& c) { return to_string(c.integrator.normalization); },
                 [](RunConfig& c, const std::string& v) { c.integrator.normalization = normalization_from_string(v); }});
    k.push_back({"output.path", "output file; '-' for stdout; file prefix for sweeps",
                 [](const RunConfig& c) { return c.output; },
                 [](RunConfig& c, const std::string& v) { c.output = v; }});
    k.push_back(INT("gp.eigen_stride", gp.eigen_stride, "steps between eigendecompositions"));
    add_axis(k, "sweep.axis_a", &SweepConfig::axis_a);
    add_axis(k, "sweep.axis_b", &SweepConfig::axis_b);
    k.push_back({"sweep.cycles", "comma-separated cycle counts to snapshot",
                 [](const RunConfig& c) { return fmt_int_list(c.sweep.cycles); },
                 [](RunConfig& c, const std::string& v) { c.sweep.cycles = to_int_list(v); }});
    k.push_back(REAL("validate.tau_end", validate.tau_end, "horizon of dark-state, unitary and truncation checks"));
    k.push_back(REAL("validate.pseudomode_tau_end", validate.pseudomode_tau_end, "horizon of the pseudomode check"));
    k.push_back(INT("validate.depth_b", validate.depth_b, "reference depth of the truncation check"));
    k.push_back(INT("validate.fock_cutoff", validate.fock_cutoff, "pseudomode Fock cutoff"));
    k.push_back(REAL("validate.dark_tol", validate.dark_tol, "bound on |C - 1| for the dark state"));
    k.push_back(REAL("validate.unitary_tol", validate.unitary_tol, "bound on trace distance and purity drift"));
    k.push_back(REAL("validate.truncation_tol", validate.truncation_tol, "bound on depth-vs-depth_b distance"));
    k.push_back(REAL("validate.pseudomode_tol", validate.pseudomode_tol, "bound on HEOM-vs-pseudomode distance"));
    k.push_back(REAL("validate.convergence_dt", validate.convergence_dt, "coarsest step of the dt-halving check"));
    k.push_back(REAL("validate.convergence_tau", validate.convergence_tau, "time compared by the dt-halving check"));
    k.push_back(REAL("validate.ratio_min", validate.ratio_min, "lower bound of the dt-halving error ratio"));
    k.push_back(REAL("validate.ratio_max", validate.ratio_max, "upper bound of the dt-halving error ratio"));
    return k;
  }();
  return defs;
}

#undef REAL
#undef INT

const std::string kLockPrefix = "sweep.lock.";

void set_lock(RunConfig& cfg, const std::string& target_name, const std::string& value) {
  ParameterBinding b;
  b.target = sweep_parameter_from_string(target_name);
  try {
    b.source = sweep_parameter_from_string(value);
  } catch (const ModelError&) {
    b.constant = to_double(value);
  }
  for (auto& existing : cfg.sweep.locks) {
    if (existing.target == b.target) {
      existing = b;
      return;
    }
  }
  cfg.sweep.locks.push_back(b);
}

}  // namespace

std::string to_string(HierarchyNormalization n) {
  return n == HierarchyNormalization::literal ? "literal" : "correlation_matched";
}

HierarchyNormalization normalization_from_string(const std::string& s) {
  if (s == "correlation_matched") return HierarchyNormalization::correlation_matched;
  if (s == "literal") return HierarchyNormalization::literal;
  throw ConfigError("unknown normalization '" + s + "' (expected correlation_matched or literal)");
}

SweepSettings RunConfig::sweep_settings(int threads) const {
  SweepSettings s;
  s.depth = integrator.depth;
  s.dt = integrator.dt;
  s.clock_mode = clock.mode;
  s.tau_s = clock.tau_s;
  s.cycles = sweep.cycles;
  s.normalization = integrator.normalization;
  s.threads = threads;
  return s;
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    const RunConfig defaults;
    for (const auto& d : key_defs()) out.push_back({d.name, d.get(defaults), d.doc});
    return out;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value, const std::string& where) {
  const std::string prefix = where.empty() ? "" : where + ": ";
  try {
    if (key.rfind(kLockPrefix, 0) == 0) {
      set_lock(cfg, key.substr(kLockPrefix.size()), value);
      return;
    }
    for (const auto& d : key_defs()) {
      if (key == d.name) {
        d.set(cfg, value);
        return;
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(prefix + "key '" + key + "': " + e.what());
  }
  throw ConfigError(prefix + "unknown key '" + key + "'");
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string where = origin + ":" + std::to_string(line);
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + content + "'");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": missing key before '='");
    if (value.empty()) throw ConfigError(where + ": key '" + key + "' has no value");
    if (auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(where + ": key '" + key + "' repeats line " + std::to_string(it->second));
    }
    seen[key] = line;
    set_config_value(cfg, key, value, where);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& d : key_defs()) out += d.name + " = " + d.get(cfg) + "\n";
  for (const auto& l : cfg.sweep.locks) {
    out += kLockPrefix + to_string(l.target) + " = " + (l.source ? to_string(*l.source) : fmt(l.constant)) + "\n";
  }
  return out;
}

}  // namespace heom2q
