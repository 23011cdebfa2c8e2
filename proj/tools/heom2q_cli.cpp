// Command-line front end. Talks to the simulator only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heom2q/heom2q.h"

namespace {

struct Options {
  std::string config;
  std::string out;
  int threads = 1;
  long seed = 0;
  std::vector<std::string> overrides;
};

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ConfigPtr = std::unique_ptr<heom2q_config, Deleter<heom2q_config, heom2q_config_free>>;

int report(heom2q_status s, const char* what) {
  std::fprintf(stderr, "heom2q %s: %s: %s\n", what, heom2q_status_name(s), heom2q_last_error());
  return s == HEOM2Q_INVALID_ARGUMENT || s == HEOM2Q_IO_ERROR ? HEOM2Q_CONFIG_ERROR
         : s == HEOM2Q_INTERNAL_ERROR                        ? HEOM2Q_INTEGRATION_ERROR
                                                             : static_cast<int>(s);
}

// Loads the config file (or defaults) and applies --set and --out.
heom2q_status load(const Options& opt, ConfigPtr& cfg) {
  heom2q_config* raw = nullptr;
  heom2q_status s = opt.config.empty() ? heom2q_config_new(&raw) : heom2q_config_load(opt.config.c_str(), &raw);
  cfg.reset(raw);
  if (s != HEOM2Q_OK) return s;
  for (const auto& kv : opt.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "heom2q: --set expects key=value, got '%s'\n", kv.c_str());
      return HEOM2Q_CONFIG_ERROR;
    }
    s = heom2q_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (s != HEOM2Q_OK) return s;
  }
  if (!opt.out.empty()) return heom2q_config_set(cfg.get(), "output.path", opt.out.c_str());
  return HEOM2Q_OK;
}

int cmd_run(const Options& opt) {
  ConfigPtr cfg;
  if (auto s = load(opt, cfg); s != HEOM2Q_OK) return report(s, "run");
  heom2q_trajectory* t = nullptr;
  if (auto s = heom2q_run(cfg.get(), &t); s != HEOM2Q_OK) return report(s, "run");
  const heom2q_status s = heom2q_trajectory_write_csv(t, heom2q_config_output(cfg.get()));
  heom2q_trajectory_free(t);
  return s == HEOM2Q_OK ? 0 : report(s, "run");
}

int cmd_gp(const Options& opt) {
  ConfigPtr cfg;
  if (auto s = load(opt, cfg); s != HEOM2Q_OK) return report(s, "gp");
  heom2q_gp_series* g = nullptr;
  if (auto s = heom2q_gp(cfg.get(), &g); s != HEOM2Q_OK) return report(s, "gp");
  for (size_t i = 0; i < heom2q_gp_note_count(g); ++i) std::fprintf(stderr, "note: %s\n", heom2q_gp_note(g, i));
  const heom2q_status s = heom2q_gp_write_csv(g, heom2q_config_output(cfg.get()));
  heom2q_gp_free(g);
  return s == HEOM2Q_OK ? 0 : report(s, "gp");
}

void progress(size_t done, size_t total, void*) {
  const size_t step = total >= 20 ? total / 20 : 1;
  if (done % step == 0 || done == total) std::fprintf(stderr, "\rsweep: %zu/%zu cells", done, total);
  if (done == total) std::fputc('\n', stderr);
}

int cmd_sweep(const Options& opt) {
  ConfigPtr cfg;
  if (auto s = load(opt, cfg); s != HEOM2Q_OK) return report(s, "sweep");
  const std::string prefix = heom2q_config_output(cfg.get());
  if (prefix == "-") {
    std::fprintf(stderr, "heom2q sweep: output.path or --out must name a file prefix\n");
    return HEOM2Q_CONFIG_ERROR;
  }
  heom2q_sweep_result* r = nullptr;
  if (auto s = heom2q_sweep(cfg.get(), opt.threads, progress, nullptr, &r); s != HEOM2Q_OK) return report(s, "sweep");
  const heom2q_status s = heom2q_sweep_write(r, prefix.c_str());
  if (const size_t failed = heom2q_sweep_failed_cells(r)) {
    std::fprintf(stderr, "sweep: %zu cell(s) failed; see the status column\n", failed);
  }
  size_t cycles = 0;
  heom2q_sweep_shape(r, nullptr, nullptr, &cycles);
  for (size_t k = 0; s == HEOM2Q_OK && k < cycles; ++k) {
    std::printf("%s_N%d.csv\n", prefix.c_str(), heom2q_sweep_cycle(r, k));
  }
  heom2q_sweep_free(r);
  return s == HEOM2Q_OK ? 0 : report(s, "sweep");
}

int cmd_validate(const Options& opt) {
  ConfigPtr cfg;
  if (auto s = load(opt, cfg); s != HEOM2Q_OK) return report(s, "validate");
  heom2q_report* rep = nullptr;
  if (auto s = heom2q_validate(cfg.get(), &rep); s != HEOM2Q_OK) return report(s, "validate");
  char* text = nullptr;
  heom2q_report_text(rep, &text);
  std::fputs(text ? text : "", stdout);
  heom2q_string_free(text);

  int code = heom2q_report_passed(rep) ? 0 : HEOM2Q_VALIDATION_FAILED;
  const std::string path = heom2q_config_output(cfg.get());
  if (path != "-") {
    char* json = nullptr;
    heom2q_report_json(rep, &json);
    std::ofstream f(path);
    f << (json ? json : "") << '\n';
    heom2q_string_free(json);
    if (!f) {
      std::fprintf(stderr, "heom2q validate: cannot write '%s'\n", path.c_str());
      code = code ? code : HEOM2Q_CONFIG_ERROR;
    }
  }
  heom2q_report_free(rep);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two driven qubits in a Lorentzian bath: HEOM propagation, entanglement and geometric phase"};
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", std::string(heom2q_version()));
  bool list_keys = false;
  app.add_flag("--list-keys", list_keys, "Print every config key with its default and exit");

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Config file (key = value lines)")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output path; '-' is stdout. Sweeps use it as a file prefix");
    sub->add_option("--threads", opt.threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "Accepted and ignored; no code path is random");
    sub->add_option("--set", opt.overrides, "Override a config key, e.g. --set bath.R=5 (repeatable)");
  };
  CLI::App* run = app.add_subcommand("run", "Propagate and write the trajectory CSV");
  CLI::App* gp = app.add_subcommand("gp", "Geometric phase per cycle");
  CLI::App* sweep = app.add_subcommand("sweep", "Two-parameter grid; one heatmap file per requested cycle");
  CLI::App* validate = app.add_subcommand("validate", "Run the built-in consistency checks");
  for (CLI::App* sub : {run, gp, sweep, validate}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : HEOM2Q_CONFIG_ERROR;
  }

  if (list_keys) {
    char* text = nullptr;
    if (heom2q_config_reference(&text) != HEOM2Q_OK) return report(HEOM2Q_INTERNAL_ERROR, "keys");
    std::fputs(text, stdout);
    heom2q_string_free(text);
    return 0;
  }
  if (*run) return cmd_run(opt);
  if (*gp) return cmd_gp(opt);
  if (*sweep) return cmd_sweep(opt);
  if (*validate) return cmd_validate(opt);
  std::cout << app.help();
  return HEOM2Q_CONFIG_ERROR;
}
