#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <random>

#include "config.hpp"

using namespace heom2q;

namespace {

bool is_integer(const std::string& s) {
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

bool is_number(const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

std::string message_of(const std::string& text) {
  try {
    parse_config(text, "t.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c = parse_config("");
  CHECK(c.integrator.dt == 1e-3);
  CHECK(c.integrator.depth == 20);
  CHECK(c.clock.mode == ClockMode::two_excitation);
  CHECK(c.output == "-");
  CHECK(c.sweep.cycles == std::vector<int>{1, 3, 5, 7});
  CHECK(c.model.coupling == Coupling::dipolar);
  CHECK_FALSE(config_keys().empty());
  for (const auto& k : config_keys()) CHECK_FALSE(k.doc.empty());
}

TEST_CASE("parsing: comments, whitespace and values") {
  const RunConfig c = parse_config(
      "# header\n"
      "  bath.R = 5   # strong\n"
      "\n"
      "model.coupling=dephasing\n"
      "state.kind = psi_minus\n"
      "sweep.cycles = 2, 5,8\n"
      "clock.mode = explicit\n"
      "clock.tau_s = 1.04\n"
      "integrator.normalization = literal\n");
  CHECK(c.model.bath.R == 5.0);
  CHECK(c.model.coupling == Coupling::dephasing);
  CHECK(c.state.kind == StateKind::psi_minus);
  CHECK(c.sweep.cycles == std::vector<int>{2, 5, 8});
  CHECK(c.resolve_clock().tau_s == 1.04);
  CHECK(c.integrator.normalization == HierarchyNormalization::literal);
}

TEST_CASE("errors name the origin and line") {
  CHECK(message_of("bath.R = 1\nbath.Q = 2\n").find("t.cfg:2") != std::string::npos);
  CHECK(message_of("bath.Q = 2\n").find("unknown key 'bath.Q'") != std::string::npos);
  CHECK(message_of("bath.R = 1\n\nbath.R = 2\n").find("t.cfg:3: key 'bath.R' repeats line 1") != std::string::npos);
  CHECK(message_of("bath.R\n").find("t.cfg:1") != std::string::npos);
  CHECK(message_of("bath.R = \n").find("no value") != std::string::npos);
  CHECK(message_of("bath.R = 1x\n").find("t.cfg:1") != std::string::npos);
  CHECK(message_of("integrator.depth = 2.5\n").find("integer") != std::string::npos);
  CHECK(message_of("model.coupling = sideways\n").find("t.cfg:1") != std::string::npos);
  CHECK(message_of("bath.R = nan\n").find("finite") != std::string::npos);
}

TEST_CASE("sweep locks") {
  const RunConfig c = parse_config("sweep.lock.omegaD2 = omegaD1\nsweep.lock.Delta2 = 0.5\n");
  REQUIRE(c.sweep.locks.size() == 2);
  CHECK(c.sweep.locks[0].target == SweepParameter::omegaD2);
  CHECK(c.sweep.locks[0].source == SweepParameter::omegaD1);
  CHECK_FALSE(c.sweep.locks[1].source.has_value());
  CHECK(c.sweep.locks[1].constant == 0.5);
  CHECK_THROWS_AS(parse_config("sweep.lock.bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("sweep.lock.J = omegaQ\n"), ConfigError);
}

TEST_CASE("serialize then parse is the identity on random configurations") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> real(0.01, 50.0);
  std::uniform_int_distribution<int> integer(1, 60);
  for (int trial = 0; trial < 200; ++trial) {
    RunConfig c;
    for (const auto& k : config_keys()) {
      if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) continue;
      std::string v;
      if (is_integer(k.default_value)) {
        v = std::to_string(integer(rng));
      } else if (is_number(k.default_value)) {
        v = std::to_string(real(rng)) + "e" + std::to_string(integer(rng) % 5 - 2);
      } else {
        continue;
      }
      try {
        set_config_value(c, k.name, v);
      } catch (const ConfigError&) {
        // Some keys carry range checks; a rejected value just stays at its default.
      }
    }
    if (trial % 2) set_config_value(c, "sweep.lock.omegaD2", "omegaD1");
    const std::string text = serialize_config(c);
    const RunConfig back = parse_config(text);
    CHECK(serialize_config(back) == text);
  }
}

TEST_CASE("serialized numbers use the shortest round-trip form") {
  RunConfig c;
  set_config_value(c, "integrator.dt", "0.005");
  set_config_value(c, "bath.R", "1e-6");
  const std::string text = serialize_config(c);
  CHECK(text.find("integrator.dt = 0.005\n") != std::string::npos);
  CHECK(text.find("bath.R = 1e-06\n") != std::string::npos);
}

TEST_CASE("every recipe parses") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(HEOM2Q_RECIPE_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path().string()));
    ++count;
  }
  CHECK(count >= 10);
  CHECK_THROWS_AS(load_config("/nonexistent/x.cfg"), ConfigError);
}
