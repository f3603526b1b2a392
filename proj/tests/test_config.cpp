#include <cstdint>
#include <string>

#include "chmhd/config.hpp"
#include "chmhd/error.hpp"
#include "doctest.h"

using namespace chmhd;

namespace {

// Asserts that parsing fails and that the message carries the given fragment
// (typically the offending key and its line number).
void expect_parse_error(const std::string& text, const std::string& needle) {
  try {
    parse_config(text);
    FAIL_CHECK("expected ConfigError for:\n" << text);
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK_MESSAGE(what.find(needle) != std::string::npos,
                  "message '" << what << "' lacks '" << needle << "'");
  }
}

const char* kFullConfig =
    "# full scenario exercise\n"
    "[scenario]\n"
    "scenario = spinodal\n"
    "n = 24\n"
    "dt = 0.0625\n"
    "T = 2\n"
    "seed = 18446744073709551615\n"
    "induction_init = interpolation\n"
    "\n"
    "[params]\n"
    "gamma = 0.01\n"
    "lambda = 0.02\n"
    "mu = 1.5\n"
    "mobility1 = 0.001\n"
    "mobility2 = 0.01\n"
    "viscosity1 = 0.3\n"
    "viscosity2 = 0.7\n"
    "conductivity1 = 50\n"
    "conductivity2 = 150\n"
    "\n"
    "[output]\n"
    "directory = run_a\n"
    "every = 25\n";

} // namespace

TEST_CASE("a config survives a parse, serialize, parse round trip") {
  const ScenarioConfig a = parse_config(kFullConfig);
  const std::string canon = serialize_config(a);
  const ScenarioConfig b = parse_config(canon);

  CHECK(b.kind == ScenarioKind::spinodal);
  CHECK(b.n == 24);
  CHECK(b.dt == a.dt);
  CHECK(b.T == a.T);
  CHECK(b.seed == UINT64_C(18446744073709551615));
  CHECK(b.induction_init == InductionInit::interpolation);
  CHECK(b.params.gamma == a.params.gamma);
  CHECK(b.params.lambda == a.params.lambda);
  CHECK(b.params.mu == a.params.mu);
  CHECK(b.params.mobility.v1 == a.params.mobility.v1);
  CHECK(b.params.mobility.v2 == a.params.mobility.v2);
  CHECK(b.params.viscosity.v1 == a.params.viscosity.v1);
  CHECK(b.params.viscosity.v2 == a.params.viscosity.v2);
  CHECK(b.params.conductivity.v1 == a.params.conductivity.v1);
  CHECK(b.params.conductivity.v2 == a.params.conductivity.v2);
  CHECK(b.output.directory == "run_a");
  CHECK(b.output.every == 25);

  // The canonical form itself is a fixed point.
  CHECK(serialize_config(b) == canon);
}

TEST_CASE("derived quantities fold the time grid consistently") {
  const ScenarioConfig cfg = parse_config(kFullConfig);
  CHECK(cfg.n_steps() == 32);
  const Params run = cfg.run_params();
  CHECK(run.dt == cfg.dt);
  CHECK(run.gamma == cfg.params.gamma);
}

TEST_CASE("parse errors name the offending key and line") {
  expect_parse_error(
      "[scenario]\nscenario = manufactured\nn = 4\ndt = 0.25\nT = 1\n[params]\nbogus = 2\n",
      "config line 7: unknown key 'bogus' in section [params]");
  expect_parse_error("[scenario]\nscenario = manufactured\nn = 4\ndt = 0.25\nT = 1\n[extra]\n",
                     "line 6");
  expect_parse_error("n = 4\n", "outside any section");
  expect_parse_error(
      "[scenario]\nscenario = manufactured\nn = four\ndt = 0.25\nT = 1\n",
      "config line 3: malformed integer 'four' for key 'n'");
  expect_parse_error(
      "[scenario]\nscenario = manufactured\nn = 4\ndt = fast\nT = 1\n",
      "malformed number 'fast' for key 'dt'");
}

TEST_CASE("required keys cannot be omitted") {
  expect_parse_error("[scenario]\nn = 4\ndt = 0.25\nT = 1\n", "missing required key 'scenario'");
  expect_parse_error("[scenario]\nscenario = spinodal\ndt = 0.25\nT = 1\n",
                     "missing required key 'n'");
  expect_parse_error("[scenario]\nscenario = spinodal\nn = 4\nT = 1\n",
                     "missing required key 'dt'");
  expect_parse_error("[scenario]\nscenario = spinodal\nn = 4\ndt = 0.25\n",
                     "missing required key 'T'");
}

TEST_CASE("seeds are unsigned 64-bit values") {
  expect_parse_error(
      "[scenario]\nscenario = spinodal\nn = 4\ndt = 0.25\nT = 1\nseed = -3\n",
      "key 'seed' takes an unsigned value");
}

TEST_CASE("the time grid must be uniform") {
  expect_parse_error("[scenario]\nscenario = spinodal\nn = 4\ndt = 0.3\nT = 1\n",
                     "T must be an integer multiple of dt");
  expect_parse_error("[scenario]\nscenario = spinodal\nn = 4\ndt = -0.25\nT = 1\n",
                     "dt must be positive");
  expect_parse_error("[scenario]\nscenario = spinodal\nn = 1\ndt = 0.25\nT = 1\n",
                     "n must be at least 2");
}

TEST_CASE("periodic scenarios reject the curl-curl initialization") {
  expect_parse_error(
      "[scenario]\nscenario = kelvin_helmholtz\nn = 4\ndt = 0.25\nT = 1\n"
      "induction_init = projection\n",
      "induction_init = interpolation");

  // Left unspecified, the periodic scenario falls back to interpolation.
  const ScenarioConfig cfg =
      parse_config("[scenario]\nscenario = kelvin_helmholtz\nn = 4\ndt = 0.25\nT = 1\n");
  CHECK(cfg.induction_init == InductionInit::interpolation);

  // Non-periodic scenarios keep the projection default.
  const ScenarioConfig other =
      parse_config("[scenario]\nscenario = spinodal\nn = 4\ndt = 0.25\nT = 1\n");
  CHECK(other.induction_init == InductionInit::projection);
}

TEST_CASE("output settings are validated") {
  expect_parse_error(
      "[scenario]\nscenario = spinodal\nn = 4\ndt = 0.25\nT = 1\n[output]\nevery = -1\n",
      "output.every must be non-negative");
  const ScenarioConfig cfg = parse_config(
      "[scenario]\nscenario = spinodal\nn = 4\ndt = 0.25\nT = 1\n[output]\nevery = 0\n");
  CHECK(cfg.output.every == 0);
  CHECK(cfg.output.directory == "out");
}

TEST_CASE("comments and stray whitespace are ignored") {
  const ScenarioConfig cfg = parse_config(
      "  # leading comment\n"
      "[scenario]\n"
      "  scenario =   lid_driven  \n"
      "\tn\t=\t6\n"
      "dt = 0.5   # inline comments end the value\n"
      "T = 1\n");
  CHECK(cfg.kind == ScenarioKind::lid_driven);
  CHECK(cfg.n == 6);
  CHECK(cfg.dt == 0.5);
}

TEST_CASE("scenario names map to kinds and back") {
  for (auto kind : {ScenarioKind::manufactured, ScenarioKind::spinodal, ScenarioKind::lid_driven,
                    ScenarioKind::kelvin_helmholtz})
    CHECK(scenario_kind_from(to_string(kind)) == kind);
  CHECK_THROWS_AS(scenario_kind_from("vortex"), ConfigError);
}

TEST_CASE("a missing config file is reported by path") {
  try {
    load_config("/nonexistent/дir/config.ini");
    FAIL_CHECK("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("/nonexistent") != std::string::npos);
  }
}
