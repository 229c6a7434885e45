#include <string>

#include "doctest.h"
#include "json.hpp"
#include "phasemem/config.hpp"

using namespace phasemem;
using nlohmann::json;

namespace {

const std::string kDir = PHASEMEM_CONFIG_DIR;

json minimal() {
  return json::parse(R"({
    "mesh": {"n_cells": 10},
    "time": {"T": 0.1, "dt": 0.01},
    "kappa0": 1.0,
    "kernel": {"kind": "exponential", "amplitude": 0.5, "timescale": 0.2},
    "theta_bc": {"left": {"kind": "constant", "value": 1.0},
                 "right": {"kind": "constant", "value": 1.0},
                 "theta_min": 0.5, "theta_max": 2.0},
    "theta0": {"kind": "constant", "value": 1.0},
    "chi0": {"kind": "constant", "value": 0.0}
  })");
}

std::string error_of(const json& doc) {
  try {
    parse_config(doc.dump());
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("shipped configurations load") {
  for (const char* name : {"run_steady.json", "kernel_exponential.json", "sweep_default.json", "mms.json"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_config(kDir + "/" + name));
  }
  const auto rs = load_config(kDir + "/sweep_default.json");
  CHECK(rs.problem.mesh.n_cells() == 200);
  CHECK(rs.problem.dt == 1e-3);
  CHECK(rs.problem.kernel.is_exponential());
  CHECK(rs.problem.beta.kind() == "box");
  CHECK(rs.epsilons == std::vector<double>{0.4, 0.2, 0.1, 0.05, 0.025});
  const auto plan = make_sweep_plan(rs);
  CHECK(plan.parallelism == rs.parallelism);
}

TEST_CASE("defaults are filled in and echoed") {
  const auto rs = parse_config(minimal().dump());
  CHECK(rs.problem.kappa0_prime == 0.5);
  CHECK(rs.problem.mu == 0.01);
  CHECK(rs.problem.beta.kind() == "zero");
  CHECK(rs.problem.newton.max_iters == 50);
  CHECK(rs.problem.mesh.x_hi() == 1.0);
  const auto echo = json::parse(rs.resolved);
  CHECK(echo["mu"] == 0.01);
  CHECK(echo["kappa0_prime"] == 0.5);
  CHECK(echo["newton"]["tol"] == 1e-10);
}

TEST_CASE("nodal value lists and tabulated data") {
  auto doc = minimal();
  doc["theta0"] = {{"kind", "values"}, {"values", std::vector<double>(11, 1.5)}};
  doc["source"] = {{"kind", "tabulated"}, {"times", {0.0, 1.0}}, {"x", {0.0, 1.0}}, {"values", {{0.0, 1.0}, {2.0, 3.0}}}};
  const auto rs = parse_config(doc.dump());
  CHECK(rs.problem.theta0[4] == 1.5);
  CHECK(rs.problem.source(0.5, 0.5) == doctest::Approx(1.5));

  doc["theta0"]["values"] = std::vector<double>(7, 1.5);
  CHECK(error_of(doc).find("theta0.values") != std::string::npos);
}

TEST_CASE("syntax errors report a line") {
  try {
    parse_config("{\n  \"mesh\": {\n    \"n_cells\": 10,\n  }\n}");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("field errors name the offending path") {
  auto doc = minimal();
  doc["mesh"].erase("n_cells");
  CHECK(error_of(doc).find("'mesh.n_cells'") != std::string::npos);

  doc = minimal();
  doc["time"]["dt"] = "fast";
  CHECK(error_of(doc).find("'time.dt'") != std::string::npos);

  doc = minimal();
  doc["kernel"]["kind"] = "gaussian";
  CHECK(error_of(doc).find("unknown kernel kind") != std::string::npos);

  doc = minimal();
  doc["lambda"] = {{"kind", "cubic"}, {"coefficients", {0.0, 1.0}}};
  CHECK(error_of(doc).find("lambda.coefficients") != std::string::npos);
}

TEST_CASE("hypothesis violations are named") {
  auto doc = minimal();
  doc["kappa0"] = 0.0;
  CHECK(error_of(doc).find("(hpregk): κ₀ > 0") != std::string::npos);

  doc = minimal();
  doc["theta0"] = {{"kind", "linear"}, {"a", 0.0}, {"b", 1.0}};
  CHECK(error_of(doc).find("(hpthetaz)") != std::string::npos);

  doc = minimal();
  doc["kernel"]["timescale"] = -1.0;
  CHECK(error_of(doc).find("(hpregk)") != std::string::npos);

  doc = minimal();
  doc["beta"] = {{"kind", "box"}, {"lo", 0.2}, {"hi", 1.0}};
  CHECK(error_of(doc).find("(hpBeta)") != std::string::npos);

  doc = minimal();
  doc["lambda"] = {{"kind", "poly"}, {"coefficients", {0.0, 1.0, 0.0, 0.0, 1.0}}};
  CHECK(error_of(doc).find("(hpls)") != std::string::npos);

  doc = minimal();
  doc["theta_bc"]["right"] = {{"kind", "linear"}, {"a", 1.0}, {"b", 50.0}};
  CHECK(error_of(doc).find("(hpthetaG)") != std::string::npos);

  doc = minimal();
  doc["theta_bc"]["theta_min"] = -1.0;
  CHECK(error_of(doc).find("(hpthetaminmax)") != std::string::npos);

  doc = minimal();
  doc["beta"] = {{"kind", "box"}, {"lo", 0.0}, {"hi", 1.0}};
  doc["chi0"] = {{"kind", "constant"}, {"value", 1.5}};
  CHECK(error_of(doc).find("(hpchiz)") != std::string::npos);

  doc = minimal();
  doc["kappa0_prime"] = -3.0;
  CHECK(error_of(doc).find("(defka)") != std::string::npos);
}

TEST_CASE("discretization errors are config errors") {
  auto doc = minimal();
  doc["time"]["dt"] = 0.03;
  CHECK(error_of(doc).find("T/dt") != std::string::npos);
}
