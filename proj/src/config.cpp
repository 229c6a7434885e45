#include "phasemem/config.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "phasemem/errors.hpp"

namespace phasemem {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  return j;
}

double number(json& j, const std::string& path, const char* key, std::optional<double> def = std::nullopt) {
  const std::string p = join(path, key);
  if (!j.contains(key)) {
    if (!def) throw ConfigError(p, "missing required number");
    j[key] = *def;
    return *def;
  }
  if (!j[key].is_number()) throw ConfigError(p, "expected a number");
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) throw ConfigError(p, "must be finite");
  return v;
}

int integer(json& j, const std::string& path, const char* key, std::optional<int> def = std::nullopt) {
  const std::string p = join(path, key);
  if (!j.contains(key)) {
    if (!def) throw ConfigError(p, "missing required integer");
    j[key] = *def;
    return *def;
  }
  if (!j[key].is_number_integer()) throw ConfigError(p, "expected an integer");
  return j[key].get<int>();
}

std::string text(const json& j, const std::string& path, const char* key) {
  const std::string p = join(path, key);
  if (!j.contains(key) || !j[key].is_string()) throw ConfigError(p, "missing required string");
  return j[key].get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path, const char* key) {
  const std::string p = join(path, key);
  if (!j.contains(key) || !j[key].is_array()) throw ConfigError(p, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j[key].size(); ++i) {
    const auto& v = j[key][i];
    if (!v.is_number()) throw ConfigError(p + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v.get<double>());
  }
  return out;
}

json& child(json& j, const std::string& path, const char* key, bool required = true) {
  if (!j.contains(key)) {
    if (required) throw ConfigError(join(path, key), "missing required section");
    j[key] = json::object();
  }
  require_object(j[key], join(path, key));
  return j[key];
}

ScalarFunction scalar_function(json& j, const std::string& path) {
  require_object(j, path);
  const std::string kind = text(j, path, "kind");
  if (kind == "constant") return ConstantFn{number(j, path, "value")};
  if (kind == "linear") return LinearFn{number(j, path, "a"), number(j, path, "b")};
  if (kind == "polynomial") return PolynomialFn{numbers(j, path, "coefficients")};
  if (kind == "sinusoidal") {
    return SinusoidalFn{number(j, path, "offset", 0.0), number(j, path, "amplitude"), number(j, path, "wavenumber"),
                        number(j, path, "phase", 0.0)};
  }
  throw ConfigError(join(path, "kind"), "unknown function kind '" + kind + "'");
}

Field nodal_field(json& j, const std::string& path, const Mesh1D& mesh) {
  require_object(j, path);
  if (j.value("kind", "") == "values") {
    auto v = numbers(j, path, "values");
    if (v.size() != mesh.n_nodes()) {
      throw ConfigError(join(path, "values"), "expected " + std::to_string(mesh.n_nodes()) + " nodal values");
    }
    return Field(mesh, std::move(v));
  }
  return Field::sample(mesh, scalar_function(j, path));
}

MemoryKernel kernel(json& j, const std::string& path) {
  const std::string kind = text(j, path, "kind");
  try {
    if (kind == "zero") return MemoryKernel::zero();
    if (kind == "exponential") return MemoryKernel::exponential(number(j, path, "amplitude"), number(j, path, "timescale"));
    if (kind == "tabulated") return MemoryKernel::tabulated(numbers(j, path, "times"), numbers(j, path, "values"));
  } catch (const DomainError& e) {
    throw ConfigError(path, std::string("(hpregk): k ∈ W^{1,1}(0,T) violated: ") + e.what());
  }
  throw ConfigError(join(path, "kind"), "unknown kernel kind '" + kind + "'");
}

MonotoneGraph graph(json& j, const std::string& path) {
  const std::string kind = text(j, path, "kind");
  try {
    if (kind == "zero") return MonotoneGraph::zero();
    if (kind == "box") return MonotoneGraph::box(number(j, path, "lo"), number(j, path, "hi"));
    if (kind == "odd_poly") return MonotoneGraph::odd_polynomial(numbers(j, path, "coefficients"));
  } catch (const DomainError& e) {
    throw ConfigError(path, std::string("(hpBeta): β̂ convex, proper, lsc with β̂(0) = 0 violated: ") + e.what());
  }
  throw ConfigError(join(path, "kind"), "unknown beta kind '" + kind + "'");
}

SmoothNonlinearity smooth(json& j, const std::string& path) {
  if (!j.contains("kind") && !j.contains("coefficients")) {
    j["kind"] = "zero";
  }
  const std::string kind = text(j, path, "kind");
  if (kind == "zero") return SmoothNonlinearity::zero();
  std::size_t expected = 0;
  if (kind == "linear") expected = 2;
  else if (kind == "quadratic") expected = 3;
  else if (kind == "cubic") expected = 4;
  else if (kind != "poly") throw ConfigError(join(path, "kind"), "unknown nonlinearity kind '" + kind + "'");
  auto c = numbers(j, path, "coefficients");
  if (expected != 0 && c.size() != expected) {
    throw ConfigError(join(path, "coefficients"),
                      kind + " needs " + std::to_string(expected) + " ascending coefficients");
  }
  try {
    return SmoothNonlinearity(std::move(c));
  } catch (const DomainError& e) {
    throw ConfigError(path, std::string("(hpls): λ', σ' Lipschitz continuous violated: ") + e.what());
  }
}

SourceTerm source(json& j, const std::string& path) {
  const std::string kind = text(j, path, "kind");
  if (kind == "zero") return SourceTerm::zero();
  if (kind == "separable") {
    auto sp = scalar_function(child(j, path, "space"), join(path, "space"));
    auto tm = scalar_function(child(j, path, "time"), join(path, "time"));
    return SourceTerm::separable(std::move(sp), std::move(tm));
  }
  if (kind == "tabulated") {
    auto times = numbers(j, path, "times");
    auto xs = numbers(j, path, "x");
    if (!j.contains("values") || !j["values"].is_array()) throw ConfigError(join(path, "values"), "expected rows");
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < j["values"].size(); ++r) {
      auto& row = j["values"][r];
      if (!row.is_array()) throw ConfigError(join(path, "values"), "expected rows of numbers");
      std::vector<double> vals;
      for (const auto& v : row) {
        if (!v.is_number()) throw ConfigError(join(path, "values"), "expected numbers");
        vals.push_back(v.get<double>());
      }
      rows.push_back(std::move(vals));
    }
    try {
      return SourceTerm::tabulated(std::move(times), std::move(xs), std::move(rows));
    } catch (const PreconditionError& e) {
      throw ConfigError(path, std::string("(hpf): ") + e.what());
    }
  }
  throw ConfigError(join(path, "kind"), "unknown source kind '" + kind + "'");
}

int line_of_offset(const std::string& s, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < std::min(offset, s.size()); ++i) {
    if (s[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

RunSettings parse_config(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ConfigError("", e.what(), line_of_offset(document, e.byte == 0 ? 0 : e.byte - 1));
  }
  if (!doc.is_object()) throw ConfigError("", "top level must be an object", 1);

  RunSettings rs;
  ProblemConfig& cfg = rs.problem;

  {
    json& m = child(doc, "", "mesh");
    const double lo = number(m, "mesh", "x_lo", 0.0);
    const double hi = number(m, "mesh", "x_hi", 1.0);
    const int nc = integer(m, "mesh", "n_cells");
    try {
      cfg.mesh = Mesh1D(lo, hi, nc);
    } catch (const DomainError& e) {
      throw ConfigError("mesh", e.what());
    }
  }
  {
    json& t = child(doc, "", "time");
    cfg.T = number(t, "time", "T");
    cfg.dt = number(t, "time", "dt");
    if (!(cfg.T > 0.0)) throw ConfigError("time.T", "final time must be positive");
    if (!(cfg.dt > 0.0)) throw ConfigError("time.dt", "time step must be positive");
  }

  cfg.kernel = kernel(child(doc, "", "kernel"), "kernel");
  const double default_kp = cfg.kernel.is_exponential() ? cfg.kernel.as_exponential().amplitude : 0.0;
  cfg.kappa0 = number(doc, "", "kappa0");
  cfg.kappa0_prime = number(doc, "", "kappa0_prime", default_kp);
  cfg.beta = graph(child(doc, "", "beta", false).empty() ? (doc["beta"] = {{"kind", "zero"}}) : doc["beta"], "beta");
  cfg.mu = number(doc, "", "mu", cfg.dt);
  cfg.lambda = smooth(child(doc, "", "lambda", false), "lambda");
  cfg.sigma = smooth(child(doc, "", "sigma", false), "sigma");
  {
    json& s = child(doc, "", "source", false);
    if (!s.contains("kind")) s["kind"] = "zero";
    cfg.source = source(s, "source");
  }
  {
    json& bc = child(doc, "", "theta_bc");
    cfg.theta_bc.left = scalar_function(child(bc, "theta_bc", "left"), "theta_bc.left");
    cfg.theta_bc.right = scalar_function(child(bc, "theta_bc", "right"), "theta_bc.right");
    cfg.theta_bc.theta_min = number(bc, "theta_bc", "theta_min");
    cfg.theta_bc.theta_max = number(bc, "theta_bc", "theta_max");
  }
  cfg.theta0 = nodal_field(child(doc, "", "theta0"), "theta0", cfg.mesh);
  cfg.chi0 = nodal_field(child(doc, "", "chi0"), "chi0", cfg.mesh);
  {
    json& nw = child(doc, "", "newton", false);
    cfg.newton.max_iters = integer(nw, "newton", "max_iters", 50);
    cfg.newton.tol = number(nw, "newton", "tol", 1e-10);
    cfg.newton.max_halvings = integer(nw, "newton", "max_halvings", 40);
  }
  {
    json& sw = child(doc, "", "sweep", false);
    if (sw.contains("epsilons")) rs.epsilons = numbers(sw, "sweep", "epsilons");
    else sw["epsilons"] = rs.epsilons;
    rs.parallelism = integer(sw, "sweep", "parallelism", 1);
  }
  {
    json& ms = child(doc, "", "mms", false);
    auto& o = rs.mms;
    o.T = number(ms, "mms", "T", o.T);
    o.kappa0 = number(ms, "mms", "kappa0", o.kappa0);
    o.kappa0_prime = number(ms, "mms", "kappa0_prime", o.kappa0_prime);
    o.timescale = number(ms, "mms", "timescale", o.timescale);
    if (ms.contains("dt_levels")) o.dt_levels = numbers(ms, "mms", "dt_levels");
    if (ms.contains("n_cells_levels")) {
      o.n_cells_levels.clear();
      for (double v : numbers(ms, "mms", "n_cells_levels")) o.n_cells_levels.push_back(static_cast<int>(v));
    }
    o.n_cells_for_time = integer(ms, "mms", "n_cells_for_time", o.n_cells_for_time);
    o.dt_for_space = number(ms, "mms", "dt_for_space", o.dt_for_space);
    o.temporal_threshold = number(ms, "mms", "temporal_threshold", o.temporal_threshold);
    o.spatial_threshold = number(ms, "mms", "spatial_threshold", o.spatial_threshold);
  }
  rs.coercivity_grid = integer(child(doc, "", "kernel_check", false), "kernel_check", "n_grid", 128);
  rs.output_every = integer(child(doc, "", "output", false), "output", "every", 1);
  if (rs.output_every < 1) throw ConfigError("output.every", "must be >= 1");

  try {
    validate(cfg);
  } catch (const HypothesisViolation& e) {
    throw ConfigError(e.field(), std::string(e.what()).substr(e.field().size() + 2));
  } catch (const PreconditionError& e) {
    throw ConfigError("", e.what());
  }

  rs.resolved = doc.dump(2);
  return rs;
}

RunSettings load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read configuration file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

SweepPlan make_sweep_plan(const RunSettings& settings) {
  SweepPlan plan;
  plan.base_config = settings.problem;
  plan.epsilons = settings.epsilons;
  plan.parallelism = settings.parallelism;
  return plan;
}

}  // namespace phasemem
