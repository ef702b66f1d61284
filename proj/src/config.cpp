// SPDX-License-Identifier: Apache-2.0

#include "cma/config.hpp"

#include <json.hpp>

#include <set>

#include "cma/errors.hpp"
#include "cma/expression.hpp"
#include "cma/io.hpp"

#ifndef CMA_VERSION
#define CMA_VERSION "unknown"
#endif

namespace cma {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw FormatError("unknown key '" + key + "' in " + where);
  }
}

int integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw FormatError("'" + key + "' must be an integer");
  return v.get<int>();
}

double real(const json& v, const std::string& key) {
  if (!v.is_number()) throw FormatError("'" + key + "' must be a number");
  return v.get<double>();
}

std::string string(const json& v, const std::string& key) {
  if (!v.is_string()) throw FormatError("'" + key + "' must be a string");
  return v.get<std::string>();
}

Expression parse_expression(const std::string& text, const Grid& grid) {
  Expression e = Expression::parse(text);
  if (e.required_axes() > grid.num_axes()) {
    throw FormatError("expression \"" + text + "\" uses coordinates beyond n = " +
                      std::to_string(grid.complex_dim()));
  }
  return e;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("configuration is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("configuration must be a JSON object");
  reject_unknown(doc, {"n", "N", "F", "background", "solver"}, "configuration");
  for (const char* key : {"n", "N", "F"}) {
    if (!doc.contains(key)) throw FormatError(std::string("configuration is missing '") + key + "'");
  }

  RunConfig cfg;
  cfg.solver.n = integer(doc["n"], "n");
  cfg.solver.N = integer(doc["N"], "N");

  const json& F = doc["F"];
  if (F.is_string()) {
    cfg.forcing.kind = ForcingSpec::Kind::kExpression;
    cfg.forcing.expression = F.get<std::string>();
  } else if (F.is_object() && F.size() == 1) {
    const auto& [key, value] = *F.items().begin();
    if (key == "file") {
      cfg.forcing.kind = ForcingSpec::Kind::kFile;
      const std::filesystem::path p = string(value, "F.file");
      cfg.forcing.file = p.is_absolute() ? p : base_dir / p;
    } else if (key == "manufactured_potential") {
      cfg.forcing.kind = ForcingSpec::Kind::kManufacturedPotential;
      cfg.forcing.expression = string(value, "F.manufactured_potential");
    } else if (key == "ricci_flat") {
      if (!value.is_boolean() || !value.get<bool>()) throw FormatError("'F.ricci_flat' must be true");
      cfg.forcing.kind = ForcingSpec::Kind::kRicciFlat;
    } else {
      throw FormatError("unknown key '" + key + "' in F");
    }
  } else {
    throw FormatError("'F' must be an expression string or an object with one of file, "
                      "manufactured_potential, ricci_flat");
  }

  if (doc.contains("background")) {
    const json& b = doc["background"];
    if (b.is_string()) {
      if (b.get<std::string>() != "flat") throw FormatError("'background' must be \"flat\" or {\"potential\": ...}");
    } else if (b.is_object()) {
      reject_unknown(b, {"potential"}, "background");
      if (!b.contains("potential")) throw FormatError("'background' object needs 'potential'");
      cfg.background_potential = string(b["potential"], "background.potential");
    } else {
      throw FormatError("'background' must be \"flat\" or {\"potential\": ...}");
    }
  }

  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    if (!s.is_object()) throw FormatError("'solver' must be an object");
    reject_unknown(s,
                   {"newton_tol", "newton_max_iter", "t_step_initial", "t_step_min", "damping_eig_floor",
                    "krylov_tol", "krylov_max_iter"},
                   "solver");
    SolverConfig& c = cfg.solver;
    if (s.contains("newton_tol")) c.newton_tol = real(s["newton_tol"], "solver.newton_tol");
    if (s.contains("newton_max_iter")) c.newton_max_iter = integer(s["newton_max_iter"], "solver.newton_max_iter");
    if (s.contains("t_step_initial")) c.t_step_initial = real(s["t_step_initial"], "solver.t_step_initial");
    if (s.contains("t_step_min")) c.t_step_min = real(s["t_step_min"], "solver.t_step_min");
    if (s.contains("damping_eig_floor")) {
      c.damping_eig_floor = real(s["damping_eig_floor"], "solver.damping_eig_floor");
    }
    if (s.contains("krylov_tol")) c.krylov_tol = real(s["krylov_tol"], "solver.krylov_tol");
    if (s.contains("krylov_max_iter")) c.krylov_max_iter = integer(s["krylov_max_iter"], "solver.krylov_max_iter");
  }

  try {
    cfg.solver.validate();
    const Grid grid = cfg.solver.grid();
    if (cfg.forcing.kind == ForcingSpec::Kind::kExpression ||
        cfg.forcing.kind == ForcingSpec::Kind::kManufacturedPotential) {
      parse_expression(cfg.forcing.expression, grid);
    }
    if (cfg.background_potential) parse_expression(*cfg.background_potential, grid);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("invalid configuration: ") + e.what());
  }

  cfg.echo = doc.dump();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_text_file(path), path.parent_path());
}

Problem build_problem(const RunConfig& config) {
  const Grid grid = config.solver.grid();
  Problem problem{HermitianField::identity(grid), PeriodicScalarField::zeros(grid), {}};
  const HermitianMetricField flat = HermitianField::identity(grid);
  if (config.background_potential) {
    const PeriodicScalarField psi = parse_expression(*config.background_potential, grid).sample(grid);
    problem.background = metric_from_potential(flat, psi);
    const PositivityReport pos = positivity_check(problem.background);
    if (!pos.is_positive) {
      throw FormatError("background potential gives a non-positive metric (min eigenvalue " +
                        std::to_string(pos.min_eig) + ")");
    }
  }
  const HermitianMetricField& g = problem.background;
  switch (config.forcing.kind) {
    case ForcingSpec::Kind::kExpression:
      problem.F = parse_expression(config.forcing.expression, grid).sample(grid);
      break;
    case ForcingSpec::Kind::kFile: {
      PeriodicScalarField F = read_field(config.forcing.file);
      if (!(F.grid() == grid)) throw FormatError("F file grid does not match n and N of the configuration");
      if (!F.is_real()) throw FormatError("F file holds a complex field");
      problem.F = F.real_part();
      problem.inputs.push_back(config.forcing.file);
      break;
    }
    case ForcingSpec::Kind::kManufacturedPotential: {
      const PeriodicScalarField phi = parse_expression(config.forcing.expression, grid).sample(grid);
      const HermitianMetricField gt = metric_from_potential(g, phi);
      const PositivityReport pos = positivity_check(gt);
      if (!pos.is_positive) throw FormatError("manufactured potential gives a non-positive metric");
      problem.F = PeriodicScalarField::from_real(grid, (det_field(gt).real() / det_field(g).real()).log());
      break;
    }
    case ForcingSpec::Kind::kRicciFlat:
      problem.F = PeriodicScalarField::from_real(grid, -det_field(g).real().log());
      break;
  }
  return problem;
}

// --- manifest -----------------------------------------------------------------------

std::string RunManifest::to_json() const {
  json j;
  j["version"] = version;
  j["config"] = config_echo.empty() ? json() : json::parse(config_echo);
  j["inputs"] = json::array();
  for (const FileHash& f : inputs) j["inputs"].push_back({{"path", f.path}, {"sha256", f.sha256}});
  j["timings_seconds"] = json::object();
  for (const auto& [phase, seconds] : timings) j["timings_seconds"][phase] = seconds;
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  RunManifest m;
  try {
    const json j = json::parse(text);
    m.version = j.at("version").get<std::string>();
    m.config_echo = j.at("config").is_null() ? std::string() : j.at("config").dump();
    for (const auto& f : j.at("inputs")) {
      m.inputs.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
    }
    for (const auto& [phase, seconds] : j.at("timings_seconds").items()) {
      m.timings.emplace_back(phase, seconds.get<double>());
    }
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

std::vector<std::string> RunManifest::verify_inputs() const {
  std::vector<std::string> problems;
  for (const FileHash& f : inputs) {
    try {
      const std::string now = sha256_file(f.path);
      if (now != f.sha256) problems.push_back(f.path + ": hash changed");
    } catch (const IoError&) {
      problems.push_back(f.path + ": missing");
    }
  }
  return problems;
}

std::string version_string() { return CMA_VERSION; }

}  // namespace cma
