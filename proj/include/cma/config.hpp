// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cma/geometry.hpp"
#include "cma/grid.hpp"
#include "cma/ma_solver.hpp"

namespace cma {

/// Where the right-hand side F comes from.
struct ForcingSpec {
  enum class Kind {
    kExpression,             ///< inline expression
    kFile,                   ///< CMAF field file
    kManufacturedPotential,  ///< F = log det(g + ddbar phi*) / det g for an expression phi*
    kRicciFlat,              ///< F = -log det g: zero target Ricci form
  };
  Kind kind = Kind::kExpression;
  std::string expression;
  std::filesystem::path file;
};

/// Parsed solve configuration (one JSON document).
///
///   {
///     "n": 1, "N": 64,
///     "F": "0.3*sin(2*pi*x1)*sin(2*pi*y1)"
///          | {"file": "F.cmaf"} | {"manufactured_potential": "<expr>"} | {"ricci_flat": true},
///     "background": "flat" | {"potential": "<expr>"},
///     "solver": {"newton_tol": 1e-11, "newton_max_iter": 50, "t_step_initial": 0.1,
///                "t_step_min": 1e-4, "damping_eig_floor": 1e-8, "krylov_tol": 1e-12,
///                "krylov_max_iter": 0}
///   }
///
/// "background" and "solver" (and every key inside "solver") are optional.
/// Relative file paths resolve against the configuration file's directory.
struct RunConfig {
  SolverConfig solver;
  ForcingSpec forcing;
  std::optional<std::string> background_potential;
  /// Canonical JSON echo of the configuration.
  std::string echo;
};

/// Throws FormatError on malformed JSON, unknown keys, wrong types or
/// invalid values.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

struct Problem {
  HermitianMetricField background;
  PeriodicScalarField F;
  /// Files read while building the problem.
  std::vector<std::filesystem::path> inputs;
};

/// Samples the background and forcing term. Throws FormatError for data that
/// does not fit the grid or a non-positive background, IoError for unreadable
/// files.
Problem build_problem(const RunConfig& config);

/// Provenance record written next to solver outputs.
struct RunManifest {
  struct FileHash {
    std::string path;
    std::string sha256;
  };
  std::string config_echo;
  std::vector<FileHash> inputs;
  std::string version;
  std::vector<std::pair<std::string, double>> timings;
  std::vector<std::string> outputs;

  std::string to_json() const;
  /// Throws FormatError.
  static RunManifest from_json(const std::string& text);
  /// Recomputes every input hash; returns one message per missing or changed file.
  std::vector<std::string> verify_inputs() const;
};

/// Version string of this build (git describe output, or "unknown").
std::string version_string();

}  // namespace cma
