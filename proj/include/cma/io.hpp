// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "cma/geometry.hpp"
#include "cma/grid.hpp"
#include "cma/ma_solver.hpp"

namespace cma {

/// Field snapshot ("CMAF"). Written as real samples when every imaginary
/// part is exactly zero, otherwise as interleaved re/im pairs.
void write_field(const std::filesystem::path& path, const PeriodicScalarField& f);
/// Throws IoError if the file cannot be read, FormatError on bad content.
PeriodicScalarField read_field(const std::filesystem::path& path);

/// Metric snapshot ("CMMF"): lower-triangle entries g(j, k), j >= k, per point.
/// The upper triangle is restored as the conjugate on read.
void write_metric(const std::filesystem::path& path, const HermitianMetricField& g);
HermitianMetricField read_metric(const std::filesystem::path& path);

/// JSON array of step records with fields t, newton_iters, residual_sup,
/// eig_min, eig_max, sup_phi, sup_grad_phi, sup_third.
std::string trace_to_json(const ContinuityTrace& trace);
/// Throws FormatError on malformed input.
ContinuityTrace trace_from_json(const std::string& text);
void write_trace(const std::filesystem::path& path, const ContinuityTrace& trace);
ContinuityTrace read_trace(const std::filesystem::path& path);

/// CSV with a header row of the JSON field names.
std::string trace_to_csv(const ContinuityTrace& trace);
/// Fixed-width table for terminals.
std::string trace_table(const ContinuityTrace& trace);

/// Whole-file helpers; throw IoError.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace cma
