// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cma/geometry.hpp"
#include "cma/grid.hpp"
#include "cma/ma_solver.hpp"

namespace cma {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct SuiteReport {
  std::string name;
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  /// True iff every check passed (and there is at least one).
  bool pass() const;
  std::string to_json() const;
};

struct SuiteOptions {
  std::uint64_t seed = 20240917;
};

/// Thresholds used by the suites, in one place.
namespace thresholds {
inline constexpr double kFormIdentity = 1e-12;
inline constexpr double kChristoffelTrace = 1e-11;
inline constexpr double kRicciDifference = 1e-11;
inline constexpr double kVolumeInvariance = 1e-10;
inline constexpr double kChernIntegral = 1e-10;
inline constexpr double kHermitianBeforeSymmetrize = 1e-12;
inline constexpr double kManufacturedN1 = 1e-8;
inline constexpr double kManufacturedN2 = 1e-6;
inline constexpr double kManufacturedEigMin = 0.4;
inline constexpr double kPoissonMatch = 1e-8;
inline constexpr double kUniquenessSup = 1e-8;
inline constexpr double kUniquenessFunctional = 1e-9;
inline constexpr double kRicciPrescriptionN1 = 1e-8;
inline constexpr double kRicciPrescriptionN2 = 1e-6;
inline constexpr double kRicciFlatMetric = 1e-7;
inline constexpr double kLinearizationOrder = 1.9;
inline constexpr double kLinearizationExact = 1e-9;
inline constexpr double kSpectralConvergenceRatio = 1e3;
inline constexpr double kGauge = 1e-13;
}  // namespace thresholds

/// Solves phi_{z zbar} = C e^F - 1 (n = 1, flat background) by dividing by the
/// Fourier symbol of (1/4) * Laplacian. Throws InvalidArgument for n != 1 or
/// when the mean of the right-hand side exceeds 1e-12.
PeriodicScalarField poisson_oracle_n1(const PeriodicScalarField& F, const HermitianMetricField& g_flat);

/// Periodic central finite difference of order 2 or 8 along a real axis.
PeriodicScalarField finite_difference_oracle(const PeriodicScalarField& f, int axis, int order);

/// Sum of `terms` random cosines with wavenumbers |k_a| <= max_wavenumber,
/// amplitudes decaying like 1/(1 + |k|^2). Real, deterministic in `seed`.
PeriodicScalarField random_band_limited(const Grid& grid, std::uint64_t seed, int max_wavenumber,
                                        int terms = 12);

/// Names accepted by run_suite, in the order "all" runs them.
const std::vector<std::string>& suite_names();
bool is_suite_name(const std::string& name);

/// Runs a named suite single-threaded. "all" runs every suite in order and
/// prefixes check names with the suite name. Throws InvalidArgument for an
/// unknown name.
SuiteReport run_suite(const std::string& name, const SuiteOptions& options = {});

// Building blocks shared by the suites and the acceptance binary.

/// phi* = 0.05 cos(2 pi x1) cos(2 pi y1).
PeriodicScalarField manufactured_potential_n1(const Grid& grid);
/// phi* = 0.03 (cos(2 pi x1) cos(2 pi y2) + cos(2 pi x2)).
PeriodicScalarField manufactured_potential_n2(const Grid& grid);
/// phi* = 0.002 exp(2 sin(2 pi x1)) cos(2 pi y1): smooth but not band-limited.
PeriodicScalarField smooth_manufactured_potential(const Grid& grid);
/// Closed-form F for smooth_manufactured_potential on the flat n = 1 torus.
PeriodicScalarField smooth_manufactured_forcing(const Grid& grid);
/// F = log(det(g + ddbar phi) / det g).
PeriodicScalarField forcing_from_potential(const PeriodicScalarField& phi, const HermitianMetricField& g);
/// sup |ricci(g~) - ricci(g) + ddbar F| over entries.
double ricci_prescription_error(const PeriodicScalarField& phi, const PeriodicScalarField& F,
                                const HermitianMetricField& g);

}  // namespace cma
