// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "cma/geometry.hpp"
#include "cma/grid.hpp"

namespace cma {

/// Grid, tolerances and path-following policy of a Monge-Ampere solve.
struct SolverConfig {
  int n = 1;
  int N = 32;
  double newton_tol = 1e-11;
  int newton_max_iter = 50;
  double t_step_initial = 0.1;
  double t_step_min = 1e-4;
  double damping_eig_floor = 1e-8;
  double krylov_tol = 1e-12;
  /// 0 selects the default 10 * N^n.
  int krylov_max_iter = 0;

  int effective_krylov_max_iter() const;
  Grid grid() const { return Grid(n, N); }
  /// Throws InvalidArgument on non-positive tolerances or inconsistent steps.
  void validate() const;
};

/// Bounded quantities of the a-priori estimates, evaluated for one potential.
struct YauReport {
  double sup_phi = 0.0;
  double sup_grad_phi = 0.0;
  double eig_min = 1.0;
  double eig_max = 1.0;
  double sup_third = 0.0;
};

/// One accepted step of the continuity path.
struct TraceStep {
  double t = 0.0;
  int newton_iters = 0;
  double residual_sup = 0.0;
  double eig_min = 1.0;
  double eig_max = 1.0;
  double sup_phi = 0.0;
  double sup_grad_phi = 0.0;
  double sup_third = 0.0;
};

using ContinuityTrace = std::vector<TraceStep>;

enum class SolveStatus { kConverged, kStepUnderflow };

struct ContinuityResult {
  SolveStatus status = SolveStatus::kConverged;
  PeriodicScalarField phi;
  ContinuityTrace trace;
  /// Largest t at which an accepted solution exists.
  double last_good_t = 0.0;
  std::vector<std::string> warnings;

  bool converged() const { return status == SolveStatus::kConverged; }
};

struct LinearSolveResult {
  PeriodicScalarField psi;
  int iterations = 0;
  /// ||L psi - rhs||_sup / ||rhs||_sup.
  double relative_residual = 0.0;
  bool converged = false;
};

/// C = vol(g) / integral of e^F dV_g.
double compatibility_constant(const PeriodicScalarField& F, const HermitianMetricField& g);

/// det(g + ddbar phi) / det(g) - C(t) e^{tF}, C(t) = compatibility_constant(tF, g).
/// Throws SingularMetric if g + ddbar phi is not positive-definite.
PeriodicScalarField ma_residual(const PeriodicScalarField& phi, const PeriodicScalarField& F,
                                double t, const HermitianMetricField& g);

/// L[psi] = (det g~ / det g) * Laplace-Beltrami_{g~} psi, with g~ = g + ddbar phi.
PeriodicScalarField linearized_apply(const PeriodicScalarField& psi, const PeriodicScalarField& phi,
                                     const HermitianMetricField& g);

/// L linearized at a fixed potential, with the pointwise coefficients
/// adj(g~)/det(g) cached for repeated application.
class LinearizedOperator {
 public:
  LinearizedOperator(const PeriodicScalarField& phi, const HermitianMetricField& g);

  const Grid& grid() const { return coefficients_.grid(); }
  PeriodicScalarField apply(const PeriodicScalarField& psi) const;

 private:
  HermitianField coefficients_;
};

/// Removes the constant component of rhs in the pairing that annihilates the
/// range of L: rhs - (integral rhs dV_g) / vol(g).
PeriodicScalarField project_to_range(const PeriodicScalarField& rhs, const HermitianMetricField& g);

/// Solves L[psi] = rhs for mean-zero psi by right-preconditioned GMRES with the
/// inverse quarter flat Laplacian as preconditioner. rhs must already be in
/// the range of L (see project_to_range).
LinearSolveResult solve_linearized(const PeriodicScalarField& rhs, const PeriodicScalarField& phi,
                                   const HermitianMetricField& g, const SolverConfig& cfg);

/// Solves det(g + ddbar phi) = C e^F det(g) by continuation in t with damped
/// Newton corrections.
ContinuityResult continuity_solve(const PeriodicScalarField& F, const HermitianMetricField& g,
                                  const SolverConfig& cfg);

YauReport yau_estimate_report(const PeriodicScalarField& phi, const HermitianMetricField& g);

/// Highest wavenumber (per axis) treated as resolved for input data: N/4.
int band_limit_cutoff(const Grid& grid);

}  // namespace cma
