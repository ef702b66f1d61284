// SPDX-License-Identifier: Apache-2.0

#include "cma/ma_solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "cma/errors.hpp"

namespace cma {

namespace {

constexpr double kBandLimitWarning = 1e-10;
constexpr double kMaxStepCap = 0.25;
constexpr int kFastNewtonIters = 5;
constexpr int kMaxDampingHalvings = 40;
constexpr int kGmresRestart = 60;

double sup(const PeriodicScalarField& f) { return f.max_abs(); }

PeriodicScalarField as_field(const Grid& grid, const Eigen::VectorXd& v) {
  return PeriodicScalarField::from_real(grid, v.array());
}

Eigen::VectorXd as_vector(const PeriodicScalarField& f) { return f.values().real().matrix(); }

void require_real(const PeriodicScalarField& f, const char* what) {
  if (!f.is_real()) {
    throw NotRealField(std::string(what) + " must be real (max |Im| = " +
                       std::to_string(f.max_abs_imag()) + ")");
  }
}

struct NewtonOutcome {
  bool converged = false;
  int iterations = 0;
  double residual_sup = 0.0;
};

// Damped Newton iteration at fixed t; phi is updated in place only on success.
NewtonOutcome newton_at(PeriodicScalarField& phi, const PeriodicScalarField& F, double t,
                        const HermitianMetricField& g, const SolverConfig& cfg) {
  PeriodicScalarField current = phi;
  NewtonOutcome out;
  double first_residual = -1.0;
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 0;; ++it) {
    const PeriodicScalarField r = ma_residual(current, F, t, g);
    out.residual_sup = sup(r);
    out.iterations = it;
    if (!std::isfinite(out.residual_sup)) return out;
    if (out.residual_sup <= cfg.newton_tol) {
      out.converged = true;
      phi = std::move(current);
      return out;
    }
    if (it >= cfg.newton_max_iter) return out;
    if (first_residual < 0.0) first_residual = out.residual_sup;
    if (out.residual_sup > 1e3 * first_residual) return out;
    // Near the roundoff floor the residual stops contracting; give up rather
    // than burn the remaining iterations.
    if (out.residual_sup < 0.5 * best) {
      best = out.residual_sup;
      stalled = 0;
    } else if (++stalled >= 4) {
      return out;
    }

    const PeriodicScalarField rhs = project_to_range(-r, g);
    const LinearSolveResult lin = solve_linearized(rhs, current, g, cfg);
    if (!lin.psi.values().allFinite()) return out;

    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kMaxDampingHalvings; ++h, lambda *= 0.5) {
      PeriodicScalarField trial = mean_zero_project((current + lambda * lin.psi).real_part());
      const PositivityReport pos = positivity_check(metric_from_potential(g, trial));
      if (pos.min_eig >= cfg.damping_eig_floor) {
        current = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) return out;
  }
}

TraceStep make_step(double t, const NewtonOutcome& newton, const PeriodicScalarField& phi,
                    const HermitianMetricField& g) {
  const YauReport y = yau_estimate_report(phi, g);
  TraceStep s;
  s.t = t;
  s.newton_iters = newton.iterations;
  s.residual_sup = newton.residual_sup;
  s.eig_min = y.eig_min;
  s.eig_max = y.eig_max;
  s.sup_phi = y.sup_phi;
  s.sup_grad_phi = y.sup_grad_phi;
  s.sup_third = y.sup_third;
  return s;
}

}  // namespace

// --- SolverConfig -------------------------------------------------------------

int SolverConfig::effective_krylov_max_iter() const {
  if (krylov_max_iter > 0) return krylov_max_iter;
  int points = 1;
  for (int i = 0; i < n; ++i) points *= N;
  return 10 * points;
}

void SolverConfig::validate() const {
  (void)grid();
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw InvalidArgument(std::string(name) + " must be > 0");
  };
  positive(newton_tol, "newton_tol");
  positive(t_step_initial, "t_step_initial");
  positive(t_step_min, "t_step_min");
  positive(damping_eig_floor, "damping_eig_floor");
  positive(krylov_tol, "krylov_tol");
  if (newton_max_iter < 1) throw InvalidArgument("newton_max_iter must be >= 1");
  if (krylov_max_iter < 0) throw InvalidArgument("krylov_max_iter must be >= 0");
  if (!(t_step_min <= t_step_initial && t_step_initial <= 1.0)) {
    throw InvalidArgument("need t_step_min <= t_step_initial <= 1");
  }
}

int band_limit_cutoff(const Grid& grid) { return grid.points_per_axis() / 4; }

// --- residual and linearization -------------------------------------------------

double compatibility_constant(const PeriodicScalarField& F, const HermitianMetricField& g) {
  require_same_grid(F.grid(), g.grid());
  require_real(F, "F");
  const Eigen::ArrayXd det = det_field(g).real();
  const double weighted = compensated_mean(F.real().exp() * det);
  return volume(g) / weighted;
}

PeriodicScalarField ma_residual(const PeriodicScalarField& phi, const PeriodicScalarField& F,
                                double t, const HermitianMetricField& g) {
  require_same_grid(phi.grid(), g.grid());
  require_same_grid(F.grid(), g.grid());
  require_real(phi, "phi");
  require_real(F, "F");
  const HermitianMetricField g_tilde = metric_from_potential(g, phi);
  require_positive(g_tilde, "ma_residual");
  const PeriodicScalarField tF = t * F.real_part();
  const double C = compatibility_constant(tF, g);
  const Eigen::ArrayXd ratio = det_field(g_tilde).real() / det_field(g).real();
  return PeriodicScalarField::from_real(g.grid(), ratio - C * tF.real().exp());
}

LinearizedOperator::LinearizedOperator(const PeriodicScalarField& phi,
                                       const HermitianMetricField& g)
    : coefficients_(g.grid()) {
  require_same_grid(phi.grid(), g.grid());
  const HermitianMetricField g_tilde = metric_from_potential(g, phi);
  require_positive(g_tilde, "linearized operator");
  const HermitianField adj = adjugate_field(g_tilde);
  const Eigen::ArrayXcd inv_det_g = det_field(g).real().inverse().cast<Complex>();
  for (int j = 0; j < g.dim(); ++j)
    for (int k = 0; k < g.dim(); ++k) coefficients_(j, k) = adj(j, k) * inv_det_g;
}

PeriodicScalarField LinearizedOperator::apply(const PeriodicScalarField& psi) const {
  require_same_grid(psi.grid(), grid());
  require_real(psi, "psi");
  const HermitianField h = complex_hessian_field(psi.real_part());
  Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(grid().size());
  const int n = grid().complex_dim();
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) out += coefficients_(k, j) * h(j, k);
  return PeriodicScalarField(grid(), out.real().cast<Complex>());
}

PeriodicScalarField linearized_apply(const PeriodicScalarField& psi, const PeriodicScalarField& phi,
                                     const HermitianMetricField& g) {
  require_same_grid(psi.grid(), g.grid());
  const HermitianMetricField g_tilde = metric_from_potential(g, phi);
  require_positive(g_tilde, "linearized_apply");
  const Eigen::ArrayXd ratio = det_field(g_tilde).real() / det_field(g).real();
  const PeriodicScalarField lb = laplace_beltrami(g_tilde, psi);
  return PeriodicScalarField::from_real(g.grid(), ratio * lb.real());
}

PeriodicScalarField project_to_range(const PeriodicScalarField& rhs, const HermitianMetricField& g) {
  require_same_grid(rhs.grid(), g.grid());
  const Eigen::ArrayXd det = det_field(g).real();
  const double shift = compensated_mean(rhs.real() * det) / compensated_mean(det);
  return PeriodicScalarField::from_real(rhs.grid(), rhs.real() - shift);
}

// --- Krylov solve ---------------------------------------------------------------

LinearSolveResult solve_linearized(const PeriodicScalarField& rhs, const PeriodicScalarField& phi,
                                   const HermitianMetricField& g, const SolverConfig& cfg) {
  require_same_grid(rhs.grid(), g.grid());
  require_real(rhs, "rhs");
  const Grid& grid = g.grid();
  const LinearizedOperator L(phi, g);

  const Eigen::VectorXd b = as_vector(rhs);
  const double b_sup = b.lpNorm<Eigen::Infinity>();
  LinearSolveResult result{PeriodicScalarField::zeros(grid), 0, 0.0, true};
  if (b_sup == 0.0) return result;

  auto precondition = [&](const Eigen::VectorXd& v) {
    return as_vector(inverse_quarter_laplacian(as_field(grid, v)));
  };
  auto apply_a = [&](const Eigen::VectorXd& v) { return as_vector(L.apply(as_field(grid, v))); };

  const int max_iter = cfg.effective_krylov_max_iter();
  const double target = cfg.krylov_tol * b_sup;
  const Eigen::Index size = b.size();
  // Right preconditioning: x = M^{-1} y, so the iterate stays mean-zero.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(size);
  Eigen::VectorXd r = b;
  double true_sup = b_sup;
  double previous_cycle = std::numeric_limits<double>::infinity();
  int no_progress = 0;

  while (result.iterations < max_iter) {
    const double beta = r.norm();
    const int m = std::min(kGmresRestart, max_iter - result.iterations);
    Eigen::MatrixXd V(size, m + 1);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(m), sn = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(m + 1);
    V.col(0) = r / beta;
    s(0) = beta;
    int k = 0;
    for (; k < m; ++k) {
      Eigen::VectorXd w = apply_a(precondition(V.col(k)));
      // Modified Gram-Schmidt with one reorthogonalization pass.
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= k; ++i) {
          const double h = V.col(i).dot(w);
          H(i, k) += h;
          w -= h * V.col(i);
        }
      }
      H(k + 1, k) = w.norm();
      if (H(k + 1, k) > 0.0) V.col(k + 1) = w / H(k + 1, k);
      for (int i = 0; i < k; ++i) {
        const double tmp = cs(i) * H(i, k) + sn(i) * H(i + 1, k);
        H(i + 1, k) = -sn(i) * H(i, k) + cs(i) * H(i + 1, k);
        H(i, k) = tmp;
      }
      const double denom = std::hypot(H(k, k), H(k + 1, k));
      cs(k) = denom == 0.0 ? 1.0 : H(k, k) / denom;
      sn(k) = denom == 0.0 ? 0.0 : H(k + 1, k) / denom;
      H(k, k) = cs(k) * H(k, k) + sn(k) * H(k + 1, k);
      H(k + 1, k) = 0.0;
      s(k + 1) = -sn(k) * s(k);
      s(k) = cs(k) * s(k);
      ++result.iterations;
      // The 2-norm bounds the sup-norm, so this is a safe inner stop.
      if (std::abs(s(k + 1)) <= 0.5 * target || H(k, k) == 0.0) {
        ++k;
        break;
      }
    }
    const Eigen::VectorXd y =
        H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(s.head(k));
    x += precondition(V.leftCols(k) * y);
    r = b - apply_a(x);
    true_sup = r.lpNorm<Eigen::Infinity>();
    if (true_sup <= target) break;
    if (true_sup > 0.5 * previous_cycle) {
      if (++no_progress >= 2) break;
    } else {
      no_progress = 0;
    }
    previous_cycle = std::min(previous_cycle, true_sup);
  }

  result.psi = as_field(grid, x);
  result.relative_residual = true_sup / b_sup;
  result.converged = true_sup <= target;
  return result;
}

// --- continuation ---------------------------------------------------------------

ContinuityResult continuity_solve(const PeriodicScalarField& F, const HermitianMetricField& g,
                                  const SolverConfig& cfg) {
  cfg.validate();
  require_same_grid(F.grid(), g.grid());
  require_real(F, "F");
  require_positive(g, "continuity_solve background");
  const Grid& grid = g.grid();

  ContinuityResult result{SolveStatus::kConverged, PeriodicScalarField::zeros(grid), {}, 0.0, {}};
  const double excess = band_limit_excess(F, band_limit_cutoff(grid));
  if (excess > kBandLimitWarning) {
    std::ostringstream msg;
    msg << "F is not band-limited to |k| <= " << band_limit_cutoff(grid)
        << " (relative high-mode amplitude " << excess << ")";
    result.warnings.push_back(msg.str());
  }

  PeriodicScalarField phi = PeriodicScalarField::zeros(grid);
  double t = 0.0;
  double dt = cfg.t_step_initial;
  const double cap = std::max(kMaxStepCap, cfg.t_step_initial);
  int fast_streak = 0;

  while (t < 1.0) {
    // If the warm start already solves the final equation, finish there.
    {
      const double r1 = sup(ma_residual(phi, F, 1.0, g));
      if (r1 <= cfg.newton_tol) {
        NewtonOutcome done{true, 0, r1};
        result.trace.push_back(make_step(1.0, done, phi, g));
        t = 1.0;
        break;
      }
    }
    const double t_next = std::min(1.0, t + dt);
    const NewtonOutcome newton = newton_at(phi, F, t_next, g, cfg);
    if (newton.converged) {
      t = t_next;
      result.trace.push_back(make_step(t, newton, phi, g));
      if (newton.iterations < kFastNewtonIters) {
        if (++fast_streak >= 2) {
          dt = std::min(2.0 * dt, cap);
          fast_streak = 0;
        }
      } else {
        fast_streak = 0;
      }
      continue;
    }
    fast_streak = 0;
    dt *= 0.5;
    if (dt < cfg.t_step_min) {
      result.status = SolveStatus::kStepUnderflow;
      break;
    }
  }

  result.last_good_t = t;
  result.phi = std::move(phi);
  return result;
}

// --- estimates ------------------------------------------------------------------

YauReport yau_estimate_report(const PeriodicScalarField& phi, const HermitianMetricField& g) {
  require_same_grid(phi.grid(), g.grid());
  require_real(phi, "phi");
  const Grid& grid = g.grid();
  const PeriodicScalarField real_phi = phi.real_part();
  YauReport y;
  y.sup_phi = sup(real_phi);

  Eigen::ArrayXd grad2 = Eigen::ArrayXd::Zero(grid.size());
  for (int a = 0; a < grid.num_axes(); ++a) grad2 += partial_x(real_phi, a).real().square();
  y.sup_grad_phi = std::sqrt(grad2.maxCoeff());

  const EigenvalueBounds eig = relative_eigenvalues(g, metric_from_potential(g, real_phi));
  y.eig_min = eig.min.minCoeff();
  y.eig_max = eig.max.maxCoeff();

  const HermitianField hess = complex_hessian_field(real_phi);
  for (int i = 0; i < grid.complex_dim(); ++i)
    for (int j = 0; j < grid.complex_dim(); ++j)
      for (int k = 0; k < grid.complex_dim(); ++k)
        y.sup_third = std::max(y.sup_third, sup(partial_z(hess.entry(i, j), k)));
  return y;
}

}  // namespace cma
