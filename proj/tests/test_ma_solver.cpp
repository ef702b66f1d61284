// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cma/errors.hpp"
#include "cma/ma_solver.hpp"
#include "cma/verification.hpp"

namespace cma {
namespace {

constexpr double kPi = std::numbers::pi;

PeriodicScalarField cos_x1(const Grid& grid, double a) {
  return PeriodicScalarField::sample(grid,
                                     [a](std::span<const double> c) { return Complex(a * std::cos(2 * kPi * c[0])); });
}

PeriodicScalarField small_potential(const Grid& grid, std::uint64_t seed, double scale = 0.01) {
  PeriodicScalarField phi = mean_zero_project(random_band_limited(grid, seed, 2));
  phi *= scale;
  return phi;
}

SolverConfig config_for(const Grid& grid) {
  SolverConfig c;
  c.n = grid.complex_dim();
  c.N = grid.points_per_axis();
  return c;
}

TEST(SolverConfig, DefaultsAndValidation) {
  SolverConfig c;
  c.n = 2;
  c.N = 16;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.effective_krylov_max_iter(), 10 * 16 * 16);
  c.krylov_max_iter = 7;
  EXPECT_EQ(c.effective_krylov_max_iter(), 7);

  SolverConfig bad;
  bad.newton_tol = 0.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = SolverConfig{};
  bad.t_step_min = 0.5;
  bad.t_step_initial = 0.1;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = SolverConfig{};
  bad.t_step_initial = 1.5;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = SolverConfig{};
  bad.N = 9;
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(Compatibility, Examples) {
  const Grid grid(2, 8);
  const auto flat = HermitianField::identity(grid);
  EXPECT_DOUBLE_EQ(compatibility_constant(PeriodicScalarField::zeros(grid), flat), 1.0);
  EXPECT_NEAR(compatibility_constant(PeriodicScalarField::constant(grid, 0.7), flat), std::exp(-0.7), 1e-15);
  const auto F = forcing_from_potential(small_potential(grid, 3, 0.02), flat);
  EXPECT_NEAR(compatibility_constant(F, flat), 1.0, 1e-10);
}

TEST(Residual, Examples) {
  const Grid grid(1, 32);
  const auto flat = HermitianField::identity(grid);
  const auto zero = PeriodicScalarField::zeros(grid);
  const auto F = PeriodicScalarField::sample(grid, [](std::span<const double> c) {
    return Complex(0.3 * std::sin(2 * kPi * c[0]) * std::sin(2 * kPi * c[1]));
  });
  EXPECT_EQ(ma_residual(zero, F, 0.0, flat).max_abs(), 0.0);

  const auto phi_star = manufactured_potential_n1(grid);
  EXPECT_LE(ma_residual(phi_star, forcing_from_potential(phi_star, flat), 1.0, flat).max_abs(), 1e-12);

  const double C = compatibility_constant(F, flat);
  const Eigen::ArrayXd expected = 1.0 - C * F.real().exp();
  EXPECT_LE((ma_residual(zero, F, 1.0, flat).real() - expected).abs().maxCoeff(), 1e-15);
}

TEST(Residual, IntegratesToZero) {
  const Grid grid(2, 16);
  const auto flat = HermitianField::identity(grid);
  const auto g = metric_from_potential(flat, small_potential(grid, 7, 0.02));
  const auto F = random_band_limited(grid, 8, 2);
  for (double t : {0.3, 1.0}) {
    const auto r = ma_residual(small_potential(grid, 9), F, t, g);
    EXPECT_LE(std::abs(integrate(r * det_field(g))), 1e-12);
  }
}

TEST(Residual, ThrowsOnNonPositiveMetric) {
  const Grid grid(1, 16);
  const auto flat = HermitianField::identity(grid);
  EXPECT_THROW(ma_residual(cos_x1(grid, 0.2), PeriodicScalarField::zeros(grid), 1.0, flat), SingularMetric);
}

TEST(Linearized, FlatIsQuarterLaplacian) {
  const Grid grid(2, 8);
  const auto flat = HermitianField::identity(grid);
  const auto psi = random_band_limited(grid, 2, 3);
  const auto symbol = apply_symbol(psi, [](std::span<const int> k) {
    double k2 = 0;
    for (int v : k) k2 += v * v;
    return Complex(-kPi * kPi * k2);
  });
  EXPECT_LE(sup_distance(linearized_apply(psi, PeriodicScalarField::zeros(grid), flat), symbol), 1e-12);
}

TEST(Linearized, AnnihilatesConstantsAndIntegratesToZero) {
  const Grid grid(2, 16);
  const auto flat = HermitianField::identity(grid);
  const auto g = metric_from_potential(flat, small_potential(grid, 10, 0.02));
  const auto phi = small_potential(grid, 11);
  EXPECT_LE(linearized_apply(PeriodicScalarField::constant(grid, 3.0), phi, g).max_abs(), 1e-15);
  const auto l = linearized_apply(random_band_limited(grid, 12, 3), phi, g);
  EXPECT_LE(std::abs(integrate(l * det_field(g))), 1e-12);
}

TEST(Linearized, CachedOperatorAgrees) {
  const Grid grid(2, 8);
  const auto flat = HermitianField::identity(grid);
  const auto phi = small_potential(grid, 13);
  const auto psi = random_band_limited(grid, 14, 3);
  EXPECT_LE(sup_distance(LinearizedOperator(phi, flat).apply(psi), linearized_apply(psi, phi, flat)), 1e-13);
}

TEST(Linearized, DirectionalDerivative) {
  // The determinant ratio is a polynomial of degree n in psi, so the central
  // difference of the residual is exact up to roundoff; its logarithm is not,
  // and shows the second-order decay.
  const Grid grid(1, 32);
  const auto flat = HermitianField::identity(grid);
  const auto phi = manufactured_potential_n1(grid);
  const auto psi = small_potential(grid, 15);
  const auto F = PeriodicScalarField::zeros(grid);
  const auto L = linearized_apply(psi, phi, flat);
  const double h = 1e-3;
  const auto fd = (1.0 / (2 * h)) * (ma_residual(phi + h * psi, F, 1.0, flat) - ma_residual(phi - h * psi, F, 1.0, flat));
  EXPECT_LE(sup_distance(fd, L), 1e-9);

  auto log_ratio = [&](const PeriodicScalarField& p) {
    return PeriodicScalarField::from_real(grid, det_field(metric_from_potential(flat, p)).real().log());
  };
  const Eigen::ArrayXd ratio = det_field(metric_from_potential(flat, phi)).real();
  const auto target = PeriodicScalarField::from_real(grid, L.real() / ratio);
  auto err = [&](double step) {
    const auto d = (1.0 / (2 * step)) * (log_ratio(phi + step * psi) - log_ratio(phi - step * psi));
    return sup_distance(d, target);
  };
  EXPECT_GE(std::log10(err(1e-3) / err(1e-4)), 1.9);
}

TEST(ProjectToRange, RemovesWeightedMean) {
  const Grid grid(2, 8);
  const auto g = metric_from_potential(HermitianField::identity(grid), small_potential(grid, 16, 0.02));
  const auto rhs = random_band_limited(grid, 17, 2) + PeriodicScalarField::constant(grid, 2.0);
  const auto p = project_to_range(rhs, g);
  EXPECT_LE(std::abs(integrate(p * det_field(g))), 1e-14);
  EXPECT_LE(sup_distance(project_to_range(p, g), p), 1e-15);
}

TEST(SolveLinearized, ZeroRhs) {
  const Grid grid(1, 16);
  const auto flat = HermitianField::identity(grid);
  const auto r = solve_linearized(PeriodicScalarField::zeros(grid), PeriodicScalarField::zeros(grid), flat,
                                  config_for(grid));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.psi.max_abs(), 0.0);
}

TEST(SolveLinearized, FlatFourierCase) {
  const Grid grid(1, 16);
  const auto flat = HermitianField::identity(grid);
  const auto r = solve_linearized(cos_x1(grid, -kPi * kPi), PeriodicScalarField::zeros(grid), flat,
                                  config_for(grid));
  EXPECT_TRUE(r.converged);
  EXPECT_LE(sup_distance(r.psi, cos_x1(grid, 1.0)), 1e-12);
}

TEST(SolveLinearized, RandomRhsByApplyingOperator) {
  const Grid grid(1, 32);
  const auto flat = HermitianField::identity(grid);
  const auto phi = manufactured_potential_n1(grid);
  const auto g_tilde = metric_from_potential(flat, phi);
  const auto rhs = project_to_range(random_band_limited(grid, 18, 4), flat);
  const SolverConfig cfg = config_for(grid);
  const LinearSolveResult r = solve_linearized(rhs, phi, flat, cfg);
  ASSERT_TRUE(r.converged);
  EXPECT_LE(sup_distance(linearized_apply(r.psi, phi, flat), rhs), cfg.krylov_tol * rhs.max_abs());
  EXPECT_LE(std::abs(integrate(r.psi)), 1e-14);
  EXPECT_LE(r.relative_residual, cfg.krylov_tol);
  (void)g_tilde;
}

TEST(Continuity, ZeroForcing) {
  const Grid grid(2, 8);
  const auto r = continuity_solve(PeriodicScalarField::zeros(grid), HermitianField::identity(grid), config_for(grid));
  ASSERT_TRUE(r.converged());
  EXPECT_LE(r.phi.max_abs(), 1e-10);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].t, 1.0);
  EXPECT_LE(r.trace[0].residual_sup, 1e-11);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Continuity, TraceInvariantsAndGauge) {
  const Grid grid(1, 32);
  const auto flat = HermitianField::identity(grid);
  const auto phi_star = manufactured_potential_n1(grid);
  const auto F = forcing_from_potential(phi_star, flat);
  const SolverConfig cfg = config_for(grid);
  const ContinuityResult r = continuity_solve(F, flat, cfg);
  ASSERT_TRUE(r.converged());
  ASSERT_GE(r.trace.size(), 2u);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GT(r.trace[i].t, r.trace[i - 1].t);
  EXPECT_EQ(r.trace.back().t, 1.0);
  for (const TraceStep& s : r.trace) {
    EXPECT_GT(s.eig_min, 0.0);
    EXPECT_LE(s.residual_sup, cfg.newton_tol);
  }
  EXPECT_LE(std::abs(integrate(r.phi)), 1e-13);
  EXPECT_LE(sup_distance(r.phi, phi_star), 1e-8);
  EXPECT_LE(ma_residual(r.phi, F, 1.0, flat).max_abs(), cfg.newton_tol);
  EXPECT_GE(positivity_check(metric_from_potential(flat, r.phi)).min_eig, cfg.damping_eig_floor);
}

TEST(Continuity, StepUnderflowReportsLastGoodT) {
  // n=1 is linear in phi and one Newton step always suffices; n=2 is not.
  const Grid grid(2, 8);
  const auto F = PeriodicScalarField::sample(grid, [](std::span<const double> c) {
    return Complex(6.0 * std::sin(2 * kPi * c[0]) * std::sin(2 * kPi * c[2]));
  });
  SolverConfig cfg = config_for(grid);
  cfg.newton_max_iter = 1;
  cfg.t_step_initial = 0.5;
  cfg.t_step_min = 0.1;
  const ContinuityResult r = continuity_solve(F, HermitianField::identity(grid), cfg);
  EXPECT_FALSE(r.converged());
  EXPECT_LT(r.last_good_t, 1.0);
  if (!r.trace.empty()) EXPECT_EQ(r.trace.back().t, r.last_good_t);
}

TEST(Continuity, WarnsOnUnderresolvedForcing) {
  const Grid grid(1, 16);
  const auto F = PeriodicScalarField::sample(
      grid, [](std::span<const double> c) { return Complex(0.01 * std::cos(2 * kPi * 7 * c[0])); });
  const ContinuityResult r = continuity_solve(F, HermitianField::identity(grid), config_for(grid));
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_EQ(band_limit_cutoff(grid), 4);
}

TEST(Continuity, RejectsComplexForcing) {
  const Grid grid(1, 8);
  EXPECT_THROW(continuity_solve(PeriodicScalarField::constant(grid, Complex(0, 1)), HermitianField::identity(grid),
                                config_for(grid)),
               NotRealField);
}

TEST(Yau, ZeroPotential) {
  const Grid grid(2, 8);
  const YauReport y = yau_estimate_report(PeriodicScalarField::zeros(grid), HermitianField::identity(grid));
  EXPECT_EQ(y.sup_phi, 0.0);
  EXPECT_EQ(y.sup_grad_phi, 0.0);
  EXPECT_EQ(y.sup_third, 0.0);
  EXPECT_EQ(y.eig_min, 1.0);
  EXPECT_EQ(y.eig_max, 1.0);
}

TEST(Yau, CosineClosedFormAndLinearity) {
  const Grid grid(1, 32);
  const auto flat = HermitianField::identity(grid);
  const double a = 0.02;
  const YauReport y = yau_estimate_report(cos_x1(grid, a), flat);
  EXPECT_NEAR(y.sup_phi, a, 1e-15);
  EXPECT_NEAR(y.eig_min, 1 - a * kPi * kPi, 1e-13);
  EXPECT_NEAR(y.eig_max, 1 + a * kPi * kPi, 1e-13);
  EXPECT_NEAR(y.sup_grad_phi, 2 * kPi * a, 1e-13);
  // |d_z of phi_{z zbar}| = pi^3 a |sin|.
  EXPECT_NEAR(y.sup_third, kPi * kPi * kPi * a, 1e-12);

  const YauReport y2 = yau_estimate_report(cos_x1(grid, 2 * a), flat);
  EXPECT_DOUBLE_EQ(y2.sup_phi, 2 * y.sup_phi);
  EXPECT_NEAR(y2.sup_grad_phi, 2 * y.sup_grad_phi, 1e-14);
  EXPECT_NEAR(y2.sup_third, 2 * y.sup_third, 1e-12);
  EXPECT_NEAR(1 - y2.eig_min, 2 * (1 - y.eig_min), 1e-13);
}

}  // namespace
}  // namespace cma
