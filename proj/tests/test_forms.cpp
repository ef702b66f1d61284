// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cma/errors.hpp"
#include "cma/forms.hpp"
#include "cma/verification.hpp"

namespace cma {
namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

PqForm basis(const Grid& grid, int p, int q, IndexMask J, IndexMask K, Complex c = 1.0) {
  PqForm f(grid, p, q);
  f.component(J, K).setConstant(c);
  return f;
}

// Random form of bidegree (p, q) with band-limited coefficients.
PqForm random_form(const Grid& grid, int p, int q, std::uint64_t seed) {
  PqForm f(grid, p, q);
  for (IndexMask J : f.holomorphic_indices()) {
    for (IndexMask K : f.antiholomorphic_indices()) {
      f.component(J, K) = random_band_limited(grid, seed, 3).values() +
                          kI * random_band_limited(grid, seed + 1000, 3).values();
      ++seed;
    }
  }
  return f;
}

PeriodicScalarField sin_x1(const Grid& grid) {
  return PeriodicScalarField::sample(grid, [](std::span<const double> c) { return Complex(std::sin(2 * kPi * c[0])); });
}

TEST(PqForm, ComponentCounts) {
  const Grid grid(2, 8);
  EXPECT_EQ(PqForm(grid, 0, 0).num_components(), 1u);
  EXPECT_EQ(PqForm(grid, 1, 0).num_components(), 2u);
  EXPECT_EQ(PqForm(grid, 1, 1).num_components(), 4u);
  EXPECT_EQ(PqForm(grid, 2, 1).num_components(), 2u);
  EXPECT_EQ(PqForm(grid, 2, 2).num_components(), 1u);
  EXPECT_EQ(PqForm(grid, 3, 0).num_components(), 0u);
}

TEST(PqForm, IndexSetsAreLexicographic) {
  EXPECT_EQ(index_sets(2, 1), (std::vector<IndexMask>{0b01, 0b10}));
  EXPECT_EQ(index_sets(2, 2), (std::vector<IndexMask>{0b11}));
  EXPECT_EQ(index_sets(2, 0), (std::vector<IndexMask>{0}));
}

TEST(Del, ConstantGivesZero) {
  const Grid grid(2, 8);
  const auto c = PqForm::scalar(PeriodicScalarField::constant(grid, 2.0));
  EXPECT_EQ(del(c).max_abs(), 0.0);
  EXPECT_EQ(del(c).degree(), 1);
}

TEST(Del, SquaresVanishOnRandomForms) {
  const Grid grid(2, 16);
  for (auto [p, q] : {std::pair{0, 0}, std::pair{1, 0}, std::pair{0, 1}, std::pair{1, 1}}) {
    const PqForm a = random_form(grid, p, q, 40 + p * 2 + q);
    EXPECT_LE(del(del(a)).max_abs(), 1e-12);
    EXPECT_LE(delbar(delbar(a)).max_abs(), 1e-12);
    EXPECT_LE((del(delbar(a)) + delbar(del(a))).max_abs(), 1e-12);
  }
}

TEST(Del, BeyondTopDegreeIsEmpty) {
  const Grid grid(1, 8);
  const PqForm a = random_form(grid, 1, 0, 1);
  EXPECT_EQ(del(a).num_components(), 0u);
  EXPECT_EQ(del(a).max_abs(), 0.0);
}

TEST(ExteriorD, SineClosedForm) {
  const Grid grid(1, 16);
  const auto [h, a] = exterior_d(PqForm::scalar(sin_x1(grid)));
  const auto expected =
      PeriodicScalarField::sample(grid, [](std::span<const double> c) { return Complex(kPi * std::cos(2 * kPi * c[0])); });
  EXPECT_LE(sup_distance(PeriodicScalarField(grid, h.component(1, 0)), expected), 1e-12);
  EXPECT_LE(sup_distance(PeriodicScalarField(grid, a.component(0, 1)), expected), 1e-12);
}

TEST(ExteriorD, SquareVanishes) {
  const Grid grid(2, 16);
  Form f(PqForm::scalar(random_band_limited(grid, 3, 3)));
  f += Form(random_form(grid, 1, 0, 4));
  f += Form(random_form(grid, 0, 1, 5));
  EXPECT_LE(exterior_d(exterior_d(f)).max_abs(), 1e-12);
}

TEST(ExteriorD, KahlerFormClosedForPotentialMetrics) {
  const Grid grid(2, 16);
  const auto flat = HermitianField::identity(grid);
  EXPECT_EQ(exterior_d(Form(kahler_form(flat))).max_abs(), 0.0);
  PeriodicScalarField phi = random_band_limited(grid, 12, 2);
  phi *= 0.02;
  EXPECT_LE(exterior_d(Form(kahler_form(metric_from_potential(flat, phi)))).max_abs(), 1e-12);

  // A conformal metric on n = 2 is not Kahler.
  const auto lambda = PeriodicScalarField::sample(
      grid, [](std::span<const double> c) { return Complex(2 + std::sin(2 * kPi * c[0])); });
  EXPECT_GT(exterior_d(Form(kahler_form(HermitianField::conformal(lambda)))).max_abs(), 0.1);
}

TEST(DC, ConstantAndRealInput) {
  const Grid grid(1, 8);
  EXPECT_EQ(d_c(PeriodicScalarField::constant(grid, 3.0)).max_abs(), 0.0);
  EXPECT_THROW(d_c(PeriodicScalarField::constant(grid, kI)), NotRealField);
}

TEST(DC, SineRotatesToDy) {
  // d^c sin(2 pi x) = 2 pi cos(2 pi x) dy: with dz = dx + i dy the dx coefficient
  // is c_z + c_zbar and the dy coefficient is i (c_z - c_zbar).
  const Grid grid(1, 16);
  const Form dc = d_c(sin_x1(grid));
  const Eigen::ArrayXcd cz = dc.piece(1, 0).component(1, 0);
  const Eigen::ArrayXcd czb = dc.piece(0, 1).component(0, 1);
  EXPECT_LE((cz + czb).abs().maxCoeff(), 1e-12);
  const auto expected = PeriodicScalarField::sample(
      grid, [](std::span<const double> c) { return Complex(2 * kPi * std::cos(2 * kPi * c[0])); });
  EXPECT_LE(sup_distance(PeriodicScalarField(grid, kI * (cz - czb)), expected), 1e-12);
}

TEST(DC, DdcIsTwoIDelDelbar) {
  for (int n : {1, 2}) {
    const Grid grid(n, 16);
    const auto u = random_band_limited(grid, 60 + n, 3);
    const Form ddc = exterior_d(d_c(u));
    const PqForm expected = Complex(0, 2) * del(delbar(PqForm::scalar(u)));
    EXPECT_LE((ddc.piece(1, 1) - expected).max_abs(), 1e-12);
    EXPECT_LE(ddc.piece(2, 0).max_abs(), 1e-12);
    EXPECT_LE(ddc.piece(0, 2).max_abs(), 1e-12);
    EXPECT_LE(real_11_deviation(ddc.piece(1, 1)), 1e-12);
  }
}

TEST(Wedge, DzWedgeDzVanishes) {
  const Grid grid(2, 8);
  const PqForm dz1 = basis(grid, 1, 0, 0b01, 0);
  EXPECT_EQ(wedge(dz1, dz1).max_abs(), 0.0);
  const PqForm dz2 = basis(grid, 1, 0, 0b10, 0);
  EXPECT_EQ(wedge(dz1, dz2).component(0b11, 0)(0), Complex(1.0));
  EXPECT_EQ(wedge(dz2, dz1).component(0b11, 0)(0), Complex(-1.0));
}

TEST(Wedge, ProductOfAreaForms) {
  const Grid grid(2, 8);
  const PqForm a = basis(grid, 1, 1, 0b01, 0b01, kI);
  const PqForm b = basis(grid, 1, 1, 0b10, 0b10, kI);
  const PqForm ab = wedge(a, b);
  // i sum dz^j ^ dzbar^j squared, halved.
  const PqForm omega = 2.0 * kahler_form(HermitianField::identity(grid));
  const PqForm half_square = 0.5 * wedge(omega, omega);
  EXPECT_LE((ab - half_square).max_abs(), 1e-15);
  EXPECT_NEAR(integrate_top(ab).real(), 4.0, 1e-15);
}

TEST(Wedge, GradedCommutativity) {
  const Grid grid(2, 8);
  const PqForm a = random_form(grid, 1, 0, 1);
  const PqForm b = random_form(grid, 0, 1, 2);
  const PqForm c = random_form(grid, 1, 1, 3);
  EXPECT_LE((wedge(a, b) + wedge(b, a)).max_abs(), 1e-13);
  EXPECT_LE((wedge(a, c) - wedge(c, a)).max_abs(), 1e-13);
  EXPECT_LE((wedge(b, c) - wedge(c, b)).max_abs(), 1e-13);
  const PqForm s = PqForm::scalar(random_band_limited(grid, 4, 2));
  EXPECT_LE((wedge(s, c) - wedge(c, s)).max_abs(), 1e-13);
}

TEST(Wedge, Associative) {
  const Grid grid(2, 8);
  const PqForm a = random_form(grid, 1, 0, 5);
  const PqForm b = random_form(grid, 0, 1, 6);
  const PqForm c = random_form(grid, 1, 0, 7);
  EXPECT_LE((wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).max_abs(), 1e-13);
}

TEST(Wedge, OverflowThrowsForHomogeneousForms) {
  const Grid grid(1, 8);
  EXPECT_THROW(wedge(basis(grid, 1, 0, 1, 0), basis(grid, 1, 1, 1, 1)), InvalidArgument);
  // The inhomogeneous product just drops the overflow.
  EXPECT_EQ(wedge(Form(basis(grid, 1, 0, 1, 0)), Form(basis(grid, 1, 1, 1, 1))).max_abs(), 0.0);
}

TEST(IntegrateTop, FlatVolumes) {
  const Grid g1(1, 8);
  EXPECT_NEAR(integrate_top(kahler_form(HermitianField::identity(g1))).real(), 1.0, 1e-15);
  EXPECT_NEAR(integrate_top(basis(g1, 1, 1, 1, 1)).imag(), -2.0, 1e-15);
  const Grid g2(2, 8);
  const PqForm omega = kahler_form(HermitianField::identity(g2));
  const Complex v = integrate_top(wedge(omega, omega));
  EXPECT_NEAR(v.real(), 2.0, 1e-15);
  EXPECT_NEAR(v.imag(), 0.0, 1e-15);
}

TEST(IntegrateTop, CohomologyInvariance) {
  for (int n : {1, 2}) {
    const Grid grid(n, 16);
    const auto flat = HermitianField::identity(grid);
    PeriodicScalarField phi = random_band_limited(grid, 90 + n, 3);
    phi *= 0.02;
    const PqForm omega = kahler_form(metric_from_potential(flat, phi));
    const PqForm top = n == 1 ? omega : wedge(omega, omega);
    EXPECT_NEAR(integrate_top(top).real(), n == 1 ? 1.0 : 2.0, 1e-10);
  }
}

TEST(IntegrateTop, WrongBidegreeThrows) {
  const Grid grid(2, 8);
  EXPECT_THROW(integrate_top(PqForm(grid, 1, 1)), InvalidArgument);
}

TEST(KahlerForm, IsReal11) {
  const Grid grid(2, 8);
  PeriodicScalarField phi = random_band_limited(grid, 13, 2);
  phi *= 0.02;
  EXPECT_LE(real_11_deviation(kahler_form(metric_from_potential(HermitianField::identity(grid), phi))), 1e-12);
  PqForm not_real(grid, 1, 1);
  not_real.component(0b01, 0b10).setConstant(1.0);
  EXPECT_GT(real_11_deviation(not_real), 0.5);
}

TEST(Uniqueness, TrivialAndGauge) {
  const Grid grid(2, 8);
  const auto flat = HermitianField::identity(grid);
  PeriodicScalarField phi = random_band_limited(grid, 14, 2);
  phi *= 0.02;
  EXPECT_EQ(uniqueness_functional(phi, phi, flat), 0.0);
  EXPECT_LE(std::abs(uniqueness_functional(phi + PeriodicScalarField::constant(grid, 5.0), phi, flat)), 1e-12);
}

TEST(Uniqueness, PositiveOnNonConstantDifference) {
  const Grid grid(2, 8);
  const auto flat = HermitianField::identity(grid);
  PeriodicScalarField a = random_band_limited(grid, 15, 2);
  PeriodicScalarField b = random_band_limited(grid, 16, 2);
  a *= 0.02;
  b *= 0.02;
  EXPECT_GT(uniqueness_functional(a, b, flat), 1e-6);
}

TEST(Uniqueness, N1MatchesDirichletEnergy) {
  // For n = 1 the functional is the Dirichlet energy of u = phi1 - phi2.
  const Grid grid(1, 32);
  const auto flat = HermitianField::identity(grid);
  const double a = 0.01;
  const auto phi1 = PeriodicScalarField::sample(grid, [a](std::span<const double> c) {
    return Complex(a * std::cos(2 * kPi * c[0]) * std::cos(2 * kPi * c[1]));
  });
  const auto zero = PeriodicScalarField::zeros(grid);
  EXPECT_NEAR(uniqueness_functional(phi1, zero, flat), 2 * kPi * kPi * a * a, 1e-15);

  // Random difference against a pointwise finite-difference gradient.
  const Grid fine(1, 64);
  PeriodicScalarField p = random_band_limited(fine, 17, 2);
  PeriodicScalarField q = random_band_limited(fine, 18, 2);
  p *= 0.01;
  q *= 0.01;
  const auto u = p - q;
  const auto ux = finite_difference_oracle(u, 0, 8);
  const auto uy = finite_difference_oracle(u, 1, 8);
  const double energy = (ux.values().abs2() + uy.values().abs2()).mean();
  EXPECT_NEAR(uniqueness_functional(p, q, HermitianField::identity(fine)), energy, 1e-7 * energy);
}

TEST(Uniqueness, RejectsInadmissible) {
  const Grid grid(1, 16);
  const auto bad = PeriodicScalarField::sample(
      grid, [](std::span<const double> c) { return Complex(0.2 * std::cos(2 * kPi * c[0])); });
  EXPECT_THROW(uniqueness_functional(bad, PeriodicScalarField::zeros(grid), HermitianField::identity(grid)),
               SingularMetric);
}

}  // namespace
}  // namespace cma
