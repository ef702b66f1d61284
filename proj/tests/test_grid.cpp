// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cma/errors.hpp"
#include "cma/grid.hpp"
#include "cma/verification.hpp"

namespace cma {
namespace {

constexpr double kPi = std::numbers::pi;

PeriodicScalarField sample(const Grid& grid, double (*fn)(std::span<const double>)) {
  return PeriodicScalarField::sample(grid, [fn](std::span<const double> c) { return Complex(fn(c)); });
}

TEST(Grid, ShapeAndCoordinates) {
  const Grid g(2, 8);
  EXPECT_EQ(g.size(), 8 * 8 * 8 * 8);
  EXPECT_EQ(g.num_axes(), 4);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.125);
  // Last axis fastest.
  EXPECT_EQ(g.stride(3), 1);
  EXPECT_EQ(g.stride(0), 512);
  EXPECT_DOUBLE_EQ(g.coordinate(1, 3), 0.125);
  EXPECT_DOUBLE_EQ(g.coordinate(512, 0), 0.125);
  EXPECT_EQ(g.wavenumber(4), -4);
  EXPECT_EQ(g.wavenumber(3), 3);
}

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(Grid(1, 7), InvalidArgument);
  EXPECT_THROW(Grid(1, 6), InvalidArgument);
  EXPECT_THROW(Grid(3, 8), InvalidArgument);
  EXPECT_THROW(Grid(0, 8), InvalidArgument);
}

TEST(Field, RealFlagTolerance) {
  const Grid g(1, 8);
  auto f = PeriodicScalarField::constant(g, Complex(100.0, 5e-11));
  EXPECT_TRUE(f.is_real());
  f = PeriodicScalarField::constant(g, Complex(0.5, 5e-12));
  EXPECT_FALSE(f.is_real());
}

TEST(Field, GridMismatchThrows) {
  auto a = PeriodicScalarField::zeros(Grid(1, 8));
  const auto b = PeriodicScalarField::zeros(Grid(1, 16));
  EXPECT_THROW(a += b, GridMismatch);
}

TEST(PartialX, Constant) {
  const Grid g(1, 16);
  EXPECT_EQ(partial_x(PeriodicScalarField::constant(g, 1.0), 0).max_abs(), 0.0);
}

TEST(PartialX, SineClosedForm) {
  const Grid g(1, 32);
  const auto f = sample(g, [](std::span<const double> c) { return std::sin(2 * kPi * c[0]); });
  const auto df = sample(g, [](std::span<const double> c) { return 2 * kPi * std::cos(2 * kPi * c[0]); });
  EXPECT_LE(sup_distance(partial_x(f, 0), df), 1e-12);
}

TEST(PartialX, MatchesFiniteDifferenceOracle) {
  // Band-limited field: the gap is the O(h^8) truncation of the stencil.
  for (int axis = 0; axis < 2; ++axis) {
    double gap[2];
    for (int i = 0; i < 2; ++i) {
      const Grid g(1, 32 << i);
      const auto f = random_band_limited(g, 11, 2);
      gap[i] = sup_distance(partial_x(f, axis), finite_difference_oracle(f, axis, 8));
    }
    EXPECT_LE(gap[0], 1e-5) << "axis " << axis;
    EXPECT_LE(gap[1], 5e-8) << "axis " << axis;
    EXPECT_GE(gap[0] / gap[1], 200.0) << "axis " << axis;
  }
}

TEST(PartialX, RejectsBadAxis) {
  const auto f = PeriodicScalarField::zeros(Grid(1, 8));
  EXPECT_THROW(partial_x(f, 2), InvalidArgument);
  EXPECT_THROW(partial_x(f, -1), InvalidArgument);
}

TEST(PartialX, NyquistModeZeroedForFirstDerivatives) {
  const Grid g(1, 8);
  const auto f = sample(g, [](std::span<const double> c) { return std::cos(8 * kPi * c[0]); });
  EXPECT_LE(partial_x(f, 0).max_abs(), 1e-12);
  // Kept for pure second derivatives with symbol -(pi N)^2.
  const auto fxx = partial_xx(f, 0);
  EXPECT_LE(sup_distance(fxx, -(8 * kPi) * (8 * kPi) * f), 1e-9);
}

TEST(PartialX, Commute) {
  const Grid g(2, 16);
  const auto f = random_band_limited(g, 3, 3);
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      const auto ab = partial_x(partial_x(f, b), a);
      const auto ba = partial_x(partial_x(f, a), b);
      EXPECT_LE(sup_distance(ab, ba), 1e-12 * std::max(1.0, ab.max_abs()));
    }
  }
}

TEST(PartialX, IntegratesToZero) {
  const Grid g(2, 8);
  const auto f = random_band_limited(g, 5, 3);
  for (int a = 0; a < 4; ++a) EXPECT_LE(std::abs(integrate(partial_x(f, a))), 1e-13);
}

TEST(PartialX, SpectralConvergence) {
  // d/dx exp(sin 2 pi x) is not band-limited; error falls faster than any power.
  std::vector<double> err;
  for (int N : {8, 16, 32}) {
    const Grid g(1, N);
    const auto f = sample(g, [](std::span<const double> c) { return std::exp(std::sin(2 * kPi * c[0])); });
    const auto df = sample(g, [](std::span<const double> c) {
      return 2 * kPi * std::cos(2 * kPi * c[0]) * std::exp(std::sin(2 * kPi * c[0]));
    });
    err.push_back(sup_distance(partial_x(f, 0), df));
  }
  const double order1 = std::log2(err[0] / err[1]);
  EXPECT_GT(order1, 8.0);
  // Second halving gains more than the first until roundoff.
  EXPECT_LE(err[2], 1e-12);
  EXPECT_GT(std::log2(err[1] / std::max(err[2], 1e-300)), order1);
}

TEST(Wirtinger, SineClosedForm) {
  const Grid g(1, 16);
  const auto f = sample(g, [](std::span<const double> c) { return std::sin(2 * kPi * c[0]); });
  const auto expected = sample(g, [](std::span<const double> c) { return kPi * std::cos(2 * kPi * c[0]); });
  EXPECT_LE(sup_distance(partial_z(f, 0), expected), 1e-12);
  EXPECT_LE(sup_distance(partial_zbar(f, 0), expected), 1e-12);
}

TEST(Wirtinger, ImaginaryDirection) {
  const Grid g(1, 16);
  const auto f = sample(g, [](std::span<const double> c) { return std::sin(2 * kPi * c[1]); });
  const auto dz = partial_z(f, 0);
  for (Eigen::Index p = 0; p < g.size(); ++p) {
    EXPECT_NEAR(dz.values()(p).real(), 0.0, 1e-12);
    EXPECT_NEAR(dz.values()(p).imag(), -kPi * std::cos(2 * kPi * g.coordinate(p, 1)), 1e-12);
  }
}

TEST(Wirtinger, ConstantAndIndexRange) {
  const Grid g(2, 8);
  const auto one = PeriodicScalarField::constant(g, 1.0);
  EXPECT_EQ(partial_z(one, 1).max_abs(), 0.0);
  EXPECT_EQ(partial_zbar(one, 0).max_abs(), 0.0);
  EXPECT_THROW(partial_z(one, 2), InvalidArgument);
  EXPECT_THROW(partial_zbar(one, -1), InvalidArgument);
}

TEST(Wirtinger, MixedEqualsQuarterLaplacian) {
  const Grid g(2, 16);
  const auto f = random_band_limited(g, 9, 3);
  for (int j = 0; j < 2; ++j) {
    const auto composed = partial_z(partial_zbar(f, j), j);
    const auto lap = 0.25 * (partial_xx(f, 2 * j) + partial_xx(f, 2 * j + 1));
    EXPECT_LE(sup_distance(composed, lap), 1e-12);
    EXPECT_LE(sup_distance(complex_hessian(f, j, j), lap), 1e-12);
  }
  EXPECT_LE(sup_distance(0.25 * flat_laplacian(f), complex_hessian(f, 0, 0) + complex_hessian(f, 1, 1)), 1e-12);
}

TEST(Wirtinger, ConjugationIdentity) {
  const Grid g(1, 16);
  auto f = random_band_limited(g, 4, 3);
  f += Complex(0, 1) * random_band_limited(g, 5, 3);
  EXPECT_LE(sup_distance(partial_z(f.conj(), 0), partial_zbar(f, 0).conj()), 1e-13);
}

TEST(Wirtinger, GradientMatchesSingleDerivatives) {
  const Grid g(2, 8);
  const auto f = random_band_limited(g, 2, 3);
  const auto dz = wirtinger_gradient(f, false);
  const auto dzb = wirtinger_gradient(f, true);
  ASSERT_EQ(dz.size(), 2u);
  for (int j = 0; j < 2; ++j) {
    EXPECT_LE(sup_distance(dz[j], partial_z(f, j)), 1e-15);
    EXPECT_LE(sup_distance(dzb[j], partial_zbar(f, j)), 1e-15);
  }
}

TEST(Integrate, Examples) {
  const Grid g(1, 16);
  EXPECT_DOUBLE_EQ(integrate(PeriodicScalarField::constant(g, 1.0)).real(), 1.0);
  EXPECT_LE(std::abs(integrate(sample(g, [](std::span<const double> c) { return std::cos(2 * kPi * c[0]); }))),
            1e-15);
  const auto f = sample(g, [](std::span<const double> c) {
    return 2 + std::cos(2 * kPi * c[0]) * std::cos(2 * kPi * c[1]);
  });
  EXPECT_NEAR(integrate(f).real(), 2.0, 1e-15);
}

TEST(MeanZeroProject, Examples) {
  const Grid g(1, 16);
  EXPECT_LE(mean_zero_project(PeriodicScalarField::constant(g, 5.0)).max_abs(), 1e-15);
  const auto f = sample(g, [](std::span<const double> c) { return 3 + std::sin(2 * kPi * c[1]); });
  const auto s = sample(g, [](std::span<const double> c) { return std::sin(2 * kPi * c[1]); });
  EXPECT_LE(sup_distance(mean_zero_project(f), s), 1e-15);
}

TEST(MeanZeroProject, IdempotentAndMeanZero) {
  const Grid g(2, 8);
  const auto f = random_band_limited(g, 6, 3) + PeriodicScalarField::constant(g, 0.7);
  const auto p = mean_zero_project(f);
  EXPECT_LE(std::abs(integrate(p)), 1e-14);
  EXPECT_LE(sup_distance(mean_zero_project(p), p), 1e-15);
}

TEST(MeanZeroProject, RejectsComplex) {
  const Grid g(1, 8);
  EXPECT_THROW(mean_zero_project(PeriodicScalarField::constant(g, Complex(0, 1))), NotRealField);
}

TEST(Transforms, RoundTrip) {
  const Grid g(2, 8);
  const auto f = random_band_limited(g, 1, 3);
  Eigen::ArrayXcd data = f.values();
  fft_forward(g, data);
  fft_inverse(g, data);
  EXPECT_LE((data - f.values()).abs().maxCoeff(), 1e-15);
}

TEST(Transforms, ThreadCountDoesNotChangeResults) {
  const Grid g(2, 16);
  const auto f = random_band_limited(g, 1, 4);
  const auto one = partial_x(f, 2);
  set_num_threads(2);
  const auto two = partial_x(f, 2);
  set_num_threads(1);
  EXPECT_LE(sup_distance(one, two), 1e-14);
  EXPECT_EQ(num_threads(), 1);
}

TEST(InverseQuarterLaplacian, InvertsOnMeanZero) {
  const Grid g(1, 16);
  const auto f = mean_zero_project(random_band_limited(g, 12, 4));
  EXPECT_LE(sup_distance(0.25 * flat_laplacian(inverse_quarter_laplacian(f)), f), 1e-13);
}

TEST(BandLimit, DetectsHighModes) {
  const Grid g(1, 16);
  const auto low = sample(g, [](std::span<const double> c) { return std::cos(2 * kPi * 3 * c[0]); });
  const auto high = sample(g, [](std::span<const double> c) { return std::cos(2 * kPi * 6 * c[0]); });
  EXPECT_LE(band_limit_excess(low, 4), 1e-14);
  EXPECT_NEAR(band_limit_excess(high, 4), 1.0, 1e-12);
}

}  // namespace
}  // namespace cma
