// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <vector>

#include "cma/grid.hpp"

namespace cma {

/// Per-point n x n complex matrix field, stored entry-by-entry so pointwise
/// algebra stays as Eigen array expressions.
///
/// Entry (j, k) is the coefficient of dz^j (x) dzbar^k, i.e. g_{j kbar}.
class HermitianField {
 public:
  explicit HermitianField(const Grid& grid);

  /// The flat metric delta_{jk}.
  static HermitianField identity(const Grid& grid);
  /// scale(x) * identity, scale real and positive.
  static HermitianField conformal(const PeriodicScalarField& scale);

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.complex_dim(); }

  const Eigen::ArrayXcd& operator()(int j, int k) const { return entries_[j * dim() + k]; }
  Eigen::ArrayXcd& operator()(int j, int k) { return entries_[j * dim() + k]; }
  PeriodicScalarField entry(int j, int k) const { return {grid_, (*this)(j, k)}; }

  /// Largest |g_{j kbar} - conj(g_{k jbar})| over the grid.
  double hermitian_deviation() const;
  /// Replaces each entry by the Hermitian average (g + g^H) / 2.
  void symmetrize();

  /// Sup-norm over all entries and points of a - b.
  friend double sup_distance(const HermitianField& a, const HermitianField& b);

  HermitianField& operator+=(const HermitianField& other);
  HermitianField& operator-=(const HermitianField& other);
  friend HermitianField operator+(HermitianField a, const HermitianField& b) { return a += b; }
  friend HermitianField operator-(HermitianField a, const HermitianField& b) { return a -= b; }

 private:
  Grid grid_;
  std::vector<Eigen::ArrayXcd> entries_;
};

using HermitianMetricField = HermitianField;
using RicciField = HermitianField;

/// Holomorphic Christoffel symbols Gamma_{jk}^l, symmetric in (j, k).
class ChristoffelField {
 public:
  explicit ChristoffelField(const Grid& grid);

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.complex_dim(); }

  const Eigen::ArrayXcd& operator()(int j, int k, int l) const {
    return components_[(j * dim() + k) * dim() + l];
  }
  Eigen::ArrayXcd& operator()(int j, int k, int l) {
    return components_[(j * dim() + k) * dim() + l];
  }

  /// sum_k Gamma_{jk}^k.
  PeriodicScalarField trace(int j) const;
  /// Largest |Gamma_{jk}^l - Gamma_{kj}^l|.
  double symmetry_deviation() const;

 private:
  Grid grid_;
  std::vector<Eigen::ArrayXcd> components_;
};

/// g~_{j kbar} = g0_{j kbar} + d^2 phi / dz^j dzbar^k, symmetrized.
HermitianMetricField metric_from_potential(const HermitianMetricField& g0,
                                           const PeriodicScalarField& phi);

/// Same, without the final symmetrization (to measure roundoff asymmetry).
HermitianMetricField metric_from_potential_unsymmetrized(const HermitianMetricField& g0,
                                                         const PeriodicScalarField& phi);

struct PositivityReport {
  bool is_positive = false;
  double min_eig = 0.0;
  Eigen::Index argmin_point = 0;
};

PositivityReport positivity_check(const HermitianMetricField& g);

/// Pointwise smallest and largest eigenvalue (closed form, n <= 2).
struct EigenvalueBounds {
  Eigen::ArrayXd min;
  Eigen::ArrayXd max;
};
EigenvalueBounds pointwise_eigenvalues(const HermitianField& g);

/// Pointwise eigenvalue range of g^{-1} g~ (g~ measured in a g-orthonormal frame).
EigenvalueBounds relative_eigenvalues(const HermitianMetricField& g, const HermitianMetricField& g_tilde);

/// Pointwise determinant; real for Hermitian input (imaginary roundoff dropped).
PeriodicScalarField det_field(const HermitianField& g);

/// Pointwise inverse. Throws SingularMetric at the first point with
/// |det| below 1e-300 relative scale or non-finite entries.
HermitianField inverse_field(const HermitianField& g);

/// Pointwise adjugate: det(g) * g^{-1}.
HermitianField adjugate_field(const HermitianField& g);

/// Largest |(g * h)(x) - I| over entries and points.
double product_identity_deviation(const HermitianField& g, const HermitianField& h);

ChristoffelField christoffel(const HermitianMetricField& g);

/// R_{j kbar} = -d_j d_kbar log det g.
RicciField ricci_form(const HermitianMetricField& g);

/// (1/2pi) * integral of 2 R_{1 1bar} over the torus. Only n = 1.
double first_chern_integral(const HermitianMetricField& g);

/// Integral of det g over the unit torus in the real coordinate measure.
double volume(const HermitianMetricField& g);

/// sum_{j,k} g^{j kbar} d_j d_kbar u (flat metric: a quarter of the Laplacian).
PeriodicScalarField laplace_beltrami(const HermitianMetricField& g, const PeriodicScalarField& u);

/// d_j d_kbar u for all j, k as a Hermitian field.
HermitianField complex_hessian_field(const PeriodicScalarField& u);

/// Throws SingularMetric unless every pointwise eigenvalue is > 0.
void require_positive(const HermitianMetricField& g, const char* context);

}  // namespace cma
