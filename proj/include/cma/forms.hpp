// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <utility>
#include <vector>

#include "cma/geometry.hpp"
#include "cma/grid.hpp"

namespace cma {

/// Index set of a multi-index, one bit per holomorphic coordinate.
using IndexMask = unsigned;

/// Homogeneous (p, q)-form: one coefficient field per pair of strictly
/// increasing multi-indices (J, K), multiplying dz^J ^ dzbar^K with all
/// holomorphic differentials first.
class PqForm {
 public:
  /// Zero form. p or q may exceed n, in which case there are no components.
  PqForm(const Grid& grid, int p, int q);

  /// (0,0)-form with coefficient f.
  static PqForm scalar(const PeriodicScalarField& f);

  const Grid& grid() const { return grid_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int degree() const { return p_ + q_; }
  std::size_t num_components() const { return components_.size(); }

  const std::vector<IndexMask>& holomorphic_indices() const { return holo_; }
  const std::vector<IndexMask>& antiholomorphic_indices() const { return anti_; }

  const Eigen::ArrayXcd& component(IndexMask J, IndexMask K) const;
  Eigen::ArrayXcd& component(IndexMask J, IndexMask K);

  double max_abs() const;

  PqForm& operator+=(const PqForm& other);
  PqForm& operator-=(const PqForm& other);
  PqForm& operator*=(Complex s);
  friend PqForm operator+(PqForm a, const PqForm& b) { return a += b; }
  friend PqForm operator-(PqForm a, const PqForm& b) { return a -= b; }
  friend PqForm operator*(Complex s, PqForm a) { return a *= s; }

 private:
  std::size_t slot(IndexMask J, IndexMask K) const;

  Grid grid_;
  int p_;
  int q_;
  std::vector<IndexMask> holo_;
  std::vector<IndexMask> anti_;
  std::vector<Eigen::ArrayXcd> components_;
};

/// Sum of homogeneous pieces of different bidegrees.
class Form {
 public:
  explicit Form(const Grid& grid) : grid_(grid) {}
  Form(const PqForm& piece);  // NOLINT(google-explicit-constructor)

  const Grid& grid() const { return grid_; }
  const std::map<std::pair<int, int>, PqForm>& pieces() const { return pieces_; }
  /// The (p, q) piece, or a zero form if absent.
  PqForm piece(int p, int q) const;

  double max_abs() const;

  Form& operator+=(const Form& other);
  Form& operator-=(const Form& other);
  Form& operator*=(Complex s);
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator*(Complex s, Form a) { return a *= s; }

 private:
  Grid grid_;
  std::map<std::pair<int, int>, PqForm> pieces_;
};

/// Strictly increasing index sets of the given size, in lexicographic order.
std::vector<IndexMask> index_sets(int n, int size);

/// Holomorphic differential: (p, q) -> (p + 1, q).
PqForm del(const PqForm& alpha);
/// Antiholomorphic differential: (p, q) -> (p, q + 1).
PqForm delbar(const PqForm& alpha);
/// (del alpha, delbar alpha).
std::pair<PqForm, PqForm> exterior_d(const PqForm& alpha);
/// d = del + delbar on inhomogeneous forms.
Form exterior_d(const Form& alpha);

/// d^c u = i (delbar - del) u for a real function u.
Form d_c(const PeriodicScalarField& u);

/// Graded wedge product. Throws InvalidArgument if p or q would exceed n.
PqForm wedge(const PqForm& alpha, const PqForm& beta);
/// Wedge of inhomogeneous forms; pieces beyond bidegree (n, n) vanish.
Form wedge(const Form& alpha, const Form& beta);

/// Integral of an (n, n)-form using dz^j ^ dzbar^j = -2i dx^j ^ dy^j.
Complex integrate_top(const PqForm& alpha);

/// omega = (i/2) sum g_{j kbar} dz^j ^ dzbar^k, so that omega^n = n! det(g) dx dy.
PqForm kahler_form(const HermitianMetricField& g);

/// For a (1,1)-form i sum h_{jk} dz^j ^ dzbar^k: largest |h - h^H|.
double real_11_deviation(const PqForm& alpha);

/// sum_{k<n} integral of d(u) ^ d^c(u) ^ omega_1^k ^ omega_2^{n-k-1}, u = phi1 - phi2,
/// omega_i the Kahler forms of g + ddbar phi_i. Throws SingularMetric if either
/// potential yields a non-positive metric.
double uniqueness_functional(const PeriodicScalarField& phi1, const PeriodicScalarField& phi2,
                             const HermitianMetricField& g);

}  // namespace cma
