// SPDX-License-Identifier: Apache-2.0

#include "cma/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cma/errors.hpp"

namespace cma {

namespace {

void require_real(const PeriodicScalarField& f, const char* what) {
  if (!f.is_real()) {
    throw NotRealField(std::string(what) + " must be real (max |Im| = " +
                       std::to_string(f.max_abs_imag()) + ")");
  }
}

// Smallest/largest root of det(A) x^2 - c x + det(B) = 0 given a positive
// leading coefficient; roots are real for Hermitian pencils.
void stable_quadratic_roots(const Eigen::ArrayXd& a, const Eigen::ArrayXd& c,
                            const Eigen::ArrayXd& d, Eigen::ArrayXd& lo, Eigen::ArrayXd& hi) {
  const Eigen::ArrayXd disc = (c.square() - 4.0 * a * d).max(0.0).sqrt();
  hi = (c + disc) / (2.0 * a);
  // lo * hi = d / a; avoids cancellation in (c - disc) when lo is tiny.
  lo = (hi != 0.0).select(d / (a * hi), (c - disc) / (2.0 * a));
}

}  // namespace

// --- HermitianField -------------------------------------------------------------

HermitianField::HermitianField(const Grid& grid)
    : grid_(grid),
      entries_(static_cast<std::size_t>(grid.complex_dim() * grid.complex_dim()),
               Eigen::ArrayXcd::Zero(grid.size())) {}

HermitianField HermitianField::identity(const Grid& grid) {
  HermitianField g(grid);
  for (int j = 0; j < g.dim(); ++j) g(j, j).setOnes();
  // lower triangle = conj(upper) bit for bit, as in files
  g.symmetrize();
  return g;
}

HermitianField HermitianField::conformal(const PeriodicScalarField& scale) {
  HermitianField g(scale.grid());
  for (int j = 0; j < g.dim(); ++j) g(j, j) = scale.values();
  g.symmetrize();
  return g;
}

double HermitianField::hermitian_deviation() const {
  double dev = 0.0;
  for (int j = 0; j < dim(); ++j) {
    for (int k = j; k < dim(); ++k) {
      dev = std::max(dev, ((*this)(j, k) - (*this)(k, j).conjugate()).abs().maxCoeff());
    }
  }
  return dev;
}

void HermitianField::symmetrize() {
  for (int j = 0; j < dim(); ++j) {
    (*this)(j, j) = (*this)(j, j).real().cast<Complex>();
    for (int k = j + 1; k < dim(); ++k) {
      Eigen::ArrayXcd avg = 0.5 * ((*this)(j, k) + (*this)(k, j).conjugate());
      (*this)(k, j) = avg.conjugate();
      (*this)(j, k) = std::move(avg);
    }
  }
}

double sup_distance(const HermitianField& a, const HermitianField& b) {
  require_same_grid(a.grid(), b.grid());
  double d = 0.0;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    d = std::max(d, (a.entries_[i] - b.entries_[i]).abs().maxCoeff());
  }
  return d;
}

HermitianField& HermitianField::operator+=(const HermitianField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

HermitianField& HermitianField::operator-=(const HermitianField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

// --- ChristoffelField -------------------------------------------------------------

ChristoffelField::ChristoffelField(const Grid& grid)
    : grid_(grid),
      components_(static_cast<std::size_t>(grid.complex_dim() * grid.complex_dim() *
                                           grid.complex_dim()),
                  Eigen::ArrayXcd::Zero(grid.size())) {}

PeriodicScalarField ChristoffelField::trace(int j) const {
  grid_.check_complex_index(j);
  Eigen::ArrayXcd t = Eigen::ArrayXcd::Zero(grid_.size());
  for (int k = 0; k < dim(); ++k) t += (*this)(j, k, k);
  return {grid_, std::move(t)};
}

double ChristoffelField::symmetry_deviation() const {
  double dev = 0.0;
  for (int j = 0; j < dim(); ++j)
    for (int k = j + 1; k < dim(); ++k)
      for (int l = 0; l < dim(); ++l)
        dev = std::max(dev, ((*this)(j, k, l) - (*this)(k, j, l)).abs().maxCoeff());
  return dev;
}

// --- operations -----------------------------------------------------------------

HermitianField complex_hessian_field(const PeriodicScalarField& u) {
  const Grid& grid = u.grid();
  const int n = grid.complex_dim();
  Eigen::ArrayXcd spectrum = u.values();
  fft_forward(grid, spectrum);
  const bool real_input = u.max_abs_imag() == 0.0;

  HermitianField h(grid);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      Eigen::ArrayXcd data = spectrum * complex_hessian_symbol_table(grid, j, k);
      fft_inverse(grid, data);
      if (j == k && real_input) data = data.real().cast<Complex>();
      h(j, k) = std::move(data);
    }
  }
  return h;
}

HermitianMetricField metric_from_potential_unsymmetrized(const HermitianMetricField& g0,
                                                         const PeriodicScalarField& phi) {
  require_same_grid(g0.grid(), phi.grid());
  require_real(phi, "potential");
  return g0 + complex_hessian_field(phi.real_part());
}

HermitianMetricField metric_from_potential(const HermitianMetricField& g0,
                                           const PeriodicScalarField& phi) {
  HermitianMetricField g = metric_from_potential_unsymmetrized(g0, phi);
  g.symmetrize();
  return g;
}

EigenvalueBounds pointwise_eigenvalues(const HermitianField& g) {
  if (g.dim() == 1) {
    Eigen::ArrayXd v = g(0, 0).real();
    return {v, v};
  }
  const Eigen::ArrayXd a = g(0, 0).real();
  const Eigen::ArrayXd d = g(1, 1).real();
  const Eigen::ArrayXd half_gap = 0.5 * (a - d);
  const Eigen::ArrayXd radius = (half_gap.square() + g(0, 1).abs2()).sqrt();
  const Eigen::ArrayXd center = 0.5 * (a + d);
  return {center - radius, center + radius};
}

EigenvalueBounds relative_eigenvalues(const HermitianMetricField& g,
                                      const HermitianMetricField& g_tilde) {
  require_same_grid(g.grid(), g_tilde.grid());
  if (g.dim() == 1) {
    Eigen::ArrayXd v = g_tilde(0, 0).real() / g(0, 0).real();
    return {v, v};
  }
  // det(g~ - lambda g) = det(g) lambda^2 - c lambda + det(g~).
  const Eigen::ArrayXd det_g = det_field(g).real();
  const Eigen::ArrayXd det_t = det_field(g_tilde).real();
  const Eigen::ArrayXd c = (g(0, 0) * g_tilde(1, 1) + g(1, 1) * g_tilde(0, 0) -
                            g(0, 1) * g_tilde(1, 0) - g(1, 0) * g_tilde(0, 1))
                               .real();
  EigenvalueBounds out;
  stable_quadratic_roots(det_g, c, det_t, out.min, out.max);
  return out;
}

PositivityReport positivity_check(const HermitianMetricField& g) {
  const EigenvalueBounds eig = pointwise_eigenvalues(g);
  PositivityReport r;
  r.min_eig = eig.min.minCoeff(&r.argmin_point);
  r.is_positive = r.min_eig > 0.0;
  return r;
}

void require_positive(const HermitianMetricField& g, const char* context) {
  const PositivityReport r = positivity_check(g);
  if (!r.is_positive || !std::isfinite(r.min_eig)) {
    throw SingularMetric(std::string(context) + ": metric not positive-definite (min eigenvalue " +
                             std::to_string(r.min_eig) + " at point " +
                             std::to_string(r.argmin_point) + ")",
                         r.argmin_point, r.min_eig);
  }
}

PeriodicScalarField det_field(const HermitianField& g) {
  if (g.dim() == 1) return PeriodicScalarField(g.grid(), g(0, 0).real().cast<Complex>());
  Eigen::ArrayXd det = (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)).real();
  return PeriodicScalarField(g.grid(), det.cast<Complex>());
}

HermitianField adjugate_field(const HermitianField& g) {
  HermitianField adj(g.grid());
  if (g.dim() == 1) {
    adj(0, 0).setOnes();
    return adj;
  }
  adj(0, 0) = g(1, 1);
  adj(1, 1) = g(0, 0);
  adj(0, 1) = -g(0, 1);
  adj(1, 0) = -g(1, 0);
  return adj;
}

HermitianField inverse_field(const HermitianField& g) {
  const Eigen::ArrayXd det = det_field(g).real();
  double scale = 0.0;
  for (int j = 0; j < g.dim(); ++j)
    for (int k = 0; k < g.dim(); ++k) scale = std::max(scale, g(j, k).abs().maxCoeff());
  Eigen::Index where = 0;
  const double min_abs_det = det.abs().minCoeff(&where);
  const double threshold = 1e-14 * std::pow(std::max(scale, 1e-300), g.dim());
  if (!std::isfinite(min_abs_det) || !(min_abs_det > threshold) || !det.allFinite()) {
    throw SingularMetric("singular matrix field: min |det| = " + std::to_string(min_abs_det) +
                             " at point " + std::to_string(where),
                         where, min_abs_det);
  }
  HermitianField inv = adjugate_field(g);
  const Eigen::ArrayXd inv_det = det.inverse();
  for (int j = 0; j < g.dim(); ++j)
    for (int k = 0; k < g.dim(); ++k) inv(j, k) *= inv_det.cast<Complex>();
  return inv;
}

double product_identity_deviation(const HermitianField& g, const HermitianField& h) {
  require_same_grid(g.grid(), h.grid());
  double dev = 0.0;
  for (int j = 0; j < g.dim(); ++j) {
    for (int l = 0; l < g.dim(); ++l) {
      Eigen::ArrayXcd s = Eigen::ArrayXcd::Zero(g.grid().size());
      for (int m = 0; m < g.dim(); ++m) s += g(j, m) * h(m, l);
      if (j == l) s -= 1.0;
      dev = std::max(dev, s.abs().maxCoeff());
    }
  }
  return dev;
}

ChristoffelField christoffel(const HermitianMetricField& g) {
  const HermitianField ginv = inverse_field(g);
  const int n = g.dim();
  ChristoffelField gamma(g.grid());
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      for (int m = 0; m < n; ++m) {
        const Eigen::ArrayXcd dg = partial_z(g.entry(k, m), j).values();
        for (int l = 0; l < n; ++l) gamma(j, k, l) += dg * ginv(m, l);
      }
    }
  }
  return gamma;
}

RicciField ricci_form(const HermitianMetricField& g) {
  require_positive(g, "ricci_form");
  const Eigen::ArrayXd log_det = det_field(g).real().log();
  RicciField r = complex_hessian_field(PeriodicScalarField::from_real(g.grid(), log_det));
  for (int j = 0; j < r.dim(); ++j)
    for (int k = 0; k < r.dim(); ++k) r(j, k) = -r(j, k);
  r.symmetrize();
  return r;
}

double first_chern_integral(const HermitianMetricField& g) {
  if (g.dim() != 1) {
    throw InvalidArgument("first_chern_integral is only defined for n = 1");
  }
  const RicciField r = ricci_form(g);
  return 2.0 * integrate(r.entry(0, 0)).real() / (2.0 * std::numbers::pi);
}

double volume(const HermitianMetricField& g) { return integrate(det_field(g)).real(); }

PeriodicScalarField laplace_beltrami(const HermitianMetricField& g, const PeriodicScalarField& u) {
  require_same_grid(g.grid(), u.grid());
  require_real(u, "laplace_beltrami argument");
  const HermitianField ginv = inverse_field(g);
  const HermitianField h = complex_hessian_field(u.real_part());
  Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(g.grid().size());
  for (int j = 0; j < g.dim(); ++j)
    for (int k = 0; k < g.dim(); ++k) out += ginv(k, j) * h(j, k);
  return PeriodicScalarField(g.grid(), out.real().cast<Complex>());
}

}  // namespace cma
