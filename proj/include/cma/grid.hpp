// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace cma {

using Complex = std::complex<double>;

/// Uniform periodic grid on the unit torus [0,1)^{2n}.
///
/// Real axes are ordered x^1, y^1, ..., x^n, y^n and the last axis varies
/// fastest in the flat sample index. Complex coordinate j (0-based) owns the
/// real axes 2j (x^{j+1}) and 2j+1 (y^{j+1}).
class Grid {
 public:
  static constexpr int kMaxComplexDim = 2;

  /// Throws InvalidArgument unless n is 1 or 2 and N is even and >= 8.
  Grid(int complex_dim, int points_per_axis);

  int complex_dim() const { return n_; }
  int points_per_axis() const { return N_; }
  int num_axes() const { return 2 * n_; }
  Eigen::Index size() const { return size_; }
  double spacing() const { return 1.0 / N_; }

  /// Flat-index stride of a real axis.
  Eigen::Index stride(int axis) const;
  /// Integer sample index along `axis` of the flat point `flat`.
  int index_along(Eigen::Index flat, int axis) const;
  /// Coordinate value k/N along `axis` of the flat point `flat`.
  double coordinate(Eigen::Index flat, int axis) const;
  /// All 2n coordinates of a point.
  std::array<double, 2 * kMaxComplexDim> point(Eigen::Index flat) const;

  /// Signed wavenumber of DFT bin `bin`, in [-N/2, N/2 - 1]; -N/2 is Nyquist.
  int wavenumber(int bin) const { return bin < N_ / 2 ? bin : bin - N_; }

  void check_axis(int axis) const;
  void check_complex_index(int j) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int n_;
  int N_;
  Eigen::Index size_;
};

/// Complex samples of a periodic function on a Grid.
class PeriodicScalarField {
 public:
  PeriodicScalarField(const Grid& grid, Eigen::ArrayXcd values);

  static PeriodicScalarField zeros(const Grid& grid);
  static PeriodicScalarField constant(const Grid& grid, Complex value);
  static PeriodicScalarField from_real(const Grid& grid, const Eigen::ArrayXd& values);
  /// Samples `fn(coords)` at every grid point; coords holds 2n entries.
  static PeriodicScalarField sample(const Grid& grid,
                                    const std::function<Complex(std::span<const double>)>& fn);

  const Grid& grid() const { return grid_; }
  const Eigen::ArrayXcd& values() const { return values_; }
  Eigen::ArrayXcd& values() { return values_; }
  Eigen::ArrayXd real() const { return values_.real(); }

  double max_abs() const;
  double max_abs_imag() const;
  /// True when max |Im| <= 1e-12 * max(1, max |Re|).
  bool is_real() const;
  /// Copy with imaginary parts discarded.
  PeriodicScalarField real_part() const;
  PeriodicScalarField conj() const;

  PeriodicScalarField& operator+=(const PeriodicScalarField& other);
  PeriodicScalarField& operator-=(const PeriodicScalarField& other);
  PeriodicScalarField& operator*=(const PeriodicScalarField& other);
  PeriodicScalarField& operator*=(Complex s);

  friend PeriodicScalarField operator+(PeriodicScalarField a, const PeriodicScalarField& b) {
    return a += b;
  }
  friend PeriodicScalarField operator-(PeriodicScalarField a, const PeriodicScalarField& b) {
    return a -= b;
  }
  friend PeriodicScalarField operator*(PeriodicScalarField a, const PeriodicScalarField& b) {
    return a *= b;
  }
  friend PeriodicScalarField operator*(Complex s, PeriodicScalarField a) { return a *= s; }
  friend PeriodicScalarField operator-(PeriodicScalarField a) { return a *= -1.0; }

 private:
  Grid grid_;
  Eigen::ArrayXcd values_;
};

void require_same_grid(const Grid& a, const Grid& b);

/// Sup-norm of a - b.
double sup_distance(const PeriodicScalarField& a, const PeriodicScalarField& b);

// --- spectral calculus -----------------------------------------------------

/// In-place multidimensional DFT over all axes (forward: unscaled sum,
/// inverse: includes the 1/N^{2n} factor).
void fft_forward(const Grid& grid, Eigen::ArrayXcd& data);
void fft_inverse(const Grid& grid, Eigen::ArrayXcd& data);

/// Number of worker threads used by the transforms (default 1).
void set_num_threads(int threads);
int num_threads();

/// Fourier multiplier sampled at every DFT bin (same layout as the samples).
Eigen::ArrayXcd symbol_table(const Grid& grid,
                             const std::function<Complex(std::span<const int>)>& symbol);

/// Multiplies every Fourier mode by symbol(k), k the signed wavenumbers.
PeriodicScalarField apply_symbol(const PeriodicScalarField& f,
                                 const std::function<Complex(std::span<const int>)>& symbol);
PeriodicScalarField apply_symbol(const PeriodicScalarField& f, const Eigen::ArrayXcd& table);

/// First derivative along a real axis; Nyquist mode is zeroed.
PeriodicScalarField partial_x(const PeriodicScalarField& f, int axis);
/// Pure second derivative along a real axis; Nyquist mode kept with -(pi N)^2.
PeriodicScalarField partial_xx(const PeriodicScalarField& f, int axis);
/// d/dz^j = (d/dx^j - i d/dy^j)/2, j zero-based.
PeriodicScalarField partial_z(const PeriodicScalarField& f, int j);
/// d/dzbar^j = (d/dx^j + i d/dy^j)/2, j zero-based.
PeriodicScalarField partial_zbar(const PeriodicScalarField& f, int j);
/// All n derivatives d/dz^j (or d/dzbar^j when `conjugate`) from one forward transform.
std::vector<PeriodicScalarField> wirtinger_gradient(const PeriodicScalarField& f, bool conjugate);
/// Cached Fourier symbol of d/dz^j (or d/dzbar^j when `conjugate`).
const Eigen::ArrayXcd& wirtinger_symbol_table(const Grid& grid, int j, bool conjugate);

/// Complex Hessian d^2 f / dz^j dzbar^k as a single Fourier multiplier.
///
/// For j == k the symbol is (1/4)(pure xx + pure yy), keeping the Nyquist
/// mode; for j != k it is the product of first-derivative symbols.
PeriodicScalarField complex_hessian(const PeriodicScalarField& f, int j, int k);

/// Symbol of complex_hessian at the signed wavenumbers `k`.
Complex complex_hessian_symbol(const Grid& grid, std::span<const int> k, int j, int l);
/// Cached symbol_table of complex_hessian(., j, k).
const Eigen::ArrayXcd& complex_hessian_symbol_table(const Grid& grid, int j, int k);

/// Flat Laplacian sum_a d^2/dx_a^2 (Nyquist kept).
PeriodicScalarField flat_laplacian(const PeriodicScalarField& f);

/// Solves (1/4) flat_laplacian(u) = f on the mean-zero subspace by spectral
/// division; the zero mode of the result is set to zero.
PeriodicScalarField inverse_quarter_laplacian(const PeriodicScalarField& f);

/// Mean with Neumaier-compensated summation.
double compensated_mean(const Eigen::ArrayXd& v);

/// Integral over the unit torus (mean of samples).
Complex integrate(const PeriodicScalarField& f);

/// f - integrate(f). Throws NotRealField unless f is real.
PeriodicScalarField mean_zero_project(const PeriodicScalarField& f);

/// Largest Fourier amplitude among modes with some |k_a| > cutoff, divided by
/// the largest amplitude overall (0 for the zero field).
double band_limit_excess(const PeriodicScalarField& f, int cutoff);

}  // namespace cma
