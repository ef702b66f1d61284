// SPDX-License-Identifier: Apache-2.0

#include "cma/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "cma/errors.hpp"

namespace cma {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

std::atomic<int> g_num_threads{1};

// FFTW plans per (shape, direction, threads, alignment). Planning is
// serialized; execution through the new-array interface is thread-safe.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(const Grid& grid, int sign, int threads, bool aligned) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(grid.complex_dim(), grid.points_per_axis(), sign, threads, aligned);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    if (!threads_initialized_) {
      fftw_init_threads();
      threads_initialized_ = true;
    }
    fftw_plan_with_nthreads(threads);
    std::vector<int> dims(grid.num_axes(), grid.points_per_axis());
    auto* buffer = fftw_alloc_complex(static_cast<std::size_t>(grid.size()));
    fftw_plan plan = fftw_plan_dft(grid.num_axes(), dims.data(), buffer, buffer, sign,
                                   aligned ? FFTW_ESTIMATE : FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buffer);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  bool threads_initialized_ = false;
  std::map<std::tuple<int, int, int, int, bool>, fftw_plan> plans_;
};

void execute(const Grid& grid, Eigen::ArrayXcd& data, int sign) {
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  const bool aligned = fftw_alignment_of(reinterpret_cast<double*>(ptr)) == 0;
  fftw_plan plan = PlanCache::instance().get(grid, sign, g_num_threads.load(), aligned);
  fftw_execute_dft(plan, ptr, ptr);
}

Complex first_derivative_symbol(int k, int N) {
  if (2 * k == -N) return 0.0;
  return kI * (kTwoPi * k);
}

double second_derivative_symbol(int k) {
  const double w = kTwoPi * k;
  return -w * w;
}

PeriodicScalarField keep_real_if(const PeriodicScalarField& input, PeriodicScalarField out) {
  if (input.max_abs_imag() == 0.0) return out.real_part();
  return out;
}

}  // namespace

// --- Grid -------------------------------------------------------------------

Grid::Grid(int complex_dim, int points_per_axis) : n_(complex_dim), N_(points_per_axis) {
  if (n_ < 1 || n_ > kMaxComplexDim) {
    throw InvalidArgument("complex dimension must be 1 or 2, got " + std::to_string(n_));
  }
  if (N_ < 8 || N_ % 2 != 0) {
    throw InvalidArgument("points per axis must be even and >= 8, got " + std::to_string(N_));
  }
  size_ = 1;
  for (int a = 0; a < 2 * n_; ++a) size_ *= N_;
}

Eigen::Index Grid::stride(int axis) const {
  check_axis(axis);
  Eigen::Index s = 1;
  for (int a = num_axes() - 1; a > axis; --a) s *= N_;
  return s;
}

int Grid::index_along(Eigen::Index flat, int axis) const {
  return static_cast<int>((flat / stride(axis)) % N_);
}

double Grid::coordinate(Eigen::Index flat, int axis) const {
  return static_cast<double>(index_along(flat, axis)) / N_;
}

std::array<double, 2 * Grid::kMaxComplexDim> Grid::point(Eigen::Index flat) const {
  std::array<double, 2 * kMaxComplexDim> x{};
  Eigen::Index rest = flat;
  for (int a = num_axes() - 1; a >= 0; --a) {
    x[a] = static_cast<double>(rest % N_) / N_;
    rest /= N_;
  }
  return x;
}

void Grid::check_axis(int axis) const {
  if (axis < 0 || axis >= num_axes()) {
    throw InvalidArgument("axis " + std::to_string(axis) + " out of range for " +
                          std::to_string(num_axes()) + " real axes");
  }
}

void Grid::check_complex_index(int j) const {
  if (j < 0 || j >= n_) {
    throw InvalidArgument("complex index " + std::to_string(j) + " out of range for n = " +
                          std::to_string(n_));
  }
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) {
    throw GridMismatch("grid mismatch: (n=" + std::to_string(a.complex_dim()) +
                       ", N=" + std::to_string(a.points_per_axis()) + ") vs (n=" +
                       std::to_string(b.complex_dim()) + ", N=" +
                       std::to_string(b.points_per_axis()) + ")");
  }
}

// --- PeriodicScalarField ------------------------------------------------------

PeriodicScalarField::PeriodicScalarField(const Grid& grid, Eigen::ArrayXcd values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("field has " + std::to_string(values_.size()) +
                          " samples, grid has " + std::to_string(grid_.size()));
  }
}

PeriodicScalarField PeriodicScalarField::zeros(const Grid& grid) {
  return {grid, Eigen::ArrayXcd::Zero(grid.size())};
}

PeriodicScalarField PeriodicScalarField::constant(const Grid& grid, Complex value) {
  return {grid, Eigen::ArrayXcd::Constant(grid.size(), value)};
}

PeriodicScalarField PeriodicScalarField::from_real(const Grid& grid, const Eigen::ArrayXd& values) {
  return {grid, values.cast<Complex>()};
}

PeriodicScalarField PeriodicScalarField::sample(
    const Grid& grid, const std::function<Complex(std::span<const double>)>& fn) {
  Eigen::ArrayXcd v(grid.size());
  for (Eigen::Index p = 0; p < grid.size(); ++p) {
    const auto x = grid.point(p);
    v[p] = fn(std::span<const double>(x.data(), grid.num_axes()));
  }
  return {grid, std::move(v)};
}

double PeriodicScalarField::max_abs() const { return values_.abs().maxCoeff(); }

double PeriodicScalarField::max_abs_imag() const { return values_.imag().abs().maxCoeff(); }

bool PeriodicScalarField::is_real() const {
  const double scale = std::max(1.0, values_.real().abs().maxCoeff());
  return max_abs_imag() <= 1e-12 * scale;
}

PeriodicScalarField PeriodicScalarField::real_part() const {
  return {grid_, values_.real().cast<Complex>()};
}

PeriodicScalarField PeriodicScalarField::conj() const { return {grid_, values_.conjugate()}; }

PeriodicScalarField& PeriodicScalarField::operator+=(const PeriodicScalarField& other) {
  require_same_grid(grid_, other.grid_);
  values_ += other.values_;
  return *this;
}

PeriodicScalarField& PeriodicScalarField::operator-=(const PeriodicScalarField& other) {
  require_same_grid(grid_, other.grid_);
  values_ -= other.values_;
  return *this;
}

PeriodicScalarField& PeriodicScalarField::operator*=(const PeriodicScalarField& other) {
  require_same_grid(grid_, other.grid_);
  values_ *= other.values_;
  return *this;
}

PeriodicScalarField& PeriodicScalarField::operator*=(Complex s) {
  values_ *= s;
  return *this;
}

double sup_distance(const PeriodicScalarField& a, const PeriodicScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  return (a.values() - b.values()).abs().maxCoeff();
}

// --- transforms ---------------------------------------------------------------

void set_num_threads(int threads) {
  if (threads < 1) throw InvalidArgument("thread count must be >= 1");
  g_num_threads = threads;
}

int num_threads() { return g_num_threads.load(); }

void fft_forward(const Grid& grid, Eigen::ArrayXcd& data) { execute(grid, data, FFTW_FORWARD); }

void fft_inverse(const Grid& grid, Eigen::ArrayXcd& data) {
  execute(grid, data, FFTW_BACKWARD);
  data *= 1.0 / static_cast<double>(grid.size());
}

Eigen::ArrayXcd symbol_table(const Grid& grid,
                             const std::function<Complex(std::span<const int>)>& symbol) {
  const int N = grid.points_per_axis();
  const int axes = grid.num_axes();
  Eigen::ArrayXcd table(grid.size());
  std::array<int, 2 * Grid::kMaxComplexDim> bins{};
  std::array<int, 2 * Grid::kMaxComplexDim> k{};
  for (Eigen::Index p = 0; p < grid.size(); ++p) {
    for (int a = 0; a < axes; ++a) k[a] = grid.wavenumber(bins[a]);
    table[p] = symbol(std::span<const int>(k.data(), axes));
    // Odometer increment, last axis fastest.
    for (int a = axes - 1; a >= 0; --a) {
      if (++bins[a] < N) break;
      bins[a] = 0;
    }
  }
  return table;
}

namespace {

enum class SymbolKind { kDx, kDxx, kDz, kDzbar, kHessian, kLaplacian, kInverseQuarterLaplacian };

const Eigen::ArrayXcd& cached_symbol(const Grid& grid, SymbolKind kind, int a, int b,
                                     const std::function<Complex(std::span<const int>)>& symbol) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int, int, int>, Eigen::ArrayXcd> cache;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_tuple(grid.complex_dim(), grid.points_per_axis(),
                                   static_cast<int>(kind), a, b);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, symbol_table(grid, symbol)).first;
  return it->second;
}

}  // namespace

PeriodicScalarField apply_symbol(const PeriodicScalarField& f, const Eigen::ArrayXcd& table) {
  const Grid& grid = f.grid();
  if (table.size() != grid.size()) throw InvalidArgument("symbol table size mismatch");
  Eigen::ArrayXcd data = f.values();
  fft_forward(grid, data);
  data *= table;
  fft_inverse(grid, data);
  return {grid, std::move(data)};
}

PeriodicScalarField apply_symbol(const PeriodicScalarField& f,
                                 const std::function<Complex(std::span<const int>)>& symbol) {
  return apply_symbol(f, symbol_table(f.grid(), symbol));
}

PeriodicScalarField partial_x(const PeriodicScalarField& f, int axis) {
  const Grid& grid = f.grid();
  grid.check_axis(axis);
  const int N = grid.points_per_axis();
  const auto& table = cached_symbol(grid, SymbolKind::kDx, axis, 0, [axis, N](std::span<const int> k) {
    return first_derivative_symbol(k[axis], N);
  });
  return keep_real_if(f, apply_symbol(f, table));
}

PeriodicScalarField partial_xx(const PeriodicScalarField& f, int axis) {
  const Grid& grid = f.grid();
  grid.check_axis(axis);
  const auto& table = cached_symbol(grid, SymbolKind::kDxx, axis, 0, [axis](std::span<const int> k) {
    return Complex(second_derivative_symbol(k[axis]));
  });
  return keep_real_if(f, apply_symbol(f, table));
}

const Eigen::ArrayXcd& wirtinger_symbol_table(const Grid& grid, int j, bool conjugate) {
  grid.check_complex_index(j);
  const int N = grid.points_per_axis();
  const double s = conjugate ? 1.0 : -1.0;
  return cached_symbol(grid, conjugate ? SymbolKind::kDzbar : SymbolKind::kDz, j, 0,
                       [j, N, s](std::span<const int> k) {
                         return 0.5 * (first_derivative_symbol(k[2 * j], N) +
                                       s * kI * first_derivative_symbol(k[2 * j + 1], N));
                       });
}

PeriodicScalarField partial_z(const PeriodicScalarField& f, int j) {
  f.grid().check_complex_index(j);
  return apply_symbol(f, wirtinger_symbol_table(f.grid(), j, false));
}

PeriodicScalarField partial_zbar(const PeriodicScalarField& f, int j) {
  f.grid().check_complex_index(j);
  return apply_symbol(f, wirtinger_symbol_table(f.grid(), j, true));
}

std::vector<PeriodicScalarField> wirtinger_gradient(const PeriodicScalarField& f, bool conjugate) {
  const Grid& grid = f.grid();
  Eigen::ArrayXcd hat = f.values();
  fft_forward(grid, hat);
  std::vector<PeriodicScalarField> out;
  out.reserve(static_cast<std::size_t>(grid.complex_dim()));
  for (int j = 0; j < grid.complex_dim(); ++j) {
    Eigen::ArrayXcd data = hat * wirtinger_symbol_table(grid, j, conjugate);
    fft_inverse(grid, data);
    out.emplace_back(grid, std::move(data));
  }
  return out;
}

Complex complex_hessian_symbol(const Grid& grid, std::span<const int> k, int j, int l) {
  if (j == l) {
    return 0.25 * (second_derivative_symbol(k[2 * j]) + second_derivative_symbol(k[2 * j + 1]));
  }
  const int N = grid.points_per_axis();
  const Complex dz = first_derivative_symbol(k[2 * j], N) - kI * first_derivative_symbol(k[2 * j + 1], N);
  const Complex dzbar =
      first_derivative_symbol(k[2 * l], N) + kI * first_derivative_symbol(k[2 * l + 1], N);
  return 0.25 * dz * dzbar;
}

const Eigen::ArrayXcd& complex_hessian_symbol_table(const Grid& grid, int j, int k) {
  grid.check_complex_index(j);
  grid.check_complex_index(k);
  return cached_symbol(grid, SymbolKind::kHessian, j, k, [&grid, j, k](std::span<const int> w) {
    return complex_hessian_symbol(grid, w, j, k);
  });
}

PeriodicScalarField complex_hessian(const PeriodicScalarField& f, int j, int k) {
  auto out = apply_symbol(f, complex_hessian_symbol_table(f.grid(), j, k));
  return j == k ? keep_real_if(f, std::move(out)) : out;
}

PeriodicScalarField flat_laplacian(const PeriodicScalarField& f) {
  const auto& table = cached_symbol(f.grid(), SymbolKind::kLaplacian, 0, 0, [](std::span<const int> k) {
    double s = 0.0;
    for (int w : k) s += second_derivative_symbol(w);
    return Complex(s);
  });
  return keep_real_if(f, apply_symbol(f, table));
}

PeriodicScalarField inverse_quarter_laplacian(const PeriodicScalarField& f) {
  const auto& table =
      cached_symbol(f.grid(), SymbolKind::kInverseQuarterLaplacian, 0, 0, [](std::span<const int> k) {
        double s = 0.0;
        for (int w : k) s += second_derivative_symbol(w);
        return s == 0.0 ? Complex(0.0) : Complex(4.0 / s);
      });
  return keep_real_if(f, apply_symbol(f, table));
}

double compensated_mean(const Eigen::ArrayXd& v) {
  double sum = 0.0;
  double carry = 0.0;
  for (const double x : v) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return v.size() == 0 ? 0.0 : (sum + carry) / static_cast<double>(v.size());
}

Complex integrate(const PeriodicScalarField& f) {
  return {compensated_mean(f.values().real()), compensated_mean(f.values().imag())};
}

PeriodicScalarField mean_zero_project(const PeriodicScalarField& f) {
  if (!f.is_real()) {
    throw NotRealField("mean_zero_project requires a real field (max |Im| = " +
                       std::to_string(f.max_abs_imag()) + ")");
  }
  const Complex mean = integrate(f);
  return {f.grid(), f.values() - mean};
}

double band_limit_excess(const PeriodicScalarField& f, int cutoff) {
  const Grid& grid = f.grid();
  const int N = grid.points_per_axis();
  Eigen::ArrayXcd data = f.values();
  fft_forward(grid, data);
  double total = 0.0;
  double above = 0.0;
  for (Eigen::Index p = 0; p < grid.size(); ++p) {
    const double amp = std::abs(data[p]);
    total = std::max(total, amp);
    Eigen::Index rest = p;
    bool high = false;
    for (int a = grid.num_axes() - 1; a >= 0; --a) {
      const int k = grid.wavenumber(static_cast<int>(rest % N));
      rest /= N;
      if (std::abs(k) > cutoff) high = true;
    }
    if (high) above = std::max(above, amp);
  }
  return total == 0.0 ? 0.0 : above / total;
}

}  // namespace cma
