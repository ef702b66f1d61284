// SPDX-License-Identifier: Apache-2.0

#include "cma/verification.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "cma/errors.hpp"
#include "cma/forms.hpp"

namespace cma {

namespace {

constexpr double kPi = std::numbers::pi;

class ThreadScope {
 public:
  explicit ThreadScope(int threads) : saved_(num_threads()) { set_num_threads(threads); }
  ~ThreadScope() { set_num_threads(saved_); }
  ThreadScope(const ThreadScope&) = delete;
  ThreadScope& operator=(const ThreadScope&) = delete;

 private:
  int saved_;
};

CheckResult at_most(std::string name, double measured, double threshold) {
  return {std::move(name), measured, threshold, std::isfinite(measured) && measured <= threshold};
}

CheckResult at_least(std::string name, double measured, double threshold) {
  return {std::move(name), measured, threshold, std::isfinite(measured) && measured >= threshold};
}

CheckResult greater_than(std::string name, double measured, double threshold) {
  return {std::move(name), measured, threshold, std::isfinite(measured) && measured > threshold};
}

std::string tag(int n, int N) { return "n" + std::to_string(n) + "_N" + std::to_string(N); }

// Real, mean-zero potential with wavenumbers <= k_max, scaled so that the
// eigenvalues of I + ddbar phi stay within [1 - spread, 1 + spread].
PeriodicScalarField scaled_potential(const Grid& grid, std::uint64_t seed, int k_max, double spread) {
  PeriodicScalarField phi = mean_zero_project(random_band_limited(grid, seed, k_max));
  const EigenvalueBounds eig = pointwise_eigenvalues(complex_hessian_field(phi));
  const double size = std::max(eig.max.abs().maxCoeff(), eig.min.abs().maxCoeff());
  return (spread / size) * phi;
}

double max_abs_over(const Form& f) { return f.max_abs(); }

// sup |sum_k Gamma_jk^k - d_j log sqrt(det of the real 2n x 2n metric)|.
double christoffel_trace_error(const HermitianMetricField& g) {
  const Grid& grid = g.grid();
  const int n = grid.complex_dim();
  Eigen::ArrayXd log_sqrt_det(grid.size());
  Eigen::MatrixXd real_form(2 * n, 2 * n);
  for (Eigen::Index p = 0; p < grid.size(); ++p) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const Complex h = g(j, k)(p);
        real_form(j, k) = h.real();
        real_form(j + n, k + n) = h.real();
        real_form(j, k + n) = -h.imag();
        real_form(j + n, k) = h.imag();
      }
    }
    log_sqrt_det(p) = 0.5 * std::log(real_form.determinant());
  }
  const PeriodicScalarField ref = PeriodicScalarField::from_real(grid, log_sqrt_det);
  const ChristoffelField gamma = christoffel(g);
  double err = 0.0;
  for (int j = 0; j < n; ++j) err = std::max(err, sup_distance(gamma.trace(j), partial_z(ref, j)));
  return err;
}

double ricci_difference_error(const HermitianMetricField& g, const PeriodicScalarField& phi) {
  const HermitianMetricField gt = metric_from_potential(g, phi);
  const Eigen::ArrayXd log_ratio = (det_field(gt).real() / det_field(g).real()).log();
  const HermitianField hess =
      complex_hessian_field(PeriodicScalarField::from_real(g.grid(), log_ratio));
  return sup_distance(ricci_form(gt) - ricci_form(g) + hess, HermitianField(g.grid()));
}

double sup_error(const PeriodicScalarField& a, const PeriodicScalarField& b) {
  return sup_distance(a.real_part(), b.real_part());
}

double min_trace_eig(const ContinuityTrace& trace) {
  double m = std::numeric_limits<double>::infinity();
  for (const TraceStep& s : trace) m = std::min(m, s.eig_min);
  return m;
}

SolverConfig config_for(const Grid& grid) {
  SolverConfig cfg;
  cfg.n = grid.complex_dim();
  cfg.N = grid.points_per_axis();
  return cfg;
}

struct SolvedCase {
  ContinuityResult result;
  PeriodicScalarField F;
};

SolvedCase solve_manufactured(const PeriodicScalarField& phi_star, const HermitianMetricField& g) {
  PeriodicScalarField F = forcing_from_potential(phi_star, g);
  ContinuityResult r = continuity_solve(F, g, config_for(g.grid()));
  return {std::move(r), std::move(F)};
}

double smooth_manufactured_error(int N) {
  const Grid grid(1, N);
  const HermitianMetricField g = HermitianField::identity(grid);
  const ContinuityResult r = continuity_solve(smooth_manufactured_forcing(grid), g, config_for(grid));
  if (!r.converged()) return std::numeric_limits<double>::infinity();
  return sup_error(r.phi, smooth_manufactured_potential(grid));
}

// sup |central difference of `residual` along psi - expected|.
double directional_fd_error(const std::function<PeriodicScalarField(const PeriodicScalarField&)>& residual,
                            const PeriodicScalarField& phi, const PeriodicScalarField& psi,
                            const PeriodicScalarField& expected, double h) {
  const PeriodicScalarField plus = residual(phi + h * psi);
  const PeriodicScalarField minus = residual(phi - h * psi);
  return sup_error((1.0 / (2.0 * h)) * (plus - minus), expected);
}

// --- suites -------------------------------------------------------------------------

void identities_suite(SuiteReport& report, const SuiteOptions& options) {
  constexpr int kFields = 10;
  constexpr int kExtraFields = 1;
  for (int n : {1, 2}) {
    const Grid grid(n, 32);
    double d2 = 0, del2 = 0, delbar2 = 0, anti = 0, ddc = 0, closed = 0;
    for (int s = 0; s < kFields; ++s) {
      const std::uint64_t seed = options.seed + 1000 * n + 10 * s;
      const PeriodicScalarField f = random_band_limited(grid, seed, 4);
      const PqForm a = PqForm::scalar(f);
      const auto [D, B] = exterior_d(a);
      const auto [DD, BD] = exterior_d(D);
      const auto [DB, BB] = exterior_d(B);
      const PqForm mixed = DB + BD;
      del2 = std::max(del2, DD.max_abs());
      delbar2 = std::max(delbar2, BB.max_abs());
      anti = std::max(anti, mixed.max_abs());
      // d(d f) has pieces (2,0), (1,1), (0,2).
      d2 = std::max({d2, DD.max_abs(), mixed.max_abs(), BB.max_abs()});
      if (s >= kExtraFields) continue;

      const Form lhs = exterior_d(d_c(f));
      ddc = std::max(ddc, (lhs - Form(Complex(0, 2) * DB)).max_abs());
      const PeriodicScalarField phi = scaled_potential(grid, seed + 7, 2, 0.5);
      const PqForm omega = kahler_form(metric_from_potential(HermitianField::identity(grid), phi));
      closed = std::max(closed, max_abs_over(exterior_d(Form(omega))));
    }
    const std::string t = tag(n, 32);
    report.checks.push_back(at_most("d_squared_" + t, d2, thresholds::kFormIdentity));
    report.checks.push_back(at_most("del_squared_" + t, del2, thresholds::kFormIdentity));
    report.checks.push_back(at_most("delbar_squared_" + t, delbar2, thresholds::kFormIdentity));
    report.checks.push_back(at_most("del_delbar_anticommute_" + t, anti, thresholds::kFormIdentity));
    report.checks.push_back(at_most("ddc_equals_2i_ddbar_" + t, ddc, thresholds::kFormIdentity));
    report.checks.push_back(at_most("kahler_form_closed_" + t, closed, thresholds::kFormIdentity));
  }
}

void geometry_suite(SuiteReport& report, const SuiteOptions& options) {
  constexpr int kPotentials = 5;
  for (int n : {1, 2}) {
    const Grid grid(n, 32);
    const HermitianMetricField flat = HermitianField::identity(grid);
    double trace_err = 0, ricci_err = 0, vol_err = 0, chern = 0, herm = 0;
    for (int s = 0; s < kPotentials; ++s) {
      const PeriodicScalarField phi = scaled_potential(grid, options.seed + 500 + 17 * s + n, 1, 0.1);
      const HermitianMetricField gt = metric_from_potential(flat, phi);
      herm = std::max(herm, metric_from_potential_unsymmetrized(flat, phi).hermitian_deviation());
      trace_err = std::max(trace_err, christoffel_trace_error(gt));
      ricci_err = std::max(ricci_err, ricci_difference_error(flat, phi));
      // A second, larger potential on top of gt exercises a non-flat base.
      const PeriodicScalarField phi2 = scaled_potential(grid, options.seed + 900 + 13 * s + n, 2, 0.3);
      ricci_err = std::max(ricci_err, ricci_difference_error(gt, phi2));
      vol_err = std::max(vol_err, std::abs(volume(gt) - 1.0));
      vol_err = std::max(vol_err, std::abs(volume(metric_from_potential(flat, phi2)) - 1.0));
      if (n == 1) chern = std::max(chern, std::abs(first_chern_integral(metric_from_potential(flat, phi2))));
    }
    const std::string t = tag(n, 32);
    report.checks.push_back(at_most("hermitian_before_symmetrize_" + t, herm,
                                    thresholds::kHermitianBeforeSymmetrize));
    report.checks.push_back(at_most("christoffel_trace_" + t, trace_err, thresholds::kChristoffelTrace));
    report.checks.push_back(at_most("ricci_difference_" + t, ricci_err, thresholds::kRicciDifference));
    report.checks.push_back(at_most("volume_invariance_" + t, vol_err, thresholds::kVolumeInvariance));
    if (n == 1) report.checks.push_back(at_most("first_chern_integral_" + t, chern, thresholds::kChernIntegral));
  }
}

void uniqueness_suite(SuiteReport& report, const SuiteOptions&) {
  const Grid grid(1, 64);
  const HermitianMetricField g = HermitianField::identity(grid);
  const PeriodicScalarField F = PeriodicScalarField::sample(grid, [](std::span<const double> c) {
    return Complex(0.3 * std::sin(2 * kPi * c[0]) * std::sin(2 * kPi * c[1]));
  });
  SolverConfig a = config_for(grid);
  SolverConfig b = a;
  b.t_step_initial = 0.05;
  b.damping_eig_floor = 1e-6;
  const ContinuityResult ra = continuity_solve(F, g, a);
  const ContinuityResult rb = continuity_solve(F, g, b);
  const bool ok = ra.converged() && rb.converged();
  const double diff = ok ? sup_error(ra.phi, rb.phi) : std::numeric_limits<double>::infinity();
  const double functional = ok ? uniqueness_functional(ra.phi, rb.phi, g) : diff;
  report.checks.push_back(at_most("policy_difference_sup", diff, thresholds::kUniquenessSup));
  report.checks.push_back(at_most("uniqueness_functional_of_pair", std::abs(functional),
                                  thresholds::kUniquenessFunctional));
  const double shifted = uniqueness_functional(ra.phi + PeriodicScalarField::constant(grid, 5.0), ra.phi, g);
  report.checks.push_back(at_most("functional_constant_shift", std::abs(shifted), 1e-12));
  const double distinct = uniqueness_functional(ra.phi, PeriodicScalarField::zeros(grid), g);
  report.checks.push_back(greater_than("functional_distinct_positive", distinct, 1e-10));
}

void manufactured_suite(SuiteReport& report, const SuiteOptions& options) {
  {
    const Grid grid(1, 64);
    const HermitianMetricField g = HermitianField::identity(grid);
    const PeriodicScalarField phi_star = manufactured_potential_n1(grid);
    const SolvedCase s = solve_manufactured(phi_star, g);
    const bool ok = s.result.converged();
    const double inf = std::numeric_limits<double>::infinity();
    report.checks.push_back(at_most("n1_error", ok ? sup_error(s.result.phi, phi_star) : inf,
                                    thresholds::kManufacturedN1));
    report.checks.push_back(at_least("n1_final_t", s.result.last_good_t, 1.0));
    report.checks.push_back(greater_than("n1_trace_eig_min", min_trace_eig(s.result.trace),
                                         thresholds::kManufacturedEigMin));
    report.checks.push_back(at_most("n1_gauge", std::abs(integrate(s.result.phi)), thresholds::kGauge));
    report.checks.push_back(at_most("n1_ricci_prescription",
                                    ricci_prescription_error(s.result.phi, s.F, g),
                                    thresholds::kRicciPrescriptionN1));
  }
  {
    const Grid grid(2, 16);
    const HermitianMetricField g = HermitianField::identity(grid);
    const PeriodicScalarField phi_star = manufactured_potential_n2(grid);
    const SolvedCase s = solve_manufactured(phi_star, g);
    const bool ok = s.result.converged();
    const double inf = std::numeric_limits<double>::infinity();
    report.checks.push_back(at_most("n2_error", ok ? sup_error(s.result.phi, phi_star) : inf,
                                    thresholds::kManufacturedN2));
    report.checks.push_back(at_least("n2_final_t", s.result.last_good_t, 1.0));
    report.checks.push_back(greater_than("n2_trace_eig_min", min_trace_eig(s.result.trace), 0.0));
    report.checks.push_back(at_most("n2_ricci_prescription",
                                    ricci_prescription_error(s.result.phi, s.F, g),
                                    thresholds::kRicciPrescriptionN2));
  }
  for (int n : {1, 2}) {
    const Grid grid(n, n == 1 ? 32 : 16);
    const HermitianMetricField g = HermitianField::identity(grid);
    const PeriodicScalarField phi = n == 1 ? manufactured_potential_n1(grid) : manufactured_potential_n2(grid);
    const PeriodicScalarField psi = mean_zero_project(random_band_limited(grid, options.seed + 77, 3));
    const LinearizedOperator L(phi, g);
    const PeriodicScalarField Lpsi = L.apply(psi);
    const Eigen::ArrayXd ratio = det_field(metric_from_potential(g, phi)).real() / det_field(g).real();

    // log(det g~ / det g) has derivative Laplace-Beltrami_{g~} psi = L psi / ratio.
    auto log_residual = [&](const PeriodicScalarField& p) {
      const Eigen::ArrayXd r = det_field(metric_from_potential(g, p)).real() / det_field(g).real();
      return PeriodicScalarField::from_real(grid, r.log());
    };
    const PeriodicScalarField expected_log =
        PeriodicScalarField::from_real(grid, Lpsi.real() / ratio);
    const double e3 = directional_fd_error(log_residual, phi, psi, expected_log, 1e-3);
    const double e4 = directional_fd_error(log_residual, phi, psi, expected_log, 1e-4);
    report.checks.push_back(at_least("linearization_order_" + tag(n, grid.points_per_axis()),
                                     std::log10(e3 / e4), thresholds::kLinearizationOrder));

    // The determinant ratio is a polynomial of degree n <= 2 in phi, so its
    // central difference reproduces L psi up to roundoff.
    auto ratio_residual = [&](const PeriodicScalarField& p) {
      return ma_residual(p, PeriodicScalarField::zeros(grid), 0.0, g);
    };
    const double exact = std::max(directional_fd_error(ratio_residual, phi, psi, Lpsi, 1e-3),
                                  directional_fd_error(ratio_residual, phi, psi, Lpsi, 1e-4));
    report.checks.push_back(at_most("linearization_ratio_exact_" + tag(n, grid.points_per_axis()), exact,
                                    thresholds::kLinearizationExact));
  }
  {
    const double e16 = smooth_manufactured_error(16);
    const double e32 = smooth_manufactured_error(32);
    report.checks.push_back(at_least("spectral_convergence_ratio_16_to_32", e16 / e32,
                                     thresholds::kSpectralConvergenceRatio));
  }
}

void ricci_flat_suite(SuiteReport& report, const SuiteOptions&) {
  const Grid grid(2, 16);
  const PeriodicScalarField psi = PeriodicScalarField::sample(grid, [](std::span<const double> c) {
    return Complex(0.03 * std::cos(2 * kPi * c[0]) * std::cos(2 * kPi * c[2]));
  });
  const HermitianMetricField flat = HermitianField::identity(grid);
  const HermitianMetricField g = metric_from_potential(flat, psi);
  // ricci(g~) = ricci(g) - ddbar F vanishes for F = -log det g.
  const PeriodicScalarField F = PeriodicScalarField::from_real(grid, -det_field(g).real().log());
  const ContinuityResult r = continuity_solve(F, g, config_for(grid));
  const double inf = std::numeric_limits<double>::infinity();
  const double metric_err = r.converged() ? sup_distance(metric_from_potential(g, r.phi), flat) : inf;
  const double potential_err = r.converged() ? sup_error(r.phi, mean_zero_project(-psi)) : inf;
  report.checks.push_back(at_most("recovered_flat_metric", metric_err, thresholds::kRicciFlatMetric));
  report.checks.push_back(at_most("potential_minus_background", potential_err, thresholds::kRicciFlatMetric));
  report.checks.push_back(at_least("final_t", r.last_good_t, 1.0));
}

void poisson_suite(SuiteReport& report, const SuiteOptions&) {
  const Grid grid(1, 64);
  const HermitianMetricField g = HermitianField::identity(grid);
  report.checks.push_back(at_most(
      "oracle_zero_forcing", poisson_oracle_n1(PeriodicScalarField::zeros(grid), g).max_abs(), 1e-15));
  report.checks.push_back(at_most(
      "oracle_constant_forcing", poisson_oracle_n1(PeriodicScalarField::constant(grid, 0.7), g).max_abs(),
      1e-14));
  const PeriodicScalarField F = PeriodicScalarField::sample(grid, [](std::span<const double> c) {
    return Complex(0.3 * std::sin(2 * kPi * c[0]) * std::sin(2 * kPi * c[1]));
  });
  const PeriodicScalarField oracle = poisson_oracle_n1(F, g);
  const ContinuityResult r = continuity_solve(F, g, config_for(grid));
  const double diff = r.converged() ? sup_error(r.phi, oracle) : std::numeric_limits<double>::infinity();
  report.checks.push_back(at_most("solver_vs_oracle", diff, thresholds::kPoissonMatch));
  report.checks.push_back(at_most("ricci_prescription", ricci_prescription_error(r.phi, F, g),
                                  thresholds::kRicciPrescriptionN1));
}

using SuiteFn = void (*)(SuiteReport&, const SuiteOptions&);

SuiteFn suite_function(const std::string& name) {
  if (name == "identities") return identities_suite;
  if (name == "geometry") return geometry_suite;
  if (name == "uniqueness") return uniqueness_suite;
  if (name == "manufactured") return manufactured_suite;
  if (name == "ricci_flat") return ricci_flat_suite;
  if (name == "poisson_n1") return poisson_suite;
  return nullptr;
}

}  // namespace

bool SuiteReport::pass() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::string SuiteReport::to_json() const {
  nlohmann::json j;
  j["suite"] = name;
  j["pass"] = pass();
  j["seconds"] = seconds;
  j["checks"] = nlohmann::json::array();
  for (const CheckResult& c : checks) {
    // Non-finite measurements are reported as null.
    nlohmann::json measured = std::isfinite(c.measured) ? nlohmann::json(c.measured) : nlohmann::json();
    j["checks"].push_back(
        {{"name", c.name}, {"measured", measured}, {"threshold", c.threshold}, {"pass", c.pass}});
  }
  return j.dump(2);
}

// phi* = a exp(2 sin X) cos Y with X = 2 pi x1, Y = 2 pi y1.
constexpr double kSmoothAmplitude = 0.002;

PeriodicScalarField smooth_manufactured_potential(const Grid& grid) {
  return PeriodicScalarField::sample(grid, [](std::span<const double> c) {
    return Complex(kSmoothAmplitude * std::exp(2.0 * std::sin(2 * kPi * c[0])) * std::cos(2 * kPi * c[1]));
  });
}

PeriodicScalarField smooth_manufactured_forcing(const Grid& grid) {
  if (grid.complex_dim() != 1) throw InvalidArgument("smooth_manufactured_forcing requires n = 1");
  return PeriodicScalarField::sample(grid, [](std::span<const double> c) {
    const double X = 2 * kPi * c[0], Y = 2 * kPi * c[1];
    const double s = std::sin(X), co = std::cos(X);
    const double quarter_lap =
        kSmoothAmplitude * kPi * kPi * std::exp(2.0 * s) * std::cos(Y) * (4.0 * co * co - 2.0 * s - 1.0);
    return Complex(std::log1p(quarter_lap));
  });
}

PeriodicScalarField poisson_oracle_n1(const PeriodicScalarField& F, const HermitianMetricField& g_flat) {
  const Grid& grid = F.grid();
  require_same_grid(grid, g_flat.grid());
  if (grid.complex_dim() != 1) throw InvalidArgument("poisson_oracle_n1 requires n = 1");
  const Eigen::ArrayXd eF = F.real().exp();
  const double C = 1.0 / eF.mean();
  Eigen::ArrayXcd rhs = (C * eF - 1.0).cast<Complex>();
  const double zero_mode = std::abs(rhs.mean());
  if (zero_mode > 1e-12) {
    throw InvalidArgument("poisson_oracle_n1: right-hand side has mean " + std::to_string(zero_mode));
  }
  fft_forward(grid, rhs);
  const int N = grid.points_per_axis();
  for (int a = 0; a < N; ++a) {
    for (int b = 0; b < N; ++b) {
      const double kx = grid.wavenumber(a), ky = grid.wavenumber(b);
      const double symbol = -kPi * kPi * (kx * kx + ky * ky);
      Complex& c = rhs(a * N + b);
      c = (a == 0 && b == 0) ? Complex(0.0) : c / symbol;
    }
  }
  fft_inverse(grid, rhs);
  return PeriodicScalarField::from_real(grid, rhs.real());
}

PeriodicScalarField finite_difference_oracle(const PeriodicScalarField& f, int axis, int order) {
  const Grid& grid = f.grid();
  grid.check_axis(axis);
  std::vector<double> weights;
  if (order == 2) {
    weights = {0.5};
  } else if (order == 8) {
    weights = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  } else {
    throw InvalidArgument("finite_difference_oracle: order must be 2 or 8");
  }
  const int N = grid.points_per_axis();
  const Eigen::Index stride = grid.stride(axis);
  const double inv_h = static_cast<double>(N);
  Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(grid.size());
  for (Eigen::Index p = 0; p < grid.size(); ++p) {
    const int i = grid.index_along(p, axis);
    const Eigen::Index base = p - static_cast<Eigen::Index>(i) * stride;
    Complex acc = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m) {
      const int off = static_cast<int>(m) + 1;
      const Eigen::Index fwd = base + static_cast<Eigen::Index>((i + off) % N) * stride;
      const Eigen::Index bwd = base + static_cast<Eigen::Index>((i - off + N) % N) * stride;
      acc += weights[m] * (f.values()(fwd) - f.values()(bwd));
    }
    out(p) = acc * inv_h;
  }
  return PeriodicScalarField(grid, std::move(out));
}

PeriodicScalarField random_band_limited(const Grid& grid, std::uint64_t seed, int max_wavenumber, int terms) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> wave(-max_wavenumber, max_wavenumber);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
  const int axes = grid.num_axes();
  struct Term {
    std::array<int, 4> k{};
    double amp = 0;
    double phase = 0;
  };
  std::vector<Term> list(terms);
  for (Term& t : list) {
    double k2 = 0;
    for (int a = 0; a < axes; ++a) {
      t.k[a] = wave(rng);
      k2 += t.k[a] * t.k[a];
    }
    t.amp = unit(rng) / (1.0 + k2);
    t.phase = angle(rng);
  }
  // Each cosine contributes two conjugate Fourier coefficients.
  const int N = grid.points_per_axis();
  auto bin = [&](const std::array<int, 4>& k, int sign) {
    Eigen::Index flat = 0;
    for (int a = 0; a < axes; ++a) flat = flat * N + ((sign * k[a]) % N + N) % N;
    return flat;
  };
  const double scale = static_cast<double>(grid.size());
  Eigen::ArrayXcd hat = Eigen::ArrayXcd::Zero(grid.size());
  for (const Term& t : list) {
    const Complex c = 0.5 * t.amp * scale * std::polar(1.0, t.phase);
    hat(bin(t.k, 1)) += c;
    hat(bin(t.k, -1)) += std::conj(c);
  }
  fft_inverse(grid, hat);
  return PeriodicScalarField::from_real(grid, hat.real());
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"identities", "geometry",   "uniqueness",
                                              "manufactured", "ricci_flat", "poisson_n1"};
  return names;
}

bool is_suite_name(const std::string& name) {
  return name == "all" || suite_function(name) != nullptr;
}

SuiteReport run_suite(const std::string& name, const SuiteOptions& options) {
  if (!is_suite_name(name)) throw InvalidArgument("unknown suite: " + name);
  const ThreadScope single(1);
  const auto start = std::chrono::steady_clock::now();
  SuiteReport report{name, {}, 0.0};
  if (name == "all") {
    for (const std::string& sub : suite_names()) {
      const SuiteReport part = run_suite(sub, options);
      for (CheckResult c : part.checks) {
        c.name = sub + "/" + c.name;
        report.checks.push_back(std::move(c));
      }
    }
  } else {
    suite_function(name)(report, options);
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

PeriodicScalarField manufactured_potential_n1(const Grid& grid) {
  return PeriodicScalarField::sample(grid, [](std::span<const double> c) {
    return Complex(0.05 * std::cos(2 * kPi * c[0]) * std::cos(2 * kPi * c[1]));
  });
}

PeriodicScalarField manufactured_potential_n2(const Grid& grid) {
  return PeriodicScalarField::sample(grid, [](std::span<const double> c) {
    return Complex(0.03 * (std::cos(2 * kPi * c[0]) * std::cos(2 * kPi * c[3]) + std::cos(2 * kPi * c[2])));
  });
}

PeriodicScalarField forcing_from_potential(const PeriodicScalarField& phi, const HermitianMetricField& g) {
  const HermitianMetricField gt = metric_from_potential(g, phi);
  require_positive(gt, "forcing_from_potential");
  return PeriodicScalarField::from_real(g.grid(), (det_field(gt).real() / det_field(g).real()).log());
}

double ricci_prescription_error(const PeriodicScalarField& phi, const PeriodicScalarField& F,
                                const HermitianMetricField& g) {
  const HermitianMetricField gt = metric_from_potential(g, phi);
  const HermitianField diff = ricci_form(gt) - ricci_form(g) + complex_hessian_field(F.real_part());
  return sup_distance(diff, HermitianField(g.grid()));
}

}  // namespace cma
