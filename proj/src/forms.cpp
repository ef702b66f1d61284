// SPDX-License-Identifier: Apache-2.0

#include "cma/forms.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "cma/errors.hpp"

namespace cma {

namespace {

constexpr Complex kI{0.0, 1.0};

// Sign of moving a differential with index `idx` from the front of the
// ordered set `mask` into its sorted position.
double insertion_sign(IndexMask mask, int idx) {
  const IndexMask below = mask & ((1u << idx) - 1u);
  return std::popcount(below) % 2 == 0 ? 1.0 : -1.0;
}

// Sign of sorting the concatenation (a, b) of two disjoint ordered sets.
double merge_sign(IndexMask a, IndexMask b) {
  int inversions = 0;
  for (int i = 0; i < 32; ++i) {
    if (b & (1u << i)) inversions += std::popcount(a >> (i + 1));
  }
  return inversions % 2 == 0 ? 1.0 : -1.0;
}

// Adds del (when `holo`) and delbar (when `anti`) of alpha into the given
// outputs, transforming each coefficient forward once.
void differentiate(const PqForm& alpha, PqForm* holo, PqForm* anti) {
  const Grid& grid = alpha.grid();
  const int n = grid.complex_dim();
  // dzbar^k moves past the p holomorphic differentials first.
  const double p_sign = alpha.p() % 2 == 0 ? 1.0 : -1.0;
  Eigen::ArrayXcd hat(grid.size());
  Eigen::ArrayXcd d(grid.size());
  for (IndexMask J : alpha.holomorphic_indices()) {
    for (IndexMask K : alpha.antiholomorphic_indices()) {
      hat = alpha.component(J, K);
      fft_forward(grid, hat);
      for (int j = 0; j < n; ++j) {
        const IndexMask bit = 1u << j;
        if (holo && !(J & bit)) {
          d = hat * wirtinger_symbol_table(grid, j, false);
          fft_inverse(grid, d);
          holo->component(J | bit, K) += insertion_sign(J, j) * d;
        }
        if (anti && !(K & bit)) {
          d = hat * wirtinger_symbol_table(grid, j, true);
          fft_inverse(grid, d);
          anti->component(J, K | bit) += (p_sign * insertion_sign(K, j)) * d;
        }
      }
    }
  }
}

}  // namespace

std::vector<IndexMask> index_sets(int n, int size) {
  std::vector<IndexMask> out;
  if (size < 0 || size > n) return out;
  for (IndexMask m = 0; m < (1u << n); ++m) {
    if (std::popcount(m) == size) out.push_back(m);
  }
  // Lexicographic order of the sorted index lists.
  std::sort(out.begin(), out.end(), [](IndexMask a, IndexMask b) {
    while (a && b) {
      const int ia = std::countr_zero(a), ib = std::countr_zero(b);
      if (ia != ib) return ia < ib;
      a &= a - 1;
      b &= b - 1;
    }
    return false;
  });
  return out;
}

// --- PqForm -------------------------------------------------------------------

PqForm::PqForm(const Grid& grid, int p, int q)
    : grid_(grid),
      p_(p),
      q_(q),
      holo_(index_sets(grid.complex_dim(), p)),
      anti_(index_sets(grid.complex_dim(), q)),
      components_(holo_.size() * anti_.size(), Eigen::ArrayXcd::Zero(grid.size())) {
  if (p < 0 || q < 0) throw InvalidArgument("negative form degree");
}

PqForm PqForm::scalar(const PeriodicScalarField& f) {
  PqForm out(f.grid(), 0, 0);
  out.component(0, 0) = f.values();
  return out;
}

std::size_t PqForm::slot(IndexMask J, IndexMask K) const {
  const auto j = std::find(holo_.begin(), holo_.end(), J);
  const auto k = std::find(anti_.begin(), anti_.end(), K);
  if (j == holo_.end() || k == anti_.end()) {
    throw InvalidArgument("multi-index does not match bidegree (" + std::to_string(p_) + "," +
                          std::to_string(q_) + ")");
  }
  return static_cast<std::size_t>(j - holo_.begin()) * anti_.size() +
         static_cast<std::size_t>(k - anti_.begin());
}

const Eigen::ArrayXcd& PqForm::component(IndexMask J, IndexMask K) const {
  return components_[slot(J, K)];
}

Eigen::ArrayXcd& PqForm::component(IndexMask J, IndexMask K) { return components_[slot(J, K)]; }

double PqForm::max_abs() const {
  double m = 0.0;
  for (const auto& c : components_) m = std::max(m, c.abs().maxCoeff());
  return m;
}

PqForm& PqForm::operator+=(const PqForm& other) {
  require_same_grid(grid_, other.grid_);
  if (p_ != other.p_ || q_ != other.q_) throw InvalidArgument("bidegree mismatch in form sum");
  for (std::size_t i = 0; i < components_.size(); ++i) components_[i] += other.components_[i];
  return *this;
}

PqForm& PqForm::operator-=(const PqForm& other) {
  require_same_grid(grid_, other.grid_);
  if (p_ != other.p_ || q_ != other.q_) throw InvalidArgument("bidegree mismatch in form sum");
  for (std::size_t i = 0; i < components_.size(); ++i) components_[i] -= other.components_[i];
  return *this;
}

PqForm& PqForm::operator*=(Complex s) {
  for (auto& c : components_) c *= s;
  return *this;
}

// --- Form ---------------------------------------------------------------------

Form::Form(const PqForm& piece) : grid_(piece.grid()) {
  pieces_.emplace(std::make_pair(piece.p(), piece.q()), piece);
}

PqForm Form::piece(int p, int q) const {
  if (auto it = pieces_.find({p, q}); it != pieces_.end()) return it->second;
  return PqForm(grid_, p, q);
}

double Form::max_abs() const {
  double m = 0.0;
  for (const auto& [_, piece] : pieces_) m = std::max(m, piece.max_abs());
  return m;
}

Form& Form::operator+=(const Form& other) {
  require_same_grid(grid_, other.grid_);
  for (const auto& [key, piece] : other.pieces_) {
    if (auto it = pieces_.find(key); it != pieces_.end()) {
      it->second += piece;
    } else {
      pieces_.emplace(key, piece);
    }
  }
  return *this;
}

Form& Form::operator-=(const Form& other) {
  Form negated = other;
  negated *= -1.0;
  return *this += negated;
}

Form& Form::operator*=(Complex s) {
  for (auto& [_, piece] : pieces_) piece *= s;
  return *this;
}

// --- differentials ---------------------------------------------------------------

PqForm del(const PqForm& alpha) {
  PqForm out(alpha.grid(), alpha.p() + 1, alpha.q());
  if (out.num_components() > 0) differentiate(alpha, &out, nullptr);
  return out;
}

PqForm delbar(const PqForm& alpha) {
  PqForm out(alpha.grid(), alpha.p(), alpha.q() + 1);
  if (out.num_components() > 0) differentiate(alpha, nullptr, &out);
  return out;
}

std::pair<PqForm, PqForm> exterior_d(const PqForm& alpha) {
  PqForm holo(alpha.grid(), alpha.p() + 1, alpha.q());
  PqForm anti(alpha.grid(), alpha.p(), alpha.q() + 1);
  differentiate(alpha, holo.num_components() > 0 ? &holo : nullptr,
                anti.num_components() > 0 ? &anti : nullptr);
  return {std::move(holo), std::move(anti)};
}

Form exterior_d(const Form& alpha) {
  Form out(alpha.grid());
  const int n = alpha.grid().complex_dim();
  for (const auto& [_, piece] : alpha.pieces()) {
    auto [holo, anti] = exterior_d(piece);
    if (holo.p() <= n) out += Form(holo);
    if (anti.q() <= n) out += Form(anti);
  }
  return out;
}

Form d_c(const PeriodicScalarField& u) {
  if (!u.is_real()) throw NotRealField("d_c requires a real function");
  const PqForm f = PqForm::scalar(u.real_part());
  Form out(-kI * del(f));
  out += Form(kI * delbar(f));
  return out;
}

// --- wedge ----------------------------------------------------------------------

PqForm wedge(const PqForm& alpha, const PqForm& beta) {
  require_same_grid(alpha.grid(), beta.grid());
  const int n = alpha.grid().complex_dim();
  const int p = alpha.p() + beta.p();
  const int q = alpha.q() + beta.q();
  if (p > n || q > n) {
    throw InvalidArgument("wedge degree overflow: (" + std::to_string(p) + "," +
                          std::to_string(q) + ") exceeds n = " + std::to_string(n));
  }
  PqForm out(alpha.grid(), p, q);
  // Moving dz^{J2} past dzbar^{K1}.
  const double cross_sign = (alpha.q() * beta.p()) % 2 == 0 ? 1.0 : -1.0;
  for (IndexMask J1 : alpha.holomorphic_indices()) {
    for (IndexMask K1 : alpha.antiholomorphic_indices()) {
      const Eigen::ArrayXcd& a = alpha.component(J1, K1);
      for (IndexMask J2 : beta.holomorphic_indices()) {
        if (J1 & J2) continue;
        for (IndexMask K2 : beta.antiholomorphic_indices()) {
          if (K1 & K2) continue;
          const double sign = cross_sign * merge_sign(J1, J2) * merge_sign(K1, K2);
          out.component(J1 | J2, K1 | K2) += sign * (a * beta.component(J2, K2));
        }
      }
    }
  }
  return out;
}

Form wedge(const Form& alpha, const Form& beta) {
  require_same_grid(alpha.grid(), beta.grid());
  const int n = alpha.grid().complex_dim();
  Form out(alpha.grid());
  for (const auto& [ka, a] : alpha.pieces()) {
    for (const auto& [kb, b] : beta.pieces()) {
      if (ka.first + kb.first > n || ka.second + kb.second > n) continue;
      out += Form(wedge(a, b));
    }
  }
  return out;
}

// --- integration and Kahler forms -------------------------------------------------

Complex integrate_top(const PqForm& alpha) {
  const int n = alpha.grid().complex_dim();
  if (alpha.p() != n || alpha.q() != n) {
    throw InvalidArgument("integrate_top needs an (n,n)-form, got (" + std::to_string(alpha.p()) +
                          "," + std::to_string(alpha.q()) + ")");
  }
  const IndexMask all = (1u << n) - 1u;
  // dz^1..dz^n dzbar^1..dzbar^n = (-1)^{n(n-1)/2} prod_j (dz^j dzbar^j).
  const double reorder = (n * (n - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
  Complex factor = reorder;
  for (int j = 0; j < n; ++j) factor *= Complex(0.0, -2.0);
  return factor * integrate(PeriodicScalarField(alpha.grid(), alpha.component(all, all)));
}

PqForm kahler_form(const HermitianMetricField& g) {
  PqForm omega(g.grid(), 1, 1);
  for (int j = 0; j < g.dim(); ++j)
    for (int k = 0; k < g.dim(); ++k) omega.component(1u << j, 1u << k) = (0.5 * kI) * g(j, k);
  return omega;
}

double real_11_deviation(const PqForm& alpha) {
  if (alpha.p() != 1 || alpha.q() != 1) throw InvalidArgument("real_11_deviation needs a (1,1)-form");
  const int n = alpha.grid().complex_dim();
  double dev = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      // h = -i c; Hermitian h  <=>  c_{jk} = -conj(c_{kj}).
      const Eigen::ArrayXcd& cjk = alpha.component(1u << j, 1u << k);
      const Eigen::ArrayXcd& ckj = alpha.component(1u << k, 1u << j);
      dev = std::max(dev, (cjk + ckj.conjugate()).abs().maxCoeff());
    }
  }
  return dev;
}

double uniqueness_functional(const PeriodicScalarField& phi1, const PeriodicScalarField& phi2,
                             const HermitianMetricField& g) {
  require_same_grid(phi1.grid(), g.grid());
  require_same_grid(phi2.grid(), g.grid());
  const HermitianMetricField g1 = metric_from_potential(g, phi1);
  const HermitianMetricField g2 = metric_from_potential(g, phi2);
  require_positive(g1, "uniqueness_functional (first potential)");
  require_positive(g2, "uniqueness_functional (second potential)");

  const int n = g.dim();
  const PeriodicScalarField u = (phi1 - phi2).real_part();
  const Form du = exterior_d(Form(PqForm::scalar(u)));
  const Form core = wedge(du, d_c(u));
  const Form omega1(kahler_form(g1));
  const Form omega2(kahler_form(g2));

  auto power = [&](const Form& omega, int k) {
    Form out(PqForm::scalar(PeriodicScalarField::constant(g.grid(), 1.0)));
    for (int i = 0; i < k; ++i) out = wedge(out, omega);
    return out;
  };

  Complex total = 0.0;
  for (int k = 0; k < n; ++k) {
    const Form top = wedge(wedge(core, power(omega1, k)), power(omega2, n - k - 1));
    total += integrate_top(top.piece(n, n));
  }
  return total.real();
}

}  // namespace cma
