// triweyl — Floquet–Bloch band structure and three-fold Weyl points of -Δ + V.
// SPDX-License-Identifier: MIT
#pragma once

/// \file potential.hpp
/// \brief Real periodic potentials as sparse Fourier coefficient maps,
///        builders for the example potentials, and symmetry classification.
///
/// Normalization.  V(x) = Σ_q V̂_q e^{i q·x} with V̂_q = (1/|Ω|) ∫_Ω V e^{-i q·x},
/// i.e. coefficients of the *normalized* Fourier series.  With this convention
/// a unit cosine cos(q_m·x) carries 1/2 at ±m and the reference potential has
/// V_{1,0,0} = 5/2.

#include "triweyl/lattice.hpp"

#include <complex>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace triweyl {

using Complex = std::complex<double>;

/// Magnitude below which coefficients are dropped on construction; keeps the
/// convolution stencil sparse and symmetry checks exact.
inline constexpr double kCoefficientPruneTol = 1e-15;

/// A finitely supported Fourier coefficient map V̂ : Λ* → ℂ.
struct FourierPotential {
  std::map<DualIndex, Complex> coeffs;

  /// Coefficient at m; absent entries are zero.
  Complex coefficient(const DualIndex& m) const {
    const auto it = coeffs.find(m);
    return it == coeffs.end() ? Complex(0.0, 0.0) : it->second;
  }

  /// Accumulate a coefficient (used by builders; prune afterwards).
  void add(const DualIndex& m, Complex c) { coeffs[m] += c; }

  /// Drop entries below the prune tolerance.
  void prune() {
    for (auto it = coeffs.begin(); it != coeffs.end();) {
      if (std::abs(it->second) < kCoefficientPruneTol)
        it = coeffs.erase(it);
      else
        ++it;
    }
  }

  /// Sum of coefficient magnitudes (scale for tolerance decisions).
  double l1_norm() const {
    double s = 0.0;
    for (const auto& [m, c] : coeffs) s += std::abs(c);
    return s;
  }

  friend FourierPotential operator+(const FourierPotential& x, const FourierPotential& y) {
    FourierPotential out = x;
    for (const auto& [m, c] : y.coeffs) out.add(m, c);
    out.prune();
    return out;
  }
  friend FourierPotential operator*(double s, const FourierPotential& v) {
    FourierPotential out;
    for (const auto& [m, c] : v.coeffs) out.coeffs[m] = s * c;
    out.prune();
    return out;
  }
};

/// Build Σ A_k cos(q_{m_k}·x): each term contributes A/2 at m and at -m.
/// Duplicate indices accumulate.
inline FourierPotential from_cosines(const std::vector<std::pair<DualIndex, double>>& terms) {
  FourierPotential v;
  for (const auto& [m, amp] : terms) {
    v.add(m, Complex(0.5 * amp, 0.0));
    v.add(-m, Complex(0.5 * amp, 0.0));
  }
  v.prune();
  return v;
}

/// Build Σ A_k sin(q_{m_k}·x): each term contributes -iA/2 at m, +iA/2 at -m.
/// The result is real-valued and odd.
inline FourierPotential from_sines(const std::vector<std::pair<DualIndex, double>>& terms) {
  FourierPotential v;
  for (const auto& [m, amp] : terms) {
    v.add(m, Complex(0.0, -0.5 * amp));
    v.add(-m, Complex(0.0, 0.5 * amp));
  }
  v.prune();
  return v;
}

/// Cosine wavevector index sets of the two building blocks:
/// V1 uses {q1, q2-q1, q3-q2, q3} and V2 uses {q2, q3-q1}.
inline const std::vector<DualIndex>& v1_wavevectors() {
  static const std::vector<DualIndex> w = {{1, 0, 0}, {-1, 1, 0}, {0, -1, 1}, {0, 0, 1}};
  return w;
}
inline const std::vector<DualIndex>& v2_wavevectors() {
  static const std::vector<DualIndex> w = {{0, 1, 0}, {-1, 0, 1}};
  return w;
}

/// c1·V1 + c2·V2; admissible if and only if c1 = c2.
inline FourierPotential example_potential(double c1, double c2) {
  std::vector<std::pair<DualIndex, double>> terms;
  for (const DualIndex& m : v1_wavevectors()) terms.emplace_back(m, c1);
  for (const DualIndex& m : v2_wavevectors()) terms.emplace_back(m, c2);
  return from_cosines(terms);
}

/// The admissible reference potential: example_potential(5,5),
/// twelve coefficients all equal to 5/2.
inline FourierPotential reference_potential() { return example_potential(5.0, 5.0); }

/// The time-reversal-breaking perturbation: example_potential(1,0);
/// real, even, R-invariant, but not T-invariant.
inline FourierPotential t_breaking_perturbation() { return example_potential(1.0, 0.0); }

/// The inversion-breaking perturbation: unit sines on all six example
/// wavevectors; real and odd (twelve coefficients of modulus 1/2).
inline FourierPotential inversion_breaking_perturbation() {
  std::vector<std::pair<DualIndex, double>> terms;
  for (const DualIndex& m : v1_wavevectors()) terms.emplace_back(m, 1.0);
  for (const DualIndex& m : v2_wavevectors()) terms.emplace_back(m, 1.0);
  return from_sines(terms);
}

/// Normalized coefficient V_{α,β,γ} = V̂ at index (α,β,γ).
inline Complex coeff(const FourierPotential& v, std::int64_t alpha, std::int64_t beta,
                     std::int64_t gamma) {
  return v.coefficient({alpha, beta, gamma});
}

/// Symmetry classification of a potential (Def. of admissibility: all four).
struct AdmissibilityReport {
  bool is_real = false;
  bool is_even = false;
  bool is_R_invariant = false;
  bool is_T_invariant = false;
  double worst_real = 0.0;  ///< max |V̂_{-m} - conj V̂_m|
  double worst_even = 0.0;  ///< max |V̂_{-m} - V̂_m|
  double worst_R = 0.0;     ///< max |V̂_{Rm} - V̂_m|
  double worst_T = 0.0;     ///< max |V̂_{Tm} - V̂_m|

  bool admissible() const { return is_real && is_even && is_R_invariant && is_T_invariant; }
};

/// Check the four coefficient-level symmetry conditions:
/// real ⇔ V̂_{-m} = conj V̂_m; even ⇔ V̂_{-m} = V̂_m;
/// R-invariant ⇔ V̂_{Rm} = V̂_m; T-invariant ⇔ V̂_{Tm} = V̂_m.
inline AdmissibilityReport check_admissible(const FourierPotential& v, double tol = 1e-12) {
  AdmissibilityReport r;
  // Work on the union of the support with its images so missing partners count.
  std::set<DualIndex> support;
  for (const auto& [m, c] : v.coeffs) {
    support.insert(m);
    support.insert(-m);
    support.insert(dual_action(SymOp::R, m));
    support.insert(dual_action(SymOp::T, m));
  }
  for (const DualIndex& m : support) {
    const Complex cm = v.coefficient(m);
    const Complex cneg = v.coefficient(-m);
    r.worst_real = std::max(r.worst_real, std::abs(cneg - std::conj(cm)));
    r.worst_even = std::max(r.worst_even, std::abs(cneg - cm));
    r.worst_R = std::max(r.worst_R, std::abs(v.coefficient(dual_action(SymOp::R, m)) - cm));
    r.worst_T = std::max(r.worst_T, std::abs(v.coefficient(dual_action(SymOp::T, m)) - cm));
  }
  r.is_real = r.worst_real <= tol;
  r.is_even = r.worst_even <= tol;
  r.is_R_invariant = r.worst_R <= tol;
  r.is_T_invariant = r.worst_T <= tol;
  return r;
}

/// max |V̂_{-m} + V̂_m|: zero exactly for odd potentials.
inline double odd_violation(const FourierPotential& v) {
  double worst = 0.0;
  for (const auto& [m, c] : v.coeffs)
    worst = std::max(worst, std::abs(v.coefficient(-m) + c));
  return worst;
}

/// Evaluate V(x) = Σ V̂_m e^{i q_m·x}.  The potential must be real-valued;
/// a residual imaginary part above 1e-12·Σ|V̂| raises a domain error.
inline double evaluate(const FourierPotential& v, const LatticeSpec& lat,
                       const Eigen::Vector3d& x) {
  Complex sum(0.0, 0.0);
  for (const auto& [m, c] : v.coeffs)
    sum += c * std::exp(Complex(0.0, lat.dual_vector(m).dot(x)));
  if (std::abs(sum.imag()) > 1e-12 * std::max(1e-300, v.l1_norm()))
    throw std::domain_error("evaluate: potential is not real-valued (imaginary residue " +
                            std::to_string(sum.imag()) + ")");
  return sum.real();
}

/// Project a potential onto the admissible class: realify, evenize, then
/// average coefficients over the finite group generated by the R and T dual
/// actions.  Idempotent; the output always passes check_admissible.
inline FourierPotential symmetrized(const FourierPotential& v) {
  FourierPotential real_even;
  for (const auto& [m, c] : v.coeffs) {
    // (V̂_m + conj V̂_{-m})/2 enforces realness; a further average with the
    // -m entry enforces evenness.  Combined: real part of the even average.
    const Complex even_avg = 0.5 * (v.coefficient(m) + v.coefficient(-m));
    real_even.coeffs[m] = Complex(even_avg.real(), 0.0);
  }
  real_even.prune();
  // Enumerate the finite group generated by the two dual actions by closure.
  std::vector<SymOp> gens = {SymOp::R, SymOp::T};
  FourierPotential out;
  std::set<DualIndex> done;
  for (const auto& [m0, c0] : real_even.coeffs) {
    if (done.count(m0)) continue;
    // Orbit of m0 under the group (breadth-first closure).
    std::set<DualIndex> orbit = {m0};
    std::vector<DualIndex> frontier = {m0};
    while (!frontier.empty()) {
      std::vector<DualIndex> next;
      for (const DualIndex& m : frontier)
        for (SymOp g : gens) {
          const DualIndex im = dual_action(g, m);
          if (orbit.insert(im).second) next.push_back(im);
        }
      frontier.swap(next);
    }
    Complex avg(0.0, 0.0);
    for (const DualIndex& m : orbit) avg += real_even.coefficient(m);
    avg /= static_cast<double>(orbit.size());
    for (const DualIndex& m : orbit) {
      out.coeffs[m] = avg;
      done.insert(m);
    }
  }
  // Re-evenize over the union of the support and its negation: group orbits
  // need not be inversion-symmetric.
  std::set<DualIndex> keys;
  for (const auto& [m, c] : out.coeffs) {
    keys.insert(m);
    keys.insert(-m);
  }
  FourierPotential out2;
  for (const DualIndex& m : keys)
    out2.coeffs[m] = 0.5 * (out.coefficient(m) + out.coefficient(-m));
  out2.prune();
  return out2;
}

}  // namespace triweyl
