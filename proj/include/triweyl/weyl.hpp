// triweyl — Floquet–Bloch band structure and three-fold Weyl points of -Δ + V.
// SPDX-License-Identifier: MIT
#pragma once

/// \file weyl.hpp
/// \brief Detection and certification of the three-fold degeneracy at K,
///        the bifurcation matrix M(κ), the υ-invariants and Fermi velocity,
///        the cubic dispersion model, numerical cone fitting, and the
///        representation matrices of the R and T symmetries on the triple.
///
/// Conventions.  The degenerate triple (φ₁, φ₂, φ₃) is gauge-fixed so that
/// character(φ_ℓ) = i^ℓ, the largest-modulus coefficients of φ₁ and φ₂ are
/// real positive, and φ₃ is the entrywise conjugate of φ₁ (the coefficient
/// form of φ₃(x) = conj φ₁(−x)).  Pairing vectors are ⟨φ_A, 2i∇φ_B⟩ evaluated
/// in closed form; M(κ)_{ℓj} = κ·⟨φ_ℓ, 2i∇φ_j⟩.

#include "triweyl/spectral.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace triweyl {

/// Eigenvectors of the rotation matrix: R ω₁ = i ω₁, R ω₂ = −ω₂, R ω₃ = −i ω₃.
inline const Eigen::Vector3cd& omega1() {
  static const Eigen::Vector3cd w = (Eigen::Vector3cd() << Complex(1, 0), Complex(0, -1),
                                     Complex(0, 0)).finished() / std::numbers::sqrt2;
  return w;
}
inline const Eigen::Vector3cd& omega2() {
  static const Eigen::Vector3cd w =
      (Eigen::Vector3cd() << Complex(0, 0), Complex(0, 0), Complex(1, 0)).finished();
  return w;
}
inline const Eigen::Vector3cd& omega3() {
  static const Eigen::Vector3cd w = omega1().conjugate();
  return w;
}

/// Coefficient vector of the free mode Φ_ℓ^(0), ℓ = 1..4: entries
/// (1, i^{−ℓ}, i^{−2ℓ}, i^{−3ℓ})/2 at the minimal-shell indices
/// (0,0,0), (1,0,0), (0,1,0), (0,0,1).
inline Eigen::VectorXcd free_mode_vector(const PlaneWaveBasis& basis, int ell) {
  if (ell < 1 || ell > 4) throw std::invalid_argument("free_mode_vector: ell must be 1..4");
  static const std::array<DualIndex, 4> shell = {
      DualIndex{0, 0, 0}, DualIndex{1, 0, 0}, DualIndex{0, 1, 0}, DualIndex{0, 0, 1}};
  const Complex mi(0, -1);  // i^{-1}
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.size());
  Complex w(1, 0);
  const Complex step = std::pow(mi, ell);
  for (const DualIndex& m : shell) {
    const int slot = basis.find(m);
    if (slot < 0) throw std::invalid_argument("free_mode_vector: minimal shell not in basis");
    v[slot] = 0.5 * w;
    w *= step;
  }
  return v;
}

/// Orthonormal gauge-fixed triple spanning the three-fold eigenspace at K.
struct EigenTriple {
  double mu_star = 0.0;
  int band_first = 0;  ///< 0-based index of the lowest band in the triple
  Eigen::VectorXcd phi1, phi2, phi3;  ///< characters i, −1, −i
  double max_residual = 0.0;          ///< max_ℓ ‖(H(K) − μ*)φ_ℓ‖
  double orthonormality_defect = 0.0;
  double conjugation_defect = 0.0;  ///< ‖φ₃ − conj φ₁‖ (zero by construction)
};

/// Gauge-fix three orthonormal vectors spanning a cluster with sector
/// signature (i:1, −1:1, −i:1): phase-pin φ₁ and φ₂ by making their
/// largest-modulus coefficient real positive (first such slot on ties),
/// and slave φ₃ to the entrywise conjugate of φ₁.
inline EigenTriple gauge_fix(const PlaneWaveBasis& basis, const FourierPotential& v,
                             double mu_star, int band_first, const Eigen::MatrixXcd& span) {
  if (span.cols() != 3) throw std::invalid_argument("gauge_fix: need exactly three vectors");
  const auto sectors = sector_bases(basis);
  const SectorSignature sig = sector_signature(basis, sectors, span);
  if (!(sig.counts == std::array<int, 4>{0, 1, 1, 1} && sig.mixed == 0))
    throw std::invalid_argument(
        "gauge_fix: sector projection rank-deficient, signature is " + sig.to_string() +
        " instead of i:1,-1:1,-i:1");
  // pure_vectors columns are grouped in canonical character order: i, −1 (−i unused).
  const auto pin_phase = [](Eigen::VectorXcd vec) {
    int best = 0;
    for (int i = 1; i < vec.size(); ++i)
      if (std::abs(vec[i]) > std::abs(vec[best])) best = i;
    const Complex c = vec[best];
    if (std::abs(c) == 0.0) throw std::logic_error("gauge_fix: zero vector cannot be pinned");
    vec *= std::conj(c) / std::abs(c);
    return vec;
  };
  EigenTriple t;
  t.mu_star = mu_star;
  t.band_first = band_first;
  t.phi1 = pin_phase(sig.pure_vectors.col(0));
  t.phi2 = pin_phase(sig.pure_vectors.col(1));
  t.phi3 = t.phi1.conjugate();
  t.conjugation_defect = 0.0;

  const Eigen::MatrixXcd h = assemble_hamiltonian(basis, v, basis.center_vector());
  Eigen::MatrixXcd phis(basis.size(), 3);
  phis << t.phi1, t.phi2, t.phi3;
  t.max_residual = (h * phis - mu_star * phis).colwise().norm().maxCoeff();
  Eigen::MatrixXcd gram = phis.adjoint() * phis;
  gram -= Eigen::MatrixXcd::Identity(3, 3);
  t.orthonormality_defect = gram.cwiseAbs().maxCoeff();
  return t;
}

/// Convenience: the gauge-fixed free triple (Φ₁^(0), Φ₂^(0), Φ₃^(0)).
inline EigenTriple free_triple(const PlaneWaveBasis& basis) {
  Eigen::MatrixXcd span(basis.size(), 3);
  span << free_mode_vector(basis, 1), free_mode_vector(basis, 2), free_mode_vector(basis, 3);
  return gauge_fix(basis, FourierPotential{}, 0.75 * basis.lattice.q * basis.lattice.q, 0, span);
}

/// One degenerate cluster of the K spectrum with its sector content.
struct ClusterInfo {
  int first = 0, last = 0;  ///< inclusive band range (0-based)
  double mu = 0.0;
  SectorSignature signature;
  int size() const { return last - first + 1; }
};

/// Outcome of the Weyl-candidate search: either a certified triple or a
/// diagnosis of what was found instead.
struct WeylSearch {
  std::optional<EigenTriple> triple;
  std::vector<ClusterInfo> clusters;   ///< clusters covering the scanned bands
  std::string multiplicity_pattern;    ///< e.g. "3", "2+1", "4" (spectral order)
  KSolveResult solve;                  ///< the underlying K solve
  double gap_above = 0.0;  ///< distance from the triple (or lowest cluster) to the next band
};

/// Locate the lowest eigenvalue cluster at K with numerical multiplicity 3 and
/// sector signature (i:1, −1:1, −i:1, 1:0); gauge-fix and return it.  When no
/// cluster within the scanned bands qualifies the result carries a diagnosis
/// (cluster multiplicities and signatures) instead of a triple — never throws
/// for a failed search.
inline WeylSearch find_weyl_candidate(const PlaneWaveBasis& basis, const FourierPotential& v,
                                      int scan_bands = 8) {
  WeylSearch out;
  out.solve = solve_at_K(basis, v);
  const auto sectors = sector_bases(basis);
  const auto ranges = cluster_ranges(out.solve.bands.mu);
  scan_bands = std::min(scan_bands, basis.size());
  for (const auto& [first, last] : ranges) {
    if (first >= scan_bands) break;
    ClusterInfo info;
    info.first = first;
    info.last = last;
    info.mu = out.solve.bands.mu[first];
    info.signature = sector_signature(
        basis, sectors, out.solve.bands.vectors.middleCols(first, last - first + 1));
    out.clusters.push_back(info);
  }
  std::string pattern;
  int covered = 0;
  for (const ClusterInfo& c : out.clusters) {
    if (covered >= 3 && !pattern.empty()) break;
    if (!pattern.empty()) pattern += "+";
    pattern += std::to_string(c.size());
    covered += c.size();
  }
  out.multiplicity_pattern = pattern;
  for (const ClusterInfo& c : out.clusters) {
    const bool qualifies = c.size() == 3 && c.signature.mixed == 0 &&
                           c.signature.counts == std::array<int, 4>{0, 1, 1, 1};
    if (!qualifies) continue;
    out.triple = gauge_fix(basis, v, c.mu, c.first,
                           out.solve.bands.vectors.middleCols(c.first, 3));
    out.gap_above = (c.last + 1 < basis.size())
                        ? out.solve.bands.mu[c.last + 1] - out.solve.bands.mu[c.last]
                        : 0.0;
    break;
  }
  if (!out.triple && !out.clusters.empty()) {
    const ClusterInfo& c = out.clusters.front();
    out.gap_above = (c.last + 1 < basis.size())
                        ? out.solve.bands.mu[c.last + 1] - out.solve.bands.mu[c.last]
                        : 0.0;
  }
  return out;
}

/// Closed-form pairing ⟨φ_A, 2i∇φ_B⟩ = −2 Σ_m conj(a_m) b_m (K + q_m).
inline Eigen::Vector3cd pairing_vector(const PlaneWaveBasis& basis, const Eigen::VectorXcd& a,
                                       const Eigen::VectorXcd& b) {
  Eigen::Vector3cd acc = Eigen::Vector3cd::Zero();
  for (int i = 0; i < basis.size(); ++i) {
    const Complex w = -2.0 * std::conj(a[i]) * b[i];
    acc += w * basis.wavevector(i);
  }
  return acc;
}

/// Bifurcation matrix M(κ)_{ℓj} = κ · ⟨φ_ℓ, 2i∇φ_j⟩ — Hermitian, zero diagonal.
inline Eigen::Matrix3cd bifurcation_matrix(const PlaneWaveBasis& basis, const EigenTriple& t,
                                           const Eigen::Vector3d& kappa) {
  if (kappa.norm() == 0.0)
    throw std::domain_error("bifurcation_matrix: direction must be nonzero");
  const std::array<const Eigen::VectorXcd*, 3> phi = {&t.phi1, &t.phi2, &t.phi3};
  const Eigen::Vector3cd kc = kappa.cast<Complex>();
  Eigen::Matrix3cd m;
  for (int l = 0; l < 3; ++l)
    for (int j = 0; j < 3; ++j)
      m(l, j) = kc.dot(pairing_vector(basis, *phi[static_cast<std::size_t>(l)],
                                      *phi[static_cast<std::size_t>(j)]));
  return m;
}

/// The three couplings υ₁, υ₂, υ₃ and the off-direction residuals of all six
/// ordered pairings.
struct UpsilonSet {
  Complex u1{0, 0}, u2{0, 0}, u3{0, 0};
  /// ‖p_{ℓj} − ω⟨ω, p_{ℓj}⟩‖ for (ℓj) = 12, 23, 31, 21, 32, 13 against the
  /// required directions ω₁, ω₁, ω₂, ω₃, ω₃, ω₂.
  std::array<double, 6> off_residuals = {0, 0, 0, 0, 0, 0};
  double max_off_residual() const {
    double m = 0;
    for (double r : off_residuals) m = std::max(m, r);
    return m;
  }
};

/// Extract υ₁ = ⟨ω₁, p₁₂⟩, υ₂ = ⟨ω₁, p₂₃⟩, υ₃ = ⟨ω₂, p₃₁⟩ from a gauge-fixed
/// triple, reporting for each of the six pairings the component orthogonal to
/// its required rotation-eigenvector direction.
inline UpsilonSet extract_upsilons(const PlaneWaveBasis& basis, const EigenTriple& t) {
  const std::array<const Eigen::VectorXcd*, 3> phi = {&t.phi1, &t.phi2, &t.phi3};
  const auto pairing = [&](int l, int j) {
    return pairing_vector(basis, *phi[static_cast<std::size_t>(l - 1)],
                          *phi[static_cast<std::size_t>(j - 1)]);
  };
  const auto off = [](const Eigen::Vector3cd& p, const Eigen::Vector3cd& w) {
    return (p - w * w.dot(p)).norm();
  };
  UpsilonSet u;
  const Eigen::Vector3cd p12 = pairing(1, 2), p23 = pairing(2, 3), p31 = pairing(3, 1);
  const Eigen::Vector3cd p21 = pairing(2, 1), p32 = pairing(3, 2), p13 = pairing(1, 3);
  u.u1 = omega1().dot(p12);
  u.u2 = omega1().dot(p23);
  u.u3 = omega2().dot(p31);
  u.off_residuals = {off(p12, omega1()), off(p23, omega1()), off(p31, omega2()),
                     off(p21, omega3()), off(p32, omega3()), off(p13, omega2())};
  return u;
}

/// Structural identities of the υ-triple: equal moduli, purely imaginary
/// product, and the nondegeneracy v_F = |υ₁| > 0.
struct StructureReport {
  double modulus_spread_rel = 0.0;  ///< (max|υ| − min|υ|) / max|υ|
  double re_product_rel = 0.0;      ///< |Re(υ₁υ₂υ₃)| / |υ₁υ₂υ₃|
  double v_F = 0.0;
  double arg_product = 0.0;  ///< arg(υ₁υ₂υ₃) in [0, 2π)
  bool moduli_equal = false;
  bool product_imaginary = false;
  bool velocity_nonzero = false;
  bool all_hold() const { return moduli_equal && product_imaginary && velocity_nonzero; }
};

inline StructureReport verify_structure(const UpsilonSet& u, double tol = 1e-6) {
  StructureReport r;
  const double a1 = std::abs(u.u1), a2 = std::abs(u.u2), a3 = std::abs(u.u3);
  const double hi = std::max({a1, a2, a3});
  const double lo = std::min({a1, a2, a3});
  r.modulus_spread_rel = hi > 0 ? (hi - lo) / hi : 0.0;
  const Complex prod = u.u1 * u.u2 * u.u3;
  r.re_product_rel = std::abs(prod) > 0 ? std::abs(prod.real()) / std::abs(prod) : 0.0;
  r.v_F = a1;
  double arg = std::arg(prod);
  if (arg < 0) arg += 2.0 * std::numbers::pi;
  r.arg_product = arg;
  r.moduli_equal = r.modulus_spread_rel <= tol;
  r.product_imaginary = r.re_product_rel <= tol;
  r.velocity_nonzero = r.v_F > tol;
  return r;
}

/// The direction invariant κ_x κ_y κ_z / |κ|³ ∈ [−√3/9, √3/9].
inline double kappa_arg(const Eigen::Vector3d& kappa) {
  const double n = kappa.norm();
  if (n == 0.0) throw std::domain_error("kappa_arg: direction must be nonzero");
  const double val = kappa.x() * kappa.y() * kappa.z() / (n * n * n);
  const double bound = std::numbers::sqrt3 / 9.0;
  if (std::abs(val) > bound + 1e-14)
    throw std::logic_error("kappa_arg: invariant exceeds the Cauchy-Schwarz bound");
  return std::clamp(val, -bound, bound);
}

/// Ascending real roots of ξ³ − ξ + 2t = 0, via the trigonometric method.
/// Valid exactly when |t| ≤ √3/9, where all three roots are real.
inline std::array<double, 3> cubic_roots(double t) {
  const double bound = std::numbers::sqrt3 / 9.0;
  if (std::abs(t) > bound + 1e-14)
    throw std::domain_error("cubic_roots: |t| must not exceed 3^(1/2)/9");
  t = std::clamp(t, -bound, bound);
  // ξ = (2/√3) cos φ reduces the cubic to cos 3φ = −3√3 t.
  const double c = std::clamp(-3.0 * std::numbers::sqrt3 * t, -1.0, 1.0);
  const double phi = std::acos(c) / 3.0;
  std::array<double, 3> xi;
  for (int k = 0; k < 3; ++k)
    xi[static_cast<std::size_t>(k)] =
        (2.0 / std::numbers::sqrt3) * std::cos(phi + 2.0 * std::numbers::pi * k / 3.0);
  std::sort(xi.begin(), xi.end());
  if (std::abs(xi[0] + xi[1] + xi[2]) > 1e-14)
    throw std::logic_error("cubic_roots: root sum failed the vanishing-trace check");
  return xi;
}

/// Leading-order band predictions at k = K + κ.  The first-order shifts are
/// the eigenvalues of the compression of 2κ·(K + q_m) onto the triple, which
/// is −M(κ); they scale as v_F |κ| ξ_i with ξ_i the ascending roots of
/// ξ³ − ξ − 2κ^arg (the reflected root set of the bifurcation cubic).
inline std::array<double, 3> predicted_bands(double mu_star, double v_f,
                                             const Eigen::Vector3d& kappa) {
  const auto xi = cubic_roots(-kappa_arg(kappa));
  const double n = kappa.norm();
  return {mu_star + xi[0] * v_f * n, mu_star + xi[1] * v_f * n, mu_star + xi[2] * v_f * n};
}

/// Cone-fit measurements for one direction: one-sided slopes at each step h
/// against the cubic-dispersion prediction, in units of v_F.
struct ConeFitEntry {
  Eigen::Vector3d direction;
  double kap_arg = 0.0;
  std::vector<double> h;
  std::vector<double> err_plus;   ///< max_i |slope_i − v_F ξ_i^{+n}| / v_F at each h
  std::vector<double> err_minus;  ///< same for the −n side (roots of −κ^arg)
  /// Smallest decay factor err(h_k)/err(h_{k+1}) across consecutive steps and
  /// both sides; ≥ 1 means the o(|κ|) remainder is shrinking.
  double min_decay() const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < h.size(); ++k) {
      if (err_plus[k + 1] > 0) d = std::min(d, err_plus[k] / err_plus[k + 1]);
      if (err_minus[k + 1] > 0) d = std::min(d, err_minus[k] / err_minus[k + 1]);
    }
    return d;
  }
};

struct ConeFit {
  std::vector<ConeFitEntry> entries;
  double max_err_rel = 0.0;  ///< worst slope error / v_F at the smallest step
  double min_decay = 0.0;    ///< worst decay factor across directions
};

/// Measure one-sided finite-difference slopes (μ_b(K ± h n) − μ*)/h of the
/// triple's three bands for each direction and step, and compare with
/// v_F · cubic_roots(±κ^arg).  The exact μ* from the K solve anchors the
/// differences.  Directions are processed in parallel.
inline ConeFit fit_cone(const PlaneWaveBasis& basis, const FourierPotential& v,
                        const EigenTriple& t, double v_f,
                        const std::vector<Eigen::Vector3d>& directions,
                        const std::vector<double>& steps, int nthreads = 1) {
  if (v_f <= 0) throw std::invalid_argument("fit_cone: Fermi velocity must be positive");
  ConeFit fit;
  fit.entries.resize(directions.size());
  parallel_for(directions.size(), nthreads, [&](std::size_t d) {
    ConeFitEntry e;
    e.direction = directions[d].normalized();
    e.kap_arg = kappa_arg(e.direction);
    // Shifts are eigenvalues of −M(±h n): the + side follows the roots of
    // ξ³ − ξ − 2κ^arg, the − side those of ξ³ − ξ + 2κ^arg.
    const auto xi_plus = cubic_roots(-e.kap_arg);
    const auto xi_minus = cubic_roots(e.kap_arg);
    for (const double h : steps) {
      const auto side_error = [&](double sign, const std::array<double, 3>& xi) {
        const Eigen::Vector3d k = basis.center_vector() + sign * h * e.direction;
        const BandSet bs = eigh(assemble_hamiltonian(basis, v, k));
        double worst = 0.0;
        for (int b = 0; b < 3; ++b) {
          const double slope = (bs.mu[t.band_first + b] - t.mu_star) / h;
          worst = std::max(worst,
                           std::abs(slope - v_f * xi[static_cast<std::size_t>(b)]) / v_f);
        }
        return worst;
      };
      e.h.push_back(h);
      e.err_plus.push_back(side_error(+1.0, xi_plus));
      e.err_minus.push_back(side_error(-1.0, xi_minus));
    }
    fit.entries[d] = e;
  });
  fit.min_decay = std::numeric_limits<double>::infinity();
  for (const ConeFitEntry& e : fit.entries) {
    if (!e.h.empty())
      fit.max_err_rel = std::max({fit.max_err_rel, e.err_plus.back(), e.err_minus.back()});
    fit.min_decay = std::min(fit.min_decay, e.min_decay());
  }
  return fit;
}

/// Representation matrix of a symmetry on the triple: Q_{ℓj} = ⟨φ_j, Π_g φ_ℓ⟩,
/// so that g φ_ℓ = Σ_j Q_{ℓj} φ_j.  Errors out if the symmetry image leaves
/// the span or the result is not unitary.
inline Eigen::Matrix3cd representation_matrix(const PlaneWaveBasis& basis, const EigenTriple& t,
                                              SymOp g, double tol = 1e-8) {
  if (g != SymOp::R && g != SymOp::T)
    throw std::invalid_argument("representation_matrix: op must be R or T");
  const std::array<const Eigen::VectorXcd*, 3> phi = {&t.phi1, &t.phi2, &t.phi3};
  Eigen::Matrix3cd q;
  for (int l = 0; l < 3; ++l) {
    const Eigen::VectorXcd image = apply_symmetry_at_K(basis, g, *phi[static_cast<std::size_t>(l)]);
    Eigen::VectorXcd back = Eigen::VectorXcd::Zero(basis.size());
    for (int j = 0; j < 3; ++j) {
      q(l, j) = phi[static_cast<std::size_t>(j)]->dot(image);
      back += q(l, j) * (*phi[static_cast<std::size_t>(j)]);
    }
    if ((image - back).norm() > tol)
      throw std::invalid_argument("representation_matrix: symmetry image leaves the triple span");
  }
  if ((q.adjoint() * q - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::runtime_error("representation_matrix: result is not unitary");
  return q;
}

/// Real coefficients (c₂, c₁, c₀) of det(aI + M) = a³ + c₂a² + c₁a + c₀ for
/// Hermitian M: the trace, the sum of principal 2×2 minors, and the
/// determinant.
inline std::array<double, 3> char_poly_coeffs(const Eigen::Matrix3cd& m) {
  const Complex tr = m.trace();
  Complex minors(0, 0);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) minors += m(i, i) * m(j, j) - m(i, j) * m(j, i);
  const Complex det = m.determinant();
  return {tr.real(), minors.real(), det.real()};
}

/// Conjugation identities linking M at rotated/transformed directions back to
/// M(κ) through the representation matrices, plus the characteristic-
/// polynomial invariance they imply.
struct ConjugationReport {
  double max_residual_R = 0.0;      ///< max ‖M(κ) − Q̄_R M(Rκ) Q_Rᵀ‖ / ‖M(κ)‖
  double max_residual_T = 0.0;      ///< same with T
  double max_charpoly_defect = 0.0; ///< coefficient mismatch of p(a,κ) vs p(a,gκ), relative
};

/// Check M(κ) = conj(Q_g) M(gκ) Q_gᵀ over random unit directions.  With the
/// row convention gφ_ℓ = Σ_j Q_{ℓj}φ_j this is the matrix form of expanding
/// the transformed triple inside the pairings.
inline ConjugationReport verify_conjugation(const PlaneWaveBasis& basis, const EigenTriple& t,
                                            int nsamples = 20, std::uint64_t seed = 7) {
  const Eigen::Matrix3cd qr = representation_matrix(basis, t, SymOp::R);
  const Eigen::Matrix3cd qt = representation_matrix(basis, t, SymOp::T);
  const Eigen::Matrix3d rmat = symmetry_matrix(SymOp::R);
  const Eigen::Matrix3d tmat = symmetry_matrix(SymOp::T);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  ConjugationReport rep;
  for (int s = 0; s < nsamples; ++s) {
    Eigen::Vector3d kappa(dist(gen), dist(gen), dist(gen));
    if (kappa.norm() < 1e-3) kappa = Eigen::Vector3d(1, 0, 0);
    kappa.normalize();
    const Eigen::Matrix3cd m = bifurcation_matrix(basis, t, kappa);
    const Eigen::Matrix3cd mr = bifurcation_matrix(basis, t, Eigen::Vector3d(rmat * kappa));
    const Eigen::Matrix3cd mt = bifurcation_matrix(basis, t, Eigen::Vector3d(tmat * kappa));
    const double scale = std::max(1e-300, m.norm());
    rep.max_residual_R = std::max(
        rep.max_residual_R, (m - qr.conjugate() * mr * qr.transpose()).norm() / scale);
    rep.max_residual_T = std::max(
        rep.max_residual_T, (m - qt.conjugate() * mt * qt.transpose()).norm() / scale);
    const auto pk = char_poly_coeffs(m);
    for (const Eigen::Matrix3cd& other : {mr, mt}) {
      const auto po = char_poly_coeffs(other);
      for (int c = 0; c < 3; ++c)
        rep.max_charpoly_defect =
            std::max(rep.max_charpoly_defect,
                     std::abs(pk[static_cast<std::size_t>(c)] - po[static_cast<std::size_t>(c)]) /
                         std::max(1.0, std::abs(pk[static_cast<std::size_t>(c)])));
    }
  }
  return rep;
}

/// Full machine-readable certification report for the Weyl point.
struct WeylReport {
  double mu_star = 0.0;
  int b = 0;  ///< 1-based index of the lowest band of the triple
  Complex upsilon1{0, 0}, upsilon2{0, 0}, upsilon3{0, 0};
  double fermi_velocity = 0.0;
  // structure residuals
  double offdiag_omega_residual = 0.0;
  double modulus_spread = 0.0;
  double real_part_of_product = 0.0;
  double arg_product = 0.0;
  ConeFit cone_fit;
};

/// Assemble the certification report from a found triple.
inline WeylReport build_weyl_report(const PlaneWaveBasis& basis, const FourierPotential& v,
                                    const EigenTriple& t,
                                    const std::vector<Eigen::Vector3d>& cone_directions,
                                    const std::vector<double>& cone_steps, int nthreads = 1) {
  WeylReport r;
  r.mu_star = t.mu_star;
  r.b = t.band_first + 1;
  const UpsilonSet u = extract_upsilons(basis, t);
  const StructureReport s = verify_structure(u);
  r.upsilon1 = u.u1;
  r.upsilon2 = u.u2;
  r.upsilon3 = u.u3;
  r.fermi_velocity = s.v_F;
  r.offdiag_omega_residual = u.max_off_residual();
  r.modulus_spread = s.modulus_spread_rel;
  r.real_part_of_product = s.re_product_rel;
  r.arg_product = s.arg_product;
  if (!cone_directions.empty())
    r.cone_fit = fit_cone(basis, v, t, s.v_F, cone_directions, cone_steps, nthreads);
  return r;
}

}  // namespace triweyl
