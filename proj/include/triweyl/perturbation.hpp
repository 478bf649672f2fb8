// triweyl — Floquet–Bloch band structure and three-fold Weyl points of -Δ + V.
// SPDX-License-Identifier: MIT
#pragma once

/// \file perturbation.hpp
/// \brief Shallow-potential asymptotics and symmetry-breaking splitting laws:
///        free modes, first-order eigenvalue shifts from Fourier coefficients,
///        ε-scans of the Weyl eigenvalue and Fermi velocity, the odd-potential
///        splitting scalars (s₁, s₂), and δ-scans of the split spectrum.

#include "triweyl/weyl.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace triweyl {

/// A free mode Φ_ℓ^(0) of −Δ at K: unit norm, rotation character i^ℓ.
struct FreeMode {
  int ell = 1;
  Eigen::VectorXcd coefficients;
};

inline FreeMode free_mode(const PlaneWaveBasis& basis, int ell) {
  return {ell, free_mode_vector(basis, ell)};
}

/// The four-fold free eigenvalue at K: |K|² = 3q²/4.
inline double free_eigenvalue(const LatticeSpec& lattice) {
  return 0.75 * lattice.q * lattice.q;
}

/// First-order eigenvalue shifts ⟨Φ_ℓ^(0), V Φ_ℓ^(0)⟩ for ℓ = 1..4, computed
/// as the exact 16-term quadratic form in the Fourier coefficients (all index
/// differences of the minimal shell).  Branches 1 and 3 always coincide; for
/// an admissible potential all of 1..3 collapse to V₀₀₀ − V₁₀₀ and branch 4
/// is V₀₀₀ + 3V₁₀₀.  `branch_split` flags a potential whose branch 2 departs
/// from branches 1,3 at first order.
struct FirstOrderShifts {
  std::array<double, 4> shift = {0, 0, 0, 0};
  bool branch_split = false;
};

inline FirstOrderShifts first_order_shifts(const FourierPotential& v) {
  static const std::array<DualIndex, 4> shell = {
      DualIndex{0, 0, 0}, DualIndex{1, 0, 0}, DualIndex{0, 1, 0}, DualIndex{0, 0, 1}};
  FirstOrderShifts out;
  for (int ell = 1; ell <= 4; ++ell) {
    Complex acc(0, 0);
    for (int nu = 0; nu < 4; ++nu)
      for (int mu = 0; mu < 4; ++mu) {
        const DualIndex d = shell[static_cast<std::size_t>(nu)] -
                            shell[static_cast<std::size_t>(mu)];
        const Complex c = v.coefficient(d);
        if (c == Complex(0, 0)) continue;
        // conj(i^{-ℓν}/2) · i^{-ℓμ}/2 = i^{ℓ(ν-μ)}/4.
        acc += 0.25 * std::pow(Complex(0, 1), ell * (nu - mu)) * c;
      }
    if (std::abs(acc.imag()) > 1e-12 * (1.0 + std::abs(acc)))
      throw std::invalid_argument("first_order_shifts: potential is not real at first order");
    out.shift[static_cast<std::size_t>(ell - 1)] = acc.real();
  }
  out.branch_split = std::abs(out.shift[0] - out.shift[1]) > 1e-12 ||
                     std::abs(out.shift[0] - out.shift[2]) > 1e-12;
  return out;
}

inline double first_order_shift(const FourierPotential& v, int ell) {
  if (ell < 1 || ell > 4) throw std::invalid_argument("first_order_shift: ell must be 1..4");
  return first_order_shifts(v).shift[static_cast<std::size_t>(ell - 1)];
}

/// Least-squares fit of log|y| against log x.  Points with |y| below `floor`
/// or x ≤ 0 are skipped (they carry no order information).
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;  ///< confidence half-width of the slope
  int points = 0;
  double span_decades = 0.0;
};

inline LogLogFit fit_order_loglog(const std::vector<double>& x, const std::vector<double>& y,
                                  double floor = 1e-13) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_order_loglog: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || std::abs(y[i]) < floor) continue;
    lx.push_back(std::log10(x[i]));
    ly.push_back(std::log10(std::abs(y[i])));
  }
  LogLogFit fit;
  fit.points = static_cast<int>(lx.size());
  if (fit.points < 2) return fit;
  const double n = static_cast<double>(fit.points);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  if (fit.points > 2) fit.slope_stderr = std::sqrt(ss / (n - 2.0) / (denom / n));
  fit.span_decades = *std::max_element(lx.begin(), lx.end()) -
                     *std::min_element(lx.begin(), lx.end());
  return fit;
}

/// One row of an ε- or δ-scan.
struct ScanRecord {
  double param = 0.0;
  Eigen::Vector4d mu = Eigen::Vector4d::Zero();  ///< lowest four eigenvalues at K
  double predicted = 0.0;
  double residual = 0.0;
  bool flagged = false;  ///< set when the expected cluster structure is absent
  std::string note;
};

/// ε-scan of the Weyl eigenvalue against the first-order law
/// μ*(ε) ≈ μ⁰ + ε(V₀₀₀ − V₁₀₀).
struct EpsilonScan {
  std::vector<ScanRecord> records;
  LogLogFit residual_fit;  ///< order of the remainder r(ε); 2 at leading order
};

namespace detail {
/// Lowest cluster whose sector signature contains the triple pattern
/// (i, −1, −i); returns the cluster list index or −1.
inline int triple_bearing_cluster(const std::vector<ClusterInfo>& clusters) {
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const auto& c = clusters[i].signature;
    if (c.mixed == 0 && c.counts[1] >= 1 && c.counts[2] >= 1 && c.counts[3] >= 1)
      return static_cast<int>(i);
  }
  return -1;
}
}  // namespace detail

inline EpsilonScan epsilon_scan(const PlaneWaveBasis& basis, const FourierPotential& v,
                                const std::vector<double>& epsilons, int nthreads = 1) {
  const AdmissibilityReport adm = check_admissible(v);
  if (!adm.admissible())
    throw std::invalid_argument("epsilon_scan: potential must be admissible");
  const double mu0 = free_eigenvalue(basis.lattice);
  const double shift = first_order_shift(v, 1);
  EpsilonScan scan;
  scan.records.resize(epsilons.size());
  parallel_for(epsilons.size(), nthreads, [&](std::size_t i) {
    const double eps = epsilons[i];
    ScanRecord rec;
    rec.param = eps;
    const WeylSearch ws = find_weyl_candidate(basis, eps * v);
    rec.mu = ws.solve.bands.mu.head(4);
    rec.predicted = mu0 + eps * shift;
    const int ci = detail::triple_bearing_cluster(ws.clusters);
    if (ci < 0) {
      rec.flagged = true;
      rec.note = "no cluster with the triple signature";
      rec.residual = std::numeric_limits<double>::quiet_NaN();
    } else {
      const ClusterInfo& c = ws.clusters[static_cast<std::size_t>(ci)];
      rec.residual = c.mu - rec.predicted;
      if (c.size() != 3) rec.note = "multiplicity " + std::to_string(c.size());
    }
    scan.records[i] = rec;
  });
  std::vector<double> xs, ys;
  for (const ScanRecord& r : scan.records) {
    if (r.flagged || r.param == 0.0) continue;
    xs.push_back(r.param);
    ys.push_back(r.residual);
  }
  scan.residual_fit = fit_order_loglog(xs, ys);
  return scan;
}

/// Fermi-velocity scan: v_F(ε) for εV, its deviation from the free value q,
/// and the υ-product phase.  ε = 0 uses the analytic free modes.
struct VelocityRecord {
  double param = 0.0;
  double v_f = 0.0;
  double deviation = 0.0;  ///< |v_F(ε) − q|
  double arg_product = 0.0;
  bool flagged = false;
};

struct VelocityScan {
  std::vector<VelocityRecord> records;
  double intercept = 0.0;       ///< linear extrapolation of v_F to ε = 0
  LogLogFit deviation_fit;      ///< order of |v_F(ε) − q|; 1 at leading order
};

inline VelocityScan fermi_velocity_scan(const PlaneWaveBasis& basis, const FourierPotential& v,
                                        const std::vector<double>& epsilons, int nthreads = 1) {
  const AdmissibilityReport adm = check_admissible(v);
  if (!adm.admissible())
    throw std::invalid_argument("fermi_velocity_scan: potential must be admissible");
  const double q = basis.lattice.q;
  VelocityScan scan;
  scan.records.resize(epsilons.size());
  parallel_for(epsilons.size(), nthreads, [&](std::size_t i) {
    const double eps = epsilons[i];
    VelocityRecord rec;
    rec.param = eps;
    std::optional<EigenTriple> triple;
    if (eps == 0.0) {
      triple = free_triple(basis);
    } else {
      WeylSearch ws = find_weyl_candidate(basis, eps * v);
      if (ws.triple) triple = std::move(ws.triple);
    }
    if (!triple) {
      rec.flagged = true;
    } else {
      const StructureReport s = verify_structure(extract_upsilons(basis, *triple));
      rec.v_f = s.v_F;
      rec.deviation = std::abs(s.v_F - q);
      rec.arg_product = s.arg_product;
    }
    scan.records[i] = rec;
  });
  // Straight-line extrapolation of v_F(ε) to ε = 0.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  std::vector<double> xs, ys;
  for (const VelocityRecord& r : scan.records) {
    if (r.flagged) continue;
    sx += r.param;
    sy += r.v_f;
    sxx += r.param * r.param;
    sxy += r.param * r.v_f;
    n += 1.0;
    if (r.param > 0.0) {
      xs.push_back(r.param);
      ys.push_back(r.deviation);
    }
  }
  if (n >= 2.0) {
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    scan.intercept = (sy - slope * sx) / n;
  }
  scan.deviation_fit = fit_order_loglog(xs, ys);
  return scan;
}

/// Splitting scalars of an odd perturbation on a gauge-fixed triple:
/// s₁ = ⟨φ₁, V_p φ₁⟩ (real) and s₂ = ⟨φ₁, V_p φ₂⟩, together with the zero
/// structure of the first-order matrix: ⟨φ₁,V_pφ₃⟩ = ⟨φ₂,V_pφ₂⟩ = 0,
/// ⟨φ₃,V_pφ₃⟩ = −s₁, ⟨φ₂,V_pφ₃⟩ = −s₂.
struct SplittingScalars {
  double s1 = 0.0;
  Complex s2{0, 0};
  double zero_structure_residual = 0.0;  ///< worst violation of the pattern
  double split_magnitude() const { return std::sqrt(s1 * s1 + 2.0 * std::norm(s2)); }
};

inline SplittingScalars splitting_scalars(const PlaneWaveBasis& basis,
                                          const FourierPotential& vp, const EigenTriple& t) {
  const AdmissibilityReport adm = check_admissible(vp);
  const double odd = odd_violation(vp);
  const double scale = std::max(1.0, vp.l1_norm());
  if (!adm.is_real || odd > 1e-12 * scale)
    throw std::invalid_argument("splitting_scalars: perturbation must be real and odd");
  const Complex m11 = matrix_element(basis, t.phi1, vp, t.phi1);
  const Complex m12 = matrix_element(basis, t.phi1, vp, t.phi2);
  const Complex m13 = matrix_element(basis, t.phi1, vp, t.phi3);
  const Complex m22 = matrix_element(basis, t.phi2, vp, t.phi2);
  const Complex m23 = matrix_element(basis, t.phi2, vp, t.phi3);
  const Complex m33 = matrix_element(basis, t.phi3, vp, t.phi3);
  SplittingScalars s;
  s.s1 = m11.real();
  s.s2 = m12;
  s.zero_structure_residual =
      std::max({std::abs(m11.imag()), std::abs(m13), std::abs(m22), std::abs(m33 + m11),
                std::abs(m23 + s.s2)});
  if (s.zero_structure_residual > 1e-10 * scale)
    throw std::logic_error(
        "splitting_scalars: first-order matrix violates the odd-perturbation zero structure");
  return s;
}

/// The first-order splitting matrix δ·[[s₁,s₂,0],[s̄₂,0,−s₂],[0,−s̄₂,−s₁]];
/// eigenvalues {−δw, 0, +δw} with w = √(s₁² + 2|s₂|²).
inline Eigen::Matrix3cd splitting_matrix(double delta, double s1, Complex s2) {
  Eigen::Matrix3cd m;
  m << Complex(s1, 0), s2, Complex(0, 0),
       std::conj(s2), Complex(0, 0), -s2,
       Complex(0, 0), -std::conj(s2), Complex(-s1, 0);
  return delta * m;
}

/// Predicted split offsets (−δw, 0, +δw) relative to μ*.
inline std::array<double, 3> predicted_split(double delta, double s1, Complex s2) {
  const double w = std::sqrt(s1 * s1 + 2.0 * std::norm(s2));
  return {-delta * w, 0.0, delta * w};
}

/// δ-scan of V + δV_p.  For an odd V_p the three split eigenvalues are
/// compared against μ* + predicted_split (remainder must be o(δ)); for an
/// even, T-breaking V_p only the 2+1 multiplicity pattern is asserted.
struct DeltaScan {
  std::vector<ScanRecord> records;
  LogLogFit residual_fit;  ///< odd mode only
  bool odd_mode = false;
  double s1 = 0.0;
  Complex s2{0, 0};
  bool pattern_ok = true;  ///< even mode: every δ > 0 split as 2+1
};

inline DeltaScan delta_scan(const PlaneWaveBasis& basis, const FourierPotential& v,
                            const FourierPotential& vp, const std::vector<double>& deltas,
                            int nthreads = 1) {
  const WeylSearch ws = find_weyl_candidate(basis, v);
  if (!ws.triple)
    throw std::invalid_argument("delta_scan: base potential carries no certified triple");
  const EigenTriple& t = *ws.triple;
  const AdmissibilityReport adm = check_admissible(vp);
  DeltaScan scan;
  scan.odd_mode = adm.is_real && odd_violation(vp) <= 1e-12 * std::max(1.0, vp.l1_norm());
  if (scan.odd_mode) {
    const SplittingScalars s = splitting_scalars(basis, vp, t);
    scan.s1 = s.s1;
    scan.s2 = s.s2;
  } else if (!adm.is_even) {
    throw std::invalid_argument("delta_scan: perturbation must be odd or even");
  }
  scan.records.resize(deltas.size());
  parallel_for(deltas.size(), nthreads, [&](std::size_t i) {
    const double delta = deltas[i];
    ScanRecord rec;
    rec.param = delta;
    const KSolveResult sol = solve_at_K(basis, v + delta * vp);
    rec.mu = sol.bands.mu.head(4);
    const auto ranges = cluster_ranges(sol.bands.mu);
    if (scan.odd_mode) {
      const auto pred = predicted_split(delta, scan.s1, scan.s2);
      rec.predicted = pred[2];
      double worst = 0.0;
      for (int b = 0; b < 3; ++b)
        worst = std::max(worst, std::abs(sol.bands.mu[t.band_first + b] - t.mu_star -
                                         pred[static_cast<std::size_t>(b)]));
      rec.residual = worst;
    } else {
      // Even (T-breaking) mode: record the multiplicity pattern of the bands
      // that replace the triple; the expected split is a pair plus a singlet.
      std::vector<int> sizes;
      for (const auto& [first, last] : ranges) {
        if (first > t.band_first + 2) break;
        if (last < t.band_first) continue;
        sizes.push_back(last - first + 1);
      }
      std::string pat;
      for (std::size_t k = 0; k < sizes.size(); ++k)
        pat += (k ? "+" : "") + std::to_string(sizes[k]);
      rec.note = pat;
      const bool split_21 = sizes.size() == 2 && std::min(sizes[0], sizes[1]) == 1 &&
                            std::max(sizes[0], sizes[1]) == 2;
      const bool unsplit_3 = sizes.size() == 1 && sizes[0] == 3;
      rec.flagged = !(delta == 0.0 ? unsplit_3 : split_21);
      // Residual records the internal spread of the widest surviving cluster.
      double spread = 0.0;
      for (const auto& [first, last] : ranges) {
        if (first > t.band_first + 2 || last < t.band_first) continue;
        spread = std::max(spread, sol.bands.mu[last] - sol.bands.mu[first]);
      }
      rec.residual = spread;
    }
    scan.records[i] = rec;
  });
  if (scan.odd_mode) {
    std::vector<double> xs, ys;
    for (const ScanRecord& r : scan.records) {
      if (r.param == 0.0) continue;
      xs.push_back(r.param);
      ys.push_back(r.residual);
    }
    scan.residual_fit = fit_order_loglog(xs, ys);
  } else {
    for (const ScanRecord& r : scan.records) scan.pattern_ok = scan.pattern_ok && !r.flagged;
  }
  return scan;
}

}  // namespace triweyl
