// triweyl — Floquet–Bloch band structure and three-fold Weyl points of -Δ + V.
// SPDX-License-Identifier: MIT
#pragma once

/// \file lattice.hpp
/// \brief Exact arithmetic for the BCC-type lattice Λ, its dual Λ*, the
///        orthogonal symmetries R and T, affine actions on the shifted lattice
///        Λ*_K, high-symmetry points, and orbit decomposition.
///
/// Conventions.  Direct basis v1 = (a/√3)(1,-1,-1), v2 = (a/√3)(1,1,1),
/// v3 = (a/√3)(-1,1,-1); dual basis q1 = q(1,0,-1), q2 = q(1,1,0),
/// q3 = q(0,1,-1) with q = √3 π / a, so that q_l · v_j = 2π δ_{lj}.
/// Dual vectors are addressed by integer triples m = (m1,m2,m3) meaning
/// q_m = m1 q1 + m2 q2 + m3 q3.  All symmetry bookkeeping on indices is done
/// in exact integer arithmetic; Cartesian coordinates appear only at the
/// boundary of the module.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace triweyl {

/// Integer coordinates of a dual-lattice vector q_m = m1 q1 + m2 q2 + m3 q3.
struct DualIndex {
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;
  std::int64_t m3 = 0;

  friend bool operator==(const DualIndex& a, const DualIndex& b) {
    return a.m1 == b.m1 && a.m2 == b.m2 && a.m3 == b.m3;
  }
  friend bool operator!=(const DualIndex& a, const DualIndex& b) { return !(a == b); }
  /// Lexicographic order; used for deterministic containers and orbit reps.
  friend bool operator<(const DualIndex& a, const DualIndex& b) {
    if (a.m1 != b.m1) return a.m1 < b.m1;
    if (a.m2 != b.m2) return a.m2 < b.m2;
    return a.m3 < b.m3;
  }
  friend DualIndex operator+(const DualIndex& a, const DualIndex& b) {
    return {a.m1 + b.m1, a.m2 + b.m2, a.m3 + b.m3};
  }
  friend DualIndex operator-(const DualIndex& a, const DualIndex& b) {
    return {a.m1 - b.m1, a.m2 - b.m2, a.m3 - b.m3};
  }
  friend DualIndex operator-(const DualIndex& a) { return {-a.m1, -a.m2, -a.m3}; }
};

inline std::string to_string(const DualIndex& m) {
  std::ostringstream os;
  os << "(" << m.m1 << "," << m.m2 << "," << m.m3 << ")";
  return os.str();
}

/// Odd-integer coordinates of (2/q)(K + q_m): always an odd triple.
/// |K + q_m|² = (q²/4)(o1² + o2² + o3²) exactly.
inline std::array<std::int64_t, 3> odd_coordinates(const DualIndex& m) {
  return {2 * (m.m1 + m.m2) - 1, 2 * (m.m2 + m.m3) - 1, 1 - 2 * (m.m1 + m.m3)};
}

/// Exact |K + q_m|² in units of q²/4 (a positive integer ≡ 3 mod 8).
inline std::int64_t shifted_norm2_units(const DualIndex& m) {
  const auto o = odd_coordinates(m);
  return o[0] * o[0] + o[1] * o[1] + o[2] * o[2];
}

/// Ordering used everywhere a deterministic index sequence is needed:
/// by exact shifted norm first, then lexicographic on (m1,m2,m3).
inline bool shifted_norm_less(const DualIndex& a, const DualIndex& b) {
  const std::int64_t sa = shifted_norm2_units(a), sb = shifted_norm2_units(b);
  if (sa != sb) return sa < sb;
  return a < b;
}

/// Default lattice constant √3 π, which makes the dual scale q equal to 1.
inline double default_lattice_constant() { return std::numbers::sqrt3 * std::numbers::pi; }

/// The lattice geometry: direct and dual bases and the K point.
struct LatticeSpec {
  double a = 0.0;  ///< lattice constant
  double q = 0.0;  ///< dual scale √3 π / a
  Eigen::Vector3d v1, v2, v3;  ///< direct basis
  Eigen::Vector3d q1, q2, q3;  ///< dual basis

  /// Cartesian coordinates of q_m = m1 q1 + m2 q2 + m3 q3
  /// = q (m1+m2, m2+m3, -m1-m3).
  Eigen::Vector3d dual_vector(const DualIndex& m) const {
    return q * Eigen::Vector3d(static_cast<double>(m.m1 + m.m2),
                               static_cast<double>(m.m2 + m.m3),
                               static_cast<double>(-m.m1 - m.m3));
  }

  /// The high-symmetry quasimomentum K = -(1/4)(q1+q2+q3) = q(-1/2,-1/2,1/2).
  Eigen::Vector3d k_point() const { return q * Eigen::Vector3d(-0.5, -0.5, 0.5); }

  /// The mirrored point K' = +(1/4)(q1+q2+q3) = -K.
  Eigen::Vector3d k_prime_point() const { return -k_point(); }

  /// Cartesian K + q_m.
  Eigen::Vector3d shifted_vector(const DualIndex& m) const {
    return k_point() + dual_vector(m);
  }

  /// |K + q_m|² from the exact odd-integer law, scaled to physical units.
  double shifted_norm2(const DualIndex& m) const {
    return 0.25 * q * q * static_cast<double>(shifted_norm2_units(m));
  }

  /// Coefficients c with k = c1 q1 + c2 q2 + c3 q3 (inverse of the dual basis).
  Eigen::Vector3d dual_coefficients(const Eigen::Vector3d& k) const {
    // c_l = (v_l · k) / 2π by biorthogonality q_l · v_j = 2π δ_{lj}.
    return Eigen::Vector3d(v1.dot(k), v2.dot(k), v3.dot(k)) / (2.0 * std::numbers::pi);
  }
};

/// Construct the lattice for a given lattice constant a > 0.
inline LatticeSpec build_lattice(double a = default_lattice_constant()) {
  if (!(a > 0.0)) throw std::domain_error("build_lattice: lattice constant must be positive");
  LatticeSpec s;
  s.a = a;
  s.q = std::numbers::sqrt3 * std::numbers::pi / a;
  const double c = a / std::numbers::sqrt3;
  s.v1 = c * Eigen::Vector3d(1, -1, -1);
  s.v2 = c * Eigen::Vector3d(1, 1, 1);
  s.v3 = c * Eigen::Vector3d(-1, 1, -1);
  s.q1 = s.q * Eigen::Vector3d(1, 0, -1);
  s.q2 = s.q * Eigen::Vector3d(1, 1, 0);
  s.q3 = s.q * Eigen::Vector3d(0, 1, -1);
  return s;
}

/// The point-symmetry generators acting on the lattice.
enum class SymOp { R, T, P };

inline const char* to_string(SymOp g) {
  switch (g) {
    case SymOp::R: return "R";
    case SymOp::T: return "T";
    case SymOp::P: return "P";
  }
  return "?";
}

/// The orthogonal 3×3 matrix of a symmetry operation (R⁴ = T⁴ = I, P = -I).
inline Eigen::Matrix3d symmetry_matrix(SymOp g) {
  Eigen::Matrix3d M;
  switch (g) {
    case SymOp::R:
      M << 0, -1, 0,
           1,  0, 0,
           0,  0, -1;
      break;
    case SymOp::T:
      M << -1, 0,  0,
            0, 0, -1,
            0, 1,  0;
      break;
    case SymOp::P:
      M = -Eigen::Matrix3d::Identity();
      break;
  }
  return M;
}

/// Integer matrix of the dual action on index triples (rows act on (m1,m2,m3)).
inline std::array<std::array<std::int64_t, 3>, 3> dual_map_matrix(SymOp g) {
  switch (g) {
    case SymOp::R:  // m ↦ (-m1-m2-m3, m1, m2), from Rq1=q2-q1, Rq2=q3-q1, Rq3=-q1
      return {{{-1, -1, -1}, {1, 0, 0}, {0, 1, 0}}};
    case SymOp::T:  // m ↦ (-m1-m2-m3, m3, m1), from Tq1=q3-q1, Tq2=-q1, Tq3=q2-q1
      return {{{-1, -1, -1}, {0, 0, 1}, {1, 0, 0}}};
    case SymOp::P:
      return {{{-1, 0, 0}, {0, -1, 0}, {0, 0, -1}}};
  }
  throw std::logic_error("dual_map_matrix: unknown operation");
}

/// Exact dual-lattice action: index of matrix(g)·q_m.
inline DualIndex dual_action(SymOp g, const DualIndex& m) {
  const auto M = dual_map_matrix(g);
  return {M[0][0] * m.m1 + M[0][1] * m.m2 + M[0][2] * m.m3,
          M[1][0] * m.m1 + M[1][1] * m.m2 + M[1][2] * m.m3,
          M[2][0] * m.m1 + M[2][1] * m.m2 + M[2][2] * m.m3};
}

/// The translation that closes the action on the shifted lattice Λ*_K:
/// g(K + q_m) = K + q_{dual_action(g,m) + shift}.  Equals (1,0,0) for R and T
/// because RK = K + q1 and TK = K + q1.  Inversion does not preserve Λ*_K.
inline DualIndex affine_shift_at_K(SymOp g) {
  if (g == SymOp::P)
    throw std::invalid_argument("affine_shift_at_K: inversion does not preserve the shifted lattice");
  return {1, 0, 0};
}

/// Affine action g_K(m) = dual_action(g, m) + affine_shift_at_K(g).
inline DualIndex affine_action_at_K(SymOp g, const DualIndex& m) {
  return dual_action(g, m) + affine_shift_at_K(g);
}

/// Inverse of the R-affine action (R_K⁴ = identity, so this is R_K³).
inline DualIndex affine_action_at_K_inverse(SymOp g, const DualIndex& m) {
  DualIndex r = m;
  for (int i = 0; i < 3; ++i) r = affine_action_at_K(g, r);
  return r;
}

/// The four solutions k = c1 q1 + c2 q2 + c3 q3 of Rk - k ∈ Λ* inside the
/// fundamental cell, as coefficient triples (c1,c2,c3).
inline std::array<std::array<double, 3>, 4> high_symmetry_points(const LatticeSpec&) {
  return {{{0.0, 0.0, 0.0},
           {0.5, 0.5, 0.5},
           {0.25, 0.25, 0.25},
           {-0.25, -0.25, -0.25}}};
}

/// True iff Rk - k lies within tol of a dual-lattice vector (each dual-basis
/// coefficient within tol of an integer).
inline bool is_high_symmetry(const LatticeSpec& lat, const Eigen::Vector3d& k,
                             double tol = 1e-9) {
  const Eigen::Vector3d d = symmetry_matrix(SymOp::R) * k - k;
  const Eigen::Vector3d c = lat.dual_coefficients(d);
  for (int i = 0; i < 3; ++i)
    if (std::abs(c[i] - std::round(c[i])) > tol) return false;
  return true;
}

/// An orbit of the affine action R_K on dual indices: exactly four members,
/// listed as [m, R_K m, R_K² m, R_K³ m] from the lexicographically smallest
/// representative.
struct Orbit {
  DualIndex representative;
  std::array<DualIndex, 4> members;
};

/// Partition a finite index set (closed under R_K) into orbits.  Orbits are
/// returned sorted by representative in the shifted-norm order, so the result
/// is independent of the input ordering.
inline std::vector<Orbit> orbits(std::vector<DualIndex> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  const auto contains = [&](const DualIndex& m) {
    return std::binary_search(indices.begin(), indices.end(), m);
  };
  std::vector<DualIndex> visited;
  const auto seen = [&](const DualIndex& m) {
    return std::binary_search(visited.begin(), visited.end(), m);
  };
  std::vector<Orbit> out;
  for (const DualIndex& m : indices) {
    if (seen(m)) continue;
    Orbit orb;
    orb.representative = m;  // lex-min: indices are scanned in ascending order
    DualIndex cur = m;
    for (int l = 0; l < 4; ++l) {
      orb.members[static_cast<std::size_t>(l)] = cur;
      cur = affine_action_at_K(SymOp::R, cur);
      if (l < 3 && !contains(cur))
        throw std::invalid_argument("orbits: input set is not closed under the affine action; index " +
                                    to_string(cur) + " escapes");
    }
    if (cur != m)
      throw std::logic_error("orbits: affine action failed to close after four steps at " + to_string(m));
    std::array<DualIndex, 4> sorted_members = orb.members;
    std::sort(sorted_members.begin(), sorted_members.end());
    std::vector<DualIndex> nv;
    nv.reserve(visited.size() + 4);
    std::merge(visited.begin(), visited.end(), sorted_members.begin(), sorted_members.end(),
               std::back_inserter(nv));
    visited.swap(nv);
    out.push_back(orb);
  }
  std::sort(out.begin(), out.end(), [](const Orbit& x, const Orbit& y) {
    return shifted_norm_less(x.representative, y.representative);
  });
  return out;
}

}  // namespace triweyl
