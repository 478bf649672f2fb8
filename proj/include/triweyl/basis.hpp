// triweyl — Floquet–Bloch band structure and three-fold Weyl points of -Δ + V.
// SPDX-License-Identifier: MIT
#pragma once

/// \file basis.hpp
/// \brief Plane-wave basis truncated by the exact shifted-norm radius law.
///
/// The basis holds all dual indices m with |center + q_m| ≤ ρ·q.  At center K
/// the test is integral: |K+q_m|² = (q²/4)·S(m) with S(m) = o1²+o2²+o3² the
/// exact odd-integer law, so membership is S(m) ≤ ⌊4ρ²⌋.  A radius cutoff is
/// the unique truncation exactly invariant under both affine actions R_K and
/// T_K; consequently the index set decomposes into whole orbits and all
/// symmetry statements at K are exact in the truncated problem.

#include "triweyl/lattice.hpp"

#include <map>
#include <vector>

namespace triweyl {

/// Supported expansion centers: K and its mirror K' = -K.
enum class BasisCenter { K, KPrime };

/// A truncated, deterministically ordered plane-wave index set.
struct PlaneWaveBasis {
  LatticeSpec lattice;
  BasisCenter center = BasisCenter::K;
  double rho = 0.0;                 ///< radius in units of q
  std::int64_t radius2_max = 0;     ///< exact integer threshold, units q²/4
  std::vector<DualIndex> indices;   ///< sorted by (exact |center+q_m|², m)
  std::map<DualIndex, int> position;
  std::vector<Orbit> orbit_list;    ///< R_K-orbits (center K only)

  int size() const { return static_cast<int>(indices.size()); }

  Eigen::Vector3d center_vector() const {
    return center == BasisCenter::K ? lattice.k_point() : lattice.k_prime_point();
  }

  /// Cartesian center + q_m for basis slot i.
  Eigen::Vector3d wavevector(int i) const {
    return center_vector() + lattice.dual_vector(indices[static_cast<std::size_t>(i)]);
  }

  /// Exact |center + q_m|² for basis slot i (odd-integer law).
  double shifted_norm2(int i) const {
    const DualIndex& m = indices[static_cast<std::size_t>(i)];
    const DualIndex probe = center == BasisCenter::K ? m : -m;  // |K'+q_m| = |K+q_{-m}|
    return lattice.shifted_norm2(probe);
  }

  /// Slot of index m, or -1 when absent.
  int find(const DualIndex& m) const {
    const auto it = position.find(m);
    return it == position.end() ? -1 : it->second;
  }
};

/// Enumerate the basis for a radius ρ (in units of q).
///
/// The integer threshold is N = ⌊4ρ² + 1e-9⌋ (the guard absorbs binary
/// representation error of intended-exact thresholds like ρ = 4 → N = 64;
/// shifted norms are ≡ 3 mod 8 so no admissible value sits on the guard).
inline PlaneWaveBasis build_basis(const LatticeSpec& lat, double rho,
                                  BasisCenter center = BasisCenter::K) {
  PlaneWaveBasis b;
  b.lattice = lat;
  b.center = center;
  b.rho = rho;
  b.radius2_max = static_cast<std::int64_t>(std::floor(4.0 * rho * rho + 1e-9));
  // The minimal shell has S = 3 (three odd squares); anything smaller is empty.
  if (b.radius2_max < 3)
    throw std::domain_error("build_basis: radius too small, the basis would be empty");
  // Covering box.  |o_i| ≤ √N bounds the pair sums: |m1+m2|, |m2+m3|,
  // |m1+m3| ≤ (√N+1)/2 =: A.  Each component is a half-difference of pair
  // sums, so |m_i| ≤ 3A/2; enumerate a box of that half-width.
  const auto sqrtN = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(b.radius2_max))));
  const std::int64_t pair_bound = (sqrtN + 1) / 2 + 1;
  const std::int64_t half = (3 * pair_bound) / 2 + 1;
  for (std::int64_t m1 = -half; m1 <= half; ++m1)
    for (std::int64_t m2 = -half; m2 <= half; ++m2)
      for (std::int64_t m3 = -half; m3 <= half; ++m3) {
        const DualIndex m{m1, m2, m3};
        const DualIndex probe = center == BasisCenter::K ? m : -m;
        if (shifted_norm2_units(probe) <= b.radius2_max) b.indices.push_back(m);
      }
  std::sort(b.indices.begin(), b.indices.end(), [&](const DualIndex& x, const DualIndex& y) {
    const DualIndex px = center == BasisCenter::K ? x : -x;
    const DualIndex py = center == BasisCenter::K ? y : -y;
    const std::int64_t sx = shifted_norm2_units(px), sy = shifted_norm2_units(py);
    if (sx != sy) return sx < sy;
    return x < y;
  });
  for (int i = 0; i < b.size(); ++i) b.position[b.indices[static_cast<std::size_t>(i)]] = i;
  if (center == BasisCenter::K) b.orbit_list = orbits(b.indices);
  return b;
}

}  // namespace triweyl
