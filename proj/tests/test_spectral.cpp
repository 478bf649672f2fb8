// triweyl — Floquet–Bloch band structure and three-fold Weyl points of -Δ + V.
// SPDX-License-Identifier: MIT

#include "triweyl/spectral.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

using namespace triweyl;

TEST_CASE("plane-wave basis at radius 4 matches dense enumeration", "[basis]") {
  const LatticeSpec lat = build_lattice();
  const PlaneWaveBasis basis = build_basis(lat, 4.0);
  CHECK(basis.radius2_max == 64);
  CHECK(basis.size() % 4 == 0);
  CHECK(basis.size() >= 4);

  const auto duals = oracle::dual_from_direct(lat.v1, lat.v2, lat.v3);
  auto expected = oracle::brute_force_shell(duals, lat.q, 64, 8);
  std::sort(expected.begin(), expected.end());
  auto got = basis.indices;
  std::sort(got.begin(), got.end());
  CHECK(got == expected);

  // Sorted by exact shifted norm, ties broken lexicographically.
  for (int i = 1; i < basis.size(); ++i)
    CHECK(!shifted_norm_less(basis.indices[static_cast<std::size_t>(i)],
                             basis.indices[static_cast<std::size_t>(i - 1)]));
  // The first four entries are the minimal shell.
  const std::set<DualIndex> head(basis.indices.begin(), basis.indices.begin() + 4);
  CHECK(head == std::set<DualIndex>{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}});
  // find() inverts the index list.
  for (int i = 0; i < basis.size(); ++i)
    CHECK(basis.find(basis.indices[static_cast<std::size_t>(i)]) == i);
  CHECK(basis.find({9, 9, 9}) == -1);
  // Orbits tile the index set: 4 members each, all distinct.
  CHECK(static_cast<int>(basis.orbit_list.size()) * 4 == basis.size());
  std::set<DualIndex> covered;
  for (const Orbit& o : basis.orbit_list)
    for (const DualIndex& m : o.members) covered.insert(m);
  CHECK(static_cast<int>(covered.size()) == basis.size());

  CHECK_THROWS_AS(build_basis(lat, 0.5), std::domain_error);
}

TEST_CASE("mirrored basis at K' has the mirrored index set", "[basis]") {
  const LatticeSpec lat = build_lattice();
  const PlaneWaveBasis bk = build_basis(lat, 4.0);
  const PlaneWaveBasis bkp = build_basis(lat, 4.0, BasisCenter::KPrime);
  REQUIRE(bkp.size() == bk.size());
  std::set<DualIndex> mirrored;
  for (const DualIndex& m : bk.indices) mirrored.insert(-m);
  CHECK(std::set<DualIndex>(bkp.indices.begin(), bkp.indices.end()) == mirrored);
  for (int i = 0; i < bkp.size(); ++i) {
    CHECK(bkp.shifted_norm2(i) ==
          Catch::Approx(bkp.wavevector(i).squaredNorm()).epsilon(1e-12));
  }
  CHECK((bkp.center_vector() + bk.center_vector()).norm() == 0.0);
}

TEST_CASE("free Hamiltonian is diagonal with the exact norm law", "[spectral]") {
  const LatticeSpec lat = build_lattice();
  const PlaneWaveBasis basis = build_basis(lat, 4.0);
  const FourierPotential zero;
  const Eigen::MatrixXcd h = assemble_hamiltonian(basis, zero, lat.k_point());
  for (int i = 0; i < basis.size(); ++i)
    for (int j = 0; j < basis.size(); ++j) {
      if (i == j)
        CHECK(h(i, i) == Complex(basis.shifted_norm2(i), 0.0));
      else
        CHECK(h(i, j) == Complex(0.0, 0.0));
    }
  // Free spectrum at K: the sorted exact norms; lowest four at 3q²/4.
  const BandSet bs = eigh(h);
  for (int i = 0; i < 4; ++i) CHECK(bs.mu[i] == Catch::Approx(0.75).epsilon(1e-13));
  for (int i = 0; i < basis.size(); ++i)
    CHECK(bs.mu[i] == Catch::Approx(basis.shifted_norm2(i)).margin(1e-12));
}

TEST_CASE("potential enters as a convolution stencil", "[spectral]") {
  const LatticeSpec lat = build_lattice();
  const PlaneWaveBasis basis = build_basis(lat, 4.0);
  const FourierPotential v = reference_potential();
  const Eigen::MatrixXcd h = assemble_hamiltonian(basis, v, lat.k_point());
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);  // exactly Hermitian
  CHECK(h.imag().cwiseAbs().maxCoeff() == 0.0);           // real for cosine sums
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> pick(0, basis.size() - 1);
    const int i = pick(oracle::rng());
    const int j = pick(oracle::rng());
    const DualIndex diff = basis.indices[static_cast<std::size_t>(i)] -
                           basis.indices[static_cast<std::size_t>(j)];
    const Complex expected =
        (i == j) ? Complex(basis.shifted_norm2(i), 0.0) + v.coefficient({0, 0, 0})
                 : v.coefficient(diff);
    CHECK(h(i, j) == expected);
  }
  // Away from the center the diagonal uses the floating-point norm.
  const Eigen::Vector3d k = lat.k_point() + Eigen::Vector3d(0.05, -0.02, 0.01);
  const Eigen::MatrixXcd hk = assemble_hamiltonian(basis, v, k);
  for (int i = 0; i < basis.size(); ++i) {
    const double kin = (k + lat.dual_vector(basis.indices[static_cast<std::size_t>(i)])).squaredNorm();
    CHECK(hk(i, i).real() == Catch::Approx(kin).epsilon(1e-13));
  }
}

TEST_CASE("dense Hermitian solver satisfies its reconstruction contract", "[spectral]") {
  const Eigen::MatrixXcd h = oracle::random_hermitian(50);
  const BandSet bs = eigh(h);
  REQUIRE(bs.mu.size() == 50);
  for (int i = 1; i < 50; ++i) CHECK(bs.mu[i - 1] <= bs.mu[i]);
  // Reconstruction oracle: V diag(μ) V† must reproduce the input.
  const Eigen::MatrixXcd rebuilt =
      bs.vectors * bs.mu.asDiagonal() * bs.vectors.adjoint();
  CHECK((rebuilt - h).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, bs.h_norm));
  CHECK(bs.max_residual <= 1e-10 * std::max(1.0, bs.h_norm));
  CHECK(bs.max_orthonormality_defect <= 1e-12);

  Eigen::MatrixXcd bad = h;
  bad(0, 1) += Complex(1e-6, 0.0);
  CHECK_THROWS_AS(eigh(bad), std::invalid_argument);
  CHECK_THROWS_AS(eigh(Eigen::MatrixXcd::Zero(3, 4)), std::invalid_argument);
}

TEST_CASE("sector columns carry the four rotation characters", "[spectral]") {
  const LatticeSpec lat = build_lattice();
  const PlaneWaveBasis basis = build_basis(lat, 4.0);
  const auto sectors = sector_bases(basis);
  const auto chars = sector_characters();
  const int n = basis.size();

  Eigen::MatrixXcd completeness = Eigen::MatrixXcd::Zero(n, n);
  for (int s = 0; s < 4; ++s) {
    const Eigen::MatrixXcd& b = sectors[static_cast<std::size_t>(s)].columns;
    REQUIRE(b.cols() == n / 4);
    // Orthonormal columns.
    CHECK((b.adjoint() * b - Eigen::MatrixXcd::Identity(n / 4, n / 4)).cwiseAbs().maxCoeff() <
          1e-14);
    completeness += b * b.adjoint();
    for (int c = 0; c < b.cols(); ++c) {
      const Eigen::VectorXcd col = b.col(c);
      // Rotation eigenvector with eigenvalue σ.
      CHECK((apply_symmetry_at_K(basis, SymOp::R, col) -
             chars[static_cast<std::size_t>(s)] * col)
                .cwiseAbs()
                .maxCoeff() < 1e-14);
      const auto sigma = character(basis, col);
      REQUIRE(sigma.has_value());
      CHECK(std::abs(*sigma - chars[static_cast<std::size_t>(s)]) < 1e-12);
    }
  }
  // The four sectors jointly resolve the identity.
  CHECK((completeness - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-13);

  // Frozen minimal column, σ = i on the orbit (0,0,0)→(1,0,0)→(0,1,0)→(0,0,1):
  // entries (1, -i, -1, i)/2.
  const Eigen::MatrixXcd& bi = sectors[1].columns;
  const int c0 = 0;  // orbit list is sorted; the minimal shell is first
  CHECK(std::abs(bi(basis.find({0, 0, 0}), c0) - Complex(0.5, 0.0)) < 1e-15);
  CHECK(std::abs(bi(basis.find({1, 0, 0}), c0) - Complex(0.0, -0.5)) < 1e-15);
  CHECK(std::abs(bi(basis.find({0, 1, 0}), c0) - Complex(-0.5, 0.0)) < 1e-15);
  CHECK(std::abs(bi(basis.find({0, 0, 1}), c0) - Complex(0.0, 0.5)) < 1e-15);

  // Both symmetry operators act as permutations of the coefficient slots:
  // they preserve norms and commute with H(K) for an invariant potential.
  const FourierPotential v = reference_potential();
  const Eigen::MatrixXcd h = assemble_hamiltonian(basis, v, basis.center_vector());
  for (const SymOp g : {SymOp::R, SymOp::T}) {
    Eigen::MatrixXcd pi(n, n);
    for (int c = 0; c < n; ++c)
      pi.col(c) = apply_symmetry_at_K(basis, g, Eigen::VectorXcd(Eigen::VectorXcd::Unit(n, c)));
    CHECK((pi.adjoint() * pi - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((pi * h - h * pi).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("character reports mixed vectors as unassigned", "[spectral]") {
  const LatticeSpec lat = build_lattice();
  const PlaneWaveBasis basis = build_basis(lat, 4.0);
  const auto sectors = sector_bases(basis);
  const Eigen::VectorXcd mixed = (sectors[0].columns.col(0) + sectors[2].columns.col(0)) /
                                 std::numbers::sqrt2;
  CHECK_FALSE(character(basis, mixed).has_value());
}

TEST_CASE("block solve at K is certified and matches the dense route", "[spectral]") {
  const LatticeSpec lat = build_lattice();
  const PlaneWaveBasis basis = build_basis(lat, 4.0);
  const FourierPotential v = reference_potential();
  const KSolveResult ks = solve_at_K(basis, v);
  CHECK(ks.sector_route);
  CHECK(ks.offblock_residual <= 1e-12);
  CHECK(ks.bands.max_residual <= 1e-10 * std::max(1.0, ks.bands.h_norm));
  CHECK(ks.bands.max_orthonormality_defect <= 1e-10);

  const BandSet dense = eigh(assemble_hamiltonian(basis, v, lat.k_point()));
  REQUIRE(ks.bands.mu.size() == dense.mu.size());
  for (int i = 0; i < dense.mu.size(); ++i)
    CHECK(ks.bands.mu[i] == Catch::Approx(dense.mu[i]).margin(1e-10 * (1.0 + std::abs(dense.mu[i]))));

  // Every column carries a character consistent with a direct measurement.
  for (int i = 0; i < std::min<int>(16, basis.size()); ++i) {
    REQUIRE(ks.sectors[static_cast<std::size_t>(i)].has_value());
    const auto measured = character(basis, ks.bands.vectors.col(i));
    REQUIRE(measured.has_value());
    CHECK(std::abs(*measured - *ks.sectors[static_cast<std::size_t>(i)]) < 1e-10);
  }

  // The ground cluster is threefold with characters {i, -1, -i}; the lowest
  // trivial-sector level sits strictly higher.
  const auto clusters = cluster_ranges(ks.bands.mu);
  REQUIRE(!clusters.empty());
  CHECK(clusters[0].second - clusters[0].first + 1 == 3);
  std::multiset<std::pair<double, double>> found;
  for (int i = clusters[0].first; i <= clusters[0].second; ++i) {
    const Complex s = *ks.sectors[static_cast<std::size_t>(i)];
    found.insert({s.real(), s.imag()});
    CHECK(std::abs(s - Complex(1, 0)) > 0.5);
  }
  CHECK(found == std::multiset<std::pair<double, double>>{{0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}});
}

TEST_CASE("non-invariant potentials fall back to the dense route", "[spectral]") {
  const LatticeSpec lat = build_lattice();
  const PlaneWaveBasis basis = build_basis(lat, 4.0);
  const FourierPotential v =
      reference_potential() + 0.1 * inversion_breaking_perturbation();
  const KSolveResult ks = solve_at_K(basis, v);
  CHECK_FALSE(ks.sector_route);
  CHECK(ks.offblock_residual > 1e-12);
  const BandSet dense = eigh(assemble_hamiltonian(basis, v, lat.k_point()));
  for (int i = 0; i < dense.mu.size(); ++i) CHECK(ks.bands.mu[i] == dense.mu[i]);
  CHECK(ks.bands.max_residual <= 1e-10 * std::max(1.0, ks.bands.h_norm));
}

TEST_CASE("band paths reproduce free dispersion over the fixed index set", "[spectral]") {
  const LatticeSpec lat = build_lattice();
  const PlaneWaveBasis basis = build_basis(lat, 4.0);
  const FourierPotential zero;
  const auto duals = oracle::dual_from_direct(lat.v1, lat.v2, lat.v3);
  const std::vector<Eigen::Vector3d> kpts = {
      lat.k_point(), lat.k_point() + Eigen::Vector3d(0.1, 0.0, -0.05),
      Eigen::Vector3d(0.3, 0.2, 0.1)};
  const int nbands = 8;
  const Eigen::MatrixXd bands = band_path(basis, zero, kpts, nbands);
  REQUIRE(bands.rows() == 3);
  REQUIRE(bands.cols() == nbands);
  for (std::size_t p = 0; p < kpts.size(); ++p) {
    std::vector<double> free;
    for (const DualIndex& m : basis.indices) {
      const Eigen::Vector3d qm = static_cast<double>(m.m1) * duals[0] +
                                 static_cast<double>(m.m2) * duals[1] +
                                 static_cast<double>(m.m3) * duals[2];
      free.push_back((kpts[p] + qm).squaredNorm());
    }
    std::sort(free.begin(), free.end());
    for (int b = 0; b < nbands; ++b)
      CHECK(bands(static_cast<int>(p), b) ==
            Catch::Approx(free[static_cast<std::size_t>(b)]).margin(1e-10));
  }
  // Thread count must not change a single bit of the result.
  const Eigen::MatrixXd threaded = band_path(basis, zero, kpts, nbands, 4);
  CHECK((threaded - bands).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(band_path(basis, zero, kpts, 0), std::invalid_argument);
  CHECK_THROWS_AS(band_path(basis, zero, kpts, basis.size() + 1), std::invalid_argument);
}

TEST_CASE("spectra are invariant under the symmetries acting on quasimomentum", "[spectral]") {
  const LatticeSpec lat = build_lattice();
  const PlaneWaveBasis basis = build_basis(lat, 4.0);
  const FourierPotential v = reference_potential();
  const Eigen::Vector3d q1 = lat.dual_vector({1, 0, 0});
  const Eigen::Vector3d k = lat.k_point() + Eigen::Vector3d(0.21, -0.13, 0.32);
  const BandSet a = eigh(assemble_hamiltonian(basis, v, k));
  // Because q_{g_K(m)} = g q_m + q1 and the index set is g_K-closed, the matrix
  // at g k − q1 is a permutation conjugate of the matrix at k: the two full
  // spectra coincide exactly, not merely to truncation accuracy.
  for (const SymOp g : {SymOp::R, SymOp::T}) {
    const Eigen::Vector3d mapped = symmetry_matrix(g) * k - q1;
    const BandSet b = eigh(assemble_hamiltonian(basis, v, mapped));
    for (int i = 0; i < basis.size(); ++i)
      CHECK(a.mu[i] == Catch::Approx(b.mu[i]).margin(1e-10 * (1.0 + std::abs(a.mu[i]))));
  }
}

TEST_CASE("cluster grouping splits at gaps above the scaled tolerance", "[spectral]") {
  Eigen::VectorXd mu(6);
  mu << 1.0, 1.0 + 1e-12, 1.0 + 2e-12, 2.0, 2.0 + 1e-6, 3.0;
  const auto ranges = cluster_ranges(mu);
  REQUIRE(ranges.size() == 4);
  CHECK(ranges[0] == std::pair<int, int>(0, 2));
  CHECK(ranges[1] == std::pair<int, int>(3, 3));
  CHECK(ranges[2] == std::pair<int, int>(4, 4));
  CHECK(ranges[3] == std::pair<int, int>(5, 5));
}

TEST_CASE("matrix elements agree with the assembled difference", "[spectral]") {
  const LatticeSpec lat = build_lattice();
  const PlaneWaveBasis basis = build_basis(lat, 3.0);
  const FourierPotential v = reference_potential() + 0.3 * inversion_breaking_perturbation();
  const FourierPotential zero;
  const Eigen::MatrixXcd dv = assemble_hamiltonian(basis, v, lat.k_point()) -
                              assemble_hamiltonian(basis, zero, lat.k_point());
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXcd a(basis.size()), b(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    a[i] = Complex(dist(oracle::rng()), dist(oracle::rng()));
    b[i] = Complex(dist(oracle::rng()), dist(oracle::rng()));
  }
  const Complex direct = matrix_element(basis, a, v, b);
  const Complex viamat = (a.adjoint() * dv * b)(0, 0);
  CHECK(std::abs(direct - viamat) < 1e-10 * (1.0 + std::abs(viamat)));
}

TEST_CASE("low bands converge as the radius grows", "[spectral][convergence]") {
  const LatticeSpec lat = build_lattice();
  const FourierPotential v = reference_potential();
  const auto low_bands = [&](double rho) {
    const PlaneWaveBasis basis = build_basis(lat, rho);
    return Eigen::Vector4d(eigh(assemble_hamiltonian(basis, v, lat.k_point())).mu.head(4));
  };
  const Eigen::Vector4d lo = low_bands(3.75), mid = low_bands(5.0), hi = low_bands(6.75);
  for (int b = 0; b < 4; ++b) {
    // Variational monotonicity: enlarging the basis can only lower eigenvalues.
    CHECK(lo[b] >= mid[b]);
    CHECK(mid[b] >= hi[b]);
    // The truncation error shrinks by at least an order of magnitude per step.
    CHECK(std::abs(lo[b] - hi[b]) >= 10.0 * std::abs(mid[b] - hi[b]));
  }
}
