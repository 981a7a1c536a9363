#include <random>

#define HYXC_TEST_NEEDS_TENSORS
#include "doctest.h"
#include "helpers.hpp"
#include "hyxc/fci.hpp"
#include "hyxc/vqe.hpp"
#include "hyxc/xc_correction.hpp"

using namespace hyxc;
using hyxc::testing::modulated_two_peak_density;
using hyxc::testing::uniform_density;

namespace {

Field soft_atom(const Grid& g, double z, double a) {
  Field v(g, FieldKind::potential);
  const double c = 0.5 * (g.lo(0) + g.hi(0));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coord(0, i) - c;
    v[i] = -z / std::sqrt(x * x + a * a);
  }
  return v;
}

Eigen::MatrixXcd random_rho1(int m, int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-0.4, 0.4);
  Eigen::MatrixXcd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = cplx(dist(rng), dist(rng));
  Eigen::MatrixXcd rho = 0.5 * (a + a.adjoint());
  const double shift = (n - rho.trace().real()) / m;
  for (int i = 0; i < m; ++i) rho(i, i) += shift;
  return rho;
}

}  // namespace

TEST_SUITE_BEGIN("xc_correction");

TEST_CASE("diagonal rho1 gives an identically zero density correction") {
  Grid g = Grid::line(-10.0, 10.0, 257);
  const ZmOrbitalSet basis =
      build_orbitals(modulated_two_peak_density(g, 2), default_wavevectors(1, 4), 2);
  Eigen::MatrixXcd rho1 = Eigen::MatrixXcd::Zero(4, 4);
  rho1(0, 0) = 1.0;
  rho1(2, 2) = 1.0;
  const Field delta = delta_rho_field(rho1, basis);
  for (std::size_t i = 0; i < delta.size(); ++i) {
    CHECK(std::abs(delta[i].real()) <= 1e-14);
    CHECK(delta[i].imag() == 0.0);
  }
  const Field mb = many_body_density(delta, basis.source_density);
  for (std::size_t i = 0; i < mb.size(); ++i)
    CHECK(mb[i].real() == doctest::Approx(basis.source_density[i].real()).epsilon(1e-14));
}

TEST_CASE("density routes agree: orbital contraction vs (1 + delta) rho") {
  std::mt19937 rng(13);
  Grid g = Grid::line(-10.0, 10.0, 257);
  const ZmOrbitalSet basis =
      build_orbitals(modulated_two_peak_density(g, 2), default_wavevectors(1, 4), 2);
  const Eigen::MatrixXcd rho1 = random_rho1(4, 2, rng);
  const Field delta = delta_rho_field(rho1, basis);
  const Field mb = many_body_density(delta, basis.source_density);

  double max_scale = 0.0;
  for (std::size_t q = 0; q < g.size(); ++q)
    max_scale = std::max(max_scale, std::abs(mb[q].real()));
  for (std::size_t q = 0; q < g.size(); ++q) {
    cplx direct(0.0);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        direct += std::conj(basis.orbitals[i][q]) * basis.orbitals[j][q] * rho1(i, j);
    CHECK(std::abs(direct.imag()) <= 1e-14);
    CHECK(std::abs(direct.real() - mb[q].real()) <= 1e-10 * max_scale);
  }

  // The particle number survives up to basis-orthonormality error.
  double gram_dev = 0.0;
  double rho_weight = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      gram_dev = std::max(gram_dev, std::abs(inner(basis.orbitals[i], basis.orbitals[j])));
      rho_weight += std::abs(rho1(i, j));
    }
  CHECK(std::abs(integrate_real(mb) - 2.0) <= 2.0 * rho_weight * gram_dev + 1e-12);

  // With an exactly orthonormal (uniform-density) basis the identity is sharp.
  const ZmOrbitalSet exact_basis =
      build_orbitals(uniform_density(g, 2), default_wavevectors(1, 4), 2);
  const Field delta_u = delta_rho_field(rho1, exact_basis);
  const Field mb_u = many_body_density(delta_u, exact_basis.source_density);
  CHECK(std::abs(integrate_real(mb_u) - 2.0) <= 1e-8);

  Eigen::MatrixXcd bad = rho1;
  bad(0, 0) += 0.5;  // trace off by 0.5
  CHECK_THROWS(delta_rho_field(bad, basis));
}

TEST_CASE("exchange-correlation energy: definitional zero and one-electron limit") {
  Grid g = Grid::line(-8.0, 8.0, 161);
  const Field v = soft_atom(g, 2.0, 1.0);
  const InteractionKernel kernel = InteractionKernel::soft_coulomb(1.0);
  XcContent xc;
  const ScfResult scf = inner_scf(v, kernel, 1, xc, {});
  REQUIRE(scf.converged);

  // Feeding back exactly T + E_ext + E_H gives zero.
  const EnergyBreakdown parts = ks_energy_breakdown(scf.state, v, kernel, 0.0, 0.0);
  CHECK(std::abs(exchange_correlation_energy(parts.total, scf.state, v, kernel)) <= 1e-12);

  // One electron in the single exact basis state: the interacting energy has
  // no electron-electron term, so E_xc must cancel the spurious E_H.
  const ZmOrbitalSet basis = build_orbitals(scf.state.density, {{0, 0, 0}}, 1);
  const HamiltonianTensors tensors = assemble_tensors(basis, v, &kernel);
  const Ansatz ansatz = Ansatz::hardware_efficient(1, 1, 1);
  const VqeResult r = minimize_energy(tensors, ansatz, {});
  const double e_xc = exchange_correlation_energy(r.energy, scf.state, v, kernel);
  CHECK(std::abs(e_xc + parts.e_hartree) <= 1e-6);
}

TEST_CASE("exchange-correlation energy is negative for the repulsive test system") {
  Grid g = Grid::line(-8.0, 8.0, 161);
  const Field v = soft_atom(g, 2.0, 1.0);
  const InteractionKernel kernel = InteractionKernel::soft_coulomb(1.0);
  XcContent xc;
  const ScfResult scf = inner_scf(v, kernel, 2, xc, {});
  REQUIRE(scf.converged);
  const ZmOrbitalSet basis = build_orbitals(scf.state.density, default_wavevectors(1, 4), 2);
  const HamiltonianTensors tensors = assemble_tensors(basis, v, &kernel);
  const double e_mb = solve_ground(tensors, 2).ground_energy;
  CHECK(exchange_correlation_energy(e_mb, scf.state, v, kernel) < 0.0);
}

TEST_CASE("vxc_local: zero off-diagonal RDMs leave only the Hartree correction") {
  Grid g = Grid::line(-10.0, 10.0, 129);
  const ZmOrbitalSet basis =
      build_orbitals(modulated_two_peak_density(g, 2), default_wavevectors(1, 3), 2);
  const InteractionKernel kernel = InteractionKernel::soft_coulomb(1.0);
  const Field v = soft_atom(g, 2.0, 1.0);
  const Field vh = hartree_potential(basis.source_density, kernel);

  RdmPair rdms;
  rdms.m = 3;
  rdms.rho1 = Eigen::MatrixXcd::Zero(3, 3);
  rdms.rho1(0, 0) = 1.0;
  rdms.rho1(1, 1) = 1.0;
  rdms.gamma2.assign(81, cplx(0.0));
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      rdms.gamma(i, i, k, k) = (i != k && i < 2 && k < 2) ? 1.0 : 0.0;

  DerivativeKernels kernels(basis, v, &kernel);
  const Field vxc = vxc_local(rdms, kernels, vh, 2);
  for (std::size_t q = 0; q < g.size(); ++q)
    CHECK(vxc[q].real() == doctest::Approx(-vh[q].real() / 2.0).epsilon(1e-13));
}

TEST_CASE("vxc_local: determinant reduces to the exchange term minus v_H/N") {
  Grid g = Grid::line(-10.0, 10.0, 129);
  const ZmOrbitalSet basis =
      build_orbitals(modulated_two_peak_density(g, 2), default_wavevectors(1, 3), 2);
  const InteractionKernel kernel = InteractionKernel::soft_coulomb(1.0);
  const Field v = soft_atom(g, 2.0, 1.0);
  const Field vh = hartree_potential(basis.source_density, kernel);

  // Slater determinant occupying modes 0 and 1: gamma = rho x rho - exchange.
  RdmPair rdms;
  rdms.m = 3;
  rdms.rho1 = Eigen::MatrixXcd::Zero(3, 3);
  rdms.rho1(0, 0) = 1.0;
  rdms.rho1(1, 1) = 1.0;
  rdms.gamma2.assign(81, cplx(0.0));
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      if (i == k) continue;
      rdms.gamma(i, i, k, k) = 1.0;
      rdms.gamma(i, k, k, i) = -1.0;
    }

  DerivativeKernels kernels(basis, v, &kernel);
  const Field vxc = vxc_local(rdms, kernels, vh, 2);
  // Hand-assembled exchange term: 1/2 sum_{i!=j} gamma_ijji dvee_ijji.
  Field expected(g);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (i == j) continue;
      const Field d = dvee_kernel(basis, kernel, i, j, j, i);
      for (std::size_t q = 0; q < g.size(); ++q) expected[q] += -0.5 * d[q];
    }
  for (std::size_t q = 0; q < g.size(); ++q)
    expected[q] -= vh[q].real() / 2.0;
  for (std::size_t q = 0; q < g.size(); ++q)
    CHECK(vxc[q].real() == doctest::Approx(expected[q].real()).epsilon(1e-12));
}

TEST_CASE("paired-diagonal contraction yields the Hartree share of v_ee") {
  Grid g = Grid::line(-10.0, 10.0, 129);
  const int m = 3, n = 2;
  const ZmOrbitalSet basis =
      build_orbitals(modulated_two_peak_density(g, n), default_wavevectors(1, m), n);
  const InteractionKernel kernel = InteractionKernel::soft_coulomb(1.0);
  const Field vh = hartree_potential(basis.source_density, kernel);

  // Determinant gamma over modes {0,1}.
  RdmPair rdms;
  rdms.m = m;
  rdms.gamma2.assign(81, cplx(0.0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (i != k) rdms.gamma(i, i, k, k) = 1.0;

  Field partial(g);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      if (std::abs(rdms.gamma(i, i, k, k)) == 0.0) continue;
      const Field d = dvee_kernel(basis, kernel, i, i, k, k);
      for (std::size_t q = 0; q < g.size(); ++q)
        partial[q] += 0.5 * rdms.gamma(i, i, k, k) * d[q];
    }
  const double share = static_cast<double>(n) * (n - 1) / (static_cast<double>(n) * n);
  for (std::size_t q = 0; q < g.size(); ++q)
    CHECK(partial[q].real() ==
          doctest::Approx(share * vh[q].real()).epsilon(1e-6));
}

TEST_CASE("vxc_local is linear in the off-diagonal gamma block") {
  Grid g = Grid::line(-10.0, 10.0, 129);
  const ZmOrbitalSet basis =
      build_orbitals(modulated_two_peak_density(g, 2), default_wavevectors(1, 3), 2);
  const InteractionKernel kernel = InteractionKernel::soft_coulomb(1.0);
  const Field v = soft_atom(g, 2.0, 1.0);
  const Field vh = hartree_potential(basis.source_density, kernel);

  RdmPair det;
  det.m = 3;
  det.rho1 = Eigen::MatrixXcd::Zero(3, 3);
  det.rho1(0, 0) = 1.0;
  det.rho1(1, 1) = 1.0;
  det.gamma2.assign(81, cplx(0.0));
  RdmPair scaled = det;
  const double lambda = 0.35;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      if (i == k) continue;
      det.gamma(i, k, k, i) = -1.0;
      scaled.gamma(i, k, k, i) = -lambda;
    }

  DerivativeKernels kernels(basis, v, &kernel);
  const Field base = vxc_local(det, kernels, vh, 2);
  const Field part = vxc_local(scaled, kernels, vh, 2);
  for (std::size_t q = 0; q < g.size(); ++q) {
    const double gamma_term = base[q].real() + vh[q].real() / 2.0;
    const double scaled_term = part[q].real() + vh[q].real() / 2.0;
    CHECK(scaled_term == doctest::Approx(lambda * gamma_term).epsilon(1e-10));
  }
}

TEST_CASE("identity rho1 reduces the corrected Hamiltonian exactly") {
  Grid g = Grid::line(-10.0, 10.0, 129);
  const ZmOrbitalSet basis =
      build_orbitals(modulated_two_peak_density(g, 2), default_wavevectors(1, 3), 2);
  const InteractionKernel kernel = InteractionKernel::soft_coulomb(1.0);
  const Field v = soft_atom(g, 2.0, 1.0);
  const Field vh = hartree_potential(basis.source_density, kernel);
  const Field vxc = seed_xc(basis.source_density, XcModel::none);
  const Eigen::MatrixXcd rho1 = Eigen::MatrixXcd::Identity(3, 3);

  // Operator action vs the plain KS pieces, on an arbitrary field.
  std::mt19937 rng(3);
  const Field psi = hyxc::testing::random_complex_field(g, rng);
  const Field got = apply_corrected_hamiltonian(psi, v, vh, vxc, basis, rho1);
  const Field lap = laplacian(psi);
  for (std::size_t q = 0; q < g.size(); ++q) {
    const cplx expected = -0.5 * lap[q] + (v[q].real() + vh[q].real()) * psi[q];
    CHECK(std::abs(got[q] - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
  }

  double deviation = -1.0;
  const Eigen::MatrixXcd h =
      corrected_hamiltonian_matrix(v, vh, vxc, basis, rho1, 1e-6, &deviation);
  CHECK(deviation <= 1e-14);
  Field v_eff(g, FieldKind::potential);
  for (std::size_t q = 0; q < g.size(); ++q) v_eff[q] = v[q].real() + vh[q].real();
  const Eigen::MatrixXcd ks = dense_ks_hamiltonian(v_eff);
  CHECK((h - ks).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("kinetic term collapses on a basis state") {
  std::mt19937 rng(9);
  Grid g = Grid::line(-10.0, 10.0, 513);
  const ZmOrbitalSet basis =
      build_orbitals(modulated_two_peak_density(g, 2), default_wavevectors(1, 4), 2);
  const Eigen::MatrixXcd rho1 = random_rho1(4, 2, rng);
  Field zero(g, FieldKind::potential);

  for (int m_idx : {0, 2}) {
    const Field got =
        apply_corrected_hamiltonian(basis.orbitals[m_idx], zero, zero, zero, basis, rho1);
    Field expected(g);
    for (int j = 0; j < 4; ++j) {
      const Field lap = laplacian(basis.orbitals[j]);
      for (std::size_t q = 0; q < g.size(); ++q) expected[q] += -0.5 * rho1(m_idx, j) * lap[q];
    }
    double scale = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q)
      scale = std::max(scale, std::abs(expected[q]));
    // Orthonormality collapses the expansion only to quadrature accuracy.
    for (std::size_t q = 1; q + 1 < g.size(); ++q)
      CHECK(std::abs(got[q] - expected[q]) <= 2e-5 * scale);
  }
}

TEST_CASE("matrix action matches the operator action") {
  // A wall-pinned SCF density keeps the boundary rows of the stencil exact.
  Grid g = Grid::line(-10.0, 10.0, 129);
  const Field v = soft_atom(g, 2.0, 1.0);
  const InteractionKernel kernel = InteractionKernel::soft_coulomb(1.0);
  XcContent seed;
  const ScfResult scf = inner_scf(v, kernel, 2, seed, {});
  REQUIRE(scf.converged);
  const ZmOrbitalSet basis =
      build_orbitals(scf.state.density, default_wavevectors(1, 3), 2);
  const Field vh = hartree_potential(basis.source_density, kernel);
  const Field vxc = seed_xc(basis.source_density, XcModel::none);

  // A vector in the basis span.
  Field psi(g);
  for (std::size_t q = 0; q < g.size(); ++q)
    psi[q] = 0.6 * basis.orbitals[0][q] + cplx(0.2, -0.5) * basis.orbitals[2][q];

  // In the determinant limit the matrix and operator agree to round-off.
  {
    const Eigen::MatrixXcd rho1 = Eigen::MatrixXcd::Identity(3, 3);
    const Eigen::MatrixXcd h = corrected_hamiltonian_matrix(v, vh, vxc, basis, rho1);
    const Field direct = apply_corrected_hamiltonian(psi, v, vh, vxc, basis, rho1);
    Eigen::Map<const Eigen::VectorXcd> pv(psi.values().data(), g.size());
    const Eigen::VectorXcd hv = h * pv;
    double worst = 0.0, scale = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) {
      worst = std::max(worst, std::abs(hv(q) - direct[q]));
      scale = std::max(scale, std::abs(direct[q]));
    }
    CHECK(worst <= 1e-10 * scale);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);  // real spectrum

    // Span Hermiticity of the action.
    const Field chi = basis.orbitals[1];
    const Field hchi = apply_corrected_hamiltonian(chi, v, vh, vxc, basis, rho1);
    const cplx lhs = inner(chi, direct);
    const cplx rhs = std::conj(inner(psi, hchi));
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(lhs)));
  }

  // Away from the determinant limit the mismatch is bounded by the logged
  // Hermitization deviation.
  {
    Eigen::MatrixXcd rho1 = Eigen::MatrixXcd::Zero(3, 3);
    rho1(0, 0) = 1.0;
    rho1(1, 1) = 1.0;
    double deviation = -1.0;
    const Eigen::MatrixXcd h = corrected_hamiltonian_matrix(
        v, vh, vxc, basis, rho1, std::numeric_limits<double>::infinity(), &deviation);
    CHECK(deviation > 0.0);
    const Field direct = apply_corrected_hamiltonian(psi, v, vh, vxc, basis, rho1);
    Eigen::Map<const Eigen::VectorXcd> pv(psi.values().data(), g.size());
    const Eigen::VectorXcd hv = h * pv;
    double psi_l1 = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) psi_l1 += std::abs(psi[q]);
    for (std::size_t q = 0; q < g.size(); ++q)
      CHECK(std::abs(hv(q) - direct[q]) <= deviation * psi_l1 + 1e-12);
  }
}

TEST_CASE("hermitization gate aborts on strongly non-normal corrections") {
  std::mt19937 rng(77);
  Grid g = Grid::line(-10.0, 10.0, 129);
  const ZmOrbitalSet basis =
      build_orbitals(modulated_two_peak_density(g, 2), default_wavevectors(1, 3), 2);
  const Field zero(g, FieldKind::potential);
  const Eigen::MatrixXcd rho1 = random_rho1(3, 2, rng);  // generic correlated case
  CHECK_THROWS(corrected_hamiltonian_matrix(zero, zero, zero, basis, rho1, 1e-12));
}

TEST_SUITE_END();
