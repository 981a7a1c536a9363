#include "hyxc/xc_correction.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hyxc {

Field delta_rho_field(const Eigen::MatrixXcd& rho1, const ZmOrbitalSet& basis) {
  const int m = basis.size();
  if (rho1.rows() != m || rho1.cols() != m)
    throw std::invalid_argument("delta_rho: rho1 dimension does not match the basis");
  const double trace = rho1.trace().real();
  if (std::abs(trace - basis.n_electrons) > 1e-6)
    throw std::invalid_argument("delta_rho: trace(rho1) = " + std::to_string(trace) +
                                " does not match N = " + std::to_string(basis.n_electrons));
  Field out(basis.grid(), FieldKind::generic);
  const double scale = 2.0 / basis.n_electrons;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      if (std::abs(rho1(i, j)) == 0.0) continue;
      const std::array<int, 3> d = {basis.wavevectors[j][0] - basis.wavevectors[i][0],
                                    basis.wavevectors[j][1] - basis.wavevectors[i][1],
                                    basis.wavevectors[j][2] - basis.wavevectors[i][2]};
      for (std::size_t g = 0; g < out.size(); ++g) {
        const double xi = basis.phase.phase_at(d, g);
        const cplx u(std::cos(xi), std::sin(xi));
        out[g] += scale * (rho1(i, j) * u).real();
      }
    }
  return out;
}

Field many_body_density(const Field& delta_rho, const Field& rho_ks) {
  if (delta_rho.grid() != rho_ks.grid())
    throw std::invalid_argument("many_body_density: grid mismatch");
  Field out(rho_ks.grid(), FieldKind::generic);
  for (std::size_t g = 0; g < out.size(); ++g)
    out[g] = (1.0 + delta_rho[g].real()) * rho_ks[g].real();
  return out;
}

double exchange_correlation_energy(double many_body_energy, const KsState& ks,
                                   const Field& v_ext1,
                                   const std::optional<InteractionKernel>& kernel) {
  const EnergyBreakdown parts = ks_energy_breakdown(ks, v_ext1, kernel, 0.0, many_body_energy);
  return many_body_energy - parts.t_ks - parts.e_ext - parts.e_hartree;
}

Field vxc_local(const RdmPair& rdms, DerivativeKernels& kernels, const Field& v_h,
                int n_electrons) {
  const ZmOrbitalSet& basis = kernels.basis();
  const int m = basis.size();
  if (rdms.m != m) throw std::invalid_argument("vxc_local: RDM dimension mismatch");
  if (!rdms.basis_id.empty() && !basis.basis_id.empty() && rdms.basis_id != basis.basis_id)
    throw std::invalid_argument("vxc_local: RDMs were measured in a different basis (" +
                                rdms.basis_id + " vs " + basis.basis_id + ")");
  const Grid& grid = basis.grid();
  std::vector<cplx> acc(grid.size(), cplx(0.0));

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j || std::abs(rdms.rho1(i, j)) == 0.0) continue;
      const Field& k = kernels.dvext(i, j);
      for (std::size_t g = 0; g < grid.size(); ++g) acc[g] += rdms.rho1(i, j) * k[g];
    }

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          if (k == l) continue;
          const cplx g2 = rdms.gamma(i, j, k, l);
          if (std::abs(g2) == 0.0) continue;
          const Field kern = kernels.dvee(i, j, k, l);
          for (std::size_t g = 0; g < grid.size(); ++g) acc[g] += 0.5 * g2 * kern[g];
        }
    }

  Field out(grid, FieldKind::potential);
  double max_imag = 0.0;
  const double inv_n = 1.0 / n_electrons;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    acc[g] -= v_h[g].real() * inv_n;
    max_imag = std::max(max_imag, std::abs(acc[g].imag()));
    out[g] = acc[g].real();
  }
  if (max_imag > 1e-8)
    throw std::runtime_error("vxc_local: imaginary residue " + std::to_string(max_imag) +
                             " exceeds 1e-8");
  return out;
}

Field apply_corrected_hamiltonian(const Field& psi, const Field& v_ext1, const Field& v_h,
                                  const Field& vxc_loc, const ZmOrbitalSet& basis,
                                  const Eigen::MatrixXcd& rho1) {
  if (psi.grid() != basis.grid())
    throw std::invalid_argument("apply_corrected_hamiltonian: grid mismatch");
  const int m = basis.size();
  const Field lap = laplacian(psi);
  Field out(psi.grid(), FieldKind::generic);
  for (std::size_t g = 0; g < out.size(); ++g)
    out[g] = -0.5 * lap[g] +
             (v_ext1[g].real() + v_h[g].real() + vxc_loc[g].real()) * psi[g];

  Eigen::VectorXcd coeff(m);
  for (int i = 0; i < m; ++i) coeff(i) = inner(basis.orbitals[i], psi);
  const Eigen::MatrixXcd weights =
      Eigen::MatrixXcd::Identity(m, m) - rho1;  // (delta_mj - rho_mj)
  for (int j = 0; j < m; ++j) {
    cplx w(0.0);
    for (int mm = 0; mm < m; ++mm) w += weights(mm, j) * coeff(mm);
    if (std::abs(w) == 0.0) continue;
    const Field lap_phi = laplacian(basis.orbitals[j]);
    for (std::size_t g = 0; g < out.size(); ++g) out[g] += 0.5 * w * lap_phi[g];
  }
  return out;
}

Eigen::MatrixXcd kinetic_correction_matrix(const ZmOrbitalSet& basis,
                                           const Eigen::MatrixXcd& rho1) {
  const Grid& grid = basis.grid();
  const int m = basis.size();
  const std::size_t G = grid.size();
  Eigen::MatrixXcd lap_phi(G, m), phi_w(G, m);
  for (int j = 0; j < m; ++j) {
    const Field lap = laplacian(basis.orbitals[j]);
    for (std::size_t g = 0; g < G; ++g) {
      lap_phi(g, j) = lap[g];
      phi_w(g, j) = basis.orbitals[j][g] * grid.quad_weight(g);
    }
  }
  const Eigen::MatrixXcd weights = Eigen::MatrixXcd::Identity(m, m) - rho1;
  // C psi = 1/2 sum_mj weights(m,j) <phi_m|psi> lap phi_j
  return 0.5 * lap_phi * weights.transpose() * phi_w.adjoint();
}

Eigen::MatrixXcd dense_ks_hamiltonian(const Field& v_eff) {
  const Grid& g = v_eff.grid();
  const int n = g.points_per_axis();
  const std::size_t G = g.size();
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(G, G);
  const std::array<std::size_t, 3> stride =
      g.dim() == 1 ? std::array<std::size_t, 3>{1, 0, 0}
                   : std::array<std::size_t, 3>{static_cast<std::size_t>(n) * n,
                                                static_cast<std::size_t>(n), 1};
  for (std::size_t idx = 0; idx < G; ++idx) {
    const auto pos = g.unflatten(idx);
    double diag = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double inv_h2 = 1.0 / (g.spacing(a) * g.spacing(a));
      diag += inv_h2;
      if (pos[a] > 0) H(idx, idx - stride[a]) = -0.5 * inv_h2;
      if (pos[a] < n - 1) H(idx, idx + stride[a]) = -0.5 * inv_h2;
    }
    H(idx, idx) = diag + v_eff[idx];
  }
  return H;
}

Eigen::MatrixXcd corrected_hamiltonian_matrix(const Field& v_ext1, const Field& v_h,
                                              const Field& vxc_loc, const ZmOrbitalSet& basis,
                                              const Eigen::MatrixXcd& rho1, double abort_threshold,
                                              double* deviation_out) {
  Field v_eff(v_ext1.grid(), FieldKind::potential);
  for (std::size_t g = 0; g < v_eff.size(); ++g)
    v_eff[g] = v_ext1[g].real() + v_h[g].real() + vxc_loc[g].real();
  Eigen::MatrixXcd H = dense_ks_hamiltonian(v_eff) + kinetic_correction_matrix(basis, rho1);
  const double deviation = 0.5 * (H - H.adjoint()).cwiseAbs().maxCoeff();
  if (deviation_out) *deviation_out = deviation;
  if (deviation > abort_threshold)
    throw std::runtime_error("corrected_hamiltonian_matrix: Hermitization deviation " +
                             std::to_string(deviation) + " exceeds " +
                             std::to_string(abort_threshold));
  return 0.5 * (H + Eigen::MatrixXcd(H.adjoint()));
}

}  // namespace hyxc
