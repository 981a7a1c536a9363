#include "hyxc/fci.hpp"

#include <bit>
#include <stdexcept>
#include <unordered_map>

namespace hyxc {

namespace {

/// Parity sign of modes below p: (-1)^(popcount of bits < p).
inline int parity_sign(std::uint64_t mask, int p) {
  const std::uint64_t below = mask & ((std::uint64_t{1} << p) - 1);
  return (std::popcount(below) & 1) ? -1 : 1;
}

/// Apply a_p; returns false when the mode is empty.
inline bool annihilate(std::uint64_t& mask, int p, int& sign) {
  const std::uint64_t bit = std::uint64_t{1} << p;
  if (!(mask & bit)) return false;
  sign *= parity_sign(mask, p);
  mask ^= bit;
  return true;
}

/// Apply a_p^dagger; returns false when the mode is occupied.
inline bool create(std::uint64_t& mask, int p, int& sign) {
  const std::uint64_t bit = std::uint64_t{1} << p;
  if (mask & bit) return false;
  sign *= parity_sign(mask, p);
  mask ^= bit;
  return true;
}

}  // namespace

std::vector<std::uint64_t> enumerate_basis(int m, int n, std::size_t cap) {
  if (n < 0 || n > m) throw std::invalid_argument("enumerate_basis: need 0 <= N <= M");
  if (m > 63) throw std::invalid_argument("enumerate_basis: M > 63 unsupported");
  const BigUint count = count_configurations(m, n);
  if (!count.fits_u64() || count.as_u64() > cap)
    throw std::runtime_error("enumerate_basis: C(M,N) = " + count.str() +
                             " exceeds the configured cap " + std::to_string(cap));
  std::vector<std::uint64_t> out;
  out.reserve(count.as_u64());
  std::vector<int> comb(n);
  for (int i = 0; i < n; ++i) comb[i] = i;
  if (n == 0) {
    out.push_back(0);
    return out;
  }
  while (true) {
    std::uint64_t mask = 0;
    for (int i : comb) mask |= (std::uint64_t{1} << i);
    out.push_back(mask);
    int i = n - 1;
    while (i >= 0 && comb[i] == m - n + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
  }
  return out;
}

std::vector<OccupationVector> enumerate_occupations(int m, int n, std::size_t cap) {
  std::vector<OccupationVector> out;
  for (auto mask : enumerate_basis(m, n, cap)) out.push_back(OccupationVector::from_mask(mask, m));
  return out;
}

Eigen::MatrixXcd fci_hamiltonian_matrix(const HamiltonianTensors& tensors,
                                        const std::vector<std::uint64_t>& basis) {
  const int m = tensors.m;
  Eigen::MatrixXcd h1 = tensors.t + tensors.v_ext;
  if ((h1 - h1.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("fci_hamiltonian_matrix: non-Hermitian one-body tensor");

  std::unordered_map<std::uint64_t, int> lookup;
  lookup.reserve(basis.size());
  for (std::size_t a = 0; a < basis.size(); ++a) lookup[basis[a]] = static_cast<int>(a);

  const std::size_t P = basis.size();
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(P, P);
  for (std::size_t alpha = 0; alpha < P; ++alpha) {
    const std::uint64_t state = basis[alpha];
    // One-body: a_i^dag a_j
    for (int j = 0; j < m; ++j) {
      std::uint64_t m1 = state;
      int s1 = 1;
      if (!annihilate(m1, j, s1)) continue;
      for (int i = 0; i < m; ++i) {
        std::uint64_t m2 = m1;
        int s2 = s1;
        if (!create(m2, i, s2)) continue;
        if (std::abs(h1(i, j)) == 0.0) continue;
        H(lookup.at(m2), alpha) += static_cast<double>(s2) * h1(i, j);
      }
    }
    // Two-body: 1/2 v[ijkl] a_i^dag a_k^dag a_l a_j (rightmost acts first)
    if (tensors.has_interaction()) {
      for (int j = 0; j < m; ++j) {
        std::uint64_t m1 = state;
        int s1 = 1;
        if (!annihilate(m1, j, s1)) continue;
        for (int l = 0; l < m; ++l) {
          std::uint64_t m2 = m1;
          int s2 = s1;
          if (!annihilate(m2, l, s2)) continue;
          for (int k = 0; k < m; ++k) {
            std::uint64_t m3 = m2;
            int s3 = s2;
            if (!create(m3, k, s3)) continue;
            for (int i = 0; i < m; ++i) {
              std::uint64_t m4 = m3;
              int s4 = s3;
              if (!create(m4, i, s4)) continue;
              const cplx v = tensors.vee(i, j, k, l);
              if (std::abs(v) == 0.0) continue;
              H(lookup.at(m4), alpha) += 0.5 * static_cast<double>(s4) * v;
            }
          }
        }
      }
    }
  }
  return H;
}

RdmPair rdms_from_expansion(const std::vector<std::uint64_t>& basis,
                            const Eigen::VectorXcd& coefficients, int m) {
  std::unordered_map<std::uint64_t, int> lookup;
  for (std::size_t a = 0; a < basis.size(); ++a) lookup[basis[a]] = static_cast<int>(a);

  RdmPair rdm;
  rdm.m = m;
  rdm.rho1 = Eigen::MatrixXcd::Zero(m, m);
  rdm.gamma2.assign(static_cast<std::size_t>(m) * m * m * m, cplx(0.0));

  for (std::size_t alpha = 0; alpha < basis.size(); ++alpha) {
    const cplx c = coefficients(alpha);
    if (std::abs(c) == 0.0) continue;
    const std::uint64_t state = basis[alpha];
    for (int j = 0; j < m; ++j) {
      std::uint64_t m1 = state;
      int s1 = 1;
      if (!annihilate(m1, j, s1)) continue;
      // rho_ij = <a_i^dag a_j>
      for (int i = 0; i < m; ++i) {
        std::uint64_t m2 = m1;
        int s2 = s1;
        if (!create(m2, i, s2)) continue;
        auto it = lookup.find(m2);
        if (it == lookup.end()) continue;
        rdm.rho1(i, j) += std::conj(coefficients(it->second)) * c * static_cast<double>(s2);
      }
      // gamma_ijkl = <a_i^dag a_k^dag a_l a_j>
      for (int l = 0; l < m; ++l) {
        std::uint64_t m2 = m1;
        int s2 = s1;
        if (!annihilate(m2, l, s2)) continue;
        for (int k = 0; k < m; ++k) {
          std::uint64_t m3 = m2;
          int s3 = s2;
          if (!create(m3, k, s3)) continue;
          for (int i = 0; i < m; ++i) {
            std::uint64_t m4 = m3;
            int s4 = s3;
            if (!create(m4, i, s4)) continue;
            auto it = lookup.find(m4);
            if (it == lookup.end()) continue;
            rdm.gamma(i, j, k, l) +=
                std::conj(coefficients(it->second)) * c * static_cast<double>(s4);
          }
        }
      }
    }
  }
  return rdm;
}

FciSolution solve_ground(const HamiltonianTensors& tensors, int n_electrons, std::size_t cap) {
  FciSolution sol;
  sol.basis = enumerate_basis(tensors.m, n_electrons, cap);
  Eigen::MatrixXcd H = fci_hamiltonian_matrix(tensors, sol.basis);
  if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, H.cwiseAbs().maxCoeff()))
    throw std::runtime_error("solve_ground: assembled matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H);
  if (solver.info() != Eigen::Success) throw std::runtime_error("solve_ground: eigensolver failed");
  sol.ground_energy = solver.eigenvalues()(0);
  sol.coefficients = solver.eigenvectors().col(0);
  sol.rdms = rdms_from_expansion(sol.basis, sol.coefficients, tensors.m);
  sol.rdms.basis_id = tensors.basis_id;
  return sol;
}

}  // namespace hyxc
