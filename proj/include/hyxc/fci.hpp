#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "hyxc/second_quant.hpp"

namespace hyxc {

/// Exact diagonalization in the N-particle occupation basis; the brute-force
/// oracle for the quantum-side machinery.
struct FciSolution {
  std::vector<std::uint64_t> basis;  // occupation bitmasks (bit i = n_i)
  double ground_energy = 0.0;
  Eigen::VectorXcd coefficients;
  RdmPair rdms;
};

/// All C(M,N) occupation vectors, combinations in lexicographic order of the
/// occupied-orbital index lists. Throws when C(M,N) exceeds `cap`.
std::vector<std::uint64_t> enumerate_basis(int m, int n, std::size_t cap = 1000000);

std::vector<OccupationVector> enumerate_occupations(int m, int n, std::size_t cap = 1000000);

/// <beta| H |alpha> by direct operator application with fermionic parity
/// signs (a_p carries (-1)^(number of occupied modes below p)).
Eigen::MatrixXcd fci_hamiltonian_matrix(const HamiltonianTensors& tensors,
                                        const std::vector<std::uint64_t>& basis);

FciSolution solve_ground(const HamiltonianTensors& tensors, int n_electrons,
                         std::size_t cap = 1000000);

/// RDMs of an arbitrary N-sector expansion; used for both the FCI ground
/// state and cross-checks.
RdmPair rdms_from_expansion(const std::vector<std::uint64_t>& basis,
                            const Eigen::VectorXcd& coefficients, int m);

}  // namespace hyxc
