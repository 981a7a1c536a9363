#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hyxc/second_quant.hpp"

namespace hyxc {

/// Full 2^M statevector over occupation basis states; bit q of the basis
/// index is the occupation of orbital q.
struct Statevector {
  int n_qubits = 0;
  std::vector<cplx> amps;

  static Statevector basis_state(const OccupationVector& occ);
  double norm() const;
};

/// Brick-wall circuit of number-conserving two-mode blocks on adjacent
/// qubit pairs. Each block carries three angles: the mixing rotation, the
/// transfer phase, and a phase on the doubly-occupied component (the last
/// one takes the block beyond free-fermion circuits, which is what lets the
/// ansatz represent correlated states).
struct Ansatz {
  int n_qubits = 0;
  int n_layers = 1;
  OccupationVector reference;

  static Ansatz hardware_efficient(int m, int n_electrons, int layers);

  /// Block pairs of one layer: (0,1),(2,3),... then (1,2),(3,4),...
  std::vector<std::pair<int, int>> layer_pairs() const;
  int n_parameters() const;
};

Statevector prepare_state(const Ansatz& ansatz, std::span<const double> parameters);

/// <psi| op |psi> by term-wise Pauli application.
cplx expectation(const QubitOperator& op, const Statevector& psi);

/// Every independent RDM entry via the rdm_observables expectations, with
/// the Hermitian/antisymmetric images filled in exactly.
RdmPair measure_rdms(const Statevector& psi, int m);

/// Energy as the trace of the RDMs against the Hamiltonian tensors;
/// throws if the imaginary residue exceeds 1e-10.
double energy_from_rdms(const RdmPair& rdms, const HamiltonianTensors& tensors);

struct OptimizerConfig {
  int budget = 20000;        // objective evaluations per restart
  int restarts = 5;          // random-perturbation restarts after the first run
  double spread_tol = 1e-9;  // simplex energy spread convergence threshold
  std::uint64_t seed = 0;
  double initial_step = 0.3;
  double restart_spread = 0.7;
};

struct VqeTraceRow {
  int restart;
  int iter;
  double energy;
  double spread;
};

struct VqeResult {
  std::vector<double> parameters;
  double energy = 0.0;
  RdmPair rdms;
  bool converged = false;
  int evaluations = 0;
  std::vector<VqeTraceRow> trace;
};

/// Derivative-free simplex descent on expectation(H, prepare_state(theta))
/// with random restarts; returns the best parameters, their energy, and the
/// RDMs measured at the optimum.
VqeResult minimize_energy(const HamiltonianTensors& tensors, const Ansatz& ansatz,
                          const OptimizerConfig& opt);

void write_vqe_trace(const std::string& path, const std::vector<VqeTraceRow>& trace);

}  // namespace hyxc
