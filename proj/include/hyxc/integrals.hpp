#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "hyxc/grid.hpp"
#include "hyxc/zm_basis.hpp"

namespace hyxc {

/// Second-quantized Hamiltonian tensors in a density-constrained basis:
/// kinetic t_ij, external v_ij, and the two-body v_ee[i,j,k,l] with the
/// (i,j) pair attached to r' and (k,l) to r''.
struct HamiltonianTensors {
  int m = 0;
  Eigen::MatrixXcd t;
  Eigen::MatrixXcd v_ext;
  std::vector<cplx> v_ee;  // m^4, row-major (i,j,k,l); empty = no interaction
  std::string basis_id;

  cplx vee(int i, int j, int k, int l) const {
    return v_ee[((static_cast<std::size_t>(i) * m + j) * m + k) * m + l];
  }
  bool has_interaction() const { return !v_ee.empty(); }
};

Eigen::MatrixXcd kinetic_matrix(const ZmOrbitalSet& basis);

/// External matrix through the density/phase form (1/N) * integral of
/// rho exp(i xi_ji) v_ext1.
Eigen::MatrixXcd external_matrix(const ZmOrbitalSet& basis, const Field& v_ext1);
/// Same matrix element evaluated directly as <phi_i| v_ext1 |phi_j>.
Eigen::MatrixXcd external_matrix_orbital_route(const ZmOrbitalSet& basis, const Field& v_ext1);

/// Full two-body tensor. Throws when m^4 * grid size exceeds `budget`.
std::vector<cplx> ee_tensor(const ZmOrbitalSet& basis, const InteractionKernel& kernel,
                            std::size_t budget = 100000000);
/// Streaming variant for basis sizes whose tensor should not be held in
/// memory: writes the tensor dump directly.
void ee_tensor_to_file(const ZmOrbitalSet& basis, const InteractionKernel& kernel,
                       const std::string& path, std::size_t budget = 100000000);

HamiltonianTensors assemble_tensors(const ZmOrbitalSet& basis, const Field& v_ext1,
                                    const InteractionKernel* kernel,
                                    std::size_t budget = 100000000);

/// Density-functional derivative of the external matrix element,
/// d v_ij^ext / d rho(r), assembled from the local phase term plus the
/// wavevector-weighted cumulative terms of the phase derivative.
Field dvext_kernel(const ZmOrbitalSet& basis, const Field& v_ext1, int i, int j);

/// d v_ijkl^ee / d rho(r) = V_ijkl(r) + V_klij(r).
Field dvee_kernel(const ZmOrbitalSet& basis, const InteractionKernel& kernel, int i, int j, int k,
                  int l, std::size_t budget = 100000000);

/// Caches the phase exponentials and kernel contractions so repeated kernel
/// evaluations (the corrected-potential assembly) stay affordable.
class DerivativeKernels {
 public:
  DerivativeKernels(const ZmOrbitalSet& basis, const Field& v_ext1,
                    const InteractionKernel* kernel, std::size_t budget = 100000000);

  const ZmOrbitalSet& basis() const { return *basis_; }
  const Field& dvext(int i, int j);
  Field dvee(int i, int j, int k, int l);

 private:
  const ZmOrbitalSet* basis_;
  Field v_ext1_;
  const InteractionKernel* kernel_;
  std::size_t budget_;
  std::map<std::pair<int, int>, Field> ext_cache_;
  std::map<std::array<int, 3>, Field> u_cache_;
  std::map<std::array<int, 3>, Field> g_cache_;

  const Field& u(const std::array<int, 3>& dk);
  const Field& gker(const std::array<int, 3>& dk);
  friend Field dvee_kernel(const ZmOrbitalSet&, const InteractionKernel&, int, int, int, int,
                           std::size_t);
};

// Evaluation paths that take a raw density and its phase directly; used by
// the finite-difference checks where the perturbed density is deliberately
// un-normalized.
Eigen::MatrixXcd external_matrix_from_density(const Field& rho, const ZmPhaseField& phase,
                                              const std::vector<std::array<int, 3>>& wavevectors,
                                              int n_electrons, const Field& v_ext1);
std::vector<cplx> ee_tensor_from_density(const Field& rho, const ZmPhaseField& phase,
                                         const std::vector<std::array<int, 3>>& wavevectors,
                                         int n_electrons, const InteractionKernel& kernel);

/// Binary tensor dump: "HYXCT1", uint32 m, uint8 dtype (1 = complex128),
/// uint8 rank, then the row-major complex128 payload, little-endian.
void write_tensor(const std::string& path, const Eigen::MatrixXcd& t);
void write_tensor(const std::string& path, const std::vector<cplx>& t4, int m);
Eigen::MatrixXcd read_tensor2(const std::string& path);
std::vector<cplx> read_tensor4(const std::string& path, int& m_out);

void write_tensors(const std::string& dir, const HamiltonianTensors& t);
HamiltonianTensors read_tensors(const std::string& dir);

}  // namespace hyxc
