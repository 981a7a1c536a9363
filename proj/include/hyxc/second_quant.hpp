#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hyxc/integrals.hpp"

namespace hyxc {

/// Occupation-number vector |n_1 ... n_M>. Bit i of the packed mask is n_i,
/// which is also the qubit-ordering convention (qubit 0 = orbital 0).
struct OccupationVector {
  std::vector<std::uint8_t> bits;

  int size() const { return static_cast<int>(bits.size()); }
  int particle_count() const;
  std::uint64_t mask() const;
  static OccupationVector from_mask(std::uint64_t mask, int m);
  static OccupationVector lowest(int n, int m);  // n_0..n_{N-1} = 1
  std::string str() const;
};

/// Exact non-negative big integer; enough arithmetic for combinatorics.
class BigUint {
 public:
  BigUint() : limbs_{0} {}
  explicit BigUint(std::uint64_t v);

  static BigUint binomial(int m, int n);

  void mul_small(std::uint64_t v);
  /// Exact division; throws if a remainder would be left.
  void div_small(std::uint64_t v);

  bool operator==(const BigUint& o) const { return limbs_ == o.limbs_; }
  bool fits_u64() const;
  std::uint64_t as_u64() const;

  std::string str() const;
  /// Rounded scientific rendering with `sig` significant digits, e.g. 1.26e14.
  std::string scientific(int sig = 3) const;

 private:
  std::vector<std::uint32_t> limbs_;  // base 1e9, little-endian
  void trim();
};

/// C(M,N), exact.
BigUint count_configurations(int m, int n);

struct PauliString {
  std::string ops;  // one of I,X,Y,Z per qubit
  cplx coeff;
};

/// Weighted sum of Pauli strings, kept simplified (terms merged, magnitudes
/// below 1e-14 dropped).
class QubitOperator {
 public:
  explicit QubitOperator(int n_qubits = 0) : n_(n_qubits) {}
  static QubitOperator identity(int n_qubits, cplx coeff = 1.0);

  int n_qubits() const { return n_; }
  const std::map<std::string, cplx>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero(double tol = 1e-12) const;

  void add(const std::string& word, cplx coeff);
  QubitOperator& operator+=(const QubitOperator& o);
  QubitOperator& operator-=(const QubitOperator& o);
  QubitOperator& operator*=(cplx scale);
  QubitOperator operator*(const QubitOperator& o) const;
  QubitOperator operator+(const QubitOperator& o) const;
  QubitOperator operator-(const QubitOperator& o) const;

  QubitOperator adjoint() const;
  bool is_hermitian(double tol = 1e-10) const;
  void simplify(double drop_threshold = 1e-14);

  /// Dense 2^n matrix; for oracle cross-checks at small n.
  Eigen::MatrixXcd dense() const;

  /// One term per line: coeff_re coeff_im pauli_word.
  std::string dump() const;
  static QubitOperator parse(const std::string& text);

 private:
  int n_;
  std::map<std::string, cplx> terms_;
};

/// Jordan-Wigner image of a_p (dagger=false) or a_p^dagger (dagger=true).
QubitOperator jordan_wigner(int mode, bool dagger, int m);

/// Number operator n_p = a_p^dagger a_p = (I - Z_p)/2.
QubitOperator number_operator(int mode, int m);
QubitOperator total_number_operator(int m);

/// Second-quantized Hamiltonian mapped through Jordan-Wigner:
/// sum (t+v_ext)_ij a_i^dag a_j + 1/2 sum v_ee[ijkl] a_i^dag a_k^dag a_l a_j.
QubitOperator build_qubit_hamiltonian(const HamiltonianTensors& tensors);

/// One- and two-body reduced density matrices,
/// rho_ij = <a_i^dag a_j>, gamma_ijkl = <a_i^dag a_k^dag a_l a_j>.
struct RdmPair {
  int m = 0;
  Eigen::MatrixXcd rho1;
  std::vector<cplx> gamma2;
  std::string basis_id;  // provenance of the orbital basis, when known

  cplx gamma(int i, int j, int k, int l) const {
    return gamma2[((static_cast<std::size_t>(i) * m + j) * m + k) * m + l];
  }
  cplx& gamma(int i, int j, int k, int l) {
    return gamma2[((static_cast<std::size_t>(i) * m + j) * m + k) * m + l];
  }
  double trace_rho() const { return rho1.trace().real(); }
  /// sum_{i,k} gamma[i,i,k,k]; equals N(N-1) for an N-particle state.
  double pair_trace() const;
};

/// Hermitian observables whose expectations reconstruct every independent
/// entry of the one- and two-body reduced density matrices.
struct RdmObservable {
  enum class Target { rho_re, rho_im, gamma_re, gamma_im };
  Target target;
  std::array<int, 4> index;  // (i,j,-,-) for rho, (i,j,k,l) for gamma
  QubitOperator op;
  std::string label;
};
std::vector<RdmObservable> rdm_observables(int m);

}  // namespace hyxc
