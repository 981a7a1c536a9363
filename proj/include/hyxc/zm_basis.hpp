#pragma once

#include <array>
#include <string>
#include <vector>

#include "hyxc/grid.hpp"

namespace hyxc {

/// Heaviside step with Theta(0) = 1.
inline double heaviside(double x) { return x >= 0.0 ? 1.0 : 0.0; }

/// Density floor applied to the planar/linear normalizers before division.
inline constexpr double kDensityFloor = 1e-12;

/// Shared phase data of the density-constrained basis: the cumulative
/// density integrals f(r) together with the planar and linear reductions
/// they are built from. Axis roles follow `perm`: role 0 is the outermost
/// (cumulative-over-everything) axis. All arrays are indexed in role order.
class ZmPhaseField {
 public:
  ZmPhaseField(const Field& rho, int n_electrons, std::array<int, 3> axis_perm = {0, 1, 2});

  const Grid& grid() const { return grid_; }
  int n_electrons() const { return n_electrons_; }
  const std::array<int, 3>& axis_perm() const { return perm_; }

  /// rho-bar(x): density reduced over roles 1 and 2 (equals rho itself in 1D).
  const std::vector<double>& planar_density() const { return rbar1_; }
  /// rho-bar(x,y): density reduced over role 2 (3D only), row-major (i,j).
  const std::vector<double>& linear_density() const { return rbar2_; }

  /// Phase component along role axis a at a flattened grid index.
  double f_component(int a, std::size_t idx) const;
  /// xi(r) = sum_a k[a] * f_a(r) for an integer wavevector in role order.
  double phase_at(const std::array<int, 3>& k, std::size_t idx) const;
  /// Full-grid field exp(i * k . f(r)).
  Field phase_exponential(const std::array<int, 3>& k) const;

  /// Number of normalizer slices that hit the density floor.
  std::size_t clamp_count() const { return clamp_count_; }

  // Raw ingredients used by the derivative kernels.
  const std::vector<double>& cum0() const { return cum0_; }         // size n
  const std::vector<double>& cum1() const { return cum1_; }         // size n^2 (3D)
  const std::vector<double>& cum2() const { return cum2_; }         // size n^3 (3D)
  double spacing(int role) const { return grid_.spacing(perm_[role]); }
  double role_weight(int role, int i) const { return grid_.axis_weight(perm_[role], i); }
  /// Role-order indices of a flattened grid point.
  std::array<int, 3> role_indices(std::size_t idx) const;
  std::size_t flat_index(int i, int j, int k) const;  // role-order -> flattened

  /// Discrete adjoint of the phase Jacobian: given per-point coefficients A,
  /// returns S with S_g = sum_{r'} A(r') * d xi(r') / d rho_g. This is the
  /// workhorse behind the matrix-element derivative kernels.
  std::vector<cplx> jacobian_adjoint(const std::array<int, 3>& k,
                                     const std::vector<cplx>& A) const;

 private:
  Grid grid_;
  int n_electrons_;
  std::array<int, 3> perm_;
  std::vector<double> rbar1_, rbar2_;
  std::vector<double> cum0_, cum1_, cum2_;
  std::vector<double> f0_, f1_, f2_;  // phase components on their natural shapes
  std::size_t clamp_count_ = 0;

  friend class GridDeltaExpansion;
};

/// d xi_ji(r') / d rho(r) for a fixed r': a smooth Heaviside part along the
/// outer axis plus delta lines along the inner axes. `evaluate` realizes
/// deltas as 1/(cell measure) samples on the matching slices with
/// Theta(0)=1; `contract` is the exact discrete adjoint of the phase
/// construction, so central finite differences of build_phase reproduce it
/// to machine precision.
class GridDeltaExpansion {
 public:
  GridDeltaExpansion(const ZmPhaseField& phase, std::array<int, 3> k_ji, std::size_t r_prime);

  bool is_zero() const { return k_ == std::array<int, 3>{0, 0, 0}; }
  double evaluate(std::size_t r_idx) const;
  double contract(const Field& test) const;

 private:
  const ZmPhaseField* phase_;
  std::array<int, 3> k_;
  std::size_t rp_;
};

GridDeltaExpansion phase_functional_derivative(const ZmPhaseField& phase,
                                               const std::array<int, 3>& k_ji,
                                               std::size_t r_prime);

/// M density-constrained orbitals phi_i = sqrt(rho/N) exp(i k_i . f).
struct ZmOrbitalSet {
  std::vector<Field> orbitals;
  std::vector<std::array<int, 3>> wavevectors;  // role-order components
  ZmPhaseField phase;
  Field source_density;
  int n_electrons;
  std::string basis_id;

  int size() const { return static_cast<int>(orbitals.size()); }
  const Grid& grid() const { return source_density.grid(); }
};

ZmPhaseField build_phase(const Field& rho, int n_electrons,
                         std::array<int, 3> axis_perm = {0, 1, 2});

ZmOrbitalSet build_orbitals(const Field& rho, const std::vector<std::array<int, 3>>& wavevectors,
                            int n_electrons, std::array<int, 3> axis_perm = {0, 1, 2});

/// Wavevectors ordered by ascending |k|, ties by sign order 0,+1,-1,+2,-2
/// per axis. 1D vectors have zero y/z components.
std::vector<std::array<int, 3>> default_wavevectors(int dim, int m);

}  // namespace hyxc
