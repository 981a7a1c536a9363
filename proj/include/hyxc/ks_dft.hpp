#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "hyxc/grid.hpp"

namespace hyxc {

/// Kohn-Sham eigenstates on the grid. Orbitals are normalized under the
/// grid quadrature and vanish on the box boundary.
struct KsState {
  std::vector<Field> orbitals;
  std::vector<double> eigenvalues;   // hartree, ascending
  std::vector<double> occupations;   // f_i in [0,1], sum = N
  Field density;                     // rho(r) = sum_i f_i |psi_i(r)|^2

  int n_electrons() const;
};

struct EnergyBreakdown {
  double t_ks = 0.0;
  double e_ext = 0.0;
  double e_hartree = 0.0;
  double e_xc = 0.0;
  double total = 0.0;            // t_ks + e_ext + e_hartree + e_xc
  double many_body_total = 0.0;  // energy of the interacting state
};

enum class XcModel { none, slater_x_3d };

/// v_H(r) = integral of w(r,r') rho(r') dr' by quadrature.
Field hartree_potential(const Field& rho, const InteractionKernel& kernel);

/// Seed exchange-correlation potential. slater_x_3d is -(3 rho / pi)^(1/3)
/// and is only defined in 3D.
Field seed_xc(const Field& rho, XcModel model);
/// Energy of the seed model (0 for none, the closed-form Dirac exchange
/// energy for slater_x_3d).
double seed_xc_energy(const Field& rho, XcModel model);

/// Lowest n_states eigenpairs of -1/2 laplacian + v_eff (+ an optional
/// non-local grid operator) as a dense Hermitian problem over the interior
/// grid points; boundary values are pinned to zero. Occupations and density
/// are left empty.
KsState solve_ks(const Field& v_eff, int n_states,
                 const Eigen::MatrixXcd* nonlocal = nullptr);

/// Zero-temperature aufbau filling; degenerate ties broken by ascending index.
std::vector<double> fill_occupations(const std::vector<double>& eigenvalues, int n_electrons);

/// Density from occupied orbitals.
Field density_from_orbitals(const std::vector<Field>& orbitals,
                            const std::vector<double>& occupations);

/// sum_i f_i <psi_i| -1/2 laplacian |psi_i> in the gradient quadrature.
double kinetic_energy(const std::vector<Field>& orbitals, const std::vector<double>& occupations);

/// The exchange-correlation content a SCF run works against: either a
/// density-dependent seed model, or a frozen local potential plus an
/// optional frozen non-local correction operator.
struct XcContent {
  XcModel model = XcModel::none;
  std::optional<Field> fixed_local;
  std::shared_ptr<const Eigen::MatrixXcd> nonlocal;

  bool is_fixed() const { return fixed_local.has_value(); }
};

struct ScfOptions {
  double mixing = 0.3;
  double tol = 1e-8;
  int max_iter = 200;
  std::optional<Field> initial_density;  // default: density of the bare v_ext solve
};

struct ScfIterRow {
  int iter;
  double max_abs_drho;
  double total_energy;
};

struct ScfResult {
  KsState state;
  bool converged = false;
  std::vector<ScfIterRow> log;
  EnergyBreakdown energy;
};

/// Inner self-consistent loop with linear density mixing
/// rho <- (1-mixing) rho + mixing rho_out, stopping on max|drho| < tol.
/// Non-convergence is reported through `converged` and the residual log,
/// never silently.
ScfResult inner_scf(const Field& v_ext, const std::optional<InteractionKernel>& kernel,
                    int n_electrons, const XcContent& xc, const ScfOptions& opt);

/// Assemble the energy breakdown for a converged state; e_xc and the
/// many-body total are supplied by the caller.
EnergyBreakdown ks_energy_breakdown(const KsState& state, const Field& v_ext,
                                    const std::optional<InteractionKernel>& kernel, double e_xc,
                                    double many_body_total);

void write_scf_log(const std::string& path, const std::vector<ScfIterRow>& log);

}  // namespace hyxc
