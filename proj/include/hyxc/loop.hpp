#pragma once

#include <string>
#include <vector>

#include "hyxc/config.hpp"
#include "hyxc/ks_dft.hpp"

namespace hyxc {

struct IterationRecord {
  int outer_iter = 0;
  EnergyBreakdown energy;  // e_xc holds the corrected value, total equals the many-body energy
  double max_abs_delta_rho = 0.0;
  double gram_deviation = 0.0;
  // 1 - sum_m |<phi_m|psi_i>|^2, worst occupied orbital: how much of the
  // occupied KS space the constrained basis fails to span.
  double projection_residual = 0.0;
  bool scf_converged = false;
  bool vqe_converged = false;
  double fci_energy = std::numeric_limits<double>::quiet_NaN();
  double hermitization_deviation = 0.0;
  double wall_time_s = 0.0;  // excluded from the determinism contract
};

struct LoopReport {
  std::vector<IterationRecord> records;
  std::string status = "max_iter";  // converged | max_iter | error
  std::string error_stage;
  std::string error_message;
};

/// The outer hybrid iteration: seed-or-corrected xc -> inner SCF -> basis ->
/// tensors -> energy minimization -> RDMs -> correction bundle, until
/// max|delta rho| < drho_tol and |dE| < energy_tol or the iteration budget
/// runs out. All stage dumps land under config.out_dir.
LoopReport run_outer_loop(const RunConfig& config);

/// report.json plus iterations.csv (the CSV omits wall times so reruns are
/// byte-identical).
void write_report(const std::string& dir, const LoopReport& report);

}  // namespace hyxc
