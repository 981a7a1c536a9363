#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "hyxc/grid.hpp"
#include "hyxc/ks_dft.hpp"
#include "hyxc/zm_basis.hpp"

namespace hyxc {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Run configuration, read from a flat dotted-key text file
/// (`system.dim = 1`, one key per line, `#` comments).
struct RunConfig {
  // system
  int dim = 1;
  std::array<double, 3> a1 = {-8.0, 0.0, 0.0};
  std::array<double, 3> a2 = {8.0, 0.0, 0.0};
  int points = 257;
  int electrons = 2;
  std::string potential = "soft_atom";  // box | harmonic | gaussian_well | soft_atom
  double potential_z = 2.0;
  double potential_a = 1.0;
  double potential_omega = 1.0;
  double potential_depth = 1.0;
  double potential_width = 1.0;
  std::string interaction = "soft_coulomb";  // none | soft_coulomb | coulomb
  double interaction_a = 1.0;

  // basis
  int m = 4;
  std::string wavevectors = "auto";  // or semicolon-separated triples "kx,ky,kz;..."
  int qubit_cap = 12;

  // vqe
  int vqe_layers = 2;
  int vqe_budget = 20000;
  int vqe_restarts = 5;
  double vqe_tolerance = 1e-9;

  // loop
  int max_outer = 3;
  double drho_tol = 1e-6;
  double energy_tol = 1e-8;
  double inner_mixing = 0.3;
  double inner_tol = 1e-8;
  int inner_max_iter = 300;
  std::string seed_xc = "none";   // none | slater_x_3d
  std::string fci_check = "auto"; // auto | off

  // output
  std::string out_dir = "out";
  bool dump_fields = true;
  bool dump_tensors = true;

  std::uint64_t seed = 0;
  std::size_t tensor_budget = 100000000;

  void validate() const;

  Grid make_grid() const;
  Field make_external_potential() const;
  std::optional<InteractionKernel> make_kernel() const;
  std::vector<std::array<int, 3>> make_wavevectors() const;
  XcModel seed_xc_model() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace hyxc
