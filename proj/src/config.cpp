#include "hyxc/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace hyxc {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::array<double, 3> parse_triple(const std::string& s, int dim, const std::string& key) {
  std::array<double, 3> out = {0, 0, 0};
  std::stringstream ss(s);
  std::string tok;
  int got = 0;
  while (std::getline(ss, tok, ',')) {
    if (got >= 3) throw ConfigError(key + ": too many components");
    out[got++] = std::stod(trim(tok));
  }
  if (got == 1 && dim == 3) out[1] = out[2] = out[0];
  else if (got != dim)
    throw ConfigError(key + ": expected " + std::to_string(dim) + " components");
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    if (kv.count(key)) throw ConfigError("duplicate config key: " + key);
    kv[key] = value;
  }

  RunConfig c;
  std::map<std::string, std::string> pending = kv;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = pending.find(key);
    if (it == pending.end()) return std::nullopt;
    std::string v = it->second;
    pending.erase(it);
    return v;
  };
  auto geti = [&](const std::string& key, int& slot) {
    if (auto v = take(key)) slot = std::stoi(*v);
  };
  auto getu = [&](const std::string& key, std::uint64_t& slot) {
    if (auto v = take(key)) slot = std::stoull(*v);
  };
  auto getz = [&](const std::string& key, std::size_t& slot) {
    if (auto v = take(key)) slot = static_cast<std::size_t>(std::stoull(*v));
  };
  auto getd = [&](const std::string& key, double& slot) {
    if (auto v = take(key)) slot = std::stod(*v);
  };
  auto gets = [&](const std::string& key, std::string& slot) {
    if (auto v = take(key)) slot = *v;
  };
  auto getb = [&](const std::string& key, bool& slot) {
    if (auto v = take(key)) {
      if (*v == "true" || *v == "1") slot = true;
      else if (*v == "false" || *v == "0") slot = false;
      else throw ConfigError(key + ": expected true/false");
    }
  };

  geti("system.dim", c.dim);
  if (auto v = take("system.a1")) c.a1 = parse_triple(*v, c.dim, "system.a1");
  if (auto v = take("system.a2")) c.a2 = parse_triple(*v, c.dim, "system.a2");
  geti("system.points", c.points);
  geti("system.electrons", c.electrons);
  gets("system.potential", c.potential);
  getd("system.potential.z", c.potential_z);
  getd("system.potential.a", c.potential_a);
  getd("system.potential.omega", c.potential_omega);
  getd("system.potential.depth", c.potential_depth);
  getd("system.potential.width", c.potential_width);
  gets("system.interaction", c.interaction);
  getd("system.interaction.a", c.interaction_a);

  geti("basis.m", c.m);
  gets("basis.wavevectors", c.wavevectors);
  geti("basis.qubit_cap", c.qubit_cap);

  geti("vqe.layers", c.vqe_layers);
  geti("vqe.budget", c.vqe_budget);
  geti("vqe.restarts", c.vqe_restarts);
  getd("vqe.tolerance", c.vqe_tolerance);

  geti("loop.max_outer", c.max_outer);
  getd("loop.drho_tol", c.drho_tol);
  getd("loop.energy_tol", c.energy_tol);
  getd("loop.inner.mixing", c.inner_mixing);
  getd("loop.inner.tol", c.inner_tol);
  geti("loop.inner.max_iter", c.inner_max_iter);
  gets("loop.seed_xc", c.seed_xc);
  gets("loop.fci_check", c.fci_check);

  gets("output.dir", c.out_dir);
  getb("output.dump_fields", c.dump_fields);
  getb("output.dump_tensors", c.dump_tensors);

  getu("seed", c.seed);
  getz("tensors.budget", c.tensor_budget);

  if (!pending.empty()) throw ConfigError("unknown config key: " + pending.begin()->first);
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

void RunConfig::validate() const {
  if (dim != 1 && dim != 3) throw ConfigError("system.dim must be 1 or 3");
  if (points < 3) throw ConfigError("system.points must be at least 3");
  for (int a = 0; a < dim; ++a)
    if (!(a2[a] > a1[a])) throw ConfigError("system extents need a2 > a1");
  if (electrons < 1) throw ConfigError("system.electrons must be positive");
  if (m < electrons) throw ConfigError("basis.m must be at least the electron count");
  if (m > qubit_cap)
    throw ConfigError("basis.m exceeds the qubit cap " + std::to_string(qubit_cap));
  if (potential != "box" && potential != "harmonic" && potential != "gaussian_well" &&
      potential != "soft_atom")
    throw ConfigError("unknown system.potential: " + potential);
  if (interaction != "none" && interaction != "soft_coulomb" && interaction != "coulomb")
    throw ConfigError("unknown system.interaction: " + interaction);
  if (interaction == "soft_coulomb" && dim != 1)
    throw ConfigError("soft_coulomb interaction is the 1D model");
  if (interaction == "coulomb" && dim != 3)
    throw ConfigError("the bare coulomb interaction requires dim = 3");
  if (interaction == "soft_coulomb" && interaction_a <= 0.0)
    throw ConfigError("system.interaction.a must be positive");
  if (seed_xc != "none" && seed_xc != "slater_x_3d")
    throw ConfigError("unknown loop.seed_xc: " + seed_xc);
  if (seed_xc == "slater_x_3d" && dim != 3)
    throw ConfigError("slater_x_3d seed is only defined in 3D");
  if (fci_check != "auto" && fci_check != "off")
    throw ConfigError("loop.fci_check must be auto or off");
  if (vqe_layers < 1 || vqe_budget < 1 || vqe_restarts < 0)
    throw ConfigError("vqe settings must be positive");
  if (!(vqe_tolerance > 0.0) || !(drho_tol > 0.0) || !(energy_tol > 0.0) || !(inner_tol > 0.0))
    throw ConfigError("all tolerances must be positive");
  if (!(inner_mixing > 0.0 && inner_mixing <= 1.0))
    throw ConfigError("loop.inner.mixing must be in (0, 1]");
  if (max_outer < 0 || inner_max_iter < 1) throw ConfigError("iteration budgets must be positive");
}

Grid RunConfig::make_grid() const { return Grid(dim, a1, a2, points); }

Field RunConfig::make_external_potential() const {
  const Grid grid = make_grid();
  std::array<double, 3> center = {0, 0, 0};
  for (int a = 0; a < dim; ++a) center[a] = 0.5 * (a1[a] + a2[a]);
  Field v(grid, FieldKind::potential);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto p = grid.point(g);
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) r2 += (p[a] - center[a]) * (p[a] - center[a]);
    if (potential == "box") v[g] = 0.0;
    else if (potential == "harmonic") v[g] = 0.5 * potential_omega * potential_omega * r2;
    else if (potential == "gaussian_well")
      v[g] = -potential_depth * std::exp(-r2 / (2.0 * potential_width * potential_width));
    else
      v[g] = -potential_z / std::sqrt(r2 + potential_a * potential_a);
  }
  return v;
}

std::optional<InteractionKernel> RunConfig::make_kernel() const {
  if (interaction == "none") return std::nullopt;
  if (interaction == "soft_coulomb") return InteractionKernel::soft_coulomb(interaction_a);
  return InteractionKernel::coulomb();
}

std::vector<std::array<int, 3>> RunConfig::make_wavevectors() const {
  if (wavevectors == "auto") return default_wavevectors(dim, m);
  std::vector<std::array<int, 3>> out;
  std::stringstream ss(wavevectors);
  std::string triple;
  while (std::getline(ss, triple, ';')) {
    triple = trim(triple);
    if (triple.empty()) continue;
    std::array<int, 3> k = {0, 0, 0};
    std::stringstream ts(triple);
    std::string tok;
    int got = 0;
    while (std::getline(ts, tok, ',')) {
      if (got >= 3) throw ConfigError("basis.wavevectors: too many components in " + triple);
      k[got++] = std::stoi(trim(tok));
    }
    out.push_back(k);
  }
  if (static_cast<int>(out.size()) != m)
    throw ConfigError("basis.wavevectors lists " + std::to_string(out.size()) +
                      " vectors but basis.m = " + std::to_string(m));
  return out;
}

XcModel RunConfig::seed_xc_model() const {
  return seed_xc == "none" ? XcModel::none : XcModel::slater_x_3d;
}

}  // namespace hyxc
