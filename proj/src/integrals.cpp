#include "hyxc/integrals.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace hyxc {

namespace {

std::array<int, 3> dk(const std::vector<std::array<int, 3>>& kv, int from, int to) {
  // xi_ji = xi_j - xi_i pairs exp(i k_ji . f) with k_ji = k_j - k_i.
  return {kv[to][0] - kv[from][0], kv[to][1] - kv[from][1], kv[to][2] - kv[from][2]};
}

Field kernel_contraction(const Field& rho, const Field& u, const InteractionKernel& kernel) {
  // g(r) = integral of w(r,r'') rho(r'') u(r'') dr''
  const Grid& grid = rho.grid();
  const std::size_t G = grid.size();
  Field out(grid, FieldKind::generic);
#pragma omp parallel for
  for (long long r = 0; r < static_cast<long long>(G); ++r) {
    cplx acc(0.0);
    for (std::size_t s = 0; s < G; ++s)
      acc += grid_kernel(kernel, grid, r, s) * rho[s].real() * u[s] * grid.quad_weight(s);
    out[r] = acc;
  }
  return out;
}

/// (1/N^p) * [ u_ji(r) W(r) + i * (1/w_r) J^T(w rho u_ji W) ] -- the shared
/// shape of the external and electron-electron derivative kernels.
Field phase_sensitivity(const Field& rho, const ZmPhaseField& phase,
                        const std::array<int, 3>& k_ji, const Field& weight, double prefactor) {
  const Grid& grid = rho.grid();
  const std::size_t G = grid.size();
  const Field u = phase.phase_exponential(k_ji);
  Field out(grid, FieldKind::generic);
  for (std::size_t g = 0; g < G; ++g) out[g] = prefactor * u[g] * weight[g];
  if (k_ji != std::array<int, 3>{0, 0, 0}) {
    std::vector<cplx> A(G);
    for (std::size_t g = 0; g < G; ++g)
      A[g] = grid.quad_weight(g) * rho[g].real() * u[g] * weight[g];
    const std::vector<cplx> S = phase.jacobian_adjoint(k_ji, A);
    const cplx im(0.0, 1.0);
    for (std::size_t g = 0; g < G; ++g) out[g] += prefactor * im * S[g] / grid.quad_weight(g);
  }
  return out;
}

void check_budget(std::size_t m, std::size_t G, std::size_t budget, const char* what) {
  const std::size_t cost = m * m * m * m * G;
  if (cost > budget)
    throw std::runtime_error(std::string(what) + ": resource budget exceeded (m^4*G = " +
                             std::to_string(cost) + " > " + std::to_string(budget) + ")");
}

}  // namespace

Eigen::MatrixXcd kinetic_matrix(const ZmOrbitalSet& basis) {
  const int m = basis.size();
  Eigen::MatrixXcd t(m, m);
  for (int k = 0; k < m; ++k)
    for (int j = k; j < m; ++j) {
      t(k, j) = kinetic_inner(basis.orbitals[k], basis.orbitals[j]);
      if (j != k) t(j, k) = std::conj(t(k, j));
    }
  return t;
}

Eigen::MatrixXcd external_matrix_from_density(const Field& rho, const ZmPhaseField& phase,
                                              const std::vector<std::array<int, 3>>& wavevectors,
                                              int n_electrons, const Field& v_ext1) {
  const int m = static_cast<int>(wavevectors.size());
  const Grid& grid = rho.grid();
  Eigen::MatrixXcd v(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const auto d = dk(wavevectors, i, j);
      cplx acc(0.0);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const double xi = phase.phase_at(d, g);
        acc += grid.quad_weight(g) * rho[g].real() * cplx(std::cos(xi), std::sin(xi)) *
               v_ext1[g].real();
      }
      v(i, j) = acc / static_cast<double>(n_electrons);
    }
  return v;
}

Eigen::MatrixXcd external_matrix(const ZmOrbitalSet& basis, const Field& v_ext1) {
  return external_matrix_from_density(basis.source_density, basis.phase, basis.wavevectors,
                                      basis.n_electrons, v_ext1);
}

Eigen::MatrixXcd external_matrix_orbital_route(const ZmOrbitalSet& basis, const Field& v_ext1) {
  const int m = basis.size();
  const Grid& grid = basis.grid();
  Eigen::MatrixXcd v(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      cplx acc(0.0);
      for (std::size_t g = 0; g < grid.size(); ++g)
        acc += grid.quad_weight(g) * std::conj(basis.orbitals[i][g]) * v_ext1[g].real() *
               basis.orbitals[j][g];
      v(i, j) = acc;
    }
  return v;
}

std::vector<cplx> ee_tensor_from_density(const Field& rho, const ZmPhaseField& phase,
                                         const std::vector<std::array<int, 3>>& wavevectors,
                                         int n_electrons, const InteractionKernel& kernel) {
  const int m = static_cast<int>(wavevectors.size());
  const Grid& grid = rho.grid();
  const std::size_t G = grid.size();

  std::map<std::array<int, 3>, Field> u, gker;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const auto d = dk(wavevectors, a, b);
      if (!u.count(d)) {
        u.emplace(d, phase.phase_exponential(d));
        gker.emplace(d, kernel_contraction(rho, u.at(d), kernel));
      }
    }

  std::vector<cplx> v(static_cast<std::size_t>(m) * m * m * m);
  const double inv_n2 = 1.0 / (static_cast<double>(n_electrons) * n_electrons);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Field& u_ji = u.at(dk(wavevectors, i, j));
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          const Field& g_lk = gker.at(dk(wavevectors, k, l));
          cplx acc(0.0);
          for (std::size_t g = 0; g < G; ++g)
            acc += grid.quad_weight(g) * rho[g].real() * u_ji[g] * g_lk[g];
          v[((static_cast<std::size_t>(i) * m + j) * m + k) * m + l] = inv_n2 * acc;
        }
    }
  return v;
}

std::vector<cplx> ee_tensor(const ZmOrbitalSet& basis, const InteractionKernel& kernel,
                            std::size_t budget) {
  check_budget(basis.size(), basis.grid().size(), budget, "ee_tensor");
  return ee_tensor_from_density(basis.source_density, basis.phase, basis.wavevectors,
                                basis.n_electrons, kernel);
}

HamiltonianTensors assemble_tensors(const ZmOrbitalSet& basis, const Field& v_ext1,
                                    const InteractionKernel* kernel, std::size_t budget) {
  HamiltonianTensors t;
  t.m = basis.size();
  t.t = kinetic_matrix(basis);
  t.v_ext = external_matrix(basis, v_ext1);
  if (kernel) t.v_ee = ee_tensor(basis, *kernel, budget);
  t.basis_id = basis.basis_id;
  return t;
}

Field dvext_kernel(const ZmOrbitalSet& basis, const Field& v_ext1, int i, int j) {
  const int m = basis.size();
  if (i < 0 || j < 0 || i >= m || j >= m) throw std::out_of_range("dvext_kernel: bad index");
  const double inv_n = 1.0 / basis.n_electrons;
  if (i == j) {
    // k_ii = 0 and xi_ii = 0: only the local term survives, exactly v_ext1/N.
    Field out(basis.grid(), FieldKind::generic);
    for (std::size_t g = 0; g < out.size(); ++g) out[g] = v_ext1[g].real() * inv_n;
    return out;
  }
  return phase_sensitivity(basis.source_density, basis.phase, dk(basis.wavevectors, i, j), v_ext1,
                           inv_n);
}

Field dvee_kernel(const ZmOrbitalSet& basis, const InteractionKernel& kernel, int i, int j, int k,
                  int l, std::size_t budget) {
  DerivativeKernels kernels(basis, Field(basis.grid()), &kernel, budget);
  return kernels.dvee(i, j, k, l);
}

DerivativeKernels::DerivativeKernels(const ZmOrbitalSet& basis, const Field& v_ext1,
                                     const InteractionKernel* kernel, std::size_t budget)
    : basis_(&basis), v_ext1_(v_ext1), kernel_(kernel), budget_(budget) {}

const Field& DerivativeKernels::u(const std::array<int, 3>& d) {
  auto it = u_cache_.find(d);
  if (it == u_cache_.end()) it = u_cache_.emplace(d, basis_->phase.phase_exponential(d)).first;
  return it->second;
}

const Field& DerivativeKernels::gker(const std::array<int, 3>& d) {
  auto it = g_cache_.find(d);
  if (it == g_cache_.end()) {
    if (!kernel_) throw std::runtime_error("DerivativeKernels: no interaction kernel configured");
    it = g_cache_.emplace(d, kernel_contraction(basis_->source_density, u(d), *kernel_)).first;
  }
  return it->second;
}

const Field& DerivativeKernels::dvext(int i, int j) {
  auto it = ext_cache_.find({i, j});
  if (it == ext_cache_.end())
    it = ext_cache_.emplace(std::make_pair(i, j), dvext_kernel(*basis_, v_ext1_, i, j)).first;
  return it->second;
}

Field DerivativeKernels::dvee(int i, int j, int k, int l) {
  const int m = basis_->size();
  if (i < 0 || j < 0 || k < 0 || l < 0 || i >= m || j >= m || k >= m || l >= m)
    throw std::out_of_range("dvee: bad index");
  check_budget(m, basis_->grid().size(), budget_, "dvee");
  const double inv_n2 = 1.0 / (static_cast<double>(basis_->n_electrons) * basis_->n_electrons);

  auto script_v = [&](int a, int b, int c, int d) {
    // V_abcd(r) = (1/N^2) [ u_ba(r) g_dc(r) + i (1/w) J^T(w rho u_ba g_dc) ]
    const auto k_ba = dk(basis_->wavevectors, a, b);
    const Field& g_dc = gker(dk(basis_->wavevectors, c, d));
    return phase_sensitivity(basis_->source_density, basis_->phase, k_ba, g_dc, inv_n2);
  };

  Field first = script_v(i, j, k, l);
  const Field second = script_v(k, l, i, j);
  for (std::size_t g = 0; g < first.size(); ++g) first[g] += second[g];
  return first;
}

// ---------------------------------------------------------------------------
// Tensor dumps
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[6] = {'H', 'Y', 'X', 'C', 'T', '1'};

void write_header(std::ofstream& os, std::uint32_t m, std::uint8_t rank) {
  os.write(kMagic, sizeof(kMagic));
  os.write(reinterpret_cast<const char*>(&m), sizeof(m));
  const std::uint8_t dtype = 1;  // complex128
  os.write(reinterpret_cast<const char*>(&dtype), sizeof(dtype));
  os.write(reinterpret_cast<const char*>(&rank), sizeof(rank));
}

std::pair<std::uint32_t, std::uint8_t> read_header(std::ifstream& is, const std::string& path) {
  char magic[6];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a HYXCT1 tensor dump: " + path);
  std::uint32_t m;
  std::uint8_t dtype, rank;
  is.read(reinterpret_cast<char*>(&m), sizeof(m));
  is.read(reinterpret_cast<char*>(&dtype), sizeof(dtype));
  is.read(reinterpret_cast<char*>(&rank), sizeof(rank));
  if (!is || dtype != 1) throw std::runtime_error("unsupported tensor dtype in " + path);
  return {m, rank};
}

}  // namespace

void write_tensor(const std::string& path, const Eigen::MatrixXcd& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_header(os, static_cast<std::uint32_t>(t.rows()), 2);
  for (long i = 0; i < t.rows(); ++i)
    for (long j = 0; j < t.cols(); ++j) {
      const cplx v = t(i, j);
      os.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  if (!os) throw std::runtime_error("write failed for " + path);
}

void write_tensor(const std::string& path, const std::vector<cplx>& t4, int m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_header(os, static_cast<std::uint32_t>(m), 4);
  os.write(reinterpret_cast<const char*>(t4.data()), t4.size() * sizeof(cplx));
  if (!os) throw std::runtime_error("write failed for " + path);
}

void ee_tensor_to_file(const ZmOrbitalSet& basis, const InteractionKernel& kernel,
                       const std::string& path, std::size_t budget) {
  check_budget(basis.size(), basis.grid().size(), budget, "ee_tensor_to_file");
  const int m = basis.size();
  const Grid& grid = basis.grid();
  const Field& rho = basis.source_density;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_header(os, static_cast<std::uint32_t>(m), 4);

  std::map<std::array<int, 3>, Field> u, gker;
  auto get_u = [&](const std::array<int, 3>& d) -> const Field& {
    auto it = u.find(d);
    if (it == u.end()) it = u.emplace(d, basis.phase.phase_exponential(d)).first;
    return it->second;
  };
  auto get_g = [&](const std::array<int, 3>& d) -> const Field& {
    auto it = gker.find(d);
    if (it == gker.end()) it = gker.emplace(d, kernel_contraction(rho, get_u(d), kernel)).first;
    return it->second;
  };
  const double inv_n2 = 1.0 / (static_cast<double>(basis.n_electrons) * basis.n_electrons);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Field& u_ji = get_u(dk(basis.wavevectors, i, j));
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          const Field& g_lk = get_g(dk(basis.wavevectors, k, l));
          cplx acc(0.0);
          for (std::size_t g = 0; g < grid.size(); ++g)
            acc += grid.quad_weight(g) * rho[g].real() * u_ji[g] * g_lk[g];
          acc *= inv_n2;
          os.write(reinterpret_cast<const char*>(&acc), sizeof(acc));
        }
    }
  if (!os) throw std::runtime_error("write failed for " + path);
}

Eigen::MatrixXcd read_tensor2(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  const auto [m, rank] = read_header(is, path);
  if (rank != 2) throw std::runtime_error("expected rank-2 tensor in " + path);
  Eigen::MatrixXcd t(m, m);
  for (std::uint32_t i = 0; i < m; ++i)
    for (std::uint32_t j = 0; j < m; ++j) {
      cplx v;
      is.read(reinterpret_cast<char*>(&v), sizeof(v));
      t(i, j) = v;
    }
  if (!is) throw std::runtime_error("truncated tensor dump: " + path);
  return t;
}

std::vector<cplx> read_tensor4(const std::string& path, int& m_out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  const auto [m, rank] = read_header(is, path);
  if (rank != 4) throw std::runtime_error("expected rank-4 tensor in " + path);
  m_out = static_cast<int>(m);
  std::vector<cplx> t(static_cast<std::size_t>(m) * m * m * m);
  is.read(reinterpret_cast<char*>(t.data()), t.size() * sizeof(cplx));
  if (!is) throw std::runtime_error("truncated tensor dump: " + path);
  return t;
}

void write_tensors(const std::string& dir, const HamiltonianTensors& t) {
  write_tensor(dir + "/t.bin", t.t);
  write_tensor(dir + "/vext.bin", t.v_ext);
  if (t.has_interaction()) write_tensor(dir + "/vee.bin", t.v_ee, t.m);
}

HamiltonianTensors read_tensors(const std::string& dir) {
  HamiltonianTensors t;
  t.t = read_tensor2(dir + "/t.bin");
  t.v_ext = read_tensor2(dir + "/vext.bin");
  t.m = static_cast<int>(t.t.rows());
  std::ifstream probe(dir + "/vee.bin", std::ios::binary);
  if (probe.good()) {
    probe.close();
    int m = 0;
    t.v_ee = read_tensor4(dir + "/vee.bin", m);
    if (m != t.m) throw std::runtime_error("tensor rank mismatch between t.bin and vee.bin");
  }
  return t;
}

}  // namespace hyxc
