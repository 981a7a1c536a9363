#include "hyxc/ks_dft.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace hyxc {

namespace {

/// Interior (non-boundary) flattened indices, in grid order.
std::vector<std::size_t> interior_indices(const Grid& g) {
  const int n = g.points_per_axis();
  std::vector<std::size_t> idx;
  if (g.dim() == 1) {
    for (int i = 1; i + 1 < n; ++i) idx.push_back(i);
    return idx;
  }
  for (int ix = 1; ix + 1 < n; ++ix)
    for (int iy = 1; iy + 1 < n; ++iy)
      for (int iz = 1; iz + 1 < n; ++iz) idx.push_back(g.index(ix, iy, iz));
  return idx;
}

/// Dense -1/2 laplacian over the interior points (zero boundary values).
Eigen::MatrixXd interior_kinetic(const Grid& g, const std::vector<std::size_t>& interior) {
  const int n = g.points_per_axis();
  const std::size_t m = interior.size();
  std::vector<long long> to_interior(g.size(), -1);
  for (std::size_t p = 0; p < m; ++p) to_interior[interior[p]] = static_cast<long long>(p);

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
  const std::array<std::size_t, 3> stride =
      g.dim() == 1 ? std::array<std::size_t, 3>{1, 0, 0}
                   : std::array<std::size_t, 3>{static_cast<std::size_t>(n) * n,
                                                static_cast<std::size_t>(n), 1};
  for (std::size_t p = 0; p < m; ++p) {
    const auto pos = g.unflatten(interior[p]);
    double diag = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double inv_h2 = 1.0 / (g.spacing(a) * g.spacing(a));
      diag += inv_h2;  // -1/2 * (-2/h^2)
      for (int dir : {-1, +1}) {
        const int q = pos[a] + dir;
        if (q <= 0 || q >= n - 1) continue;  // neighbor on/through the wall: zero value
        const std::size_t nb = dir > 0 ? interior[p] + stride[a] : interior[p] - stride[a];
        K(p, to_interior[nb]) = -0.5 * inv_h2;
      }
    }
    K(p, p) = diag;
  }
  return K;
}

}  // namespace

int KsState::n_electrons() const {
  double s = std::accumulate(occupations.begin(), occupations.end(), 0.0);
  return static_cast<int>(std::lround(s));
}

Field hartree_potential(const Field& rho, const InteractionKernel& kernel) {
  if (!rho.is_density()) throw std::invalid_argument("hartree_potential: rho must be density-kind");
  const Grid& g = rho.grid();
  Field v(g, FieldKind::potential);
  const std::size_t G = g.size();
#pragma omp parallel for
  for (long long i = 0; i < static_cast<long long>(G); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < G; ++j)
      acc += grid_kernel(kernel, g, i, j) * rho[j].real() * g.quad_weight(j);
    v[i] = acc;
  }
  return v;
}

Field seed_xc(const Field& rho, XcModel model) {
  if (!rho.is_density()) throw std::invalid_argument("seed_xc: rho must be density-kind");
  Field v(rho.grid(), FieldKind::potential);
  if (model == XcModel::none) return v;
  if (rho.grid().dim() != 3)
    throw std::invalid_argument("seed_xc: slater_x_3d requested on a non-3D grid");
  for (std::size_t i = 0; i < rho.size(); ++i)
    v[i] = -std::cbrt(3.0 * rho[i].real() / std::numbers::pi);
  return v;
}

double seed_xc_energy(const Field& rho, XcModel model) {
  if (model == XcModel::none) return 0.0;
  if (rho.grid().dim() != 3)
    throw std::invalid_argument("seed_xc_energy: slater_x_3d requested on a non-3D grid");
  Field e(rho.grid());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r = rho[i].real();
    e[i] = -0.75 * std::cbrt(3.0 / std::numbers::pi) * r * std::cbrt(r);
  }
  return integrate_real(e);
}

KsState solve_ks(const Field& v_eff, int n_states, const Eigen::MatrixXcd* nonlocal) {
  const Grid& g = v_eff.grid();
  const auto interior = interior_indices(g);
  if (interior.empty()) throw std::invalid_argument("solve_ks: grid too small");
  if (n_states < 1 || static_cast<std::size_t>(n_states) > interior.size())
    throw std::invalid_argument("solve_ks: n_states exceeds interior grid points");
  const std::size_t m = interior.size();

  bool complex_path = nonlocal != nullptr;
  for (std::size_t i = 0; !complex_path && i < v_eff.size(); ++i)
    if (v_eff[i].imag() != 0.0) complex_path = true;

  KsState out;
  out.eigenvalues.resize(n_states);
  out.orbitals.reserve(n_states);
  const double vol_norm = 1.0 / std::sqrt(g.cell_volume());

  auto embed = [&](auto&& column) {
    Field phi(g, FieldKind::orbital);
    for (std::size_t p = 0; p < m; ++p) phi[interior[p]] = column(p) * vol_norm;
    return phi;
  };

  if (!complex_path) {
    Eigen::MatrixXd H = interior_kinetic(g, interior);
    for (std::size_t p = 0; p < m; ++p) H(p, p) += v_eff[interior[p]].real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("solve_ks: dense eigensolver failed to converge");
    for (int s = 0; s < n_states; ++s) {
      out.eigenvalues[s] = solver.eigenvalues()(s);
      const auto col = solver.eigenvectors().col(s);
      out.orbitals.push_back(embed([&](std::size_t p) { return cplx(col(p), 0.0); }));
    }
  } else {
    Eigen::MatrixXcd H = interior_kinetic(g, interior).cast<cplx>();
    for (std::size_t p = 0; p < m; ++p) H(p, p) += v_eff[interior[p]];
    if (nonlocal) {
      if (nonlocal->rows() != static_cast<long>(g.size()))
        throw std::invalid_argument("solve_ks: non-local operator has wrong dimension");
      for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = 0; q < m; ++q) H(p, q) += (*nonlocal)(interior[p], interior[q]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("solve_ks: dense eigensolver failed to converge");
    for (int s = 0; s < n_states; ++s) {
      out.eigenvalues[s] = solver.eigenvalues()(s);
      const auto col = solver.eigenvectors().col(s);
      out.orbitals.push_back(embed([&](std::size_t p) { return col(p); }));
    }
  }
  out.density = Field(g, FieldKind::generic);
  return out;
}

std::vector<double> fill_occupations(const std::vector<double>& eigenvalues, int n_electrons) {
  if (n_electrons < 0 || static_cast<std::size_t>(n_electrons) > eigenvalues.size())
    throw std::invalid_argument("fill_occupations: electron count exceeds state count");
  std::vector<std::size_t> order(eigenvalues.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eigenvalues[a] < eigenvalues[b]; });
  std::vector<double> f(eigenvalues.size(), 0.0);
  for (int i = 0; i < n_electrons; ++i) f[order[i]] = 1.0;
  return f;
}

Field density_from_orbitals(const std::vector<Field>& orbitals,
                            const std::vector<double>& occupations) {
  if (orbitals.empty()) throw std::invalid_argument("density_from_orbitals: no orbitals");
  if (orbitals.size() != occupations.size())
    throw std::invalid_argument("density_from_orbitals: occupation count mismatch");
  const Grid& g = orbitals.front().grid();
  std::vector<double> rho(g.size(), 0.0);
  for (std::size_t s = 0; s < orbitals.size(); ++s) {
    if (occupations[s] == 0.0) continue;
    for (std::size_t i = 0; i < g.size(); ++i) rho[i] += occupations[s] * std::norm(orbitals[s][i]);
  }
  return Field::density(g, std::move(rho));
}

double kinetic_energy(const std::vector<Field>& orbitals, const std::vector<double>& occupations) {
  double t = 0.0;
  for (std::size_t s = 0; s < orbitals.size(); ++s)
    if (occupations[s] != 0.0) t += occupations[s] * kinetic_inner(orbitals[s], orbitals[s]).real();
  return t;
}

EnergyBreakdown ks_energy_breakdown(const KsState& state, const Field& v_ext,
                                    const std::optional<InteractionKernel>& kernel, double e_xc,
                                    double many_body_total) {
  EnergyBreakdown e;
  e.t_ks = kinetic_energy(state.orbitals, state.occupations);
  Field weighted(state.density.grid());
  for (std::size_t i = 0; i < weighted.size(); ++i)
    weighted[i] = state.density[i].real() * v_ext[i].real();
  e.e_ext = integrate_real(weighted);
  if (kernel) {
    Field vh = hartree_potential(state.density, *kernel);
    for (std::size_t i = 0; i < weighted.size(); ++i)
      weighted[i] = state.density[i].real() * vh[i].real();
    e.e_hartree = 0.5 * integrate_real(weighted);
  }
  e.e_xc = e_xc;
  e.total = e.t_ks + e.e_ext + e.e_hartree + e.e_xc;
  e.many_body_total = many_body_total;
  return e;
}

ScfResult inner_scf(const Field& v_ext, const std::optional<InteractionKernel>& kernel,
                    int n_electrons, const XcContent& xc, const ScfOptions& opt) {
  if (!(opt.mixing > 0.0 && opt.mixing <= 1.0))
    throw std::invalid_argument("inner_scf: mixing must be in (0, 1]");
  if (opt.tol <= 0.0) throw std::invalid_argument("inner_scf: tol must be positive");
  const Grid& g = v_ext.grid();

  auto xc_potential = [&](const Field& rho) -> Field {
    if (xc.is_fixed()) return *xc.fixed_local;
    return seed_xc(rho, xc.model);
  };
  auto xc_energy = [&](const KsState& state) -> double {
    if (!xc.is_fixed()) return seed_xc_energy(state.density, xc.model);
    Field weighted(g);
    for (std::size_t i = 0; i < g.size(); ++i)
      weighted[i] = state.density[i].real() * (*xc.fixed_local)[i].real();
    double e = integrate_real(weighted);
    if (xc.nonlocal) {
      for (std::size_t s = 0; s < state.orbitals.size(); ++s) {
        if (state.occupations[s] == 0.0) continue;
        const auto& phi = state.orbitals[s];
        cplx acc(0.0);
        for (std::size_t p = 0; p < g.size(); ++p) {
          cplx row(0.0);
          for (std::size_t q = 0; q < g.size(); ++q) row += (*xc.nonlocal)(p, q) * phi[q];
          acc += std::conj(phi[p]) * row * g.quad_weight(p);
        }
        e += state.occupations[s] * acc.real();
      }
    }
    return e;
  };

  auto solve_with = [&](const Field& v_eff) {
    KsState st = solve_ks(v_eff, n_electrons, xc.nonlocal.get());
    st.occupations = fill_occupations(st.eigenvalues, n_electrons);
    st.density = density_from_orbitals(st.orbitals, st.occupations);
    return st;
  };

  // Initial guess: no Hartree term, just the external potential plus the
  // fixed xc content when present.
  KsState state;
  Field rho;
  if (opt.initial_density) {
    rho = *opt.initial_density;
    if (rho.grid() != g) throw std::invalid_argument("inner_scf: initial density grid mismatch");
  } else {
    Field v0 = v_ext;
    if (xc.is_fixed())
      for (std::size_t i = 0; i < v0.size(); ++i) v0[i] += (*xc.fixed_local)[i];
    state = solve_with(v0);
    rho = state.density;
  }

  ScfResult result;
  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    Field v_eff = v_ext;
    if (kernel) {
      Field vh = hartree_potential(rho, *kernel);
      for (std::size_t i = 0; i < v_eff.size(); ++i) v_eff[i] += vh[i];
    }
    const Field vxc = xc_potential(rho);
    for (std::size_t i = 0; i < v_eff.size(); ++i) v_eff[i] += vxc[i];

    state = solve_with(v_eff);
    double drho = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i)
      drho = std::max(drho, std::abs(state.density[i].real() - rho[i].real()));

    result.energy = ks_energy_breakdown(state, v_ext, kernel, xc_energy(state), 0.0);
    result.log.push_back({iter, drho, result.energy.total});
    if (drho < opt.tol) {
      result.converged = true;
      break;
    }
    std::vector<double> mixed(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i)
      mixed[i] = (1.0 - opt.mixing) * rho[i].real() + opt.mixing * state.density[i].real();
    rho = Field::density(rho.grid(), std::move(mixed));
  }
  result.state = std::move(state);
  return result;
}

void write_scf_log(const std::string& path, const std::vector<ScfIterRow>& log) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "iter,max_abs_drho,total_energy\n";
  char buf[96];
  for (const auto& row : log) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", row.iter, row.max_abs_drho,
                  row.total_energy);
    os << buf;
  }
}

}  // namespace hyxc
