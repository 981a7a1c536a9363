#pragma once
#include <numbers>

#include <cmath>
#include <random>
#include <vector>

#include "hyxc/grid.hpp"

namespace hyxc::testing {

inline Field uniform_density(const Grid& grid, int n_electrons) {
  std::vector<double> vals(grid.size());
  double volume = 1.0;
  for (int a = 0; a < grid.dim(); ++a) volume *= grid.length(a);
  for (auto& v : vals) v = n_electrons / volume;
  return Field::density(grid, std::move(vals));
}

/// Smooth two-peak profile, normalized so the trapezoid integral is exactly N.
inline Field two_peak_density(const Grid& grid, int n_electrons, double sigma = 1.5) {
  std::vector<double> vals(grid.size());
  const double c = 0.5 * (grid.lo(0) + grid.hi(0));
  const double span = 0.18 * grid.length(0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double x = grid.coord(0, static_cast<int>(g));
    const double u1 = (x - (c - span)) / sigma;
    const double u2 = (x - (c + span)) / sigma;
    vals[g] = std::exp(-0.5 * u1 * u1) + 0.8 * std::exp(-0.5 * u2 * u2);
  }
  Field rho = Field::density(grid, vals);
  const double norm = integrate_real(rho);
  for (auto& v : vals) v *= n_electrons / norm;
  return Field::density(grid, std::move(vals));
}

/// Gently modulated near-uniform density with two interior humps at
/// +-L/4. Its softness keeps the basis orthonormality error well inside the
/// quadrature budget at a few hundred points.
inline Field modulated_two_peak_density(const Grid& grid, int n_electrons,
                                        double amplitude = 0.12) {
  std::vector<double> vals(grid.size());
  const double L = grid.length(0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double x = grid.coord(0, static_cast<int>(g)) - 0.5 * (grid.lo(0) + grid.hi(0));
    vals[g] = 1.0 - amplitude * std::cos(4.0 * std::numbers::pi * x / L);
  }
  Field rho = Field::density(grid, vals);
  const double norm = integrate_real(rho);
  for (auto& v : vals) v *= n_electrons / norm;
  return Field::density(grid, std::move(vals));
}

inline Field random_complex_field(const Grid& grid, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field f(grid);
  for (std::size_t g = 0; g < grid.size(); ++g) f[g] = cplx(dist(rng), dist(rng));
  return f;
}

}  // namespace hyxc::testing

#ifdef HYXC_TEST_NEEDS_TENSORS
#include "hyxc/integrals.hpp"

namespace hyxc::testing {

/// Random tensors with the exact one- and two-body Hermiticity plus the
/// pair-swap symmetry the physical integrals carry.
inline HamiltonianTensors random_hermitian_tensors(int m, std::mt19937& rng,
                                                   bool with_interaction = true,
                                                   double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  HamiltonianTensors t;
  t.m = m;
  Eigen::MatrixXcd a(m, m), b(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      a(i, j) = cplx(dist(rng), dist(rng));
      b(i, j) = cplx(dist(rng), dist(rng));
    }
  t.t = 0.5 * (a + a.adjoint());
  t.v_ext = 0.5 * (b + b.adjoint());
  if (with_interaction) {
    const std::size_t total = static_cast<std::size_t>(m) * m * m * m;
    std::vector<cplx> raw(total);
    for (auto& v : raw) v = cplx(dist(rng), dist(rng));
    auto get = [&](int i, int j, int k, int l) {
      return raw[((static_cast<std::size_t>(i) * m + j) * m + k) * m + l];
    };
    t.v_ee.resize(total);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            const cplx swap_sym = 0.5 * (get(i, j, k, l) + get(k, l, i, j));
            const cplx partner = 0.5 * (get(j, i, l, k) + get(l, k, j, i));
            t.v_ee[((static_cast<std::size_t>(i) * m + j) * m + k) * m + l] =
                0.5 * (swap_sym + std::conj(partner));
          }
  }
  t.basis_id = "random-test-tensors";
  return t;
}

}  // namespace hyxc::testing
#endif
