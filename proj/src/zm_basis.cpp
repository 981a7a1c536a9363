#include "hyxc/zm_basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace hyxc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Cumulative trapezoid along a 1D array: C_0 = 0, C_m = C_{m-1} + h*(v_{m-1}+v_m)/2.
void cumtrapz(const double* v, int n, double h, double* out) {
  out[0] = 0.0;
  for (int m = 1; m < n; ++m) out[m] = out[m - 1] + 0.5 * h * (v[m - 1] + v[m]);
}

/// Adjoint of cumtrapz: S_g = sum_m A_m * dC_m/dv_g = (h/2)*(R_g + [g>0](A_g + R_g))
/// with R_g the suffix sum of A beyond g.
template <typename T>
void adjoint_cumtrapz(const T* A, int n, double h, T* S) {
  T suffix{};
  for (int g = n - 1; g >= 0; --g) {
    S[g] = 0.5 * h * (suffix + (g > 0 ? A[g] + suffix : T{}));
    suffix += A[g];
  }
}

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed = 14695981039346656037ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

ZmPhaseField::ZmPhaseField(const Field& rho, int n_electrons, std::array<int, 3> axis_perm)
    : grid_(rho.grid()), n_electrons_(n_electrons), perm_(axis_perm) {
  if (!rho.is_density()) throw std::invalid_argument("build_phase: rho must be density-kind");
  if (n_electrons_ < 1) throw std::invalid_argument("build_phase: need at least one electron");
  const int n = grid_.points_per_axis();
  const int dim = grid_.dim();
  {
    std::array<bool, 3> seen = {false, false, false};
    for (int a = 0; a < dim; ++a) {
      if (perm_[a] < 0 || perm_[a] >= dim || seen[perm_[a]])
        throw std::invalid_argument("build_phase: axis_perm is not a permutation");
      seen[perm_[a]] = true;
    }
  }

  if (dim == 1) {
    rbar1_.resize(n);
    for (int i = 0; i < n; ++i) rbar1_[i] = rho[i].real();
    cum0_.resize(n);
    cumtrapz(rbar1_.data(), n, spacing(0), cum0_.data());
    f0_.resize(n);
    for (int i = 0; i < n; ++i) f0_[i] = kTwoPi * cum0_[i] / n_electrons_;
    return;
  }

  // 3D reductions in role order.
  rbar2_.assign(static_cast<std::size_t>(n) * n, 0.0);
  rbar1_.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k)
        acc += role_weight(2, k) * rho[flat_index(i, j, k)].real();
      rbar2_[static_cast<std::size_t>(i) * n + j] = acc;
    }
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += role_weight(1, j) * rbar2_[static_cast<std::size_t>(i) * n + j];
    rbar1_[i] = acc;
  }

  cum0_.resize(n);
  cumtrapz(rbar1_.data(), n, spacing(0), cum0_.data());
  cum1_.resize(rbar2_.size());
  for (int i = 0; i < n; ++i)
    cumtrapz(rbar2_.data() + static_cast<std::size_t>(i) * n, n, spacing(1),
             cum1_.data() + static_cast<std::size_t>(i) * n);
  cum2_.resize(grid_.size());
  std::vector<double> line(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) line[k] = rho[flat_index(i, j, k)].real();
      std::vector<double> cum(n);
      cumtrapz(line.data(), n, spacing(2), cum.data());
      for (int k = 0; k < n; ++k) cum2_[ (static_cast<std::size_t>(i) * n + j) * n + k] = cum[k];
    }

  f0_.resize(n);
  for (int i = 0; i < n; ++i) f0_[i] = kTwoPi * cum0_[i] / n_electrons_;
  f1_.resize(rbar2_.size());
  for (int i = 0; i < n; ++i) {
    double b = rbar1_[i];
    if (b < kDensityFloor) {
      b = kDensityFloor;
      ++clamp_count_;
    }
    for (int j = 0; j < n; ++j)
      f1_[static_cast<std::size_t>(i) * n + j] = kTwoPi * cum1_[static_cast<std::size_t>(i) * n + j] / b;
  }
  f2_.resize(grid_.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double b = rbar2_[static_cast<std::size_t>(i) * n + j];
      if (b < kDensityFloor) {
        b = kDensityFloor;
        ++clamp_count_;
      }
      for (int k = 0; k < n; ++k) {
        const std::size_t q = (static_cast<std::size_t>(i) * n + j) * n + k;
        f2_[q] = kTwoPi * cum2_[q] / b;
      }
    }
}

std::array<int, 3> ZmPhaseField::role_indices(std::size_t idx) const {
  const auto g = grid_.unflatten(idx);
  std::array<int, 3> r = {0, 0, 0};
  for (int a = 0; a < grid_.dim(); ++a) r[a] = g[perm_[a]];
  return r;
}

std::size_t ZmPhaseField::flat_index(int i, int j, int k) const {
  if (grid_.dim() == 1) return static_cast<std::size_t>(i);
  std::array<int, 3> g;
  g[perm_[0]] = i;
  g[perm_[1]] = j;
  g[perm_[2]] = k;
  return grid_.index(g[0], g[1], g[2]);
}

double ZmPhaseField::f_component(int a, std::size_t idx) const {
  const auto r = role_indices(idx);
  const int n = grid_.points_per_axis();
  switch (a) {
    case 0: return f0_[r[0]];
    case 1: return f1_[static_cast<std::size_t>(r[0]) * n + r[1]];
    case 2: return f2_[(static_cast<std::size_t>(r[0]) * n + r[1]) * n + r[2]];
    default: throw std::out_of_range("f_component: bad axis");
  }
}

double ZmPhaseField::phase_at(const std::array<int, 3>& k, std::size_t idx) const {
  const auto r = role_indices(idx);
  const int n = grid_.points_per_axis();
  double xi = k[0] * f0_[r[0]];
  if (grid_.dim() == 3) {
    if (k[1]) xi += k[1] * f1_[static_cast<std::size_t>(r[0]) * n + r[1]];
    if (k[2]) xi += k[2] * f2_[(static_cast<std::size_t>(r[0]) * n + r[1]) * n + r[2]];
  }
  return xi;
}

Field ZmPhaseField::phase_exponential(const std::array<int, 3>& k) const {
  Field u(grid_, FieldKind::generic);
  const std::size_t G = grid_.size();
#pragma omp parallel for
  for (long long idx = 0; idx < static_cast<long long>(G); ++idx) {
    const double xi = phase_at(k, idx);
    u[idx] = cplx(std::cos(xi), std::sin(xi));
  }
  return u;
}

std::vector<cplx> ZmPhaseField::jacobian_adjoint(const std::array<int, 3>& k,
                                                 const std::vector<cplx>& A) const {
  const int n = grid_.points_per_axis();
  const std::size_t G = grid_.size();
  if (A.size() != G) throw std::invalid_argument("jacobian_adjoint: size mismatch");
  std::vector<cplx> S(G, cplx(0.0));

  if (grid_.dim() == 1) {
    if (k[0] == 0) return S;
    std::vector<cplx> T(n);
    adjoint_cumtrapz(A.data(), n, spacing(0), T.data());
    const double c = kTwoPi * k[0] / n_electrons_;
    for (int g = 0; g < n; ++g) S[g] = c * T[g];
    return S;
  }

  // Reductions of A over inner roles (plain sums; A carries its own weights).
  std::vector<cplx> A1(static_cast<std::size_t>(n) * n, cplx(0.0));  // sum over role 2
  std::vector<cplx> A0(n, cplx(0.0));                                // sum over roles 1,2
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx acc(0.0);
      for (int kk = 0; kk < n; ++kk) acc += A[flat_index(i, j, kk)];
      A1[static_cast<std::size_t>(i) * n + j] = acc;
      A0[i] += acc;
    }

  if (k[0] != 0) {
    std::vector<cplx> T0(n);
    adjoint_cumtrapz(A0.data(), n, spacing(0), T0.data());
    const double c = kTwoPi * k[0] / n_electrons_;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int kk = 0; kk < n; ++kk)
          S[flat_index(i, j, kk)] += c * role_weight(1, j) * role_weight(2, kk) * T0[i];
  }

  if (k[1] != 0) {
    std::vector<cplx> T1(n);
    for (int i = 0; i < n; ++i) {
      const double b = std::max(rbar1_[i], kDensityFloor);
      const double clamp_ind = rbar1_[i] > kDensityFloor ? 1.0 : 0.0;
      adjoint_cumtrapz(A1.data() + static_cast<std::size_t>(i) * n, n, spacing(1), T1.data());
      cplx D1(0.0);
      for (int j = 0; j < n; ++j)
        D1 += A1[static_cast<std::size_t>(i) * n + j] * cum1_[static_cast<std::size_t>(i) * n + j];
      for (int j = 0; j < n; ++j)
        for (int kk = 0; kk < n; ++kk)
          S[flat_index(i, j, kk)] +=
              kTwoPi * k[1] *
              (role_weight(2, kk) * T1[j] / b -
               clamp_ind * role_weight(1, j) * role_weight(2, kk) * D1 / (b * b));
    }
  }

  if (k[2] != 0) {
    std::vector<cplx> line(n), T2(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const std::size_t q = static_cast<std::size_t>(i) * n + j;
        const double b = std::max(rbar2_[q], kDensityFloor);
        const double clamp_ind = rbar2_[q] > kDensityFloor ? 1.0 : 0.0;
        for (int kk = 0; kk < n; ++kk) line[kk] = A[flat_index(i, j, kk)];
        adjoint_cumtrapz(line.data(), n, spacing(2), T2.data());
        cplx D2(0.0);
        for (int kk = 0; kk < n; ++kk) D2 += line[kk] * cum2_[q * n + kk];
        for (int kk = 0; kk < n; ++kk)
          S[flat_index(i, j, kk)] +=
              kTwoPi * k[2] *
              (T2[kk] / b - clamp_ind * role_weight(2, kk) * D2 / (b * b));
      }
  }
  return S;
}

GridDeltaExpansion::GridDeltaExpansion(const ZmPhaseField& phase, std::array<int, 3> k_ji,
                                       std::size_t r_prime)
    : phase_(&phase), k_(k_ji), rp_(r_prime) {
  if (r_prime >= phase.grid().size())
    throw std::out_of_range("phase_functional_derivative: r' off the grid");
}

double GridDeltaExpansion::evaluate(std::size_t r_idx) const {
  if (r_idx >= phase_->grid().size())
    throw std::out_of_range("GridDeltaExpansion::evaluate: point off the grid");
  const auto rp = phase_->role_indices(rp_);
  const auto r = phase_->role_indices(r_idx);
  const int n = phase_->grid().points_per_axis();
  double val = 0.0;
  if (k_[0] != 0)
    val += kTwoPi * k_[0] / phase_->n_electrons() * heaviside(double(rp[0]) - double(r[0]));
  if (phase_->grid().dim() == 3) {
    if (k_[1] != 0 && r[0] == rp[0]) {
      const double b = std::max(phase_->rbar1_[rp[0]], kDensityFloor);
      const double ci = phase_->rbar1_[rp[0]] > kDensityFloor ? 1.0 : 0.0;
      const double c1 = phase_->cum1_[static_cast<std::size_t>(rp[0]) * n + rp[1]];
      val += kTwoPi * k_[1] / phase_->role_weight(0, r[0]) *
             (heaviside(double(rp[1]) - double(r[1])) / b - ci * c1 / (b * b));
    }
    if (k_[2] != 0 && r[0] == rp[0] && r[1] == rp[1]) {
      const std::size_t q = static_cast<std::size_t>(rp[0]) * n + rp[1];
      const double b = std::max(phase_->rbar2_[q], kDensityFloor);
      const double ci = phase_->rbar2_[q] > kDensityFloor ? 1.0 : 0.0;
      const double c2 = phase_->cum2_[q * n + rp[2]];
      val += kTwoPi * k_[2] / (phase_->role_weight(0, r[0]) * phase_->role_weight(1, r[1])) *
             (heaviside(double(rp[2]) - double(r[2])) / b - ci * c2 / (b * b));
    }
  }
  return val;
}

double GridDeltaExpansion::contract(const Field& test) const {
  if (test.grid() != phase_->grid())
    throw std::invalid_argument("GridDeltaExpansion::contract: grid mismatch");
  // One row of the adjoint: indicator at r' pushed through jacobian_adjoint
  // would cost a full pass; evaluate the structured row directly instead.
  const int n = phase_->grid().points_per_axis();
  const auto rp = phase_->role_indices(rp_);
  double acc = 0.0;

  auto acum = [](int g, int m, double h) {
    return 0.5 * h * ((g < m ? 1.0 : 0.0) + (g > 0 && g <= m ? 1.0 : 0.0));
  };

  if (phase_->grid().dim() == 1) {
    if (k_[0] == 0) return 0.0;
    const double c = kTwoPi * k_[0] / phase_->n_electrons();
    for (int g = 0; g < n; ++g)
      acc += c * acum(g, rp[0], phase_->spacing(0)) * test[g].real();
    return acc;
  }

  if (k_[0] != 0) {
    const double c = kTwoPi * k_[0] / phase_->n_electrons();
    for (int i = 0; i < n; ++i) {
      const double a0 = acum(i, rp[0], phase_->spacing(0));
      if (a0 == 0.0) continue;
      double red = 0.0;
      for (int j = 0; j < n; ++j)
        for (int kk = 0; kk < n; ++kk)
          red += phase_->role_weight(1, j) * phase_->role_weight(2, kk) *
                 test[phase_->flat_index(i, j, kk)].real();
      acc += c * a0 * red;
    }
  }
  if (k_[1] != 0) {
    const int i = rp[0];
    const double b = std::max(phase_->rbar1_[i], kDensityFloor);
    const double ci = phase_->rbar1_[i] > kDensityFloor ? 1.0 : 0.0;
    const double c1 = phase_->cum1_[static_cast<std::size_t>(i) * n + rp[1]];
    for (int j = 0; j < n; ++j) {
      double redz = 0.0;
      for (int kk = 0; kk < n; ++kk)
        redz += phase_->role_weight(2, kk) * test[phase_->flat_index(i, j, kk)].real();
      acc += kTwoPi * k_[1] *
             (acum(j, rp[1], phase_->spacing(1)) * redz / b -
              ci * phase_->role_weight(1, j) * redz * c1 / (b * b));
    }
  }
  if (k_[2] != 0) {
    const int i = rp[0], j = rp[1];
    const std::size_t q = static_cast<std::size_t>(i) * n + j;
    const double b = std::max(phase_->rbar2_[q], kDensityFloor);
    const double ci = phase_->rbar2_[q] > kDensityFloor ? 1.0 : 0.0;
    const double c2 = phase_->cum2_[q * n + rp[2]];
    for (int kk = 0; kk < n; ++kk) {
      const double t = test[phase_->flat_index(i, j, kk)].real();
      acc += kTwoPi * k_[2] *
             (acum(kk, rp[2], phase_->spacing(2)) * t / b -
              ci * phase_->role_weight(2, kk) * t * c2 / (b * b));
    }
  }
  return acc;
}

GridDeltaExpansion phase_functional_derivative(const ZmPhaseField& phase,
                                               const std::array<int, 3>& k_ji,
                                               std::size_t r_prime) {
  return GridDeltaExpansion(phase, k_ji, r_prime);
}

ZmPhaseField build_phase(const Field& rho, int n_electrons, std::array<int, 3> axis_perm) {
  return ZmPhaseField(rho, n_electrons, axis_perm);
}

ZmOrbitalSet build_orbitals(const Field& rho, const std::vector<std::array<int, 3>>& wavevectors,
                            int n_electrons, std::array<int, 3> axis_perm) {
  for (std::size_t a = 0; a < wavevectors.size(); ++a)
    for (std::size_t b = a + 1; b < wavevectors.size(); ++b)
      if (wavevectors[a] == wavevectors[b])
        throw std::invalid_argument("build_orbitals: duplicate wavevectors");
  const double norm = integrate_real(rho);
  if (std::abs(norm - n_electrons) > 1e-8)
    throw std::invalid_argument("build_orbitals: rho normalization off by " +
                                std::to_string(norm - n_electrons));

  ZmPhaseField phase(rho, n_electrons, axis_perm);
  ZmOrbitalSet set{.orbitals = {},
                   .wavevectors = wavevectors,
                   .phase = phase,
                   .source_density = rho,
                   .n_electrons = n_electrons,
                   .basis_id = ""};
  const std::size_t G = rho.size();
  set.orbitals.reserve(wavevectors.size());
  for (const auto& k : wavevectors) {
    Field phi(rho.grid(), FieldKind::orbital);
    for (std::size_t g = 0; g < G; ++g) {
      const double amp = std::sqrt(rho[g].real() / n_electrons);
      const double xi = phase.phase_at(k, g);
      phi[g] = amp * cplx(std::cos(xi), std::sin(xi));
    }
    set.orbitals.push_back(std::move(phi));
  }

  std::uint64_t h = fnv1a(rho.values().data(), rho.size() * sizeof(cplx));
  h = fnv1a(wavevectors.data(), wavevectors.size() * sizeof(wavevectors[0]), h);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "zm|dim=%d|n=%d|M=%zu|N=%d|%016llx", rho.grid().dim(),
                rho.grid().points_per_axis(), wavevectors.size(), n_electrons,
                static_cast<unsigned long long>(h));
  set.basis_id = buf;
  return set;
}

std::vector<std::array<int, 3>> default_wavevectors(int dim, int m) {
  if (m < 1) throw std::invalid_argument("default_wavevectors: need m >= 1");
  std::vector<std::array<int, 3>> out;
  if (dim == 1) {
    out.push_back({0, 0, 0});
    for (int k = 1; static_cast<int>(out.size()) < m; ++k) {
      out.push_back({k, 0, 0});
      if (static_cast<int>(out.size()) < m) out.push_back({-k, 0, 0});
    }
    return out;
  }
  auto sign_order = [](int v) { return v == 0 ? 0 : (v > 0 ? 2 * v - 1 : -2 * v); };
  int radius = 1;
  while (true) {
    std::vector<std::array<int, 3>> all;
    for (int kx = -radius; kx <= radius; ++kx)
      for (int ky = -radius; ky <= radius; ++ky)
        for (int kz = -radius; kz <= radius; ++kz) all.push_back({kx, ky, kz});
    std::sort(all.begin(), all.end(), [&](const auto& a, const auto& b) {
      const int na = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
      const int nb = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
      if (na != nb) return na < nb;
      const std::array<int, 3> sa = {sign_order(a[0]), sign_order(a[1]), sign_order(a[2])};
      const std::array<int, 3> sb = {sign_order(b[0]), sign_order(b[1]), sign_order(b[2])};
      return sa < sb;
    });
    // Only trust entries whose |k|^2 fits inside the enumerated cube.
    std::vector<std::array<int, 3>> trusted;
    for (const auto& k : all) {
      if (k[0] * k[0] + k[1] * k[1] + k[2] * k[2] <= radius * radius) trusted.push_back(k);
      if (static_cast<int>(trusted.size()) == m) return trusted;
    }
    ++radius;
  }
}

}  // namespace hyxc
