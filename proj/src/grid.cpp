#include "hyxc/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hyxc {

Grid::Grid(int dim, std::array<double, 3> lo, std::array<double, 3> hi, int points_per_axis)
    : dim_(dim), n_(points_per_axis), lo_(lo), hi_(hi) {
  if (dim != 1 && dim != 3) throw std::invalid_argument("Grid: dim must be 1 or 3");
  if (n_ < 2) throw std::invalid_argument("Grid: need at least 2 points per axis");
  cell_volume_ = 1.0;
  for (int a = 0; a < 3; ++a) {
    if (a < dim_) {
      if (!(hi[a] > lo[a])) throw std::invalid_argument("Grid: extent must have a2 > a1");
      spacing_[a] = (hi[a] - lo[a]) / (n_ - 1);
      cell_volume_ *= spacing_[a];
    } else {
      spacing_[a] = 0.0;
    }
  }
  size_ = 1;
  for (int a = 0; a < dim_; ++a) size_ *= static_cast<std::size_t>(n_);
}

Field::Field(Grid grid, std::vector<cplx> values, FieldKind kind)
    : grid_(grid), kind_(kind), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("Field: value count does not match grid point count");
  if (kind_ == FieldKind::density) validate();
}

Field Field::density(const Grid& grid, std::vector<double> values) {
  std::vector<cplx> v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v[i] = cplx(values[i], 0.0);
  return Field(grid, std::move(v), FieldKind::density);
}

void Field::validate() const {
  if (kind_ != FieldKind::density) return;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i].imag() != 0.0)
      throw std::invalid_argument("density field has a complex entry at index " +
                                  std::to_string(i));
    if (values_[i].real() < 0.0)
      throw std::invalid_argument("density field has a negative entry at index " +
                                  std::to_string(i));
  }
}

cplx integrate(const Field& f) {
  cplx acc(0.0, 0.0);
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * g.quad_weight(i);
  return acc;
}

double integrate_real(const Field& f) { return integrate(f).real(); }

cplx inner(const Field& a, const Field& b) {
  if (a.grid() != b.grid()) throw std::invalid_argument("inner: fields live on different grids");
  cplx acc(0.0, 0.0);
  const Grid& g = a.grid();
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += std::conj(a[i]) * b[i] * g.quad_weight(i);
  return acc;
}

Field laplacian(const Field& f) {
  const Grid& g = f.grid();
  if (g.points_per_axis() < 3) throw std::invalid_argument("laplacian: grid too small");
  Field out(g, f.kind() == FieldKind::density ? FieldKind::generic : f.kind());
  const int n = g.points_per_axis();
  const auto& v = f.values();
  auto& o = out.values();
  if (g.dim() == 1) {
    const double inv_h2 = 1.0 / (g.spacing(0) * g.spacing(0));
    for (int i = 0; i < n; ++i) {
      const cplx left = i > 0 ? v[i - 1] : cplx(0.0);
      const cplx right = i < n - 1 ? v[i + 1] : cplx(0.0);
      o[i] = (left - 2.0 * v[i] + right) * inv_h2;
    }
    return out;
  }
  const std::array<double, 3> inv_h2 = {1.0 / (g.spacing(0) * g.spacing(0)),
                                        1.0 / (g.spacing(1) * g.spacing(1)),
                                        1.0 / (g.spacing(2) * g.spacing(2))};
  const std::array<std::size_t, 3> stride = {static_cast<std::size_t>(n) * n,
                                             static_cast<std::size_t>(n), 1};
#pragma omp parallel for collapse(2)
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      for (int iz = 0; iz < n; ++iz) {
        const std::size_t idx = g.index(ix, iy, iz);
        const std::array<int, 3> pos = {ix, iy, iz};
        cplx acc(0.0);
        for (int a = 0; a < 3; ++a) {
          const cplx lo = pos[a] > 0 ? v[idx - stride[a]] : cplx(0.0);
          const cplx hi = pos[a] < n - 1 ? v[idx + stride[a]] : cplx(0.0);
          acc += (lo - 2.0 * v[idx] + hi) * inv_h2[a];
        }
        o[idx] = acc;
      }
    }
  }
  return out;
}

cplx kinetic_inner(const Field& a, const Field& b) {
  if (a.grid() != b.grid())
    throw std::invalid_argument("kinetic_inner: fields live on different grids");
  const Grid& g = a.grid();
  const int n = g.points_per_axis();
  cplx acc(0.0);
  if (g.dim() == 1) {
    const double h = g.spacing(0);
    for (int m = 0; m + 1 < n; ++m) {
      const cplx da = (a[m + 1] - a[m]) / h;
      const cplx db = (b[m + 1] - b[m]) / h;
      acc += std::conj(da) * db * h;
    }
    return 0.5 * acc;
  }
  const std::array<std::size_t, 3> stride = {static_cast<std::size_t>(n) * n,
                                             static_cast<std::size_t>(n), 1};
  for (int axis = 0; axis < 3; ++axis) {
    const double h = g.spacing(axis);
    cplx axis_acc(0.0);
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy)
        for (int iz = 0; iz < n; ++iz) {
          const std::array<int, 3> pos = {ix, iy, iz};
          if (pos[axis] + 1 >= n) continue;
          const std::size_t idx = g.index(ix, iy, iz);
          double w = h;  // cell measure along `axis`, node weights across
          for (int other = 0; other < 3; ++other)
            if (other != axis) w *= g.axis_weight(other, pos[other]);
          const cplx da = (a[idx + stride[axis]] - a[idx]) / h;
          const cplx db = (b[idx + stride[axis]] - b[idx]) / h;
          axis_acc += std::conj(da) * db * w;
        }
    acc += axis_acc;
  }
  return 0.5 * acc;
}

double pair_kernel(const InteractionKernel& k, const std::array<double, 3>& r,
                   const std::array<double, 3>& rp) {
  if (k.form == InteractionKernel::Form::soft_coulomb1d) {
    const double dx = r[0] - rp[0];
    return 1.0 / std::sqrt(dx * dx + k.softening * k.softening);
  }
  const double dx = r[0] - rp[0], dy = r[1] - rp[1], dz = r[2] - rp[2];
  const double d2 = dx * dx + dy * dy + dz * dz;
  if (d2 == 0.0) throw std::invalid_argument("pair_kernel: coincident points under coulomb3d");
  return 1.0 / std::sqrt(d2);
}

double self_interaction_value(const InteractionKernel& k, const Grid& grid) {
  if (k.form == InteractionKernel::Form::soft_coulomb1d) return 1.0 / k.softening;
  // (1/V) * integral of 1/r over a sphere of equal volume = 3/(2R).
  const double R = std::cbrt(3.0 * grid.cell_volume() / (4.0 * std::numbers::pi));
  return 1.5 / R;
}

double grid_kernel(const InteractionKernel& k, const Grid& grid, std::size_t i, std::size_t j) {
  if (i == j) return self_interaction_value(k, grid);
  return pair_kernel(k, grid.point(i), grid.point(j));
}

}  // namespace hyxc
