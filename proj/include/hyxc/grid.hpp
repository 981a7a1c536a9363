#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hyxc {

using cplx = std::complex<double>;

/// Uniform box grid in 1 or 3 dimensions. Endpoints are grid points, so
/// spacing = (a2-a1)/(n-1) per axis. Flattened storage is row-major with
/// x slowest and z fastest.
class Grid {
 public:
  Grid(int dim, std::array<double, 3> lo, std::array<double, 3> hi, int points_per_axis);

  static Grid line(double a1, double a2, int n) { return Grid(1, {a1, 0, 0}, {a2, 0, 0}, n); }
  static Grid box(std::array<double, 3> lo, std::array<double, 3> hi, int n) {
    return Grid(3, lo, hi, n);
  }

  int dim() const { return dim_; }
  int points_per_axis() const { return n_; }
  std::size_t size() const { return size_; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double cell_volume() const { return cell_volume_; }
  double length(int axis) const { return hi_[axis] - lo_[axis]; }

  double coord(int axis, int i) const { return lo_[axis] + spacing_[axis] * i; }

  std::size_t index(int ix, int iy = 0, int iz = 0) const {
    return dim_ == 1 ? static_cast<std::size_t>(ix)
                     : (static_cast<std::size_t>(ix) * n_ + iy) * n_ + iz;
  }
  std::array<int, 3> unflatten(std::size_t idx) const {
    if (dim_ == 1) return {static_cast<int>(idx), 0, 0};
    const int iz = static_cast<int>(idx % n_);
    const int iy = static_cast<int>((idx / n_) % n_);
    const int ix = static_cast<int>(idx / (static_cast<std::size_t>(n_) * n_));
    return {ix, iy, iz};
  }
  std::array<double, 3> point(std::size_t idx) const {
    const auto g = unflatten(idx);
    return {coord(0, g[0]), dim_ > 1 ? coord(1, g[1]) : 0.0, dim_ > 1 ? coord(2, g[2]) : 0.0};
  }

  /// Trapezoidal weight along one axis: spacing * (1/2 at the ends, 1 inside).
  double axis_weight(int axis, int i) const {
    return spacing_[axis] * ((i == 0 || i == n_ - 1) ? 0.5 : 1.0);
  }
  /// Product of per-axis trapezoidal weights at a flattened index.
  double quad_weight(std::size_t idx) const {
    const auto g = unflatten(idx);
    double w = axis_weight(0, g[0]);
    for (int a = 1; a < dim_; ++a) w *= axis_weight(a, g[a]);
    return w;
  }

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && lo_ == o.lo_ && hi_ == o.hi_;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  int dim_;
  int n_;
  std::array<double, 3> lo_;
  std::array<double, 3> hi_;
  std::array<double, 3> spacing_;
  double cell_volume_;
  std::size_t size_;
};

enum class FieldKind { density, potential, orbital, generic };

/// Complex-valued function sampled on a Grid. Density-kind fields must be
/// real and non-negative everywhere.
class Field {
 public:
  /// Inert placeholder (two-point unit grid); overwritten before use.
  Field() : Field(Grid::line(0.0, 1.0, 2)) {}
  Field(Grid grid, FieldKind kind = FieldKind::generic)
      : grid_(grid), kind_(kind), values_(grid.size(), cplx(0.0, 0.0)) {}
  Field(Grid grid, std::vector<cplx> values, FieldKind kind = FieldKind::generic);

  static Field density(const Grid& grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  FieldKind kind() const { return kind_; }
  std::size_t size() const { return values_.size(); }

  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  std::vector<cplx>& values() { return values_; }
  const std::vector<cplx>& values() const { return values_; }

  bool is_density() const { return kind_ == FieldKind::density; }
  /// Throws if a density-kind field has negative or complex entries.
  void validate() const;

  Field with_kind(FieldKind k) const {
    Field f = *this;
    f.kind_ = k;
    return f;
  }

 private:
  Grid grid_;
  FieldKind kind_;
  std::vector<cplx> values_;
};

/// Trapezoidal quadrature of f over its grid.
cplx integrate(const Field& f);
double integrate_real(const Field& f);
/// Quadrature inner product <a|b> = integral of conj(a)*b.
cplx inner(const Field& a, const Field& b);

/// Central second-difference Laplacian with zero-value (Dirichlet) ghost
/// points outside the box. Exact for quadratics at interior points.
Field laplacian(const Field& f);

/// Kinetic matrix element <a| -1/2 laplacian |b> in the symmetrized
/// (gradient) quadrature 1/2 * integral of grad(conj a) . grad(b), summed
/// over the grid cells. Hermitian by construction.
cplx kinetic_inner(const Field& a, const Field& b);

/// Pairwise interaction w(r,r'). The 1D form is the softened Coulomb
/// 1/sqrt((x-x')^2 + a^2); the 3D form is the bare 1/|r-r'|.
struct InteractionKernel {
  enum class Form { coulomb3d, soft_coulomb1d };
  Form form = Form::soft_coulomb1d;
  double softening = 1.0;  // bohr, soft_coulomb1d only

  static InteractionKernel soft_coulomb(double a = 1.0) {
    return {Form::soft_coulomb1d, a};
  }
  static InteractionKernel coulomb() { return {Form::coulomb3d, 0.0}; }
};

/// Kernel value at two points. Throws for coincident points under coulomb3d.
double pair_kernel(const InteractionKernel& k, const std::array<double, 3>& r,
                   const std::array<double, 3>& rp);

/// Value used on the diagonal of double quadratures in 3D: the analytic
/// average of 1/r over a sphere with the volume of one grid cell.
double self_interaction_value(const InteractionKernel& k, const Grid& grid);

/// Kernel value between two grid points, with the 3D diagonal regularized by
/// self_interaction_value. This is what quadrature-based contractions use.
double grid_kernel(const InteractionKernel& k, const Grid& grid, std::size_t i, std::size_t j);

}  // namespace hyxc
