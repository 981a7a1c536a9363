#pragma once

#include <string>

#include "hyxc/grid.hpp"

namespace hyxc {

/// Text dump: header line
///   # hyxc-field v1 dim=<d> n=<points> a1=<...> a2=<...>
/// followed by one "re im" pair per grid point in row-major order,
/// 17 significant digits. In 3D, a1/a2 are comma-separated per-axis lists.
void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path, FieldKind kind = FieldKind::generic);

}  // namespace hyxc
