#pragma once

#include <string>

#include "hflow/field.hpp"

namespace hflow {

/// Binary field snapshot. Little-endian layout:
///   magic "HFSN", u32 version, u32 dim, u32 n_per_axis, u32 rank tag
///   (TensorKind), u32 component count, f64 period, then node-major,
///   component-minor float64 values. Round-trips bit-exactly.
void write_snapshot(const std::string& path, const Field& f);
Field read_snapshot(const std::string& path);

}  // namespace hflow
