#pragma once

#include "pmelab/grid_pde.hpp"

#include <string>

namespace pmelab {

/// Field history serialization.
///
/// CSV layout: header lines "key,value..." (dim, boundary, lo, hi, points,
/// m, T, dt, record_stride), then one row per stored slice:
///   time_index,v0,v1,...,v(size-1)
/// Values are written with 17 significant digits so that the decimal text
/// round-trips the binary doubles. Oracles and per-step diagnostics are not
/// serialized.
///
/// Binary layout: magic "PMEH1\n", then the header fields as little-endian
/// int64/double in the order (dim, points0, points1, boundary, lo0, lo1,
/// hi0, hi1, m, t0, T, dt, steps, record_stride, n_slices), then per slice
/// an int64 time index followed by size raw doubles.
void save_history_csv(const ScalarFieldHistory& h, const std::string& path);
ScalarFieldHistory load_history_csv(const std::string& path);

void save_history_binary(const ScalarFieldHistory& h, const std::string& path);
ScalarFieldHistory load_history_binary(const std::string& path);

}  // namespace pmelab
