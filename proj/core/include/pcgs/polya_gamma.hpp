#pragma once

#include "pcgs/rng.hpp"

namespace pcgs {

/// Exact draw from PG(1, z) by the alternating-series accept/reject method
/// with truncation point 0.64. Symmetric in z; always positive.
/// Throws ArgumentError for non-finite z.
double pg_draw(double z, Rng& rng);

/// E[PG(1, z)] = tanh(z/2) / (2z), with the z → 0 limit 1/4.
double pg_mean(double z);

}  // namespace pcgs
