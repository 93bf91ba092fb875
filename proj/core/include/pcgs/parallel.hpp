#pragma once

#include <cstddef>
#include <functional>

namespace pcgs {

/// Worker count used by the sparse kernels and per-index Gibbs draws.
/// Defaults to 1. Results do not depend on this value except for the
/// cross-thread merge in matvec_t, which is done in fixed chunk order.
void set_num_threads(std::size_t n);
std::size_t num_threads();

/// Splits [0, n) into num_threads() contiguous chunks and runs
/// fn(chunk, begin, end) for each. Chunk boundaries depend only on n and the
/// thread count.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace pcgs
