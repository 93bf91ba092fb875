#include "pcgs/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace pcgs {
namespace {
std::atomic<std::size_t> g_threads{1};
}

void set_num_threads(std::size_t n) { g_threads = std::max<std::size_t>(1, n); }
std::size_t num_threads() { return g_threads.load(); }

void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  const std::size_t t = std::min(num_threads(), std::max<std::size_t>(1, n));
  if (t <= 1) {
    fn(0, 0, n);
    return;
  }
  const std::size_t step = (n + t - 1) / t;
  std::vector<std::exception_ptr> errors(t);
  {
    std::vector<std::jthread> workers;
    workers.reserve(t);
    for (std::size_t c = 0; c < t; ++c) {
      const std::size_t begin = std::min(n, c * step);
      const std::size_t end = std::min(n, begin + step);
      workers.emplace_back([&, c, begin, end] {
        try {
          fn(c, begin, end);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace pcgs
