#include "pcgs/errors.hpp"

namespace pcgs {

NumericBreakdownError::NumericBreakdownError(const std::string& what, std::size_t iteration)
    : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
      iteration_(iteration) {}

GibbsError::GibbsError(const std::string& what, std::size_t iteration)
    : std::runtime_error("gibbs iteration " + std::to_string(iteration) + ": " + what),
      iteration_(iteration) {}

}  // namespace pcgs
