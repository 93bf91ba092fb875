#include "pcgs/rng.hpp"

#include <cmath>

#include "pcgs/errors.hpp"

namespace pcgs {

std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

Rng Rng::substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix_seed(seed);
  for (std::uint64_t p : path) h = mix_seed(h ^ mix_seed(p + 0x632be59bd9b4e019ULL));
  return Rng(h);
}

double Rng::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() { return normal_(engine_); }

double Rng::exponential() { return -std::log(uniform()); }

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate))
    throw ArgumentError("gamma: shape and rate must be positive and finite");
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(engine_);
}

double Rng::inverse_gaussian(double mean, double shape) {
  if (!(mean > 0.0) || !(shape > 0.0))
    throw ArgumentError("inverse_gaussian: mean and shape must be positive");
  // Michael, Schucany & Haas. The smaller root is formed as mean^2 / larger
  // root to avoid cancellation when mean * y >> shape.
  const double z = normal();
  const double y = z * z;
  const double my = mean * y;
  const double big = mean + mean * my / (2.0 * shape) +
                     mean / (2.0 * shape) * std::sqrt(4.0 * mean * shape * y + my * my);
  const double small = mean * (mean / big);
  if (uniform() <= mean / (mean + small)) return small;
  return big;
}

}  // namespace pcgs
