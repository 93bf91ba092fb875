#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pcgs {

/// Seedable generator with deterministic substreams.
///
/// Every draw in the library goes through this type. A substream is keyed by
/// the root seed plus a path of integers (iteration, purpose tag, index), so
/// draws for observation i at iteration t are the same whether computed
/// serially or from a worker thread.
///
/// Gaussian vectors are always drawn elementwise in index order. Composite
/// draws document their own order (see generate_rhs: eta first, then delta).
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed = 0);

  static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Exponential with rate 1.
  double exponential();
  /// Gamma(shape, rate); mean shape / rate.
  double gamma(double shape, double rate);
  /// Inverse Gaussian with the given mean and shape parameter.
  double inverse_gaussian(double mean, double shape);

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// splitmix64 finalizer; used to derive substream seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

/// Purpose tags for substream paths.
enum class StreamTag : std::uint64_t {
  kScan = 1,
  kOmega = 2,
  kLocalScale = 3,
  kDesign = 4,
  kOutcome = 5,
  kReplicate = 6,
};

constexpr std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

}  // namespace pcgs
