#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pcgs/chain.hpp"
#include "pcgs/gibbs.hpp"

namespace pcgs::io {

/// A frozen Gibbs state plus the model settings needed to rebuild Φ.
struct SavedState {
  ShrinkageState state;
  std::vector<double> unshrunk_prior_sd;
  bool standardized = false;
  bool intercept = false;
};

inline constexpr std::uint8_t kStateVersion = 1;

/// Binary little-endian layout: "PCGSSTAT", version byte, flags byte
/// (bit 0 standardized, bit 1 intercept), u64 lengths of β, ω, λ and the
/// unshrunk sds, f64 τ, then the four f64 arrays in that order.
void save_state(const std::filesystem::path& path, const SavedState& saved);
/// Throws ParseError on a bad magic, version mismatch or truncation.
SavedState load_state(const std::filesystem::path& path);

/// One row per stored draw: beta_0 … beta_{P−1}, tau, logdensity.
void write_chain_csv(const std::filesystem::path& path, const ChainOutput& chain);

struct ChainTable {
  std::vector<std::vector<double>> draws;
  std::vector<double> tau;
  std::vector<double> logdensity;
};

ChainTable read_chain_csv(const std::filesystem::path& path);

}  // namespace pcgs::io
