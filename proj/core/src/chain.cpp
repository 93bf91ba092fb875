#include "pcgs/chain.hpp"

#include "pcgs/errors.hpp"

namespace pcgs {

void RunningMoments::push(std::span<const double> x) {
  if (count == 0) {
    mean.assign(x.size(), 0.0);
    m2.assign(x.size(), 0.0);
  } else if (x.size() != mean.size()) {
    throw ArgumentError("RunningMoments: length changed between pushes");
  }
  ++count;
  const double n = static_cast<double>(count);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double delta = x[j] - mean[j];
    mean[j] += delta / n;
    m2[j] += delta * (x[j] - mean[j]);
  }
}

std::vector<double> RunningMoments::variance() const {
  std::vector<double> v(mean.size(), 0.0);
  if (count < 2) return v;
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = m2[j] / static_cast<double>(count - 1);
  return v;
}

void ChainOutput::record_update(std::span<const double> beta, std::span<const double> shrunk_scale) {
  if (beta.size() != n_unshrunk + shrunk_scale.size())
    throw ArgumentError("record_update: beta length != unshrunk + shrunk");
  std::vector<double> scaled(beta.begin(), beta.end());
  for (std::size_t j = 0; j < shrunk_scale.size(); ++j) scaled[n_unshrunk + j] /= shrunk_scale[j];
  scaled_beta.push(scaled);
  if (n_unshrunk > 0) unshrunk.push(beta.subspan(0, n_unshrunk));
}

}  // namespace pcgs
