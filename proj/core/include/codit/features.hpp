#pragma once

#include <vector>

#include "codit/trace.hpp"

namespace codit {

/// Fixed-dimension summary of a window, consumed by the transformation
/// classifier. Six statistics per feature column; columns beyond the first
/// eight are not summarized.
struct FeatureVector {
  std::vector<double> values;
  std::size_t size() const { return values.size(); }
};

inline constexpr std::size_t kStatsPerFeature = 6;

std::size_t feature_dim(std::size_t d);

/// Per column: lag-1 autocorrelation (0 for constant columns), mean and
/// variance of first differences, mean absolute adjacent difference, fraction
/// of exactly-repeated adjacent values, and the first-half share of the
/// difference energy (0.5 when there is no difference energy at all).
FeatureVector extract_features(const Window& window);

}  // namespace codit
