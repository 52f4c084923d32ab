#include "codit/features.hpp"

#include <algorithm>
#include <cmath>

namespace codit {

namespace {

constexpr std::size_t kMaxSummarizedColumns = 8;

/// Pearson correlation between the column and its one-step shift.
double lag1_autocorrelation(const Matrix& data, std::size_t j) {
  const std::size_t n = data.rows() - 1;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += data(i, j);
    mb += data(i + 1, j);
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = data(i, j) - ma;
    const double b = data(i + 1, j) - mb;
    cov += a * b;
    va += a * a;
    vb += b * b;
  }
  if (va <= 0.0 || vb <= 0.0) return 0.0;  // constant side: report 0 by convention
  return cov / std::sqrt(va * vb);
}

}  // namespace

std::size_t feature_dim(std::size_t d) {
  return kStatsPerFeature * std::min(d, kMaxSummarizedColumns);
}

FeatureVector extract_features(const Window& window) {
  const Matrix& data = window.data;
  const std::size_t w = data.rows();
  const std::size_t d = std::min(data.cols(), kMaxSummarizedColumns);

  FeatureVector out;
  out.values.reserve(kStatsPerFeature * d);

  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t n_diff = w - 1;
    const double denom = static_cast<double>(std::max<std::size_t>(n_diff, 1));

    double diff_sum = 0.0, diff_sq = 0.0, abs_sum = 0.0;
    std::size_t repeats = 0;
    double energy_first = 0.0, energy_second = 0.0;
    for (std::size_t i = 0; i + 1 < w; ++i) {
      const double diff = data(i + 1, j) - data(i, j);
      diff_sum += diff;
      diff_sq += diff * diff;
      abs_sum += std::abs(diff);
      if (data(i + 1, j) == data(i, j)) ++repeats;
      if (i < n_diff / 2)
        energy_first += diff * diff;
      else
        energy_second += diff * diff;
    }
    const double diff_mean = diff_sum / denom;
    const double diff_var = std::max(diff_sq / denom - diff_mean * diff_mean, 0.0);
    const double total_energy = energy_first + energy_second;

    out.values.push_back(lag1_autocorrelation(data, j));
    out.values.push_back(diff_mean);
    out.values.push_back(diff_var);
    out.values.push_back(abs_sum / denom);
    out.values.push_back(static_cast<double>(repeats) / denom);
    out.values.push_back(total_energy > 0.0 ? energy_first / total_energy : 0.5);
  }
  return out;
}

}  // namespace codit
