#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "codit/trace.hpp"

namespace codit {

enum class Regime { kId, kReplay, kDrift, kDynamicsShuffle, kNoiseBurst };

std::string_view to_string(Regime regime);
Regime regime_from_string(std::string_view name);

/// Parameters for one synthetic trace. iD dynamics are per-feature sinusoids
/// with per-trace random frequency and phase plus Gaussian noise; the OOD
/// regimes keep the iD prefix and corrupt everything from floor(onset_frac*T).
struct GenConfig {
  std::string id = "trace";
  std::size_t d = 2;
  std::size_t T = 120;
  Regime regime = Regime::kId;
  double onset_frac = 0.5;
  double noise_sigma = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Replay repeats the onset row bit-exactly; Drift adds a ramp whose slope
/// grows linearly in time to the first half of the features; DynamicsShuffle
/// permutes the post-onset rows (marginals preserved, order destroyed);
/// NoiseBurst (the non-temporal control) multiplies the noise sigma by 10.
Trace generate(const GenConfig& config);

struct BenchmarkConfig {
  std::size_t d = 2;
  std::size_t T = 120;
  double onset_frac = 0.5;
  double noise_sigma = 0.05;
  std::size_t n_train = 20;
  std::size_t n_cal = 13;
  std::size_t n_test_id = 27;
  std::map<Regime, std::size_t> ood_counts;
  std::uint64_t base_seed = 0;
};

/// Reproducible corpus; every trace gets its own seed derived from base_seed.
DatasetSplit generate_benchmark(const BenchmarkConfig& config);

/// Manifest JSON recording the config and every per-trace seed.
std::string benchmark_manifest_json(const BenchmarkConfig& config);

}  // namespace codit
