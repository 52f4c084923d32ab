#include "codit/datagen.hpp"

#include <cmath>
#include <numbers>

#include "codit/rng.hpp"
#include "json.hpp"

namespace codit {

namespace {

constexpr double kDriftRate = 0.05;  // curvature of the post-onset ramp

std::uint64_t trace_seed(std::uint64_t base, std::string_view role, std::size_t index) {
  return SeedDeriver(base).mix(role).mix(index).finish();
}

Matrix id_dynamics(const GenConfig& config, SeedStream& rng, double sigma_late,
                   std::size_t onset) {
  Matrix data(config.T, config.d);
  std::vector<double> freq(config.d), phase(config.d);
  for (std::size_t j = 0; j < config.d; ++j) {
    freq[j] = rng.uniform(0.02, 0.1);  // cycles per step, informative at w=16
    phase[j] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  for (std::size_t i = 0; i < config.T; ++i)
    for (std::size_t j = 0; j < config.d; ++j) {
      const double sigma = i >= onset ? sigma_late : config.noise_sigma;
      data(i, j) = std::sin(2.0 * std::numbers::pi * freq[j] * static_cast<double>(i) +
                            phase[j]) +
                   (sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0);
    }
  return data;
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::kId: return "id";
    case Regime::kReplay: return "replay";
    case Regime::kDrift: return "drift";
    case Regime::kDynamicsShuffle: return "dynamics-shuffle";
    case Regime::kNoiseBurst: return "noise-burst";
  }
  return "?";
}

Regime regime_from_string(std::string_view name) {
  for (Regime r : {Regime::kId, Regime::kReplay, Regime::kDrift,
                   Regime::kDynamicsShuffle, Regime::kNoiseBurst})
    if (to_string(r) == name) return r;
  throw ConfigError("unknown regime '" + std::string(name) + "'");
}

void GenConfig::validate() const {
  if (d < 1 || T < 2) throw ConfigError("generator needs d >= 1 and T >= 2");
  if (!(onset_frac > 0.0) || !(onset_frac < 1.0))
    throw ConfigError("onset_frac must lie in (0, 1)");
  if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
  if (static_cast<std::size_t>(onset_frac * static_cast<double>(T)) >= T)
    throw ConfigError("onset_frac puts the onset past the end of the trace");
}

Trace generate(const GenConfig& config) {
  config.validate();
  SeedStream rng(config.seed);
  const auto onset =
      static_cast<std::size_t>(config.onset_frac * static_cast<double>(config.T));

  Trace trace;
  trace.id = config.id;

  switch (config.regime) {
    case Regime::kId:
      trace.data = id_dynamics(config, rng, config.noise_sigma, config.T);
      break;

    case Regime::kReplay:
      trace.data = id_dynamics(config, rng, config.noise_sigma, config.T);
      for (std::size_t i = onset + 1; i < config.T; ++i)
        for (std::size_t j = 0; j < config.d; ++j)
          trace.data(i, j) = trace.data(onset, j);
      break;

    case Regime::kDrift: {
      trace.data = id_dynamics(config, rng, config.noise_sigma, config.T);
      const std::size_t affected = (config.d + 1) / 2;
      for (std::size_t i = onset; i < config.T; ++i) {
        const double dt = static_cast<double>(i - onset);
        const double ramp = kDriftRate * dt * dt;  // slope grows linearly in time
        for (std::size_t j = 0; j < affected; ++j) trace.data(i, j) += ramp;
      }
      break;
    }

    case Regime::kDynamicsShuffle: {
      trace.data = id_dynamics(config, rng, config.noise_sigma, config.T);
      // Permute the continuation rows; per-feature marginals survive.
      const std::size_t tail = config.T - onset;
      for (std::size_t i = tail; i > 1; --i) {
        const std::size_t j = rng.uniform_below(i);
        for (std::size_t c = 0; c < config.d; ++c)
          std::swap(trace.data(onset + i - 1, c), trace.data(onset + j, c));
      }
      break;
    }

    case Regime::kNoiseBurst:
      trace.data = id_dynamics(config, rng, 10.0 * config.noise_sigma, onset);
      break;
  }

  if (config.regime != Regime::kId) {
    trace.label = TraceLabel::kOod;
    trace.ood_kind = std::string(to_string(config.regime));
    trace.ood_onset = onset;
  }
  trace.validate();
  return trace;
}

DatasetSplit generate_benchmark(const BenchmarkConfig& config) {
  DatasetSplit split;
  GenConfig base;
  base.d = config.d;
  base.T = config.T;
  base.onset_frac = config.onset_frac;
  base.noise_sigma = config.noise_sigma;

  auto make = [&](Regime regime, std::string_view role, std::size_t index) {
    GenConfig c = base;
    c.regime = regime;
    c.id = std::string(role) + "-" + std::to_string(index);
    c.seed = trace_seed(config.base_seed, role, index);
    return generate(c);
  };

  for (std::size_t i = 0; i < config.n_train; ++i)
    split.proper_training.push_back(make(Regime::kId, "tr", i));
  for (std::size_t i = 0; i < config.n_cal; ++i)
    split.calibration.push_back(make(Regime::kId, "cal", i));
  for (std::size_t i = 0; i < config.n_test_id; ++i)
    split.test_id.push_back(make(Regime::kId, "test-id", i));
  for (const auto& [regime, count] : config.ood_counts) {
    const std::string role = "ood-" + std::string(to_string(regime));
    for (std::size_t i = 0; i < count; ++i)
      split.test_ood.push_back(make(regime, role, i));
  }
  return split;
}

std::string benchmark_manifest_json(const BenchmarkConfig& config) {
  nlohmann::json obj;
  obj["d"] = config.d;
  obj["T"] = config.T;
  obj["onset_frac"] = config.onset_frac;
  obj["noise_sigma"] = config.noise_sigma;
  obj["base_seed"] = config.base_seed;
  obj["counts"] = {{"train", config.n_train},
                   {"cal", config.n_cal},
                   {"test_id", config.n_test_id}};
  nlohmann::json seeds;
  auto record = [&](std::string_view role, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i)
      seeds[std::string(role) + "-" + std::to_string(i)] =
          trace_seed(config.base_seed, role, i);
  };
  record("tr", config.n_train);
  record("cal", config.n_cal);
  record("test-id", config.n_test_id);
  nlohmann::json oods;
  for (const auto& [regime, count] : config.ood_counts) {
    oods[std::string(to_string(regime))] = count;
    record("ood-" + std::string(to_string(regime)), count);
  }
  obj["ood_counts"] = oods;
  obj["trace_seeds"] = seeds;
  return obj.dump(2);
}

}  // namespace codit
