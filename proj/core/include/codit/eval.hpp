#pragma once

#include <ostream>

#include "codit/conformal.hpp"
#include "codit/metrics.hpp"

namespace codit {

/// Scores every window in input order; parallel over windows. Results are
/// independent of worker count because each window's streams derive from
/// (seed, window key, k) alone.
std::vector<DetectionResult> score_all(const std::vector<Window>& windows,
                                       const Predictor& model,
                                       const CalibrationScoreSets& cal_sets,
                                       const TransformSpec& spec, std::uint64_t seed,
                                       int workers = 1);

struct EvalConfig {
  std::size_t w = 16;
  std::size_t stride = 1;
  double target_tpr = 0.95;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// Metrics over the sliding windows of raw test traces (normalization is
/// applied internally). Windows of OOD traces lying entirely before the onset
/// are pooled with the iD positives; windows containing any OOD step are the
/// negatives. Delay uses the threshold achieving the target TPR.
MetricReport evaluate(const std::vector<Trace>& test_id,
                      const std::vector<Trace>& test_ood, const Predictor& model,
                      const CalibrationScoreSets& cal_sets, const TransformSpec& spec,
                      const EvalConfig& config);

struct FdrConfig {
  std::vector<double> epsilons;
  std::size_t trials = 5;
  std::size_t n = 5;
  std::size_t n_cal = 0;  // traces per trial used for calibration
  std::size_t w = 16;
  CalibrationMode mode = CalibrationMode::kStrictIid;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct FdrCurve {
  std::vector<double> epsilons;
  std::vector<std::vector<double>> rates;  // trials x |epsilons|

  std::vector<double> mean_rates() const;
  std::string to_csv() const;  // per-trial rows plus quartile summary
};

/// Per trial: re-split the iD traces into calibration and test, rebuild the
/// calibration sets, and measure the flag rate on every test sliding window
/// at each epsilon.
FdrCurve fdr_sweep(const std::vector<Trace>& id_traces, const Predictor& model,
                   const TransformSpec& spec, const FdrConfig& config);

/// One row per (window, member transform): "transform,cohort,score".
void dump_score_distributions(const std::vector<Trace>& id_traces,
                              const std::vector<Trace>& ood_traces,
                              const Predictor& model, const TransformSpec& spec,
                              std::size_t w, std::uint64_t seed, std::ostream& out);

}  // namespace codit
