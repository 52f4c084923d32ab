#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "codit/error.hpp"

namespace codit {

/// Probability that a random iD score exceeds a random OOD score, ties
/// counted half. iD is the positive class; higher score means more iD.
double auroc(std::span<const double> id_scores, std::span<const double> ood_scores);

struct TnrResult {
  double tnr = 0.0;
  double threshold = 0.0;     // largest theta with TPR(theta) >= target
  double achieved_tpr = 0.0;
};

TnrResult tnr_at_tpr(std::span<const double> id_scores,
                     std::span<const double> ood_scores, double target_tpr = 0.95);

/// Per-trace window scores in time order for delay measurement.
struct TraceWindowScores {
  std::string trace_id;
  std::size_t w = 0;
  std::size_t ood_onset = 0;
  std::vector<std::pair<std::size_t, double>> scores;  // (t, fisher) ordered by t
};

struct DelayResult {
  std::optional<double> mean_delay;  // nullopt when nothing was detected ("NA")
  std::size_t detected = 0;
  std::size_t undetected = 0;
};

/// Delay per trace: windows from the first ground-truth OOD window (the first
/// with t + w - 1 >= onset) until the first with score < threshold. Traces
/// never flagged are excluded from the mean and counted separately.
DelayResult detection_delay(const std::vector<TraceWindowScores>& traces,
                            double threshold);

struct MetricReport {
  double auroc = 0.0;
  double tnr = 0.0;
  double target_tpr = 0.95;
  double achieved_tpr = 0.0;
  double threshold = 0.0;
  std::optional<double> mean_delay;
  std::size_t detected_traces = 0;
  std::size_t undetected_traces = 0;
  // config echo
  std::size_t w = 0;
  std::size_t n = 0;
  std::size_t transform_count = 0;
  std::uint64_t seed = 0;

  std::string to_json() const;
};

}  // namespace codit
