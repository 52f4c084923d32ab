#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "codit/predictor.hpp"
#include "codit/score_table.hpp"

namespace codit {

enum class CalibrationMode { kStrictIid, kAllWindows };

std::string_view to_string(CalibrationMode mode);
CalibrationMode calibration_mode_from_string(std::string_view name);

/// n independent sets of calibration non-conformity scores. In strict-iid
/// mode each set holds exactly one score per calibration trace (one uniformly
/// sampled window each), which is what makes the per-window false-detection
/// bound valid. all-windows mode scores every sliding window instead.
struct CalibrationScoreSets {
  CalibrationMode mode = CalibrationMode::kStrictIid;
  std::vector<std::vector<double>> sets;
  std::size_t per_set_size = 0;
  struct Provenance {
    std::string split_hash;
    std::string spec_hash;
    std::uint64_t seed = 0;
  } provenance;

  std::size_t n() const { return sets.size(); }
  void validate() const;

  std::string to_json() const;
  static CalibrationScoreSets from_json(const std::string& text);
};

/// Takes raw traces; the model's trace normalization is applied here.
CalibrationScoreSets build_calibration_sets(const std::vector<Trace>& cal_traces,
                                            const Predictor& model,
                                            const TransformSpec& spec, std::size_t n,
                                            std::size_t w, CalibrationMode mode,
                                            std::uint64_t seed);

/// p = (|{j : alpha <= a_j}| + 1) / (C + 1); ties counted inclusively.
double p_value(double alpha, std::span<const double> cal_set);

/// Combined p-value t * sum_{i<n} (-log t)^i / i! with t = prod p_k,
/// evaluated in log space. Equals the chi-square survival function with 2n
/// degrees of freedom at -2 log t.
double fisher_value(std::span<const double> p_values);

struct DetectionResult {
  std::string trace_id;
  std::size_t t = 0;
  std::size_t w = 0;
  std::vector<double> p_values;
  double fisher = 1.0;
  double epsilon = 0.0;
  bool is_ood = false;
  std::vector<TransformId> transforms_used;

  std::string window_key() const {
    return trace_id + ":" + std::to_string(t) + ":" + std::to_string(w);
  }
  std::string to_json_line() const;
};

/// p-values and fisher-value only, no threshold applied. The window must be a
/// slice of a trace normalized with the model's statistics. All randomness
/// comes from streams derived as hash(master_seed, window key, k), so any
/// evaluation order gives identical results.
DetectionResult score_window(const Window& window, const Predictor& model,
                             const CalibrationScoreSets& cal_sets,
                             const TransformSpec& spec, std::uint64_t master_seed);

/// One detection decision: OOD iff fisher-value < epsilon.
DetectionResult detect(const Window& window, const Predictor& model,
                       const CalibrationScoreSets& cal_sets, const TransformSpec& spec,
                       double epsilon, std::uint64_t master_seed);

/// detect() with scores looked up in an external table instead of the
/// built-in scorer; entry (window, k) must exist for k = 1..n.
DetectionResult detect_from_table(const Window& window, const ScoreTable& table,
                                  const CalibrationScoreSets& cal_sets, double epsilon);

}  // namespace codit
