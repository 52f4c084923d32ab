#pragma once

#include <optional>
#include <string>
#include <vector>

#include "codit/error.hpp"
#include "codit/matrix.hpp"

namespace codit {

enum class TraceLabel { kId, kOod };

/// One multivariate time series. Time is the row index with implicit unit
/// step; values are unitless (normalized at load time).
struct Trace {
  std::string id;
  Matrix data;  // T x d
  TraceLabel label = TraceLabel::kId;
  std::string ood_kind;                   // non-empty only when label == kOod
  std::optional<std::size_t> ood_onset;   // first ground-truth OOD step

  std::size_t length() const { return data.rows(); }
  std::size_t dim() const { return data.cols(); }

  void validate() const {
    if (length() < 1 || dim() < 1)
      throw DataError("trace '" + id + "': empty data");
    if (!data.all_finite())
      throw DataError("trace '" + id + "': non-finite value");
    if (label == TraceLabel::kOod) {
      if (!ood_onset)
        throw DataError("trace '" + id + "': ood label without ood_onset");
      if (*ood_onset >= length())
        throw DataError("trace '" + id + "': ood_onset out of range");
    } else if (ood_onset) {
      throw DataError("trace '" + id + "': ood_onset on id-labeled trace");
    }
  }
};

/// Contiguous slice of a trace; the unit of detection.
struct Window {
  std::string trace_id;
  std::size_t t = 0;  // start index in the source trace
  std::size_t w = 0;  // length in time steps
  Matrix data;        // w x d

  std::string key() const {
    return trace_id + ":" + std::to_string(t) + ":" + std::to_string(w);
  }
};

struct DatasetSplit {
  std::vector<Trace> proper_training;
  std::vector<Trace> calibration;
  std::vector<Trace> test_id;
  std::vector<Trace> test_ood;
};

/// Per-feature z-score statistics fitted on the proper training set and
/// persisted with the model.
struct TraceNormalization {
  std::vector<double> mean;
  std::vector<double> scale;  // std, floored at 1e-12

  bool empty() const { return mean.empty(); }

  static TraceNormalization identity(std::size_t d) {
    TraceNormalization norm;
    norm.mean.assign(d, 0.0);
    norm.scale.assign(d, 1.0);
    return norm;
  }
};

}  // namespace codit
