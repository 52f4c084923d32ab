#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codit/rng.hpp"
#include "codit/trace.hpp"

namespace codit {

/// Temporal transformations applicable to a window. The declared order fixes
/// each variant's stable integer id used in serialized form.
enum class TransformId : int {
  kIdentity = 0,
  kSpeed2x,
  kShuffle,
  kReverse,
  kPeriodic,
  kHighPass,
  kLowPass,
  kHighLow,
  kLowHigh,
};

inline constexpr int kTransformVariantCount = 9;

std::string_view to_string(TransformId id);
std::optional<TransformId> transform_from_string(std::string_view name);

/// The transformation set and its sampling distribution.
struct TransformSpec {
  std::vector<TransformId> members;
  std::vector<double> weights;  // normalized; same length as members
  int lowpass_width = 3;        // odd moving-average width

  /// Uniform distribution over the given members.
  static TransformSpec uniform(std::vector<TransformId> members);

  /// Throws ConfigError on invariant violations. `window_len` enables the
  /// even-length check for speed2x/periodic; pass 0 to skip it.
  void validate(std::size_t window_len = 0) const;

  /// Classifier target of g: its position in `members`.
  std::size_t class_index(TransformId g) const;
  std::size_t class_count() const { return members.size(); }

  std::string to_json() const;
  static TransformSpec from_json(const std::string& text);
};

/// Draw g ~ Q over the members.
TransformId sample_transform(const TransformSpec& spec, SeedStream& rng);

/// Apply g to a window; output shape equals input shape. Only kShuffle
/// consumes randomness.
Window apply(TransformId g, const Window& window, SeedStream& rng,
             int lowpass_width = 3);

}  // namespace codit
