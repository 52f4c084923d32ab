#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>

#include "codit/error.hpp"

namespace codit {

/// Bridge for externally computed non-conformity scores, keyed by
/// (trace_id, t, w, k). Lets paper-scale models feed this pipeline without
/// the built-in scorer.
class ScoreTable {
 public:
  using Key = std::tuple<std::string, std::size_t, std::size_t, std::size_t>;

  void insert(const std::string& trace_id, std::size_t t, std::size_t w,
              std::size_t k, double score);

  /// Throws DataError when the entry is missing.
  double at(const std::string& trace_id, std::size_t t, std::size_t w,
            std::size_t k) const;

  bool contains(const std::string& trace_id, std::size_t t, std::size_t w,
                std::size_t k) const;

  std::size_t size() const { return scores_.size(); }

 private:
  std::map<Key, double> scores_;
};

/// JSON lines, one {"trace_id","t","w","k","score"} object per line.
/// Duplicate keys and negative or non-finite scores are rejected.
ScoreTable load_external_scores(const std::filesystem::path& path);

}  // namespace codit
