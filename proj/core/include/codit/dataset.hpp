#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "codit/rng.hpp"
#include "codit/trace.hpp"

namespace codit {

enum class TraceFormat { kCsvDir, kJsonl };

/// csv-dir: one headerless CSV per trace, filename (sans extension) = id.
/// jsonl: one {"id","data","label","ood_kind"?,"ood_onset"?} object per line.
std::vector<Trace> load_traces(const std::filesystem::path& path, TraceFormat format);

void save_traces_csv_dir(const std::vector<Trace>& traces,
                         const std::filesystem::path& dir);
void save_traces_jsonl(const std::vector<Trace>& traces,
                       const std::filesystem::path& file);

struct SplitCounts {
  std::size_t n_tr = 0;
  std::size_t n_cal = 0;
  std::size_t n_test = 0;
};

/// Deterministic random partition of ID traces into proper-training,
/// calibration and test-iD parts. OOD traces are never passed here; they go
/// straight to DatasetSplit::test_ood.
DatasetSplit split_dataset(std::vector<Trace> traces, const SplitCounts& counts,
                           std::uint64_t seed);

/// Windows at t = 0, stride, 2*stride, ... while t + w <= T, in order.
/// w > T yields an empty list.
std::vector<Window> sliding_windows(const Trace& trace, std::size_t w,
                                    std::size_t stride = 1);

/// The window of `trace` starting at row t.
Window window_at(const Trace& trace, std::size_t t, std::size_t w);

/// Start index uniform over {0, ..., T-w}.
Window sample_calibration_window(const Trace& trace, std::size_t w, SeedStream& rng);

TraceNormalization fit_trace_normalization(const std::vector<Trace>& proper_training);
Trace normalized(const Trace& trace, const TraceNormalization& norm);
std::vector<Trace> normalized(const std::vector<Trace>& traces,
                              const TraceNormalization& norm);

/// Split manifest: trace ids per part plus the seed, persisted as JSON.
std::string split_manifest_json(const DatasetSplit& split, std::uint64_t seed);

/// FNV-1a hex digest of a string; used for provenance hashes.
std::string content_hash(const std::string& content);

}  // namespace codit
