#include "codit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace codit {

namespace {

using nlohmann::json;

std::vector<double> parse_csv_row(const std::string& line, const std::string& file,
                                  std::size_t lineno) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(cell, &pos);
    } catch (const std::exception&) {
      throw DataError(file + ":" + std::to_string(lineno) + ": bad cell '" + cell + "'");
    }
    while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
    if (pos != cell.size())
      throw DataError(file + ":" + std::to_string(lineno) + ": bad cell '" + cell + "'");
    if (!std::isfinite(v))
      throw DataError(file + ":" + std::to_string(lineno) + ": non-finite value");
    row.push_back(v);
  }
  if (row.empty())
    throw DataError(file + ":" + std::to_string(lineno) + ": empty row");
  return row;
}

Trace load_csv_trace(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  Trace trace;
  trace.id = file.stem().string();
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    rows.push_back(parse_csv_row(line, file.string(), lineno));
    if (rows.back().size() != rows.front().size())
      throw DataError(file.string() + ":" + std::to_string(lineno) +
                      ": inconsistent column count");
  }
  if (rows.empty()) throw DataError(file.string() + ": no data rows");
  trace.data = Matrix::from_rows(rows);
  trace.validate();
  return trace;
}

Trace trace_from_json(const json& obj, const std::string& where) {
  Trace trace;
  try {
    trace.id = obj.at("id").get<std::string>();
    const auto& data = obj.at("data");
    std::vector<std::vector<double>> rows;
    rows.reserve(data.size());
    for (const auto& r : data) rows.push_back(r.get<std::vector<double>>());
    trace.data = Matrix::from_rows(rows);
    const auto label = obj.at("label").get<std::string>();
    if (label == "id") {
      trace.label = TraceLabel::kId;
    } else if (label == "ood") {
      trace.label = TraceLabel::kOod;
      trace.ood_kind = obj.value("ood_kind", std::string{});
      if (obj.contains("ood_onset"))
        trace.ood_onset = obj.at("ood_onset").get<std::size_t>();
    } else {
      throw DataError(where + ": unknown label '" + label + "'");
    }
  } catch (const json::exception& e) {
    throw DataError(where + ": " + e.what());
  }
  trace.validate();
  return trace;
}

json trace_to_json(const Trace& trace) {
  json obj;
  obj["id"] = trace.id;
  std::vector<std::vector<double>> rows(trace.length());
  for (std::size_t i = 0; i < trace.length(); ++i) {
    auto r = trace.data.row(i);
    rows[i].assign(r.begin(), r.end());
  }
  obj["data"] = rows;
  obj["label"] = trace.label == TraceLabel::kId ? "id" : "ood";
  if (trace.label == TraceLabel::kOod) {
    obj["ood_kind"] = trace.ood_kind;
    obj["ood_onset"] = *trace.ood_onset;
  }
  return obj;
}

}  // namespace

std::vector<Trace> load_traces(const std::filesystem::path& path, TraceFormat format) {
  if (!std::filesystem::exists(path)) throw DataError("no such path: " + path.string());
  std::vector<Trace> traces;
  if (format == TraceFormat::kCsvDir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) traces.push_back(load_csv_trace(file));
  } else {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      json obj = json::parse(line, nullptr, false);
      if (obj.is_discarded())
        throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad JSON");
      traces.push_back(trace_from_json(obj, path.string() + ":" + std::to_string(lineno)));
    }
  }
  if (traces.empty()) throw DataError("no traces loaded from " + path.string());
  const std::size_t d = traces.front().dim();
  for (const auto& trace : traces)
    if (trace.dim() != d)
      throw DataError("dimension mismatch: trace '" + trace.id + "' has d=" +
                      std::to_string(trace.dim()) + ", expected " + std::to_string(d));
  std::set<std::string> ids;
  for (const auto& trace : traces)
    if (!ids.insert(trace.id).second)
      throw DataError("duplicate trace id '" + trace.id + "'");
  return traces;
}

void save_traces_csv_dir(const std::vector<Trace>& traces,
                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& trace : traces) {
    std::ofstream out(dir / (trace.id + ".csv"));
    if (!out) throw DataError("cannot write " + (dir / (trace.id + ".csv")).string());
    out.precision(17);
    for (std::size_t i = 0; i < trace.length(); ++i) {
      for (std::size_t j = 0; j < trace.dim(); ++j) {
        if (j) out << ',';
        out << trace.data(i, j);
      }
      out << '\n';
    }
  }
}

void save_traces_jsonl(const std::vector<Trace>& traces,
                       const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file.string());
  for (const auto& trace : traces) out << trace_to_json(trace).dump() << '\n';
}

DatasetSplit split_dataset(std::vector<Trace> traces, const SplitCounts& counts,
                           std::uint64_t seed) {
  for (const auto& trace : traces)
    if (trace.label != TraceLabel::kId)
      throw DataError("split_dataset: trace '" + trace.id + "' is not id-labeled");
  const std::size_t need = counts.n_tr + counts.n_cal + counts.n_test;
  if (need > traces.size())
    throw DataError("split_dataset: need " + std::to_string(need) + " traces, have " +
                    std::to_string(traces.size()));

  // Stable order first, then a seeded Fisher-Yates shuffle.
  std::sort(traces.begin(), traces.end(),
            [](const Trace& a, const Trace& b) { return a.id < b.id; });
  SeedStream rng(SeedDeriver(seed).mix("split").finish());
  for (std::size_t i = traces.size(); i > 1; --i) {
    const std::size_t j = rng.uniform_below(i);
    std::swap(traces[i - 1], traces[j]);
  }

  DatasetSplit split;
  std::size_t at = 0;
  for (std::size_t i = 0; i < counts.n_tr; ++i) split.proper_training.push_back(std::move(traces[at++]));
  for (std::size_t i = 0; i < counts.n_cal; ++i) split.calibration.push_back(std::move(traces[at++]));
  for (std::size_t i = 0; i < counts.n_test; ++i) split.test_id.push_back(std::move(traces[at++]));
  return split;
}

std::vector<Window> sliding_windows(const Trace& trace, std::size_t w,
                                    std::size_t stride) {
  if (w < 2) throw ConfigError("window length must be >= 2");
  if (stride < 1) throw ConfigError("stride must be >= 1");
  std::vector<Window> windows;
  if (w > trace.length()) {
    std::cerr << "[codit] trace '" << trace.id << "' shorter than w=" << w
              << "; no windows\n";
    return windows;
  }
  for (std::size_t t = 0; t + w <= trace.length(); t += stride)
    windows.push_back(window_at(trace, t, w));
  return windows;
}

Window window_at(const Trace& trace, std::size_t t, std::size_t w) {
  if (t + w > trace.length())
    throw DataError("window [" + std::to_string(t) + ", " + std::to_string(t + w) +
                    ") out of range for trace '" + trace.id + "'");
  Window window;
  window.trace_id = trace.id;
  window.t = t;
  window.w = w;
  window.data = trace.data.slice_rows(t, t + w);
  return window;
}

Window sample_calibration_window(const Trace& trace, std::size_t w, SeedStream& rng) {
  if (trace.length() < w)
    throw DataError("calibration trace '" + trace.id + "' too short: T=" +
                    std::to_string(trace.length()) + " < w=" + std::to_string(w));
  const std::size_t t = rng.uniform_below(trace.length() - w + 1);
  return window_at(trace, t, w);
}

TraceNormalization fit_trace_normalization(const std::vector<Trace>& proper_training) {
  if (proper_training.empty())
    throw DataError("fit_trace_normalization: empty proper training set");
  const std::size_t d = proper_training.front().dim();
  std::vector<double> mean(d, 0.0), sq(d, 0.0);
  std::size_t count = 0;
  for (const auto& trace : proper_training) {
    for (std::size_t i = 0; i < trace.length(); ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        mean[j] += trace.data(i, j);
        sq[j] += trace.data(i, j) * trace.data(i, j);
      }
      ++count;
    }
  }
  TraceNormalization norm;
  norm.mean.resize(d);
  norm.scale.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    norm.mean[j] = mean[j] / static_cast<double>(count);
    const double var = sq[j] / static_cast<double>(count) - norm.mean[j] * norm.mean[j];
    norm.scale[j] = std::max(std::sqrt(std::max(var, 0.0)), 1e-12);
  }
  return norm;
}

Trace normalized(const Trace& trace, const TraceNormalization& norm) {
  if (norm.mean.size() != trace.dim())
    throw DataError("normalization dimension mismatch for trace '" + trace.id + "'");
  Trace out = trace;
  for (std::size_t i = 0; i < out.length(); ++i)
    for (std::size_t j = 0; j < out.dim(); ++j)
      out.data(i, j) = (out.data(i, j) - norm.mean[j]) / norm.scale[j];
  return out;
}

std::vector<Trace> normalized(const std::vector<Trace>& traces,
                              const TraceNormalization& norm) {
  std::vector<Trace> out;
  out.reserve(traces.size());
  for (const auto& trace : traces) out.push_back(normalized(trace, norm));
  return out;
}

std::string split_manifest_json(const DatasetSplit& split, std::uint64_t seed) {
  json manifest;
  manifest["seed"] = seed;
  auto ids = [](const std::vector<Trace>& traces) {
    std::vector<std::string> out;
    out.reserve(traces.size());
    for (const auto& trace : traces) out.push_back(trace.id);
    return out;
  };
  manifest["proper_training"] = ids(split.proper_training);
  manifest["calibration"] = ids(split.calibration);
  manifest["test_id"] = ids(split.test_id);
  manifest["test_ood"] = ids(split.test_ood);
  return manifest.dump(2);
}

std::string content_hash(const std::string& content) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : content) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace codit
