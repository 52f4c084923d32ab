#include "codit/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "codit/dataset.hpp"
#include "json.hpp"

namespace codit {

std::string_view to_string(CalibrationMode mode) {
  return mode == CalibrationMode::kStrictIid ? "strict-iid" : "all-windows";
}

CalibrationMode calibration_mode_from_string(std::string_view name) {
  if (name == "strict-iid") return CalibrationMode::kStrictIid;
  if (name == "all-windows") return CalibrationMode::kAllWindows;
  throw ConfigError("unknown calibration mode '" + std::string(name) + "'");
}

void CalibrationScoreSets::validate() const {
  if (sets.empty()) throw DataError("calibration sets: n must be >= 1");
  for (const auto& set : sets) {
    if (set.size() != per_set_size)
      throw DataError("calibration sets: inconsistent set size");
    for (double a : set)
      if (!std::isfinite(a) || a < 0.0)
        throw DataError("calibration sets: invalid score");
  }
  if (per_set_size == 0) throw DataError("calibration sets: empty sets");
}

CalibrationScoreSets build_calibration_sets(const std::vector<Trace>& cal_traces,
                                            const Predictor& model,
                                            const TransformSpec& spec, std::size_t n,
                                            std::size_t w, CalibrationMode mode,
                                            std::uint64_t seed) {
  if (n < 1) throw ConfigError("n must be >= 1");
  if (cal_traces.empty()) throw DataError("no calibration traces");
  spec.validate(w);
  if (mode == CalibrationMode::kStrictIid)
    for (const auto& trace : cal_traces)
      if (trace.length() < w)
        throw DataError("calibration trace '" + trace.id + "' too short for strict-iid: T=" +
                        std::to_string(trace.length()) + " < w=" + std::to_string(w));
  const auto traces = normalized(cal_traces, model.trace_norm);

  CalibrationScoreSets out;
  out.mode = mode;
  out.sets.resize(n);

  for (std::size_t k = 0; k < n; ++k) {
    auto& set = out.sets[k];
    for (const auto& trace : traces) {
      if (mode == CalibrationMode::kStrictIid) {
        auto rng =
            SeedDeriver(seed).mix("cal-strict").mix(k).mix(trace.id).stream();
        const Window window = sample_calibration_window(trace, w, rng);
        const TransformId g = sample_transform(spec, rng);
        set.push_back(ncm_score(model, window, g, rng));
      } else {
        for (std::size_t t = 0; t + w <= trace.length(); ++t) {
          auto rng =
              SeedDeriver(seed).mix("cal-all").mix(k).mix(trace.id).mix(t).stream();
          const Window window = window_at(trace, t, w);
          const TransformId g = sample_transform(spec, rng);
          set.push_back(ncm_score(model, window, g, rng));
        }
      }
    }
  }
  out.per_set_size = out.sets.front().size();

  std::string ids;
  for (const auto& trace : cal_traces) ids += trace.id + "\n";
  out.provenance.split_hash = content_hash(ids);
  out.provenance.spec_hash = content_hash(spec.to_json());
  out.provenance.seed = seed;
  out.validate();
  return out;
}

double p_value(double alpha, std::span<const double> cal_set) {
  if (cal_set.empty()) throw DataError("p_value: empty calibration set");
  std::size_t count = 0;
  for (double a : cal_set)
    if (alpha <= a) ++count;
  return static_cast<double>(count + 1) / static_cast<double>(cal_set.size() + 1);
}

double fisher_value(std::span<const double> p_values) {
  if (p_values.empty()) throw ConfigError("fisher_value: no p-values");
  double log_t = 0.0;
  for (double p : p_values) {
    if (!(p > 0.0) || p > 1.0)
      throw NumericalError("fisher_value: p-value outside (0, 1]");
    log_t += std::log(p);
  }
  if (log_t >= 0.0) return 1.0;  // t == 1: only the i = 0 term survives

  // Terms t * x^i / i! with x = -log t, summed in log space.
  const double x = -log_t;
  const double log_x = std::log(x);
  const std::size_t n = p_values.size();
  std::vector<double> log_terms(n);
  double peak = -std::numeric_limits<double>::infinity();
  double log_factorial = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) log_factorial += std::log(static_cast<double>(i));
    log_terms[i] = log_t + static_cast<double>(i) * log_x - log_factorial;
    peak = std::max(peak, log_terms[i]);
  }
  double sum = 0.0;
  for (double lt : log_terms) sum += std::exp(lt - peak);
  const double f = std::exp(peak + std::log(sum));
  return std::clamp(f, std::numeric_limits<double>::min(), 1.0);
}

namespace {

DetectionResult apply_threshold(DetectionResult result, double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw ConfigError("epsilon must lie in (0, 1)");
  result.epsilon = epsilon;
  result.is_ood = result.fisher < epsilon;
  return result;
}

}  // namespace

DetectionResult score_window(const Window& window, const Predictor& model,
                             const CalibrationScoreSets& cal_sets,
                             const TransformSpec& spec, std::uint64_t master_seed) {
  cal_sets.validate();
  DetectionResult result;
  result.trace_id = window.trace_id;
  result.t = window.t;
  result.w = window.w;
  for (std::size_t k = 0; k < cal_sets.n(); ++k) {
    auto rng = SeedDeriver(master_seed)
                   .mix("detect")
                   .mix(window.trace_id)
                   .mix(window.t)
                   .mix(window.w)
                   .mix(k)
                   .stream();
    const TransformId g = sample_transform(spec, rng);
    const double alpha = ncm_score(model, window, g, rng);
    result.transforms_used.push_back(g);
    result.p_values.push_back(p_value(alpha, cal_sets.sets[k]));
  }
  result.fisher = fisher_value(result.p_values);
  return result;
}

DetectionResult detect(const Window& window, const Predictor& model,
                       const CalibrationScoreSets& cal_sets, const TransformSpec& spec,
                       double epsilon, std::uint64_t master_seed) {
  return apply_threshold(score_window(window, model, cal_sets, spec, master_seed),
                         epsilon);
}

DetectionResult detect_from_table(const Window& window, const ScoreTable& table,
                                  const CalibrationScoreSets& cal_sets, double epsilon) {
  cal_sets.validate();
  DetectionResult result;
  result.trace_id = window.trace_id;
  result.t = window.t;
  result.w = window.w;
  for (std::size_t k = 0; k < cal_sets.n(); ++k) {
    const double alpha = table.at(window.trace_id, window.t, window.w, k + 1);
    result.p_values.push_back(p_value(alpha, cal_sets.sets[k]));
  }
  result.fisher = fisher_value(result.p_values);
  return apply_threshold(std::move(result), epsilon);
}

std::string DetectionResult::to_json_line() const {
  nlohmann::json obj;
  obj["trace_id"] = trace_id;
  obj["t"] = t;
  obj["w"] = w;
  obj["p_values"] = p_values;
  obj["fisher_value"] = fisher;
  obj["epsilon"] = epsilon;
  obj["verdict"] = is_ood ? "ood" : "id";
  std::vector<std::string> names;
  names.reserve(transforms_used.size());
  for (TransformId g : transforms_used) names.emplace_back(to_string(g));
  obj["transforms"] = names;
  return obj.dump();
}

std::string CalibrationScoreSets::to_json() const {
  nlohmann::json obj;
  obj["mode"] = std::string(codit::to_string(mode));
  obj["n"] = n();
  obj["per_set_size"] = per_set_size;
  obj["sets"] = sets;
  obj["provenance"] = {{"split_hash", provenance.split_hash},
                       {"spec_hash", provenance.spec_hash},
                       {"seed", provenance.seed}};
  return obj.dump();
}

CalibrationScoreSets CalibrationScoreSets::from_json(const std::string& text) {
  nlohmann::json obj = nlohmann::json::parse(text, nullptr, false);
  if (obj.is_discarded()) throw DataError("calibration sets: bad JSON");
  CalibrationScoreSets out;
  try {
    out.mode = calibration_mode_from_string(obj.at("mode").get<std::string>());
    out.sets = obj.at("sets").get<std::vector<std::vector<double>>>();
    out.per_set_size = obj.at("per_set_size").get<std::size_t>();
    const auto& prov = obj.at("provenance");
    out.provenance.split_hash = prov.at("split_hash").get<std::string>();
    out.provenance.spec_hash = prov.at("spec_hash").get<std::string>();
    out.provenance.seed = prov.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("calibration sets: ") + e.what());
  }
  out.validate();
  return out;
}

}  // namespace codit
