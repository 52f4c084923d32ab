#include "codit/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <mutex>
#include <thread>

#include "codit/dataset.hpp"

namespace codit {

std::vector<DetectionResult> score_all(const std::vector<Window>& windows,
                                       const Predictor& model,
                                       const CalibrationScoreSets& cal_sets,
                                       const TransformSpec& spec, std::uint64_t seed,
                                       int workers) {
  std::vector<DetectionResult> results(windows.size());
  if (windows.empty()) return results;
  const int thread_count = std::clamp(workers, 1, 64);
  if (thread_count == 1) {
    for (std::size_t i = 0; i < windows.size(); ++i)
      results[i] = score_window(windows[i], model, cal_sets, spec, seed);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (std::size_t i = next.fetch_add(1); i < windows.size(); i = next.fetch_add(1))
        results[i] = score_window(windows[i], model, cal_sets, spec, seed);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < thread_count; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

MetricReport evaluate(const std::vector<Trace>& test_id,
                      const std::vector<Trace>& test_ood, const Predictor& model,
                      const CalibrationScoreSets& cal_sets, const TransformSpec& spec,
                      const EvalConfig& config) {
  if (test_id.empty() || test_ood.empty())
    throw DataError("evaluate: need both iD and OOD test traces");
  const auto id_traces = normalized(test_id, model.trace_norm);
  const auto ood_traces = normalized(test_ood, model.trace_norm);

  std::vector<double> positives;
  std::vector<double> negatives;

  for (const auto& trace : id_traces) {
    const auto windows = sliding_windows(trace, config.w, config.stride);
    for (const auto& r : score_all(windows, model, cal_sets, spec, config.seed,
                                   config.workers))
      positives.push_back(r.fisher);
  }

  std::vector<TraceWindowScores> delay_input;
  for (const auto& trace : ood_traces) {
    if (!trace.ood_onset)
      throw DataError("evaluate: OOD trace '" + trace.id + "' lacks ood_onset");
    const auto windows = sliding_windows(trace, config.w, config.stride);
    const auto results =
        score_all(windows, model, cal_sets, spec, config.seed, config.workers);
    TraceWindowScores tws;
    tws.trace_id = trace.id;
    tws.w = config.w;
    tws.ood_onset = *trace.ood_onset;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      tws.scores.emplace_back(windows[i].t, results[i].fisher);
      if (windows[i].t + config.w - 1 >= *trace.ood_onset)
        negatives.push_back(results[i].fisher);
      else
        positives.push_back(results[i].fisher);  // pre-onset windows count as iD
    }
    delay_input.push_back(std::move(tws));
  }
  if (negatives.empty())
    throw DataError("evaluate: no ground-truth OOD windows (traces too short?)");

  MetricReport report;
  report.auroc = auroc(positives, negatives);
  const auto tnr = tnr_at_tpr(positives, negatives, config.target_tpr);
  report.tnr = tnr.tnr;
  report.target_tpr = config.target_tpr;
  report.achieved_tpr = tnr.achieved_tpr;
  report.threshold = tnr.threshold;
  const auto delay = detection_delay(delay_input, tnr.threshold);
  report.mean_delay = delay.mean_delay;
  report.detected_traces = delay.detected;
  report.undetected_traces = delay.undetected;
  report.w = config.w;
  report.n = cal_sets.n();
  report.transform_count = spec.class_count();
  report.seed = config.seed;
  return report;
}

std::vector<double> FdrCurve::mean_rates() const {
  std::vector<double> means(epsilons.size(), 0.0);
  for (const auto& row : rates)
    for (std::size_t i = 0; i < row.size(); ++i) means[i] += row[i];
  for (double& m : means) m /= static_cast<double>(rates.size());
  return means;
}

std::string FdrCurve::to_csv() const {
  std::string out = "trial";
  char buf[64];
  for (double e : epsilons) {
    std::snprintf(buf, sizeof(buf), ",eps_%.6g", e);
    out += buf;
  }
  out += '\n';
  for (std::size_t trial = 0; trial < rates.size(); ++trial) {
    out += std::to_string(trial);
    for (double r : rates[trial]) {
      std::snprintf(buf, sizeof(buf), ",%.10g", r);
      out += buf;
    }
    out += '\n';
  }
  // quartiles per epsilon across trials
  auto quantile = [](std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  for (const auto& [name, q] : {std::pair<const char*, double>{"q1", 0.25},
                                {"median", 0.5},
                                {"q3", 0.75}}) {
    out += name;
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
      std::vector<double> column;
      column.reserve(rates.size());
      for (const auto& row : rates) column.push_back(row[i]);
      std::snprintf(buf, sizeof(buf), ",%.10g", quantile(column, q));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

FdrCurve fdr_sweep(const std::vector<Trace>& id_traces, const Predictor& model,
                   const TransformSpec& spec, const FdrConfig& config) {
  if (config.epsilons.empty()) throw ConfigError("fdr_sweep: empty epsilon grid");
  for (std::size_t i = 0; i < config.epsilons.size(); ++i) {
    const double e = config.epsilons[i];
    if (!(e > 0.0) || e > 1.0)
      throw ConfigError("fdr_sweep: epsilon must lie in (0, 1]");
    if (i > 0 && e <= config.epsilons[i - 1])
      throw ConfigError("fdr_sweep: epsilon grid must be strictly increasing");
  }
  if (config.trials < 1) throw ConfigError("fdr_sweep: trials must be >= 1");
  if (config.n_cal < 1 || config.n_cal >= id_traces.size())
    throw DataError("fdr_sweep: need n_cal in [1, traces), have " +
                    std::to_string(id_traces.size()) + " traces and n_cal=" +
                    std::to_string(config.n_cal));

  FdrCurve curve;
  curve.epsilons = config.epsilons;
  curve.rates.resize(config.trials);

  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    auto rng = SeedDeriver(config.seed).mix("fdr-trial").mix(trial).stream();
    std::vector<std::size_t> order(id_traces.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.uniform_below(i)]);

    std::vector<Trace> cal_traces, test_traces;
    for (std::size_t i = 0; i < order.size(); ++i)
      (i < config.n_cal ? cal_traces : test_traces).push_back(id_traces[order[i]]);

    const std::uint64_t cal_seed =
        SeedDeriver(config.seed).mix("fdr-cal").mix(trial).finish();
    const auto cal_sets = build_calibration_sets(cal_traces, model, spec, config.n,
                                                 config.w, config.mode, cal_seed);

    const std::uint64_t score_seed =
        SeedDeriver(config.seed).mix("fdr-score").mix(trial).finish();
    const auto test_norm = normalized(test_traces, model.trace_norm);
    std::vector<double> fisher_values;
    for (const auto& trace : test_norm) {
      const auto windows = sliding_windows(trace, config.w, 1);
      for (const auto& r :
           score_all(windows, model, cal_sets, spec, score_seed, config.workers))
        fisher_values.push_back(r.fisher);
    }
    if (fisher_values.empty())
      throw DataError("fdr_sweep: test traces yielded no windows");

    curve.rates[trial].reserve(config.epsilons.size());
    for (double eps : config.epsilons) {
      std::size_t flagged = 0;
      for (double f : fisher_values)
        if (f < eps) ++flagged;
      curve.rates[trial].push_back(static_cast<double>(flagged) /
                                   static_cast<double>(fisher_values.size()));
    }
  }
  return curve;
}

void dump_score_distributions(const std::vector<Trace>& id_traces,
                              const std::vector<Trace>& ood_traces,
                              const Predictor& model, const TransformSpec& spec,
                              std::size_t w, std::uint64_t seed, std::ostream& out) {
  out << "transform,cohort,score\n";
  char buf[64];
  auto emit = [&](const std::vector<Trace>& traces, bool ood_cohort) {
    const auto norm = normalized(traces, model.trace_norm);
    for (const auto& trace : norm) {
      for (const auto& window : sliding_windows(trace, w, 1)) {
        if (ood_cohort) {
          // OOD cohort keeps only windows containing ground-truth OOD steps.
          if (!trace.ood_onset || window.t + w - 1 < *trace.ood_onset) continue;
        }
        for (std::size_t c = 0; c < spec.members.size(); ++c) {
          auto rng = SeedDeriver(seed)
                         .mix("dump")
                         .mix(window.trace_id)
                         .mix(window.t)
                         .mix(window.w)
                         .mix(c)
                         .stream();
          const double score = ncm_score(model, window, spec.members[c], rng);
          std::snprintf(buf, sizeof(buf), "%.10g", score);
          out << to_string(spec.members[c]) << ',' << (ood_cohort ? "ood" : "id") << ','
              << buf << '\n';
        }
      }
    }
  };
  emit(id_traces, false);
  emit(ood_traces, true);
}

}  // namespace codit
