#include "codit/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace codit {

double auroc(std::span<const double> id_scores, std::span<const double> ood_scores) {
  if (id_scores.empty() || ood_scores.empty())
    throw DataError("auroc: empty score set");
  std::vector<double> ood(ood_scores.begin(), ood_scores.end());
  std::sort(ood.begin(), ood.end());
  double wins = 0.0;
  for (double s : id_scores) {
    const auto lo = std::lower_bound(ood.begin(), ood.end(), s);
    const auto hi = std::upper_bound(ood.begin(), ood.end(), s);
    wins += static_cast<double>(lo - ood.begin());   // strictly below
    wins += 0.5 * static_cast<double>(hi - lo);      // ties
  }
  return wins / (static_cast<double>(id_scores.size()) *
                 static_cast<double>(ood.size()));
}

TnrResult tnr_at_tpr(std::span<const double> id_scores,
                     std::span<const double> ood_scores, double target_tpr) {
  if (id_scores.empty() || ood_scores.empty())
    throw DataError("tnr_at_tpr: empty score set");
  if (!(target_tpr > 0.0) || target_tpr > 1.0)
    throw ConfigError("tnr_at_tpr: target must lie in (0, 1]");

  // Largest theta keeping at least ceil(target * N) id scores at or above it:
  // the k-th largest id score.
  std::vector<double> id_sorted(id_scores.begin(), id_scores.end());
  std::sort(id_sorted.begin(), id_sorted.end(), std::greater<>());
  const auto need = static_cast<std::size_t>(
      std::ceil(target_tpr * static_cast<double>(id_sorted.size()) - 1e-12));
  const double theta = id_sorted[need - 1];

  TnrResult result;
  result.threshold = theta;
  std::size_t below = 0;
  for (double s : ood_scores)
    if (s < theta) ++below;
  result.tnr = static_cast<double>(below) / static_cast<double>(ood_scores.size());
  std::size_t at_or_above = 0;
  for (double s : id_scores)
    if (s >= theta) ++at_or_above;
  result.achieved_tpr =
      static_cast<double>(at_or_above) / static_cast<double>(id_scores.size());
  return result;
}

DelayResult detection_delay(const std::vector<TraceWindowScores>& traces,
                            double threshold) {
  DelayResult result;
  double total = 0.0;
  for (const auto& trace : traces) {
    // First ground-truth OOD window: the first containing any OOD step.
    std::size_t first_ood = trace.scores.size();
    for (std::size_t i = 0; i < trace.scores.size(); ++i)
      if (trace.scores[i].first + trace.w - 1 >= trace.ood_onset) {
        first_ood = i;
        break;
      }
    if (first_ood == trace.scores.size()) {
      ++result.undetected;  // no window reaches the onset
      continue;
    }
    bool found = false;
    for (std::size_t i = first_ood; i < trace.scores.size(); ++i)
      if (trace.scores[i].second < threshold) {
        total += static_cast<double>(i - first_ood);
        found = true;
        break;
      }
    if (found)
      ++result.detected;
    else
      ++result.undetected;
  }
  if (result.detected > 0)
    result.mean_delay = total / static_cast<double>(result.detected);
  return result;
}

std::string MetricReport::to_json() const {
  nlohmann::json obj;
  obj["auroc"] = auroc;
  obj["tnr"] = tnr;
  obj["target_tpr"] = target_tpr;
  obj["achieved_tpr"] = achieved_tpr;
  obj["threshold"] = threshold;
  if (mean_delay)
    obj["mean_delay"] = *mean_delay;
  else
    obj["mean_delay"] = "NA";
  obj["detected_traces"] = detected_traces;
  obj["undetected_traces"] = undetected_traces;
  obj["config"] = {{"w", w}, {"n", n}, {"transform_count", transform_count}, {"seed", seed}};
  return obj.dump(2);
}

}  // namespace codit
