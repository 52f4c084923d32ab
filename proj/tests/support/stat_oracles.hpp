#pragma once

// Independent oracles for statistical assertions. These deliberately avoid
// the library's own code paths: the chi-square tail comes from boost::math,
// AUROC from the O(N^2) pairwise definition, TNR from an exhaustive
// threshold scan.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace oracles {

/// P(chi2_dof >= x).
inline double chi2_survival(double dof, double x) {
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, x));
}

inline double chi2_critical(double dof, double significance) {
  boost::math::chi_squared dist(dof);
  return boost::math::quantile(boost::math::complement(dist, significance));
}

/// Fisher's combined p-value via the chi-square tail at -2 sum log p.
inline double fisher_via_chi2(std::span<const double> p_values) {
  double stat = 0.0;
  for (double p : p_values) stat += -2.0 * std::log(p);
  return chi2_survival(2.0 * static_cast<double>(p_values.size()), stat);
}

/// Pairwise AUROC: wins + half-ties over all (id, ood) pairs.
inline double auroc_brute_force(std::span<const double> id_scores,
                                std::span<const double> ood_scores) {
  double wins = 0.0;
  for (double a : id_scores)
    for (double b : ood_scores) {
      if (a > b)
        wins += 1.0;
      else if (a == b)
        wins += 0.5;
    }
  return wins / (static_cast<double>(id_scores.size()) *
                 static_cast<double>(ood_scores.size()));
}

struct TnrScan {
  double tnr = -1.0;
  double threshold = 0.0;
};

/// Exhaustive scan over candidate thresholds (all observed scores): the
/// largest theta with TPR(theta) >= target, reporting its TNR.
inline TnrScan tnr_scan(std::span<const double> id_scores,
                        std::span<const double> ood_scores, double target_tpr) {
  std::vector<double> candidates(id_scores.begin(), id_scores.end());
  candidates.insert(candidates.end(), ood_scores.begin(), ood_scores.end());
  std::sort(candidates.begin(), candidates.end());
  TnrScan best;
  bool found = false;
  for (double theta : candidates) {
    std::size_t tp = 0;
    for (double s : id_scores)
      if (s >= theta) ++tp;
    const double tpr = static_cast<double>(tp) / static_cast<double>(id_scores.size());
    if (tpr + 1e-12 < target_tpr) continue;
    if (!found || theta > best.threshold) {
      std::size_t tn = 0;
      for (double s : ood_scores)
        if (s < theta) ++tn;
      best.threshold = theta;
      best.tnr = static_cast<double>(tn) / static_cast<double>(ood_scores.size());
      found = true;
    }
  }
  return best;
}

/// One-sample KS distance of samples supported on {1/(C+1), ..., 1} against
/// the discrete uniform on that grid.
inline double ks_distance_discrete_uniform(std::span<const double> samples,
                                           std::size_t c_plus_one) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t k = 1; k <= c_plus_one; ++k) {
    const double value = static_cast<double>(k) / static_cast<double>(c_plus_one);
    const auto below = std::upper_bound(sorted.begin(), sorted.end(), value + 1e-15) -
                       sorted.begin();
    const double emp = static_cast<double>(below) / n;
    const double theory = static_cast<double>(k) / static_cast<double>(c_plus_one);
    d = std::max(d, std::abs(emp - theory));
  }
  return d;
}

/// Asymptotic one-sample KS critical value; conservative for discrete
/// distributions.
inline double ks_critical(std::size_t n_samples, double significance) {
  const double c = std::sqrt(-0.5 * std::log(significance / 2.0));
  return c / std::sqrt(static_cast<double>(n_samples));
}

/// Two-sample KS distance.
inline double ks_distance_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(a.size()) -
                             static_cast<double>(j) / static_cast<double>(b.size())));
  }
  return d;
}

inline double ks_critical_two_sample(std::size_t n, std::size_t m, double significance) {
  const double c = std::sqrt(-0.5 * std::log(significance / 2.0));
  return c * std::sqrt(static_cast<double>(n + m) /
                       (static_cast<double>(n) * static_cast<double>(m)));
}

}  // namespace oracles
