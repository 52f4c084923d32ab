#include <cmath>

#include "codit/metrics.hpp"
#include "codit/rng.hpp"
#include "doctest.h"
#include "support/stat_oracles.hpp"

using namespace codit;

TEST_CASE("auroc on hand-built sets") {
  CHECK(auroc(std::vector<double>{0.9, 0.8}, std::vector<double>{0.1, 0.2}) == 1.0);
  CHECK(auroc(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5}) == 0.5);
  // pairs: (0.9,0.5)+ (0.9,0.1)+ (0.4,0.5)- (0.4,0.1)+ -> 3/4
  CHECK(auroc(std::vector<double>{0.9, 0.4}, std::vector<double>{0.5, 0.1}) == 0.75);
  CHECK_THROWS_AS(auroc(std::vector<double>{}, std::vector<double>{1.0}), DataError);
}

TEST_CASE("auroc equals the pairwise brute force exactly") {
  SeedStream rng(3);
  for (int round = 0; round < 20; ++round) {
    std::vector<double> id(1 + rng.uniform_below(200));
    std::vector<double> ood(1 + rng.uniform_below(200));
    for (double& v : id) v = std::round(rng.uniform() * 20.0) / 20.0;  // force ties
    for (double& v : ood) v = std::round(rng.uniform() * 20.0) / 20.0;
    CHECK(auroc(id, ood) == oracles::auroc_brute_force(id, ood));
  }
}

TEST_CASE("auroc complement identity") {
  SeedStream rng(7);
  std::vector<double> a(50), b(70);
  for (double& v : a) v = rng.normal();
  for (double& v : b) v = rng.normal(0.5, 1.0);
  CHECK(auroc(a, b) + auroc(b, a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tnr_at_tpr picks the largest feasible threshold") {
  SUBCASE("perfect separation") {
    const auto result =
        tnr_at_tpr(std::vector<double>{0.9, 0.8, 0.7}, std::vector<double>{0.1, 0.2});
    CHECK(result.tnr == 1.0);
    CHECK(result.achieved_tpr >= 0.95);
  }

  SUBCASE("20 id scores at target 0.95 keep at least 19 above threshold") {
    std::vector<double> id;
    for (int i = 0; i < 20; ++i) id.push_back(static_cast<double>(i));
    const auto result = tnr_at_tpr(id, std::vector<double>{0.5}, 0.95);
    CHECK(result.threshold == 1.0);  // the 19th largest of 0..19
    std::size_t passing = 0;
    for (double s : id)
      if (s >= result.threshold) ++passing;
    CHECK(passing >= 19);
  }

  SUBCASE("identical distributions: matches the exhaustive scan") {
    const std::vector<double> same{0.6, 0.6, 0.6, 0.6};
    const auto result = tnr_at_tpr(same, same, 0.95);
    const auto scan = oracles::tnr_scan(same, same, 0.95);
    CHECK(result.tnr == doctest::Approx(scan.tnr));
    CHECK(result.threshold == doctest::Approx(scan.threshold));
  }

  SUBCASE("random instances match the exhaustive scan") {
    SeedStream rng(11);
    for (int round = 0; round < 30; ++round) {
      std::vector<double> id(2 + rng.uniform_below(60));
      std::vector<double> ood(2 + rng.uniform_below(60));
      for (double& v : id) v = std::round(rng.uniform() * 10.0) / 10.0;
      for (double& v : ood) v = std::round(rng.uniform() * 10.0) / 10.0;
      for (double target : {0.9, 0.95}) {
        const auto result = tnr_at_tpr(id, ood, target);
        const auto scan = oracles::tnr_scan(id, ood, target);
        INFO("round ", round, " target ", target);
        CHECK(result.threshold == doctest::Approx(scan.threshold));
        CHECK(result.tnr == doctest::Approx(scan.tnr));
      }
    }
  }
}

TEST_CASE("metrics are invariant under strictly increasing relabeling") {
  SeedStream rng(13);
  std::vector<double> id(40), ood(40);
  for (double& v : id) v = rng.uniform();
  for (double& v : ood) v = rng.uniform() * 0.8;
  auto squash = [](double x) { return std::tanh(2.0 * x) + 3.0; };
  std::vector<double> id2(id), ood2(ood);
  for (double& v : id2) v = squash(v);
  for (double& v : ood2) v = squash(v);
  CHECK(auroc(id, ood) == doctest::Approx(auroc(id2, ood2)).epsilon(1e-12));
  CHECK(tnr_at_tpr(id, ood, 0.95).tnr ==
        doctest::Approx(tnr_at_tpr(id2, ood2, 0.95).tnr).epsilon(1e-12));
}

TEST_CASE("detection delay per the first-flag convention") {
  auto make_trace = [](std::vector<double> scores, std::size_t onset) {
    TraceWindowScores tws;
    tws.trace_id = "ood";
    tws.w = 4;
    tws.ood_onset = onset;
    for (std::size_t t = 0; t < scores.size(); ++t) tws.scores.emplace_back(t, scores[t]);
    return tws;
  };

  SUBCASE("flag exactly at the first OOD window: delay 0") {
    // w=4, onset=5 -> first OOD window starts at t=2
    const auto trace = make_trace({0.9, 0.9, 0.01, 0.01, 0.01}, 5);
    const auto result = detection_delay({trace}, 0.5);
    REQUIRE(result.mean_delay.has_value());
    CHECK(*result.mean_delay == 0.0);
    CHECK(result.detected == 1);
  }

  SUBCASE("flag 3 windows after the onset window: delay 3") {
    const auto trace = make_trace({0.9, 0.9, 0.9, 0.9, 0.9, 0.01, 0.9}, 5);
    const auto result = detection_delay({trace}, 0.5);
    REQUIRE(result.mean_delay.has_value());
    CHECK(*result.mean_delay == 3.0);
  }

  SUBCASE("never flagged: excluded from the mean, NA overall") {
    const auto trace = make_trace({0.9, 0.9, 0.9, 0.9}, 5);
    const auto result = detection_delay({trace}, 0.5);
    CHECK_FALSE(result.mean_delay.has_value());
    CHECK(result.undetected == 1);
    CHECK(result.detected == 0);
  }

  SUBCASE("pre-onset flags are ignored") {
    // flagged at t=0 (pre-onset) and at t=4 (2 windows past the first OOD one)
    const auto trace = make_trace({0.01, 0.9, 0.9, 0.9, 0.01}, 5);
    const auto result = detection_delay({trace}, 0.5);
    REQUIRE(result.mean_delay.has_value());
    CHECK(*result.mean_delay == 2.0);
  }

  SUBCASE("mixed detected and undetected traces") {
    const auto hit = make_trace({0.9, 0.9, 0.01}, 5);      // delay 0 at window 2
    const auto miss = make_trace({0.9, 0.9, 0.9, 0.9}, 5);
    const auto result = detection_delay({hit, miss}, 0.5);
    REQUIRE(result.mean_delay.has_value());
    CHECK(*result.mean_delay == 0.0);
    CHECK(result.detected == 1);
    CHECK(result.undetected == 1);
  }
}

TEST_CASE("metric report serializes NA delays") {
  MetricReport report;
  report.auroc = 0.9;
  report.mean_delay = std::nullopt;
  const auto json = report.to_json();
  CHECK(json.find("\"NA\"") != std::string::npos);
  report.mean_delay = 2.5;
  CHECK(report.to_json().find("2.5") != std::string::npos);
}
