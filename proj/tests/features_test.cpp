#include <cmath>

#include "codit/features.hpp"
#include "codit/transforms.hpp"
#include "doctest.h"

using namespace codit;

namespace {

Window window_from_column(const std::vector<double>& values) {
  Window window;
  window.trace_id = "t";
  window.w = values.size();
  window.data = Matrix(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) window.data(i, 0) = values[i];
  return window;
}

}  // namespace

TEST_CASE("feature dimension is six per summarized column") {
  CHECK(feature_dim(1) == 6);
  CHECK(feature_dim(3) == 18);
  CHECK(feature_dim(8) == 48);
  CHECK(feature_dim(20) == 48);  // columns beyond eight are not summarized
}

TEST_CASE("constant window conventions") {
  const auto feats = extract_features(window_from_column({3, 3, 3, 3, 3, 3}));
  REQUIRE(feats.size() == 6);
  CHECK(feats.values[0] == 0.0);  // autocorrelation of a constant: 0 by convention
  CHECK(feats.values[1] == 0.0);  // mean diff
  CHECK(feats.values[2] == 0.0);  // var diff
  CHECK(feats.values[3] == 0.0);  // mean |diff|
  CHECK(feats.values[4] == 1.0);  // every adjacent pair repeats
  CHECK(feats.values[5] == 0.5);  // no difference energy anywhere
}

TEST_CASE("reverse leaves symmetric statistics unchanged") {
  const auto window =
      window_from_column({0.3, 1.9, -0.8, 2.6, -1.7, 0.02, 1.1, -2.4});
  SeedStream rng(1);
  const auto reversed = apply(TransformId::kReverse, window, rng);
  const auto f = extract_features(window);
  const auto fr = extract_features(reversed);
  CHECK(f.values[0] == doctest::Approx(fr.values[0]).epsilon(1e-12));  // lag-1 autocorr
  CHECK(f.values[3] == doctest::Approx(fr.values[3]).epsilon(1e-12));  // mean |diff|
  // the signed mean difference flips, which is what makes reverse learnable
  CHECK(f.values[1] == doctest::Approx(-fr.values[1]).epsilon(1e-12));
}

TEST_CASE("alternating sequence has lag-1 autocorrelation -1") {
  std::vector<double> alternating;
  for (int i = 0; i < 16; ++i) alternating.push_back(i % 2 == 0 ? 1.0 : -1.0);
  const auto feats = extract_features(window_from_column(alternating));
  // shifted copy is the exact negative of the original: correlation -1
  CHECK(std::abs(feats.values[0] - (-1.0)) < 1e-9);
}

TEST_CASE("features are finite on adversarial inputs") {
  for (const auto& values :
       {std::vector<double>{0, 0}, std::vector<double>{1e15, -1e15, 1e15, -1e15},
        std::vector<double>{1e-300, 2e-300, 3e-300, 4e-300}}) {
    const auto feats = extract_features(window_from_column(values));
    for (double v : feats.values) CHECK(std::isfinite(v));
  }
}

TEST_CASE("speed2x leaves its repeated-adjacent signature") {
  const auto window = window_from_column({0.4, 1.7, -0.9, 2.2, 0.1, -1.3});
  SeedStream rng(2);
  const auto transformed = apply(TransformId::kSpeed2x, window, rng);
  const auto feats = extract_features(transformed);
  // rows come in identical pairs: at least half the adjacent steps repeat
  CHECK(feats.values[4] >= 0.5);
  CHECK(extract_features(window).values[4] == 0.0);
}
