#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "codit/features.hpp"
#include "codit/transforms.hpp"

namespace codit {

struct FeatureNormalizer {
  std::vector<double> mean;
  std::vector<double> scale;

  std::vector<double> apply(const FeatureVector& raw) const;
};

struct TrainConfig {
  std::size_t window_len = 16;
  std::size_t windows_per_trace = 64;
  int epochs = 50;
  double learning_rate = 0.05;
  int hidden = 32;
  int batch_size = 32;
  std::uint64_t seed = 0;
};

struct TrainMeta {
  std::uint64_t seed = 0;
  int epochs = 0;
  double learning_rate = 0.0;
  int batch_size = 0;
  std::size_t windows_per_trace = 0;
  double final_loss = 0.0;
  double final_accuracy = 0.0;
};

/// Single-hidden-layer tanh classifier over window features. Predicts which
/// temporal transformation was applied; its cross-entropy is the
/// non-conformity score.
struct Predictor {
  TransformSpec spec;
  std::size_t window_len = 0;
  Matrix hidden_weights;            // H x F
  std::vector<double> hidden_bias;  // H
  Matrix output_weights;            // C x H
  std::vector<double> output_bias;  // C
  FeatureNormalizer feature_norm;
  TraceNormalization trace_norm;
  TrainMeta meta;

  std::size_t feature_count() const { return hidden_weights.cols(); }
  std::size_t hidden_count() const { return hidden_weights.rows(); }
  std::size_t class_count() const { return output_weights.rows(); }

  std::vector<double> logits(const FeatureVector& raw) const;
  std::vector<double> log_softmax(const FeatureVector& raw) const;

  std::string to_json() const;
  static Predictor from_json(const std::string& text);
};

struct Gradients {
  Matrix hidden_weights;
  std::vector<double> hidden_bias;
  Matrix output_weights;
  std::vector<double> output_bias;

  explicit Gradients(const Predictor& model);
  void reset();
  void scale(double factor);
};

/// -log softmax(logits)[target].
double cross_entropy(const Predictor& model, const FeatureVector& raw,
                     std::size_t target);

/// Adds this sample's analytic gradients into `grads`; returns the sample loss.
double accumulate_gradients(const Predictor& model, const FeatureVector& raw,
                            std::size_t target, Gradients& grads);

/// Mini-batch gradient descent on the transformation-prediction cross-entropy.
/// Transform draws are resampled from Q every epoch. Deterministic in
/// config.seed. Per-epoch mean losses are appended to *epoch_losses when set.
Predictor train_predictor(const std::vector<Trace>& proper_training,
                          const TransformSpec& spec, const TrainConfig& config,
                          std::vector<double>* epoch_losses = nullptr);

/// The TTPE non-conformity score: cross-entropy between g and the model's
/// prediction on the transformed window. Non-negative.
double ncm_score(const Predictor& model, const Window& window, TransformId g,
                 SeedStream& rng);

}  // namespace codit
