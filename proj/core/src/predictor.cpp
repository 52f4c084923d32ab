#include "codit/predictor.hpp"

#include "codit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace codit {

namespace {

using nlohmann::json;

std::vector<double> log_softmax_of(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - peak);
  const double lse = peak + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

struct ForwardPass {
  std::vector<double> input;       // normalized features
  std::vector<double> hidden;      // tanh activations
  std::vector<double> log_probs;
};

ForwardPass forward(const Predictor& model, const FeatureVector& raw) {
  ForwardPass pass;
  pass.input = model.feature_norm.apply(raw);
  const std::size_t h_count = model.hidden_count();
  const std::size_t f_count = model.feature_count();
  pass.hidden.resize(h_count);
  for (std::size_t h = 0; h < h_count; ++h) {
    double z = model.hidden_bias[h];
    for (std::size_t f = 0; f < f_count; ++f)
      z += model.hidden_weights(h, f) * pass.input[f];
    pass.hidden[h] = std::tanh(z);
  }
  std::vector<double> logits(model.class_count());
  for (std::size_t c = 0; c < model.class_count(); ++c) {
    double z = model.output_bias[c];
    for (std::size_t h = 0; h < h_count; ++h)
      z += model.output_weights(c, h) * pass.hidden[h];
    logits[c] = z;
  }
  pass.log_probs = log_softmax_of(logits);
  return pass;
}

json matrix_to_json(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    rows[i].assign(r.begin(), r.end());
  }
  return json(rows);
}

Matrix matrix_from_json(const json& obj) {
  return Matrix::from_rows(obj.get<std::vector<std::vector<double>>>());
}

}  // namespace

std::vector<double> FeatureNormalizer::apply(const FeatureVector& raw) const {
  if (raw.size() != mean.size())
    throw DataError("feature dimension mismatch: got " + std::to_string(raw.size()) +
                    ", model expects " + std::to_string(mean.size()));
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    out[i] = (raw.values[i] - mean[i]) / scale[i];
  return out;
}

std::vector<double> Predictor::logits(const FeatureVector& raw) const {
  const auto x = feature_norm.apply(raw);
  std::vector<double> hidden(hidden_count());
  for (std::size_t h = 0; h < hidden_count(); ++h) {
    double z = hidden_bias[h];
    for (std::size_t f = 0; f < feature_count(); ++f) z += hidden_weights(h, f) * x[f];
    hidden[h] = std::tanh(z);
  }
  std::vector<double> out(class_count());
  for (std::size_t c = 0; c < class_count(); ++c) {
    double z = output_bias[c];
    for (std::size_t h = 0; h < hidden_count(); ++h) z += output_weights(c, h) * hidden[h];
    out[c] = z;
  }
  return out;
}

std::vector<double> Predictor::log_softmax(const FeatureVector& raw) const {
  const auto z = logits(raw);
  return log_softmax_of(z);
}

Gradients::Gradients(const Predictor& model)
    : hidden_weights(model.hidden_count(), model.feature_count()),
      hidden_bias(model.hidden_count(), 0.0),
      output_weights(model.class_count(), model.hidden_count()),
      output_bias(model.class_count(), 0.0) {}

void Gradients::reset() {
  std::fill(hidden_weights.data().begin(), hidden_weights.data().end(), 0.0);
  std::fill(hidden_bias.begin(), hidden_bias.end(), 0.0);
  std::fill(output_weights.data().begin(), output_weights.data().end(), 0.0);
  std::fill(output_bias.begin(), output_bias.end(), 0.0);
}

void Gradients::scale(double factor) {
  for (double& v : hidden_weights.data()) v *= factor;
  for (double& v : hidden_bias) v *= factor;
  for (double& v : output_weights.data()) v *= factor;
  for (double& v : output_bias) v *= factor;
}

double cross_entropy(const Predictor& model, const FeatureVector& raw,
                     std::size_t target) {
  return -forward(model, raw).log_probs[target];
}

double accumulate_gradients(const Predictor& model, const FeatureVector& raw,
                            std::size_t target, Gradients& grads) {
  const ForwardPass pass = forward(model, raw);
  const std::size_t classes = model.class_count();
  const std::size_t h_count = model.hidden_count();
  const std::size_t f_count = model.feature_count();

  // dL/dz2 = softmax - onehot
  std::vector<double> dz2(classes);
  for (std::size_t c = 0; c < classes; ++c)
    dz2[c] = std::exp(pass.log_probs[c]) - (c == target ? 1.0 : 0.0);

  std::vector<double> dh(h_count, 0.0);
  for (std::size_t c = 0; c < classes; ++c) {
    grads.output_bias[c] += dz2[c];
    for (std::size_t h = 0; h < h_count; ++h) {
      grads.output_weights(c, h) += dz2[c] * pass.hidden[h];
      dh[h] += model.output_weights(c, h) * dz2[c];
    }
  }
  for (std::size_t h = 0; h < h_count; ++h) {
    const double dz1 = dh[h] * (1.0 - pass.hidden[h] * pass.hidden[h]);
    grads.hidden_bias[h] += dz1;
    for (std::size_t f = 0; f < f_count; ++f)
      grads.hidden_weights(h, f) += dz1 * pass.input[f];
  }
  return -pass.log_probs[target];
}

Predictor train_predictor(const std::vector<Trace>& proper_training,
                          const TransformSpec& spec, const TrainConfig& config,
                          std::vector<double>* epoch_losses) {
  spec.validate(config.window_len);
  if (proper_training.empty()) throw DataError("train_predictor: no training traces");
  for (const auto& trace : proper_training)
    if (trace.length() < config.window_len)
      throw DataError("training trace '" + trace.id + "' shorter than w=" +
                      std::to_string(config.window_len));
  if (config.hidden < 1 || config.batch_size < 1 || config.epochs < 0 ||
      config.windows_per_trace < 1)
    throw ConfigError("train_predictor: bad hyperparameters");

  const auto trace_norm = fit_trace_normalization(proper_training);
  const auto training = normalized(proper_training, trace_norm);

  // Fixed pool of base windows, uniform starts per trace.
  std::vector<Window> windows;
  for (std::size_t i = 0; i < training.size(); ++i) {
    auto rng = SeedDeriver(config.seed).mix("train-windows").mix(training[i].id).stream();
    for (std::size_t k = 0; k < config.windows_per_trace; ++k)
      windows.push_back(sample_calibration_window(training[i], config.window_len, rng));
  }

  Predictor model;
  model.spec = spec;
  model.window_len = config.window_len;
  model.trace_norm = trace_norm;

  const std::size_t f_count = feature_dim(training.front().dim());
  const std::size_t h_count = static_cast<std::size_t>(config.hidden);
  const std::size_t classes = spec.class_count();

  // Feature normalizer over every (window, member) pair; no sampling involved.
  {
    auto rng = SeedDeriver(config.seed).mix("feature-norm").stream();
    std::vector<double> mean(f_count, 0.0), sq(f_count, 0.0);
    std::size_t count = 0;
    for (const auto& window : windows)
      for (TransformId g : spec.members) {
        const auto feats = extract_features(apply(g, window, rng, spec.lowpass_width));
        for (std::size_t f = 0; f < f_count; ++f) {
          mean[f] += feats.values[f];
          sq[f] += feats.values[f] * feats.values[f];
        }
        ++count;
      }
    model.feature_norm.mean.resize(f_count);
    model.feature_norm.scale.resize(f_count);
    for (std::size_t f = 0; f < f_count; ++f) {
      model.feature_norm.mean[f] = mean[f] / static_cast<double>(count);
      const double var = sq[f] / static_cast<double>(count) -
                         model.feature_norm.mean[f] * model.feature_norm.mean[f];
      model.feature_norm.scale[f] = std::max(std::sqrt(std::max(var, 0.0)), 1e-8);
    }
  }

  // uniform(-s, s) with s = 1/sqrt(fan-in); biases start at zero.
  {
    auto rng = SeedDeriver(config.seed).mix("init").stream();
    model.hidden_weights = Matrix(h_count, f_count);
    model.hidden_bias.assign(h_count, 0.0);
    model.output_weights = Matrix(classes, h_count);
    model.output_bias.assign(classes, 0.0);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(f_count));
    for (double& v : model.hidden_weights.data()) v = rng.uniform(-s1, s1);
    const double s2 = 1.0 / std::sqrt(static_cast<double>(h_count));
    for (double& v : model.output_weights.data()) v = rng.uniform(-s2, s2);
  }

  model.meta.seed = config.seed;
  model.meta.epochs = config.epochs;
  model.meta.learning_rate = config.learning_rate;
  model.meta.batch_size = config.batch_size;
  model.meta.windows_per_trace = config.windows_per_trace;

  Gradients grads(model);
  std::vector<std::size_t> order(windows.size());
  std::vector<std::size_t> targets(windows.size());
  std::vector<FeatureVector> feats(windows.size());
  double epoch_loss = 0.0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    auto rng = SeedDeriver(config.seed).mix("epoch").mix(static_cast<std::uint64_t>(epoch)).stream();
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const TransformId g = sample_transform(spec, rng);
      targets[i] = spec.class_index(g);
      feats[i] = extract_features(apply(g, windows[i], rng, spec.lowpass_width));
    }
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.uniform_below(i)]);

    epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(begin + static_cast<std::size_t>(config.batch_size), order.size());
      grads.reset();
      double batch_loss = 0.0;
      for (std::size_t i = begin; i < end; ++i)
        batch_loss += accumulate_gradients(model, feats[order[i]], targets[order[i]], grads);
      const double inv = 1.0 / static_cast<double>(end - begin);
      epoch_loss += batch_loss;
      if (!std::isfinite(batch_loss))
        throw NumericalError("training diverged at epoch " + std::to_string(epoch) +
                             " (loss not finite; lower the learning rate)");
      grads.scale(inv * config.learning_rate);
      for (std::size_t i = 0; i < model.hidden_weights.data().size(); ++i)
        model.hidden_weights.data()[i] -= grads.hidden_weights.data()[i];
      for (std::size_t i = 0; i < model.hidden_bias.size(); ++i)
        model.hidden_bias[i] -= grads.hidden_bias[i];
      for (std::size_t i = 0; i < model.output_weights.data().size(); ++i)
        model.output_weights.data()[i] -= grads.output_weights.data()[i];
      for (std::size_t i = 0; i < model.output_bias.size(); ++i)
        model.output_bias[i] -= grads.output_bias[i];
    }
    epoch_loss /= static_cast<double>(windows.size());
    if (epoch_losses) epoch_losses->push_back(epoch_loss);
  }

  // Final loss/accuracy on a fresh resample of transform draws.
  {
    auto rng = SeedDeriver(config.seed).mix("final-eval").stream();
    double loss = 0.0;
    std::size_t correct = 0;
    for (const auto& window : windows) {
      const TransformId g = sample_transform(spec, rng);
      const std::size_t target = spec.class_index(g);
      const auto f = extract_features(apply(g, window, rng, spec.lowpass_width));
      const auto log_probs = model.log_softmax(f);
      loss += -log_probs[target];
      const std::size_t argmax =
          std::max_element(log_probs.begin(), log_probs.end()) - log_probs.begin();
      if (argmax == target) ++correct;
    }
    model.meta.final_loss = loss / static_cast<double>(windows.size());
    model.meta.final_accuracy =
        static_cast<double>(correct) / static_cast<double>(windows.size());
  }
  return model;
}

double ncm_score(const Predictor& model, const Window& window, TransformId g,
                 SeedStream& rng) {
  if (window.w != model.window_len)
    throw DataError("window length " + std::to_string(window.w) +
                    " does not match model w=" + std::to_string(model.window_len));
  const auto transformed = apply(g, window, rng, model.spec.lowpass_width);
  const auto feats = extract_features(transformed);
  const double score = cross_entropy(model, feats, model.spec.class_index(g));
  if (!std::isfinite(score))
    throw NumericalError("non-finite non-conformity score for window " + window.key());
  return std::max(score, 0.0);
}

std::string Predictor::to_json() const {
  json obj;
  obj["spec"] = json::parse(spec.to_json());
  obj["window_len"] = window_len;
  obj["hidden_weights"] = matrix_to_json(hidden_weights);
  obj["hidden_bias"] = hidden_bias;
  obj["output_weights"] = matrix_to_json(output_weights);
  obj["output_bias"] = output_bias;
  obj["feature_normalizer"] = {{"mean", feature_norm.mean}, {"scale", feature_norm.scale}};
  obj["trace_normalizer"] = {{"mean", trace_norm.mean}, {"scale", trace_norm.scale}};
  obj["train_meta"] = {{"seed", meta.seed},
                       {"epochs", meta.epochs},
                       {"learning_rate", meta.learning_rate},
                       {"batch_size", meta.batch_size},
                       {"windows_per_trace", meta.windows_per_trace},
                       {"final_loss", meta.final_loss},
                       {"final_accuracy", meta.final_accuracy}};
  return obj.dump(2);
}

Predictor Predictor::from_json(const std::string& text) {
  json obj = json::parse(text, nullptr, false);
  if (obj.is_discarded()) throw DataError("predictor: bad JSON");
  Predictor model;
  try {
    model.spec = TransformSpec::from_json(obj.at("spec").dump());
    model.window_len = obj.at("window_len").get<std::size_t>();
    model.hidden_weights = matrix_from_json(obj.at("hidden_weights"));
    model.hidden_bias = obj.at("hidden_bias").get<std::vector<double>>();
    model.output_weights = matrix_from_json(obj.at("output_weights"));
    model.output_bias = obj.at("output_bias").get<std::vector<double>>();
    model.feature_norm.mean = obj.at("feature_normalizer").at("mean").get<std::vector<double>>();
    model.feature_norm.scale = obj.at("feature_normalizer").at("scale").get<std::vector<double>>();
    model.trace_norm.mean = obj.at("trace_normalizer").at("mean").get<std::vector<double>>();
    model.trace_norm.scale = obj.at("trace_normalizer").at("scale").get<std::vector<double>>();
    const auto& meta = obj.at("train_meta");
    model.meta.seed = meta.at("seed").get<std::uint64_t>();
    model.meta.epochs = meta.at("epochs").get<int>();
    model.meta.learning_rate = meta.at("learning_rate").get<double>();
    model.meta.batch_size = meta.at("batch_size").get<int>();
    model.meta.windows_per_trace = meta.at("windows_per_trace").get<std::size_t>();
    model.meta.final_loss = meta.at("final_loss").get<double>();
    model.meta.final_accuracy = meta.at("final_accuracy").get<double>();
  } catch (const json::exception& e) {
    throw DataError(std::string("predictor: ") + e.what());
  }
  if (model.class_count() != model.spec.class_count())
    throw DataError("predictor: class count does not match transform set");
  for (const auto& m : {model.hidden_weights.data(), model.output_weights.data()})
    for (double v : m)
      if (!std::isfinite(v)) throw DataError("predictor: non-finite parameter");
  return model;
}

}  // namespace codit
