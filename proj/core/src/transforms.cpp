#include "codit/transforms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

#include "json.hpp"

namespace codit {

namespace {

constexpr std::array<std::string_view, kTransformVariantCount> kNames = {
    "identity", "speed2x", "shuffle",  "reverse", "periodic",
    "highpass", "lowpass", "highlow", "lowhigh"};

bool needs_even_length(TransformId id) {
  return id == TransformId::kSpeed2x || id == TransformId::kPeriodic;
}

void high_pass_column(const Matrix& in, Matrix& out, std::size_t j) {
  out(0, j) = 0.0;
  for (std::size_t i = 1; i < in.rows(); ++i) out(i, j) = in(i, j) - in(i - 1, j);
}

void low_pass_column(const Matrix& in, Matrix& out, std::size_t j, int width) {
  const auto last = static_cast<std::ptrdiff_t>(in.rows()) - 1;
  const int half = width / 2;
  for (std::ptrdiff_t i = 0; i <= last; ++i) {
    double acc = 0.0;
    for (int k = -half; k <= half; ++k) {
      const auto idx = std::clamp<std::ptrdiff_t>(i + k, 0, last);  // edge replication
      acc += in(static_cast<std::size_t>(idx), j);
    }
    out(static_cast<std::size_t>(i), j) = acc / width;
  }
}

}  // namespace

std::string_view to_string(TransformId id) {
  return kNames[static_cast<std::size_t>(id)];
}

std::optional<TransformId> transform_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return static_cast<TransformId>(i);
  return std::nullopt;
}

TransformSpec TransformSpec::uniform(std::vector<TransformId> members) {
  TransformSpec spec;
  spec.weights.assign(members.size(), 1.0 / static_cast<double>(members.size()));
  spec.members = std::move(members);
  return spec;
}

void TransformSpec::validate(std::size_t window_len) const {
  if (members.empty()) throw ConfigError("transform set is empty");
  std::set<TransformId> seen(members.begin(), members.end());
  if (seen.size() != members.size())
    throw ConfigError("transform set has duplicate members");
  if (!seen.count(TransformId::kIdentity))
    throw ConfigError("transform set must contain identity");
  if (weights.size() != members.size())
    throw ConfigError("weights length does not match member count");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("negative transform weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ConfigError("transform weights must sum to 1");
  if (lowpass_width < 1 || lowpass_width % 2 == 0)
    throw ConfigError("lowpass_width must be a positive odd integer");
  if (window_len != 0 && window_len % 2 != 0)
    for (TransformId id : members)
      if (needs_even_length(id))
        throw ConfigError(std::string(to_string(id)) + " requires even window length, got " +
                          std::to_string(window_len));
}

std::size_t TransformSpec::class_index(TransformId g) const {
  for (std::size_t i = 0; i < members.size(); ++i)
    if (members[i] == g) return i;
  throw ConfigError(std::string("transform ") + std::string(to_string(g)) +
                    " not in the configured set");
}

std::string TransformSpec::to_json() const {
  nlohmann::json obj;
  std::vector<std::string> names;
  names.reserve(members.size());
  for (TransformId id : members) names.emplace_back(to_string(id));
  obj["members"] = names;
  obj["weights"] = weights;
  obj["lowpass_width"] = lowpass_width;
  return obj.dump();
}

TransformSpec TransformSpec::from_json(const std::string& text) {
  nlohmann::json obj = nlohmann::json::parse(text, nullptr, false);
  if (obj.is_discarded()) throw ConfigError("transform spec: bad JSON");
  TransformSpec spec;
  try {
    for (const auto& name : obj.at("members")) {
      auto id = transform_from_string(name.get<std::string>());
      if (!id) throw ConfigError("unknown transform '" + name.get<std::string>() + "'");
      spec.members.push_back(*id);
    }
    spec.weights = obj.at("weights").get<std::vector<double>>();
    spec.lowpass_width = obj.value("lowpass_width", 3);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("transform spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

TransformId sample_transform(const TransformSpec& spec, SeedStream& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.members.size(); ++i) {
    acc += spec.weights[i];
    if (u < acc) return spec.members[i];
  }
  return spec.members.back();  // u landed in the rounding gap at 1.0
}

Window apply(TransformId g, const Window& window, SeedStream& rng, int lowpass_width) {
  const Matrix& in = window.data;
  const std::size_t w = in.rows();
  const std::size_t d = in.cols();
  Window out = window;
  Matrix& result = out.data;

  switch (g) {
    case TransformId::kIdentity:
      break;

    case TransformId::kReverse:
      for (std::size_t i = 0; i < w; ++i)
        for (std::size_t j = 0; j < d; ++j) result(i, j) = in(w - 1 - i, j);
      break;

    case TransformId::kPeriodic: {
      if (w % 2 != 0)
        throw ConfigError("periodic requires even window length");
      const std::size_t half = (w + 1) / 2;
      for (std::size_t i = half; i < w; ++i)
        for (std::size_t j = 0; j < d; ++j)
          result(i, j) = in(w - 1 - (i - half), j);
      break;
    }

    case TransformId::kShuffle: {
      std::vector<std::size_t> perm(w);
      bool is_identity = true;
      do {
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = w; i > 1; --i)
          std::swap(perm[i - 1], perm[rng.uniform_below(i)]);
        is_identity = true;
        for (std::size_t i = 0; i < w; ++i)
          if (perm[i] != i) {
            is_identity = false;
            break;
          }
      } while (is_identity);  // identity permutation would collide with kIdentity
      for (std::size_t i = 0; i < w; ++i)
        for (std::size_t j = 0; j < d; ++j) result(i, j) = in(perm[i], j);
      break;
    }

    case TransformId::kSpeed2x: {
      if (w % 2 != 0)
        throw ConfigError("speed2x requires even window length");
      // Even-index rows, each doubled: the shape-stable 2x-speed signature.
      for (std::size_t i = 0; i < w / 2; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          result(2 * i, j) = in(2 * i, j);
          result(2 * i + 1, j) = in(2 * i, j);
        }
      break;
    }

    case TransformId::kHighPass:
      for (std::size_t j = 0; j < d; ++j) high_pass_column(in, result, j);
      break;

    case TransformId::kLowPass:
      for (std::size_t j = 0; j < d; ++j) low_pass_column(in, result, j, lowpass_width);
      break;

    case TransformId::kHighLow: {
      const std::size_t split = (d + 1) / 2;
      for (std::size_t j = 0; j < split; ++j) high_pass_column(in, result, j);
      for (std::size_t j = split; j < d; ++j) low_pass_column(in, result, j, lowpass_width);
      break;
    }

    case TransformId::kLowHigh: {
      const std::size_t split = (d + 1) / 2;
      for (std::size_t j = 0; j < split; ++j) low_pass_column(in, result, j, lowpass_width);
      for (std::size_t j = split; j < d; ++j) high_pass_column(in, result, j);
      break;
    }
  }
  return out;
}

}  // namespace codit
