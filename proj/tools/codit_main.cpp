// codit: conformal OOD detection for time-series windows.
//
// Subcommands wire the library into reproducible experiment runs: every
// stochastic step is seeded, every output embeds the effective config and
// build id, and reruns with equal configs are byte-identical.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "codit/conformal.hpp"
#include "codit/datagen.hpp"
#include "codit/dataset.hpp"
#include "codit/eval.hpp"
#include "codit/version.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace codit;
using cli::RunConfig;

namespace {

struct KeySpec {
  const char* key;
  const char* fallback;
  const char* help;
};

/// Registers one CLI option per config key; only keys the user actually set
/// on the command line override the config file.
class KeyedCommand {
 public:
  KeyedCommand(CLI::App* app, std::vector<KeySpec> keys) : keys_(std::move(keys)) {
    app->add_option("--config", config_file_, "flat key = value config file");
    storage_.resize(keys_.size());
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      options_.push_back(app->add_option("--" + std::string(keys_[i].key), storage_[i],
                                         keys_[i].help));
    }
  }

  RunConfig resolve() const {
    std::map<std::string, std::string> defaults;
    for (const auto& spec : keys_) defaults[spec.key] = spec.fallback;
    std::map<std::string, std::string> overrides;
    for (std::size_t i = 0; i < keys_.size(); ++i)
      if (options_[i]->count() > 0) overrides[keys_[i].key] = storage_[i];
    return RunConfig(std::move(defaults), config_file_, overrides);
  }

 private:
  std::vector<KeySpec> keys_;
  std::vector<std::string> storage_;
  std::vector<CLI::Option*> options_;
  std::string config_file_;
};

void ensure_writable(const fs::path& path, bool force) {
  if (fs::exists(path) && !force)
    throw ConfigError(path.string() + " exists; pass --force 1 to overwrite");
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

TraceFormat format_from_string(const std::string& name) {
  if (name == "jsonl") return TraceFormat::kJsonl;
  if (name == "csv-dir") return TraceFormat::kCsvDir;
  throw ConfigError("unknown trace format '" + name + "' (jsonl or csv-dir)");
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto begin = item.find_first_not_of(' ');
    if (begin == std::string::npos) continue;
    out.push_back(item.substr(begin, item.find_last_not_of(' ') - begin + 1));
  }
  return out;
}

TransformSpec spec_from_config(const std::string& members_csv,
                               const std::string& weights_csv, int lowpass_width) {
  TransformSpec spec;
  for (const auto& name : split_list(members_csv, ',')) {
    const auto id = transform_from_string(name);
    if (!id) throw ConfigError("unknown transform '" + name + "'");
    spec.members.push_back(*id);
  }
  if (weights_csv.empty()) {
    spec.weights.assign(spec.members.size(),
                        1.0 / static_cast<double>(spec.members.size()));
  } else {
    for (const auto& v : split_list(weights_csv, ',')) spec.weights.push_back(std::stod(v));
  }
  spec.lowpass_width = lowpass_width;
  spec.validate();
  return spec;
}

struct Corpus {
  DatasetSplit split;
  std::string split_manifest;
};

Corpus load_corpus(const fs::path& dir) {
  if (!fs::exists(dir / "split.json"))
    throw DataError("no split manifest at " + (dir / "split.json").string() +
                    " (run `codit gen` first)");
  Corpus corpus;
  std::ifstream manifest(dir / "split.json");
  std::stringstream buffer;
  buffer << manifest.rdbuf();
  corpus.split_manifest = buffer.str();
  corpus.split.proper_training =
      load_traces(dir / "proper_training.jsonl", TraceFormat::kJsonl);
  corpus.split.calibration = load_traces(dir / "calibration.jsonl", TraceFormat::kJsonl);
  corpus.split.test_id = load_traces(dir / "test_id.jsonl", TraceFormat::kJsonl);
  if (fs::exists(dir / "test_ood.jsonl"))
    corpus.split.test_ood = load_traces(dir / "test_ood.jsonl", TraceFormat::kJsonl);
  return corpus;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Predictor load_model(const fs::path& path) { return Predictor::from_json(read_text(path)); }

CalibrationScoreSets load_calibration(const fs::path& path, const Predictor& model) {
  auto sets = CalibrationScoreSets::from_json(read_text(path));
  const auto model_spec_hash = content_hash(model.spec.to_json());
  if (sets.provenance.spec_hash != model_spec_hash)
    throw DataError("calibration sets were built for a different transform spec (hash " +
                    sets.provenance.spec_hash + " vs model " + model_spec_hash + ")");
  return sets;
}

// ---------------------------------------------------------------------------

int cmd_gen(const RunConfig& config) {
  const fs::path out = config.get("out");
  if (out.empty()) throw ConfigError("gen: --out is required");
  if (fs::exists(out) && !fs::is_empty(out) && !config.flag("force"))
    throw ConfigError(out.string() + " exists and is not empty; pass --force 1");
  fs::create_directories(out);

  BenchmarkConfig bench;
  bench.d = config.get_size("d");
  bench.T = config.get_size("T");
  bench.onset_frac = config.get_double("onset-frac");
  bench.noise_sigma = config.get_double("noise-sigma");
  bench.n_train = config.get_size("n-train");
  bench.n_cal = config.get_size("n-cal");
  bench.n_test_id = config.get_size("n-test-id");
  bench.base_seed = config.get_u64("seed");
  const std::map<std::string, Regime> regimes = {
      {"ood-replay", Regime::kReplay},
      {"ood-drift", Regime::kDrift},
      {"ood-dynamics-shuffle", Regime::kDynamicsShuffle},
      {"ood-noise-burst", Regime::kNoiseBurst}};
  for (const auto& [key, regime] : regimes) {
    const auto count = config.get_size(key);
    if (count > 0) bench.ood_counts[regime] = count;
  }

  const auto split = generate_benchmark(bench);
  save_traces_jsonl(split.proper_training, out / "proper_training.jsonl");
  save_traces_jsonl(split.calibration, out / "calibration.jsonl");
  save_traces_jsonl(split.test_id, out / "test_id.jsonl");
  save_traces_jsonl(split.test_ood, out / "test_ood.jsonl");
  if (config.get("format") == "csv-dir") {
    save_traces_csv_dir(split.proper_training, out / "proper_training");
    save_traces_csv_dir(split.calibration, out / "calibration");
    save_traces_csv_dir(split.test_id, out / "test_id");
    save_traces_csv_dir(split.test_ood, out / "test_ood");
  }
  write_text(out / "split.json", split_manifest_json(split, bench.base_seed));

  nlohmann::json manifest = nlohmann::json::parse(benchmark_manifest_json(bench));
  manifest["provenance"] = config.provenance("gen");
  write_text(out / "manifest.json", manifest.dump(2));
  std::cerr << "[codit] corpus written to " << out << "\n";
  return 0;
}

int cmd_train(const RunConfig& config) {
  const fs::path data = config.get("data");
  const fs::path out = config.get("out");
  if (out.empty()) throw ConfigError("train: --out is required");
  ensure_writable(out, config.flag("force"));
  const auto corpus = load_corpus(data);

  const auto spec = spec_from_config(config.get("members"), config.get("weights"),
                                     config.get_int("lowpass-width"));
  TrainConfig train;
  train.window_len = config.get_size("w");
  train.windows_per_trace = config.get_size("windows-per-trace");
  train.epochs = config.get_int("epochs");
  train.learning_rate = config.get_double("lr");
  train.hidden = config.get_int("hidden");
  train.batch_size = config.get_int("batch");
  train.seed = config.get_u64("seed");
  spec.validate(train.window_len);  // odd w with speed2x/periodic fails here

  std::vector<double> losses;
  const auto model = train_predictor(corpus.split.proper_training, spec, train, &losses);

  nlohmann::json model_json = nlohmann::json::parse(model.to_json());
  model_json["provenance"] = config.provenance("train");
  model_json["provenance"]["split_hash"] = content_hash(corpus.split_manifest);
  write_text(out, model_json.dump(2));

  std::string log = config.provenance_comment("train") + "epoch,loss\n";
  for (std::size_t e = 0; e < losses.size(); ++e) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%zu,%.10g\n", e, losses[e]);
    log += buf;
  }
  const fs::path log_path =
      config.get("log").empty() ? fs::path(out.string() + ".loss.csv")
                                : fs::path(config.get("log"));
  write_text(log_path, log);
  std::cerr << "[codit] model written to " << out << " (final loss "
            << model.meta.final_loss << ", accuracy " << model.meta.final_accuracy
            << ")\n";
  return 0;
}

int cmd_calibrate(const RunConfig& config) {
  const fs::path out = config.get("out");
  if (out.empty()) throw ConfigError("calibrate: --out is required");
  ensure_writable(out, config.flag("force"));
  const auto corpus = load_corpus(config.get("data"));
  const auto model = load_model(config.get("model"));

  auto sets = build_calibration_sets(
      corpus.split.calibration, model, model.spec, config.get_size("n"),
      model.window_len, calibration_mode_from_string(config.get("mode")),
      config.get_u64("seed"));
  sets.provenance.split_hash = content_hash(corpus.split_manifest);

  nlohmann::json out_json = nlohmann::json::parse(sets.to_json());
  out_json["provenance"]["run"] = config.provenance("calibrate");
  write_text(out, out_json.dump(2));
  std::cerr << "[codit] " << sets.n() << " calibration sets of size " << sets.per_set_size
            << " written to " << out << "\n";
  return 0;
}

int cmd_detect(const RunConfig& config) {
  const fs::path out = config.get("out");
  if (out.empty()) throw ConfigError("detect: --out is required");
  ensure_writable(out, config.flag("force"));
  const double epsilon = config.get_double("epsilon");
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw ConfigError("epsilon must lie in (0, 1)");

  const auto model = load_model(config.get("model"));
  const auto cal_sets = load_calibration(config.get("calib"), model);
  const auto traces =
      load_traces(config.get("traces"), format_from_string(config.get("format")));
  const auto seed = config.get_u64("seed");
  const int workers = config.get_int("workers");

  std::string stream = nlohmann::json{{"provenance", config.provenance("detect")}}.dump();
  stream += '\n';
  std::size_t flagged = 0, total = 0;
  for (const auto& raw : traces) {
    const auto trace = normalized(raw, model.trace_norm);
    const auto windows = sliding_windows(trace, model.window_len, 1);
    auto results = score_all(windows, model, cal_sets, model.spec, seed, workers);
    for (auto& result : results) {
      result.epsilon = epsilon;
      result.is_ood = result.fisher < epsilon;
      flagged += result.is_ood ? 1 : 0;
      ++total;
      stream += result.to_json_line();
      stream += '\n';
    }
  }
  write_text(out, stream);
  std::cerr << "[codit] " << flagged << "/" << total << " windows flagged at epsilon "
            << epsilon << "\n";
  return 0;
}

int cmd_evaluate(const RunConfig& config) {
  const fs::path out = config.get("out");
  if (out.empty()) throw ConfigError("evaluate: --out is required");
  ensure_writable(out, config.flag("force"));
  const auto corpus = load_corpus(config.get("data"));
  const auto model = load_model(config.get("model"));
  const auto cal_sets = load_calibration(config.get("calib"), model);
  if (corpus.split.test_ood.empty())
    throw DataError("evaluate: the corpus has no OOD test traces");

  EvalConfig eval;
  eval.w = model.window_len;
  eval.target_tpr = config.get_double("target-tpr");
  eval.seed = config.get_u64("seed");
  eval.workers = config.get_int("workers");
  const auto report = evaluate(corpus.split.test_id, corpus.split.test_ood, model,
                               cal_sets, model.spec, eval);

  nlohmann::json report_json = nlohmann::json::parse(report.to_json());
  report_json["provenance"] = config.provenance("evaluate");
  write_text(out, report_json.dump(2));

  if (!config.get("dist-out").empty()) {
    std::stringstream dist;
    dist << config.provenance_comment("evaluate");
    dump_score_distributions(corpus.split.test_id, corpus.split.test_ood, model,
                             model.spec, model.window_len, eval.seed, dist);
    write_text(config.get("dist-out"), dist.str());
  }
  std::cerr << "[codit] auroc " << report.auroc << ", tnr@" << eval.target_tpr << " "
            << report.tnr << "\n";
  return 0;
}

int cmd_fdr_sweep(const RunConfig& config) {
  const fs::path out = config.get("out");
  if (out.empty()) throw ConfigError("fdr-sweep: --out is required");
  ensure_writable(out, config.flag("force"));
  const auto corpus = load_corpus(config.get("data"));
  const auto model = load_model(config.get("model"));

  // iD pool: calibration + test-iD traces; proper training stays out.
  std::vector<Trace> pool = corpus.split.calibration;
  pool.insert(pool.end(), corpus.split.test_id.begin(), corpus.split.test_id.end());

  FdrConfig fdr;
  const double eps_min = config.get_double("eps-min");
  const double eps_max = config.get_double("eps-max");
  const double eps_step = config.get_double("eps-step");
  if (eps_step <= 0.0) throw ConfigError("eps-step must be positive");
  for (double e = eps_min; e <= eps_max + 1e-12; e += eps_step)
    fdr.epsilons.push_back(e);
  fdr.trials = config.get_size("trials");
  fdr.n = config.get_size("n");
  fdr.n_cal = config.get_size("n-cal");
  if (fdr.n_cal == 0) fdr.n_cal = (pool.size() * 2) / 3;  // paper-style 34-of-48
  fdr.w = model.window_len;
  fdr.mode = calibration_mode_from_string(config.get("mode"));
  fdr.seed = config.get_u64("seed");
  fdr.workers = config.get_int("workers");

  const auto curve = fdr_sweep(pool, model, model.spec, fdr);
  write_text(out, config.provenance_comment("fdr-sweep") + curve.to_csv());

  const auto means = curve.mean_rates();
  std::cerr << "[codit] mean flag rate vs epsilon:\n";
  for (std::size_t i = 0; i < means.size(); ++i)
    std::cerr << "  eps " << curve.epsilons[i] << " -> " << means[i] << "\n";
  return 0;
}

int cmd_sweep_n(const RunConfig& config) {
  const fs::path out = config.get("out");
  if (out.empty()) throw ConfigError("sweep-n: --out is required");
  ensure_writable(out, config.flag("force"));
  const auto corpus = load_corpus(config.get("data"));
  const auto model = load_model(config.get("model"));
  if (corpus.split.test_ood.empty())
    throw DataError("sweep-n: the corpus has no OOD test traces");

  EvalConfig eval;
  eval.w = model.window_len;
  eval.target_tpr = config.get_double("target-tpr");
  eval.seed = config.get_u64("seed");
  eval.workers = config.get_int("workers");

  std::string csv = config.provenance_comment("sweep-n") + "n,auroc,tnr\n";
  for (const auto& n_text : split_list(config.get("n-list"), ',')) {
    const auto n = static_cast<std::size_t>(std::stoull(n_text));
    const auto sets =
        build_calibration_sets(corpus.split.calibration, model, model.spec, n,
                               model.window_len, CalibrationMode::kStrictIid,
                               config.get_u64("seed"));
    const auto report = evaluate(corpus.split.test_id, corpus.split.test_ood, model,
                                 sets, model.spec, eval);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g\n", n, report.auroc, report.tnr);
    csv += buf;
    std::cerr << "[codit] n=" << n << " auroc " << report.auroc << "\n";
  }
  write_text(out, csv);
  return 0;
}

TrainConfig train_config_from(const RunConfig& config, std::size_t w) {
  TrainConfig train;
  train.window_len = w;
  train.windows_per_trace = config.get_size("windows-per-trace");
  train.epochs = config.get_int("epochs");
  train.learning_rate = config.get_double("lr");
  train.hidden = config.get_int("hidden");
  train.batch_size = config.get_int("batch");
  train.seed = config.get_u64("seed");
  return train;
}

int cmd_sweep_gt(const RunConfig& config) {
  const fs::path out = config.get("out");
  if (out.empty()) throw ConfigError("sweep-gt: --out is required");
  ensure_writable(out, config.flag("force"));
  const auto corpus = load_corpus(config.get("data"));
  if (corpus.split.test_ood.empty())
    throw DataError("sweep-gt: the corpus has no OOD test traces");
  const auto w = config.get_size("w");

  std::string csv = config.provenance_comment("sweep-gt") + "size,members,auroc,tnr\n";
  for (const auto& member_list : split_list(config.get("gt-sets"), ';')) {
    const auto spec =
        spec_from_config(member_list, "", config.get_int("lowpass-width"));
    spec.validate(w);
    const auto model = train_predictor(corpus.split.proper_training, spec,
                                       train_config_from(config, w));
    const auto sets = build_calibration_sets(corpus.split.calibration, model, spec,
                                             config.get_size("n"), w,
                                             CalibrationMode::kStrictIid,
                                             config.get_u64("seed"));
    EvalConfig eval;
    eval.w = w;
    eval.target_tpr = config.get_double("target-tpr");
    eval.seed = config.get_u64("seed");
    eval.workers = config.get_int("workers");
    const auto report = evaluate(corpus.split.test_id, corpus.split.test_ood, model,
                                 sets, spec, eval);
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%zu,%s,%.10g,%.10g\n", spec.members.size(),
                  member_list.c_str(), report.auroc, report.tnr);
    csv += buf;
    std::cerr << "[codit] |G_T|=" << spec.members.size() << " auroc " << report.auroc
              << "\n";
  }
  write_text(out, csv);
  return 0;
}

int cmd_sweep_w(const RunConfig& config) {
  const fs::path out = config.get("out");
  if (out.empty()) throw ConfigError("sweep-w: --out is required");
  ensure_writable(out, config.flag("force"));
  const auto corpus = load_corpus(config.get("data"));
  if (corpus.split.test_ood.empty())
    throw DataError("sweep-w: the corpus has no OOD test traces");

  std::string csv = config.provenance_comment("sweep-w") + "w,auroc,tnr\n";
  for (const auto& w_text : split_list(config.get("w-list"), ',')) {
    const auto w = static_cast<std::size_t>(std::stoull(w_text));
    const auto spec = spec_from_config(config.get("members"), config.get("weights"),
                                       config.get_int("lowpass-width"));
    spec.validate(w);
    const auto model = train_predictor(corpus.split.proper_training, spec,
                                       train_config_from(config, w));
    const auto sets = build_calibration_sets(corpus.split.calibration, model, spec,
                                             config.get_size("n"), w,
                                             CalibrationMode::kStrictIid,
                                             config.get_u64("seed"));
    EvalConfig eval;
    eval.w = w;
    eval.target_tpr = config.get_double("target-tpr");
    eval.seed = config.get_u64("seed");
    eval.workers = config.get_int("workers");
    const auto report = evaluate(corpus.split.test_id, corpus.split.test_ood, model,
                                 sets, spec, eval);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g\n", w, report.auroc, report.tnr);
    csv += buf;
    std::cerr << "[codit] w=" << w << " auroc " << report.auroc << "\n";
  }
  write_text(out, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conformal out-of-distribution detection for time-series windows"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kBuildId));

  const std::vector<KeySpec> common = {
      {"seed", "0", "master seed"},
      {"workers", "1", "parallel scoring workers (results are worker-invariant)"},
      {"out", "", "output path"},
      {"force", "0", "overwrite existing outputs"}};
  auto with_common = [&](std::vector<KeySpec> keys) {
    keys.insert(keys.end(), common.begin(), common.end());
    return keys;
  };

  auto* gen = app.add_subcommand("gen", "generate a synthetic benchmark corpus");
  KeyedCommand gen_keys(gen, with_common({
      {"format", "jsonl", "also emit csv-dir copies when set to csv-dir"},
      {"d", "2", "features per trace"},
      {"T", "120", "steps per trace"},
      {"onset-frac", "0.5", "OOD onset as a fraction of T"},
      {"noise-sigma", "0.05", "iD noise level"},
      {"n-train", "20", "proper training traces"},
      {"n-cal", "13", "calibration traces"},
      {"n-test-id", "27", "iD test traces"},
      {"ood-replay", "0", "replay OOD traces"},
      {"ood-drift", "0", "drift OOD traces"},
      {"ood-dynamics-shuffle", "0", "dynamics-shuffle OOD traces"},
      {"ood-noise-burst", "0", "noise-burst OOD traces"}}));

  const std::vector<KeySpec> train_keys_spec = {
      {"data", "", "corpus directory from `codit gen`"},
      {"members", "identity,speed2x,shuffle,reverse,periodic", "transform set"},
      {"weights", "", "sampling weights (empty = uniform)"},
      {"lowpass-width", "3", "moving-average width"},
      {"w", "16", "window length"},
      {"windows-per-trace", "64", "training windows per trace"},
      {"epochs", "50", "training epochs"},
      {"lr", "0.05", "learning rate"},
      {"hidden", "32", "hidden units"},
      {"batch", "32", "mini-batch size"},
      {"log", "", "per-epoch loss CSV (default <out>.loss.csv)"}};
  auto* train = app.add_subcommand("train", "train the transformation classifier");
  KeyedCommand train_keys(train, with_common(train_keys_spec));

  auto* calibrate = app.add_subcommand("calibrate", "build calibration score sets");
  KeyedCommand calibrate_keys(calibrate, with_common({
      {"data", "", "corpus directory"},
      {"model", "", "model JSON from `codit train`"},
      {"n", "20", "number of p-values"},
      {"mode", "strict-iid", "strict-iid or all-windows"}}));

  auto* detect = app.add_subcommand("detect", "flag OOD windows in traces");
  KeyedCommand detect_keys(detect, with_common({
      {"traces", "", "trace file or directory"},
      {"format", "jsonl", "jsonl or csv-dir"},
      {"model", "", "model JSON"},
      {"calib", "", "calibration sets JSON"},
      {"epsilon", "0.05", "false detection rate threshold in (0,1)"}}));

  auto* evaluate = app.add_subcommand("evaluate", "AUROC / TNR / delay on a corpus");
  KeyedCommand evaluate_keys(evaluate, with_common({
      {"data", "", "corpus directory"},
      {"model", "", "model JSON"},
      {"calib", "", "calibration sets JSON"},
      {"target-tpr", "0.95", "TPR target for TNR and delay"},
      {"dist-out", "", "optional per-transform score distribution CSV"}}));

  auto* fdr = app.add_subcommand("fdr-sweep", "false-detection-rate sweep over epsilon");
  KeyedCommand fdr_keys(fdr, with_common({
      {"data", "", "corpus directory"},
      {"model", "", "model JSON"},
      {"eps-min", "0.05", "grid start"},
      {"eps-max", "0.5", "grid end"},
      {"eps-step", "0.05", "grid step"},
      {"trials", "5", "resampling trials"},
      {"n", "5", "number of p-values"},
      {"n-cal", "0", "calibration traces per trial (0 = two thirds of the pool)"},
      {"mode", "strict-iid", "strict-iid or all-windows"}}));

  auto* sweep_n = app.add_subcommand("sweep-n", "AUROC as a function of n");
  KeyedCommand sweep_n_keys(sweep_n, with_common({
      {"data", "", "corpus directory"},
      {"model", "", "model JSON"},
      {"n-list", "1,2,5,10,20", "n values"},
      {"target-tpr", "0.95", "TPR target"}}));

  auto* sweep_gt = app.add_subcommand("sweep-gt", "AUROC as a function of |G_T|");
  KeyedCommand sweep_gt_keys(sweep_gt, with_common({
      {"data", "", "corpus directory"},
      {"gt-sets",
       "speed2x,reverse,identity;"
       "speed2x,shuffle,periodic,identity;"
       "speed2x,reverse,shuffle,periodic,identity",
       "semicolon-separated member lists"},
      {"lowpass-width", "3", "moving-average width"},
      {"w", "16", "window length"},
      {"windows-per-trace", "64", "training windows per trace"},
      {"epochs", "50", "training epochs"},
      {"lr", "0.05", "learning rate"},
      {"hidden", "32", "hidden units"},
      {"batch", "32", "mini-batch size"},
      {"n", "20", "number of p-values"},
      {"target-tpr", "0.95", "TPR target"}}));

  auto* sweep_w = app.add_subcommand("sweep-w", "AUROC as a function of window length");
  KeyedCommand sweep_w_keys(sweep_w, with_common({
      {"data", "", "corpus directory"},
      {"w-list", "16,18,20", "window lengths"},
      {"members", "identity,speed2x,shuffle,reverse,periodic", "transform set"},
      {"weights", "", "sampling weights (empty = uniform)"},
      {"lowpass-width", "3", "moving-average width"},
      {"windows-per-trace", "64", "training windows per trace"},
      {"epochs", "50", "training epochs"},
      {"lr", "0.05", "learning rate"},
      {"hidden", "32", "hidden units"},
      {"batch", "32", "mini-batch size"},
      {"n", "20", "number of p-values"},
      {"target-tpr", "0.95", "TPR target"}}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_keys.resolve());
    if (train->parsed()) return cmd_train(train_keys.resolve());
    if (calibrate->parsed()) return cmd_calibrate(calibrate_keys.resolve());
    if (detect->parsed()) return cmd_detect(detect_keys.resolve());
    if (evaluate->parsed()) return cmd_evaluate(evaluate_keys.resolve());
    if (fdr->parsed()) return cmd_fdr_sweep(fdr_keys.resolve());
    if (sweep_n->parsed()) return cmd_sweep_n(sweep_n_keys.resolve());
    if (sweep_gt->parsed()) return cmd_sweep_gt(sweep_gt_keys.resolve());
    if (sweep_w->parsed()) return cmd_sweep_w(sweep_w_keys.resolve());
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
