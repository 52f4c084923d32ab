// Acceptance suite: runs every statistical guarantee and metric contract at
// its stated tolerance and prints one pass/fail line per criterion. Exits
// with the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "codit/conformal.hpp"
#include "codit/datagen.hpp"
#include "codit/dataset.hpp"
#include "codit/eval.hpp"
#include "support/stat_oracles.hpp"

namespace fs = std::filesystem;
using namespace codit;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Criterion {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------- C1
Criterion pvalue_uniformity() {
  const auto start = Clock::now();
  SeedStream rng(20101);
  const std::size_t cal_size = 100;
  const std::size_t trials = 10000;
  std::vector<double> p_values;
  p_values.reserve(trials);
  std::vector<double> cal(cal_size);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    for (double& a : cal) a = rng.normal();  // fresh iid scores both sides
    p_values.push_back(p_value(rng.normal(), cal));
  }
  const double d = oracles::ks_distance_discrete_uniform(p_values, cal_size + 1);
  const double critical = oracles::ks_critical(trials, 0.01);
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "KS distance " << d << " vs critical " << critical << " (C=100, 1e4 trials, "
         << elapsed << " s)";
  return {d < critical && elapsed < 10.0, detail.str()};
}

// ---------------------------------------------------------------------- C2
Criterion fisher_oracle() {
  const auto start = Clock::now();
  SeedStream rng(20202);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(i % 10);
    std::vector<double> p_values(n);
    for (double& p : p_values) p = 1.0 - rng.uniform();
    const double ours = fisher_value(p_values);
    const double oracle = oracles::fisher_via_chi2(p_values);
    worst = std::max(worst, std::abs(ours - oracle) / std::max(oracle, 1e-300));
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "worst relative error " << worst << " over 1e3 vectors, n in 1..10 ("
         << elapsed << " s)";
  return {worst < 1e-9 && elapsed < 5.0, detail.str()};
}

// ---------------------------------------------------------------------- C3
Criterion fdr_bound() {
  const auto start = Clock::now();

  // A moderate scorer; the guarantee cannot depend on its quality.
  std::vector<Trace> training;
  for (std::size_t i = 0; i < 12; ++i) {
    GenConfig config;
    config.id = "fdr-tr-" + std::to_string(i);
    config.T = 60;
    config.seed = SeedDeriver(30301).mix(i).finish();
    training.push_back(generate(config));
  }
  const auto spec = TransformSpec::uniform(
      {TransformId::kIdentity, TransformId::kSpeed2x, TransformId::kShuffle,
       TransformId::kReverse, TransformId::kPeriodic});
  TrainConfig train;
  train.window_len = 16;
  train.windows_per_trace = 32;
  train.epochs = 30;
  train.seed = 30302;
  const auto model = train_predictor(training, spec, train);

  // 260 iD traces of 11 windows each: 200 strict-iid calibration scores per
  // set, and the all-windows variant is ~11x larger.
  std::vector<Trace> pool;
  for (std::size_t i = 0; i < 260; ++i) {
    GenConfig config;
    config.id = "fdr-pool-" + std::to_string(i);
    config.T = 26;
    config.seed = SeedDeriver(30303).mix(i).finish();
    pool.push_back(generate(config));
  }

  FdrConfig fdr;
  for (int k = 1; k <= 10; ++k) fdr.epsilons.push_back(0.05 * k);
  fdr.trials = 5;
  fdr.n = 5;
  fdr.n_cal = 200;
  fdr.w = 16;
  fdr.seed = 30304;
  fdr.workers = 4;

  fdr.mode = CalibrationMode::kStrictIid;
  const auto strict = fdr_sweep(pool, model, spec, fdr).mean_rates();
  fdr.mode = CalibrationMode::kAllWindows;
  fdr.seed = 30305;
  const auto all_windows = fdr_sweep(pool, model, spec, fdr).mean_rates();

  bool pass = true;
  double worst_excess = -1.0, worst_gap = 0.0;
  for (std::size_t i = 0; i < fdr.epsilons.size(); ++i) {
    const double eps = fdr.epsilons[i];
    worst_excess = std::max(worst_excess, strict[i] - eps);
    if (strict[i] > eps + 0.03) pass = false;
    worst_gap = std::max(worst_gap, std::abs(all_windows[i] - eps));
    if (std::abs(all_windows[i] - eps) > 0.03) pass = false;
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 300.0) pass = false;
  std::ostringstream detail;
  detail << "strict-iid worst (rate - eps) " << worst_excess << " <= 0.03; all-windows worst |rate - eps| "
         << worst_gap << " <= 0.03 (" << elapsed << " s)";
  return {pass, detail.str()};
}

// ------------------------------------------------------------- C4..C7 setup
struct ScorerBench {
  std::vector<Trace> test_id;
  std::vector<Trace> replay;
  std::vector<Trace> drift;
  std::vector<Trace> calibration;
  std::vector<Trace> proper_training;
};

ScorerBench make_bench(std::uint64_t base_seed) {
  BenchmarkConfig config;
  config.T = 200;
  config.n_train = 24;
  config.n_cal = 14;
  config.n_test_id = 20;
  config.ood_counts[Regime::kReplay] = 20;
  config.ood_counts[Regime::kDrift] = 20;
  config.base_seed = base_seed;
  auto split = generate_benchmark(config);
  ScorerBench bench;
  bench.proper_training = std::move(split.proper_training);
  bench.calibration = std::move(split.calibration);
  bench.test_id = std::move(split.test_id);
  for (auto& trace : split.test_ood)
    (trace.ood_kind == "replay" ? bench.replay : bench.drift).push_back(std::move(trace));
  return bench;
}

Predictor bench_model(const ScorerBench& bench, const TransformSpec& spec,
                      std::uint64_t seed) {
  TrainConfig train;
  train.window_len = 16;
  train.windows_per_trace = 64;
  train.epochs = 60;
  train.seed = seed;
  return train_predictor(bench.proper_training, spec, train);
}

const TransformSpec kSet3 = TransformSpec::uniform(
    {TransformId::kSpeed2x, TransformId::kReverse, TransformId::kIdentity});
const TransformSpec kSet4 = TransformSpec::uniform(
    {TransformId::kSpeed2x, TransformId::kShuffle, TransformId::kPeriodic,
     TransformId::kIdentity});
const TransformSpec kSet5 = TransformSpec::uniform(
    {TransformId::kSpeed2x, TransformId::kReverse, TransformId::kShuffle,
     TransformId::kPeriodic, TransformId::kIdentity});

double drift_auroc(const ScorerBench& bench, const Predictor& model,
                   const TransformSpec& spec, std::size_t n, std::uint64_t seed) {
  const auto cal_sets = build_calibration_sets(bench.calibration, model, spec, n, 16,
                                               CalibrationMode::kStrictIid, seed);
  EvalConfig eval;
  eval.w = 16;
  eval.seed = seed + 1;
  eval.workers = 4;
  return evaluate(bench.test_id, bench.drift, model, cal_sets, spec, eval).auroc;
}

// ---------------------------------------------------------------------- C4
Criterion temporal_separation(const ScorerBench& bench, const Predictor& model5) {
  const auto cal_sets = build_calibration_sets(bench.calibration, model5, kSet5, 20, 16,
                                               CalibrationMode::kStrictIid, 40401);
  EvalConfig eval;
  eval.w = 16;
  eval.seed = 40402;
  eval.workers = 4;
  const auto on_replay =
      evaluate(bench.test_id, bench.replay, model5, cal_sets, kSet5, eval);
  const auto on_drift =
      evaluate(bench.test_id, bench.drift, model5, cal_sets, kSet5, eval);
  const bool pass = on_replay.auroc >= 0.85 && on_replay.tnr >= 0.5 &&
                    on_drift.auroc >= 0.85 && on_drift.tnr >= 0.5;
  std::ostringstream detail;
  detail << "replay auroc " << on_replay.auroc << " tnr " << on_replay.tnr
         << "; drift auroc " << on_drift.auroc << " tnr " << on_drift.tnr
         << " (bars 0.85 / 0.5, w=16, n=20, |G_T|=5)";
  return {pass, detail.str()};
}

// ---------------------------------------------------------------------- C5
Criterion n_monotonicity(const ScorerBench& bench,
                         const std::map<int, std::vector<Predictor>>& models) {
  bool pass = true;
  std::ostringstream detail;
  const std::map<int, const TransformSpec*> specs = {
      {3, &kSet3}, {4, &kSet4}, {5, &kSet5}};
  for (const auto& [size, spec] : specs) {
    const auto& model = models.at(size).front();
    const double at_1 = drift_auroc(bench, model, *spec, 1, 50501);
    const double at_20 = drift_auroc(bench, model, *spec, 20, 50501);
    if (at_20 < at_1) pass = false;
    detail << "|G_T|=" << size << ": auroc(n=20) " << at_20 << " vs auroc(n=1) " << at_1
           << "; ";
  }
  return {pass, detail.str()};
}

// ---------------------------------------------------------------------- C6
Criterion gt_trend(const ScorerBench& bench,
                   const std::map<int, std::vector<Predictor>>& models) {
  const std::map<int, const TransformSpec*> specs = {
      {3, &kSet3}, {4, &kSet4}, {5, &kSet5}};
  std::map<int, double> mean_auroc;
  for (const auto& [size, spec] : specs) {
    double total = 0.0;
    for (const auto& model : models.at(size))
      total += drift_auroc(bench, model, *spec, 20, 60601);
    mean_auroc[size] = total / static_cast<double>(models.at(size).size());
  }
  const bool pass = mean_auroc[4] >= mean_auroc[3] - 0.01 &&
                    mean_auroc[5] >= mean_auroc[4] - 0.01;
  std::ostringstream detail;
  detail << "3-seed mean auroc: |G_T|=3 " << mean_auroc[3] << ", |G_T|=4 "
         << mean_auroc[4] << ", |G_T|=5 " << mean_auroc[5]
         << " (non-decreasing, slack 0.01)";
  return {pass, detail.str()};
}

// ---------------------------------------------------------------------- C7
Criterion score_gap(const ScorerBench& bench, const Predictor& model5) {
  auto median = [](std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return values[values.size() / 2];
  };

  std::map<TransformId, std::vector<double>> id_scores, ood_scores;
  auto collect = [&](const std::vector<Trace>& traces, bool post_onset_only,
                     std::map<TransformId, std::vector<double>>& into) {
    const auto norm = normalized(traces, model5.trace_norm);
    for (const auto& trace : norm)
      for (const auto& window : sliding_windows(trace, 16, 1)) {
        if (post_onset_only && window.t + 16 - 1 < *trace.ood_onset) continue;
        for (std::size_t c = 0; c < kSet5.members.size(); ++c) {
          auto rng = SeedDeriver(70701)
                         .mix(window.trace_id)
                         .mix(window.t)
                         .mix(c)
                         .stream();
          into[kSet5.members[c]].push_back(
              ncm_score(model5, window, kSet5.members[c], rng));
        }
      }
  };
  collect(bench.test_id, false, id_scores);
  collect(bench.drift, true, ood_scores);

  bool pass = true;
  std::ostringstream detail;
  for (TransformId g : kSet5.members) {
    const double id_median = median(id_scores[g]);
    const double ood_median = median(ood_scores[g]);
    if (!(ood_median > id_median)) pass = false;
    detail << to_string(g) << " " << ood_median << ">" << id_median << "; ";
  }
  return {pass, "median NCM ood>id per transform: " + detail.str()};
}

// ---------------------------------------------------------------------- C8
Criterion metric_oracles() {
  SeedStream rng(80801);
  bool pass = true;
  std::ostringstream detail;

  // auroc: exact match with the pairwise brute force on sets up to 200
  for (int round = 0; round < 40 && pass; ++round) {
    std::vector<double> id(1 + rng.uniform_below(200));
    std::vector<double> ood(1 + rng.uniform_below(200));
    for (double& v : id) v = std::round(rng.uniform() * 25.0) / 25.0;
    for (double& v : ood) v = std::round(rng.uniform() * 25.0) / 25.0;
    if (auroc(id, ood) != oracles::auroc_brute_force(id, ood)) {
      pass = false;
      detail << "auroc mismatch at round " << round << "; ";
    }
  }

  // tnr: matches the exhaustive threshold scan
  for (int round = 0; round < 40 && pass; ++round) {
    std::vector<double> id(2 + rng.uniform_below(80));
    std::vector<double> ood(2 + rng.uniform_below(80));
    for (double& v : id) v = std::round(rng.uniform() * 12.0) / 12.0;
    for (double& v : ood) v = std::round(rng.uniform() * 12.0) / 12.0;
    for (double target : {0.9, 0.95}) {
      const auto ours = tnr_at_tpr(id, ood, target);
      const auto scan = oracles::tnr_scan(id, ood, target);
      if (std::abs(ours.tnr - scan.tnr) > 1e-12 ||
          std::abs(ours.threshold - scan.threshold) > 1e-12) {
        pass = false;
        detail << "tnr mismatch at round " << round << "; ";
      }
    }
  }

  // delay: hand-built trace flagged 3 windows after the first OOD window
  TraceWindowScores trace;
  trace.trace_id = "hand";
  trace.w = 4;
  trace.ood_onset = 6;
  // windows start at t=0..6; first OOD window is t=3 (3+4-1 >= 6)
  for (std::size_t t = 0; t <= 6; ++t) trace.scores.emplace_back(t, 0.9);
  trace.scores[6].second = 0.01;  // t=6: three windows past t=3
  const auto delay = detection_delay({trace}, 0.5);
  if (!delay.mean_delay || *delay.mean_delay != 3.0) {
    pass = false;
    detail << "delay: expected 3, got "
           << (delay.mean_delay ? std::to_string(*delay.mean_delay) : "NA") << "; ";
  }

  // NA convention: nothing flagged means no mean and full undetected count
  TraceWindowScores silent = trace;
  silent.scores[6].second = 0.9;
  const auto na = detection_delay({silent}, 0.5);
  if (na.mean_delay || na.undetected != 1) {
    pass = false;
    detail << "NA convention violated; ";
  }

  if (pass) detail << "auroc == brute force (40 rounds), tnr == scan (40x2), delay 3, NA ok";
  return {pass, detail.str()};
}

// ---------------------------------------------------------------------- C9
Criterion gradient_check() {
  std::vector<Trace> traces;
  for (std::size_t i = 0; i < 4; ++i) {
    GenConfig config;
    config.id = "grad-" + std::to_string(i);
    config.T = 60;
    config.seed = SeedDeriver(90901).mix(i).finish();
    traces.push_back(generate(config));
  }
  TrainConfig train;
  train.window_len = 16;
  train.windows_per_trace = 8;
  train.epochs = 2;
  train.seed = 90902;
  auto model = train_predictor(traces, kSet5, train);

  SeedStream rng(90903);
  const double step = 1e-5;
  double worst = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    FeatureVector raw;
    for (std::size_t f = 0; f < model.feature_count(); ++f)
      raw.values.push_back(rng.normal());
    const std::size_t target = rng.uniform_below(kSet5.class_count());
    Gradients grads(model);
    accumulate_gradients(model, raw, target, grads);

    auto probe = [&](double& param, double analytic) {
      const double saved = param;
      param = saved + step;
      const double up = cross_entropy(model, raw, target);
      param = saved - step;
      const double down = cross_entropy(model, raw, target);
      param = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    };
    // probe matched indices across every tensor
    const std::size_t hw = rng.uniform_below(model.hidden_weights.data().size());
    probe(model.hidden_weights.data()[hw], grads.hidden_weights.data()[hw]);
    const std::size_t ow = rng.uniform_below(model.output_weights.data().size());
    probe(model.output_weights.data()[ow], grads.output_weights.data()[ow]);
    const std::size_t hb = rng.uniform_below(model.hidden_bias.size());
    probe(model.hidden_bias[hb], grads.hidden_bias[hb]);
    const std::size_t ob = rng.uniform_below(model.output_bias.size());
    probe(model.output_bias[ob], grads.output_bias[ob]);
  }
  std::ostringstream detail;
  detail << "worst relative error " << worst << " over 50 instances (step 1e-5)";
  return {worst < 1e-4, detail.str()};
}

// --------------------------------------------------------------------- C10
std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Criterion cli_determinism(const std::string& codit_bin, const fs::path& work) {
  if (codit_bin.empty()) return {false, "no --codit-bin given"};
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string corpus = (work / "corpus").string();
  const std::string quiet = " 2>> " + (work / "cli.log").string();

  auto run = [&](const std::string& args) {
    const std::string command = codit_bin + " " + args + quiet;
    return std::system(command.c_str()) == 0;
  };

  const std::string model = (work / "model.json").string();
  const std::string calib = (work / "calib.json").string();
  const std::string verdicts = (work / "verdicts.jsonl").string();
  const std::string report = (work / "report.json").string();
  const std::string dist = (work / "dist.csv").string();
  const std::vector<std::string> commands = {
      "gen --out " + corpus +
          " --T 120 --n-train 8 --n-cal 8 --n-test-id 6 --ood-drift 6 --seed 77",
      "train --data " + corpus + " --out " + model +
          " --epochs 10 --windows-per-trace 16 --seed 78",
      "calibrate --data " + corpus + " --model " + model + " --out " + calib +
          " --n 5 --seed 79",
      "detect --traces " + corpus + "/test_id.jsonl --model " + model + " --calib " +
          calib + " --out " + verdicts + " --epsilon 0.1 --seed 80",
      "evaluate --data " + corpus + " --model " + model + " --calib " + calib +
          " --out " + report + " --dist-out " + dist + " --seed 81"};

  for (const auto& command : commands)
    if (!run(command + " --workers 1")) return {false, "first pass failed: " + command};

  const std::vector<fs::path> outputs = {fs::path(corpus) / "split.json",
                                         fs::path(corpus) / "manifest.json",
                                         fs::path(corpus) / "test_ood.jsonl",
                                         model,
                                         calib,
                                         verdicts,
                                         report,
                                         dist};
  std::map<std::string, std::string> first;
  for (const auto& path : outputs) first[path.string()] = read_bytes(path);

  for (const auto& command : commands)
    if (!run(command + " --workers 4 --force 1"))
      return {false, "second pass failed: " + command};

  for (const auto& path : outputs)
    if (read_bytes(path) != first[path.string()])
      return {false, "output differs across reruns/worker counts: " + path.string()};

  std::ostringstream detail;
  detail << outputs.size()
         << " primary outputs byte-identical across rerun with workers 1 -> 4";
  return {true, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::string codit_bin;
  fs::path work_dir = fs::temp_directory_path() / "codit_acceptance";
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--codit-bin") codit_bin = argv[i + 1];
    if (flag == "--work-dir") work_dir = argv[i + 1];
  }

  int failures = 0;
  auto report = [&](int number, const std::string& name, const Criterion& result) {
    std::cout << (result.pass ? "[PASS]" : "[FAIL]") << " criterion " << number << ": "
              << name << " -- " << result.detail << "\n"
              << std::flush;
    if (!result.pass) ++failures;
  };

  report(1, "p-value null uniformity", pvalue_uniformity());
  report(2, "fisher chi-square oracle", fisher_oracle());
  report(3, "false detection rate bound", fdr_bound());

  const auto bench = make_bench(1001);
  std::map<int, std::vector<Predictor>> models;
  for (const auto& [size, spec] :
       std::map<int, const TransformSpec*>{{3, &kSet3}, {4, &kSet4}, {5, &kSet5}})
    for (std::uint64_t seed : {1002ull, 2002ull, 3002ull})
      models[size].push_back(bench_model(bench, *spec, seed));

  report(4, "temporal OOD separation", temporal_separation(bench, models[5].front()));
  report(5, "AUROC monotone in n", n_monotonicity(bench, models));
  report(6, "AUROC trend in |G_T|", gt_trend(bench, models));
  report(7, "per-transform score gap", score_gap(bench, models[5].front()));
  report(8, "metric oracles", metric_oracles());
  report(9, "scorer gradient check", gradient_check());
  report(10, "CLI determinism", cli_determinism(codit_bin, work_dir));

  if (failures == 0)
    std::cout << "all 10 acceptance criteria passed\n";
  else
    std::cout << failures << " acceptance criteria FAILED\n";
  return failures;
}
