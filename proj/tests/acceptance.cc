// tests/acceptance.cc

// Copyright 2026  The usvctx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Acceptance harness: one PASS/FAIL/SKIP line per criterion. Exits non-zero
// if any criterion fails.

#include <spdlog/spdlog.h>

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.h"
#include "usv/audio_io.h"
#include "usv/classifier.h"
#include "usv/corpus.h"
#include "usv/evaluation.h"
#include "usv/partition.h"
#include "usv/pipeline.h"
#include "usv/pitch_features.h"
#include "usv/spectral.h"
#include "usv/synth.h"
#include "usv/text_io.h"

using namespace usv;
namespace oracle = usv::testing;

namespace {

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kPass;
  std::string detail;
};

Outcome fail(std::string detail) { return {Status::kFail, std::move(detail)}; }
Outcome verdict(bool ok, std::string detail) {
  return {ok ? Status::kPass : Status::kFail, std::move(detail)};
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  Matrix m;
  m.cols = rows.empty() ? 0 : rows[0].size();
  for (const auto& r : rows) m.push_row(r);
  return m;
}

// 1. Constant bin-centre tones.
Outcome pitch_oracle() {
  constexpr double kRate = 50000.0;
  constexpr double kBinHz = 1.0 / kPitchWindowS;
  std::mt19937 gen(101);
  std::uniform_int_distribution<int> bin(600, 1700);
  double extract_s = 0.0;
  int bad_mean = 0, bad_std = 0, bad_oracle = 0;
  for (int i = 0; i < 100; ++i) {
    SynthSpec spec;
    spec.f0_mean = bin(gen) * kBinHz;
    spec.duration_s = 0.5;
    spec.seed = i;
    AudioClip clip = synth_utterance(spec, kRate);
    auto start = Clock::now();
    PitchContour c = extract_f0(clip);
    FeatureVector f = contour_stats(c).features;
    extract_s += seconds_since(start);
    if (std::abs(f.mean_voiced - spec.f0_mean) > kBinHz) ++bad_mean;
    if (f.std_voiced != 0.0) ++bad_std;
    // Brute-force DFT on the middle frame.
    const std::size_t window = static_cast<std::size_t>(kPitchWindowS * kRate);
    const std::size_t hop = static_cast<std::size_t>(kPitchHopS * kRate);
    const std::size_t t = c.size() / 2;
    std::span<const float> frame(clip.samples.data() + t * hop, window);
    if (oracle::naive_argmax_bin(frame) * kBinHz != c.f0_hz[t]) ++bad_oracle;
  }
  return verdict(bad_mean == 0 && bad_std == 0 && bad_oracle == 0 && extract_s < 30.0,
                 fmt::format("100 tones; mean off by > 1 bin: {}, std != 0: {}, "
                             "DFT oracle mismatches: {}, extraction {:.2f} s",
                             bad_mean, bad_std, bad_oracle, extract_s));
}

// 2. Linear chirps.
Outcome slope_oracle() {
  double worst = 0.0;
  for (double slope : {4000.0, -4000.0})
    for (double mean : {8000.0, 11000.0, 14000.0}) {
      SynthSpec spec;
      spec.f0_mean = mean;
      spec.f0_slope = slope;
      spec.duration_s = 1.0;
      AudioClip clip = synth_utterance(spec, 250000.0);
      double got = contour_stats(extract_f0(clip)).features.slope_voiced;
      worst = std::max(worst, std::abs(got - slope) / std::abs(slope));
    }
  return verdict(worst <= 0.05,
                 fmt::format("6 chirps at +-4000 Hz/s, worst relative error {:.4f}", worst));
}

// 3. Gate relativity.
Outcome gate_property() {
  constexpr double kRate = 50000.0;
  std::mt19937 gen(303);
  std::uniform_real_distribution<double> mean(7000.0, 16000.0);
  std::uniform_real_distribution<double> jitter(0.0, 150.0);
  std::uniform_real_distribution<double> slope(-2000.0, 2000.0);
  std::uniform_real_distribution<double> duration(0.2, 1.0);
  std::uniform_real_distribution<double> amplitude(0.05, 0.9);
  std::uniform_real_distribution<double> offset(1500.0, 4000.0);
  std::bernoulli_distribution above(0.5);
  int changed_interferer = 0, changed_scale = 0, frames = 0;
  for (int i = 0; i < 50; ++i) {
    SynthSpec spec;
    spec.f0_mean = mean(gen);
    spec.f0_std = jitter(gen);
    spec.f0_slope = slope(gen);
    spec.duration_s = duration(gen);
    spec.amplitude = amplitude(gen);
    spec.seed = 1000 + i;
    AudioClip clip = synth_utterance(spec, kRate);
    PitchContour base = extract_f0(clip);

    // Interferer placed clear of the call's frequency range.
    double reach = 3.0 * spec.f0_std + std::abs(spec.f0_slope) * spec.duration_s / 2.0;
    double f = above(gen) ? spec.f0_mean + reach + offset(gen)
                          : spec.f0_mean - reach - offset(gen);
    if (f <= 1000.0 || f >= kRate / 2.0 - 1000.0) f = spec.f0_mean - reach - 1500.0;
    AudioClip quiet = oracle::tone(f, kRate, static_cast<double>(clip.samples.size()) / kRate,
                                   spec.amplitude * std::pow(10.0, -30.0 / 20.0));
    quiet.samples.resize(clip.samples.size());
    PitchContour noisy = extract_f0(oracle::mix(clip, quiet));
    for (std::size_t t = 0; t < base.size(); ++t) {
      if (!base.voiced[t]) continue;
      ++frames;
      if (!noisy.voiced[t] || noisy.f0_hz[t] != base.f0_hz[t]) ++changed_interferer;
    }

    for (float scale : {0.1f, 10.0f}) {
      AudioClip s = clip;
      for (float& v : s.samples) v *= scale;
      PitchContour c = extract_f0(s);
      if (c.f0_hz != base.f0_hz || c.voiced != base.voiced) ++changed_scale;
    }
  }
  return verdict(changed_interferer == 0 && changed_scale == 0,
                 fmt::format("50 specs; {} voiced frames changed by a -30 dB interferer "
                             "(of {}), {} contours changed by scaling",
                             changed_interferer, frames, changed_scale));
}

// 4. UAR examples.
Outcome uar_examples() {
  std::vector<int> mixed = {0, 3, 3, 7, 10, 10, 10, 2};
  double all_correct = uar(mixed, mixed);
  double half = uar(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 1, 1, 1});
  std::vector<int> truth, constant;
  for (int k = 0; k < kNumContexts; ++k)
    for (int r = 0; r <= k; ++r) {
      truth.push_back(k);
      constant.push_back(4);
    }
  double chance = uar(truth, constant);
  bool ok = all_correct == 1.0 && half == 0.75 && chance == 1.0 / 11.0;
  return verdict(ok, fmt::format("all correct {}, two-class {}, constant 11-class {:.17g}",
                                 all_correct, half, chance));
}

// 5. Bootstrap degenerate case and determinism.
Outcome bootstrap_checks() {
  PredictionSet correct;
  for (int i = 0; i < 60; ++i)
    correct.push_back({"u" + std::to_string(i), i % 11, i % 11, 0});
  ConfidenceInterval ones = bootstrap_ci(correct, kBootstrapReplicates, 7);

  std::mt19937 gen(55);
  PredictionSet noisy;
  for (int i = 0; i < 200; ++i) {
    int t = static_cast<int>(gen() % 11);
    int p = gen() % 2 == 0 ? t : static_cast<int>(gen() % 11);
    noisy.push_back({"u" + std::to_string(i), t, p, 0});
  }
  ConfidenceInterval a = bootstrap_ci(noisy, kBootstrapReplicates, 99);
  ConfidenceInterval b = bootstrap_ci(noisy, kBootstrapReplicates, 99);
  bool same = std::memcmp(&a, &b, sizeof a) == 0;
  bool ok = ones.low == 1.0 && ones.high == 1.0 && same && a.low <= a.high;
  return verdict(ok, fmt::format("all-correct CI [{}, {}]; seeded rerun identical: {} "
                                 "([{:.6f}, {:.6f}])",
                                 ones.low, ones.high, same ? "yes" : "no", a.low, a.high));
}

// 6 and 8 share one synthetic corpus run.
struct CorpusRun {
  bool ok = false;
  std::string error;
  SynthCorpus corpus;
  RunConfig config;
  TrainEvalSummary result;
  double seconds = 0.0;
};

CorpusRun run_synth_corpus(const std::filesystem::path& dir) {
  CorpusRun run;
  try {
    run.corpus = synth_corpus(dir, default_class_specs(), SynthCorpusOptions{});
    run.config = RunConfig::load(run.corpus.run_config);
    auto start = Clock::now();
    ExtractSummary ex = run_extract(run.config);
    if (!ex.within_failure_budget()) throw std::runtime_error("extract over failure budget");
    run_partition(run.config);
    run.result = run_train_eval(run.config);
    run.seconds = seconds_since(start);
    run.ok = true;
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  return run;
}

Outcome partition_invariants(const CorpusRun& run) {
  if (!run.ok) return fail(run.error);
  FoldPlan plan = FoldPlan::from_csv(
      read_file(run.config.out_dir / std::string(artifacts::kFolds)));
  std::map<std::string, const Utterance*> by_id;
  for (const auto& u : run.corpus.utterances) by_id[u.id] = &u;

  bool coverage = plan.size() == run.corpus.utterances.size();
  for (std::size_t i = 0; i < plan.size() && coverage; ++i) {
    int tests = 0;
    for (int f = 0; f < kFoldCount; ++f) tests += plan.roles[i][f] == FoldRole::kTest;
    coverage = tests == 1 && by_id.contains(plan.ids[i]);
  }
  if (!coverage) return fail("an utterance is not the test item of exactly one fold");

  std::array<double, kNumContexts> global{};
  for (const auto& id : plan.ids) global[label_index(by_id[id]->context)] += 1.0 / plan.size();

  bool disjoint = true, fractions = true;
  double worst_l1 = 0.0, worst_fraction = 0.0;
  for (int f = 0; f < kFoldCount; ++f) {
    std::set<std::string> dev, test;
    std::array<double, kNumContexts> hist{};
    std::array<int, kNumContexts> dev_n{}, val_n{};
    for (std::size_t i = 0; i < plan.size(); ++i) {
      const Utterance& u = *by_id[plan.ids[i]];
      int k = label_index(u.context);
      if (plan.roles[i][f] == FoldRole::kTest) {
        test.insert(u.emitter_id);
        hist[k] += 1.0;
      } else {
        dev.insert(u.emitter_id);
        ++dev_n[k];
        if (plan.roles[i][f] == FoldRole::kValidation) ++val_n[k];
      }
    }
    for (const auto& e : test) disjoint = disjoint && !dev.contains(e);
    worst_l1 = std::max(worst_l1, label_l1(hist, global));
    for (int k = 0; k < kNumContexts; ++k) {
      double off = std::abs(val_n[k] - kValidationShare * dev_n[k]);
      worst_fraction = std::max(worst_fraction, off);
      fractions = fractions && off <= 1.0;
    }
  }
  return verdict(disjoint && fractions && worst_l1 < 0.05,
                 fmt::format("{} utterances, emitters disjoint: {}, worst test L1 {:.4f}, "
                             "worst validation offset {:.2f} utterances",
                             plan.size(), disjoint ? "yes" : "no", worst_l1, worst_fraction));
}

// 7. Solver against the closed form and a brute-force optimum.
Outcome solver_correctness() {
  SolverResult two = solve_dual_cd(to_matrix({{1.0}, {-1.0}}), std::vector<int>{1, -1},
                                   std::vector<double>{10.0, 10.0}, 0);
  bool two_ok = std::abs(two.w[0] - 1.0) <= 1e-3 && std::abs(two.bias) <= 1e-3;

  std::mt19937 gen(707);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::uniform_real_distribution<double> cost(0.1, 2.0);
  std::uniform_int_distribution<int> size(2, 6);
  double worst_grid = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    int n = size(gen);
    std::vector<std::vector<double>> pts;
    std::vector<int> y;
    std::vector<double> c;
    for (int i = 0; i < n; ++i) {
      pts.push_back({coord(gen), coord(gen)});
      y.push_back(i % 2 == 0 ? 1 : -1);
      c.push_back(cost(gen));
    }
    SolverResult r = solve_dual_cd(to_matrix(pts), y, c, trial);
    double got = oracle::svm_objective(pts, y, c, r.w, r.bias);
    double best = oracle::grid_minimise(pts, y, c).objective;
    worst_grid = std::max(worst_grid, got - best);
  }

  double worst_dup = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int dup = 2 + trial % 4;
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 5; ++i) pts.push_back({coord(gen), coord(gen)});
    std::vector<int> y = {1, 1, 1, -1, -1};
    std::vector<double> weighted = {0.4, 0.4, 0.4, 0.4 * dup, 0.4};
    auto dpts = pts;
    auto dy = y;
    std::vector<double> dc(5, 0.4);
    for (int d = 1; d < dup; ++d) {
      dpts.push_back(pts[3]);
      dy.push_back(-1);
      dc.push_back(0.4);
    }
    SolverResult a = solve_dual_cd(to_matrix(pts), y, weighted, trial);
    SolverResult b = solve_dual_cd(to_matrix(dpts), dy, dc, trial);
    double oa = oracle::svm_objective(pts, y, weighted, a.w, a.bias);
    double ob = oracle::svm_objective(dpts, dy, dc, b.w, b.bias);
    worst_dup = std::max(worst_dup, std::abs(oa - ob));
  }
  return verdict(two_ok && worst_grid <= 1e-3 && worst_dup <= 1e-3,
                 fmt::format("two-point (w, b) = ({:.6f}, {:.6f}); worst excess over grid "
                             "optimum {:.2e} (20 problems); worst weighted/duplicated gap "
                             "{:.2e}",
                             two.w[0], two.bias, worst_grid, worst_dup));
}

Outcome end_to_end(const CorpusRun& run) {
  if (!run.ok) return fail(run.error);
  const auto& r = run.result.report;
  return verdict(r.uar >= 0.80 && run.seconds < 300.0,
                 fmt::format("{} utterances, 12 emitters: UAR {:.4f} [{:.4f}, {:.4f}] in "
                             "{:.1f} s",
                             r.n, r.uar, r.ci.low, r.ci.high, run.seconds));
}

// 9. Export shape and tensor round-trip.
Outcome export_checks(const std::filesystem::path& dir) {
  constexpr std::uintmax_t kBytes = 24u + 299u * 2049u * 4u;
  int bad = 0;
  int n = 0;
  for (double seconds : {0.02, 0.5, 1.7, 3.0}) {
    SynthSpec spec;
    spec.duration_s = seconds;
    spec.f0_slope = 1000.0;
    AudioClip clip = synth_utterance(spec, 250000.0);
    Spectrogram s = export_spectrogram(clip);
    auto path = dir / fmt::format("t{}.usvt", n++);
    write_tensor(s, path);
    Spectrogram back = read_tensor(path);
    bool ok = s.frames == 299 && s.bins == 2049 &&
              std::filesystem::file_size(path) == kBytes && back.frames == s.frames &&
              back.bins == s.bins &&
              std::memcmp(back.magnitudes.data(), s.magnitudes.data(),
                          s.magnitudes.size() * sizeof(float)) == 0;
    bad += !ok;
  }
  return verdict(bad == 0, fmt::format("{} clips of 0.02 to 3 s: {} wrong shape, size or "
                                       "round-trip; expected 299 x 2049, {} bytes",
                                       n, bad, kBytes));
}

// 10. Field corpus, only when configured. Reference per-context mean F0 in Hz.
Outcome field_corpus() {
  const char* path = std::getenv("USV_CORPUS_CONFIG");
  if (path == nullptr || *path == '\0')
    return {Status::kSkip, "set USV_CORPUS_CONFIG to a run config for the public corpus"};
  static const std::map<std::string, double> kReferenceMeans = {
      {"Bi", 11238}, {"Fe", 10584}, {"Fi", 11680}, {"Ge", 11098},
      {"Gr", 11385}, {"Is", 12640}, {"Ki", 11461}, {"Pr", 11545},
      {"Se", 10196}, {"Sl", 11500}, {"Th", 10838}};
  RunConfig config = RunConfig::load(path);
  ExtractSummary ex = run_extract(config);
  run_partition(config);
  TrainEvalSummary te = run_train_eval(config);
  auto t1 = run_table1(config);
  double worst = 0.0;
  std::string worst_code;
  for (const auto& row : t1) {
    std::string code(label_code(row.context));
    double rel = std::abs(row.mean - kReferenceMeans.at(code)) / kReferenceMeans.at(code);
    if (rel > worst) {
      worst = rel;
      worst_code = code;
    }
  }
  bool ok = ex.cohort == 35074 && te.report.uar >= 0.19 && te.report.uar <= 0.26 &&
            t1.size() == kReferenceMeans.size() && worst <= 0.15;
  return verdict(ok, fmt::format("cohort {}, UAR {:.4f} [{:.4f}, {:.4f}], worst mean F0 "
                                 "deviation {:.1f}% ({})",
                                 ex.cohort, te.report.uar, te.report.ci.low,
                                 te.report.ci.high, 100.0 * worst, worst_code));
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  int failures = 0;
  auto report = [&](int id, std::string_view name, const std::function<Outcome()>& check) {
    Outcome out;
    auto start = Clock::now();
    try {
      out = check();
    } catch (const std::exception& e) {
      out = fail(fmt::format("exception: {}", e.what()));
    }
    const char* tag = out.status == Status::kPass   ? "PASS"
                      : out.status == Status::kSkip ? "SKIP"
                                                    : "FAIL";
    failures += out.status == Status::kFail;
    fmt::print("{} {:>2} {:<24} {} ({:.1f} s)\n", tag, id, name, out.detail,
               seconds_since(start));
    std::fflush(stdout);
  };

  oracle::TempDir dir("usv_accept");
  report(1, "pitch oracle", pitch_oracle);
  report(2, "slope oracle", slope_oracle);
  report(3, "gate property", gate_property);
  report(4, "uar examples", uar_examples);
  report(5, "bootstrap", bootstrap_checks);
  CorpusRun run = run_synth_corpus(dir / "corpus");
  report(6, "partition invariants", [&] { return partition_invariants(run); });
  report(7, "svm solver", solver_correctness);
  report(8, "end to end", [&] { return end_to_end(run); });
  report(9, "spectrogram export", [&] { return export_checks(dir.path()); });
  report(10, "field corpus", field_corpus);
  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
