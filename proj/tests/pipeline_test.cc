// tests/pipeline_test.cc

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

#include "doctest.h"

#include <json.hpp>

#include <set>

#include "oracles.h"
#include "usv/classifier.h"
#include "usv/error.h"
#include "usv/partition.h"
#include "usv/pipeline.h"
#include "usv/synth.h"
#include "usv/text_io.h"

using namespace usv;
using usv::testing::TempDir;
using usv::testing::slurp;

namespace {

RunConfig small_corpus(const TempDir& dir, int per_class = 6, int emitters = 4) {
  SynthCorpusOptions opt;
  opt.per_class_count = per_class;
  opt.n_emitters = emitters;
  opt.seed = 5;
  SynthCorpus c = synth_corpus(dir.path(), default_class_specs(), opt);
  RunConfig config = RunConfig::load(c.run_config);
  config.grid = std::vector<double>{0.1, 1.0};
  config.replicates = 50;
  return config;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

}  // namespace

TEST_CASE("run config loading") {
  TempDir dir;
  write_file(dir / "run.cfg",
             "audio_dir = wav\nannotations = a.csv\nschema = /abs/s.cfg\nout_dir = out\n"
             "seed = 12\ngrid = 0.5, 1\nreplicates = 200\n");
  RunConfig c = RunConfig::load(dir / "run.cfg");
  CHECK(c.audio_dir == dir.path() / "wav");
  CHECK(c.schema == std::filesystem::path("/abs/s.cfg"));
  CHECK(c.seed == 12);
  CHECK(c.cost_grid() == std::vector<double>{0.5, 1.0});
  CHECK(c.replicates == 200);
  CHECK(c.provenance().starts_with("usvctx 0.1.0 seed=12 config="));

  RunConfig d = c;
  d.seed = 13;
  CHECK(d.hash() == c.hash());
  d.grid.reset();
  CHECK(d.hash() != c.hash());
  CHECK(d.cost_grid() == kCostGrid);

  write_file(dir / "bad.cfg", "colour = blue\n");
  CHECK_THROWS_AS(RunConfig::load(dir / "bad.cfg"), ConfigError);
  write_file(dir / "bad2.cfg", "seed = many\n");
  CHECK_THROWS_AS(RunConfig::load(dir / "bad2.cfg"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0.1,-1"), ConfigError);
  CHECK_THROWS_AS(parse_grid(""), ConfigError);
  CHECK_THROWS_AS(parse_grid("0.1,x"), ConfigError);
}

TEST_CASE("feature CSV round-trip") {
  FeatureRow r;
  r.id = "a,b";
  r.emitter_id = "bat1";
  r.context = ContextLabel::kKissing;
  r.duration_s = 0.25;
  r.features = FeatureVector::from_values({1, 2, 3, 4, 5, 6, 7, 8, 9, 10.5});
  std::string text = features_to_csv({r}, "usvctx test");
  CHECK(first_line(text) == "# usvctx test");
  CHECK(data_lines(text)[0] ==
        "utterance_id,emitter_id,context,duration_s,f0_mean_all,f0_std_all,f0_max_all,"
        "f0_min_all,f0_slope_all,f0_mean_voiced,f0_std_voiced,f0_max_voiced,"
        "f0_min_voiced,f0_slope_voiced");
  auto back = features_from_csv(text);
  REQUIRE(back.size() == 1);
  CHECK(back[0].id == "a,b");
  CHECK(back[0].context == ContextLabel::kKissing);
  CHECK(back[0].features.values() == r.features.values());
  CHECK_THROWS_AS(features_from_csv("wrong,header\n"), ParseError);
  CHECK(features_from_csv(features_to_csv({}, "p")).empty());
}

TEST_CASE("extract, partition, train-eval on a small corpus") {
  TempDir dir;
  RunConfig config = small_corpus(dir, 20);

  ExtractSummary ex = run_extract(config);
  CHECK(ex.cohort == 220);
  CHECK(ex.rows == 220);
  CHECK(ex.failed == 0);
  CHECK(ex.within_failure_budget());
  auto rows = features_from_csv(read_file(config.out_dir / "features.csv"));
  CHECK(rows.size() == 220);
  CHECK(std::is_sorted(rows.begin(), rows.end(),
                       [](const FeatureRow& a, const FeatureRow& b) { return a.id < b.id; }));

  PartitionSummary ps = run_partition(config);
  CHECK(ps.utterances == 220);
  CHECK(ps.emitters == 4);
  FoldPlan plan = FoldPlan::from_csv(read_file(config.out_dir / "folds.csv"));
  CHECK(plan.size() == 220);

  TrainEvalSummary te = run_train_eval(config);
  CHECK(te.report.n == 220);
  CHECK(te.chosen_costs.size() == 3);
  CHECK(te.report.uar > 0.5);  // chance is 1/11 on this reduced grid

  for (const char* name : {"features.csv", "skipped.csv", "filter_report.csv", "folds.csv",
                           "predictions.csv", "selection.csv", "confusion.csv",
                           "model_fold0.txt", "model_fold1.txt", "model_fold2.txt"}) {
    INFO(name);
    std::string text = slurp(config.out_dir / name);
    CHECK(first_line(text) == "# " + config.provenance());
  }
  auto report = nlohmann::json::parse(slurp(config.out_dir / "report.json"));
  CHECK(report["seed"] == config.seed);
  CHECK(report["config_hash"] == config.hash());
  CHECK(report["n"] == 220);
  CHECK(report["uar"].get<double>() == doctest::Approx(te.report.uar));
  CHECK(report["confusion"].size() == 11);
  CHECK(report["ci"]["replicates"] == 50);

  // Every utterance predicted exactly once.
  auto pred_lines = data_lines(slurp(config.out_dir / "predictions.csv"));
  CHECK(pred_lines.size() == 221);
  std::set<std::string> ids;
  for (std::size_t i = 1; i < pred_lines.size(); ++i)
    ids.insert(split_delimited(pred_lines[i], ',')[0]);
  CHECK(ids.size() == 220);

  // Rerunning with the same seed reproduces every artifact byte for byte.
  std::map<std::string, std::string> first;
  for (auto& e : std::filesystem::directory_iterator(config.out_dir))
    if (e.is_regular_file()) first[e.path().filename().string()] = slurp(e.path());
  run_extract(config);
  run_partition(config);
  run_train_eval(config);
  for (auto& [name, text] : first) {
    INFO(name);
    CHECK(slurp(config.out_dir / name) == text);
  }

  auto t1 = run_table1(config);
  CHECK(t1.size() == 11);
  for (const auto& row : t1) {
    CHECK(row.n == 20);
    CHECK(std::abs(row.mean - (6000.0 + 500.0 * label_index(row.context))) < 100.0);
  }
  CHECK(std::filesystem::exists(config.out_dir / "table1.csv"));
}

TEST_CASE("a corrupted WAV is a logged failure within budget") {
  TempDir dir;
  RunConfig config = small_corpus(dir, 10, 4);
  auto victim = config.audio_dir / "biting_0000.wav";
  REQUIRE(std::filesystem::exists(victim));
  write_file(victim, "garbage");
  ExtractSummary ex = run_extract(config);
  CHECK(ex.cohort == 110);
  CHECK(ex.failed == 1);
  CHECK(ex.rows == 109);
  CHECK(ex.within_failure_budget());
  // 1 in 110 is within 1%; 2 in 110 is not.
  write_file(config.audio_dir / "biting_0001.wav", "garbage");
  CHECK_FALSE(run_extract(config).within_failure_budget());
}

TEST_CASE("unvoiced and short clips are skipped, not failed") {
  TempDir dir;
  RunConfig config = small_corpus(dir, 6, 3);
  AudioClip silent;
  silent.sample_rate = 50000.0;
  silent.samples.assign(25000, 0.0f);
  write_wav(silent, config.audio_dir / "biting_0000.wav");
  AudioClip tiny = silent;
  tiny.samples.assign(1000, 0.1f);
  write_wav(tiny, config.audio_dir / "biting_0001.wav");
  ExtractSummary ex = run_extract(config);
  CHECK(ex.rows == 64);
  CHECK(ex.skipped == 2);
  CHECK(ex.failed == 0);
  std::string skipped = slurp(config.out_dir / "skipped.csv");
  CHECK(skipped.find("biting_0000,no_voiced_frames") != std::string::npos);
  CHECK(skipped.find("biting_0001,shorter_than_window") != std::string::npos);
}

TEST_CASE("two emitters cannot be partitioned") {
  TempDir dir;
  RunConfig config = small_corpus(dir, 3, 2);
  run_extract(config);
  CHECK_THROWS_AS(run_partition(config), TooFewEmitters);
}

TEST_CASE("table1 on a constant single-context corpus") {
  TempDir dir;
  SynthSpec s;
  s.context = ContextLabel::kIsolation;
  s.f0_mean = 11000.0;
  s.duration_s = 0.5;
  SynthCorpusOptions opt;
  opt.per_class_count = 5;
  opt.n_emitters = 3;
  opt.sample_rate = 250000.0;
  SynthCorpus c = synth_corpus(dir.path(), {s}, opt);
  RunConfig config = RunConfig::load(c.run_config);
  run_extract(config);
  auto t = run_table1(config);
  REQUIRE(t.size() == 1);
  CHECK(t[0].context == ContextLabel::kIsolation);
  CHECK(t[0].n == 5);
  CHECK(t[0].mean == doctest::Approx(11000.0));
  CHECK(t[0].std == 0.0);
  CHECK(t[0].slope == doctest::Approx(0.0).scale(1.0));
  auto lines = data_lines(slurp(config.out_dir / "table1.csv"));
  REQUIRE(lines.size() == 2);
  CHECK(lines[1] == "isolation,Is,5,11000,0,11000,11000,0");
}

TEST_CASE("table1 on empty features") {
  CHECK(table1({}).empty());
}

TEST_CASE("spectrogram export") {
  TempDir dir;
  SynthSpec s;
  s.duration_s = 0.4;
  SynthCorpusOptions opt;
  opt.per_class_count = 2;
  opt.n_emitters = 1;
  opt.sample_rate = 250000.0;
  SynthCorpus c = synth_corpus(dir.path(), {s}, opt);
  RunConfig config = RunConfig::load(c.run_config);
  ExportSummary ex = run_export_spectrograms(config);
  CHECK(ex.cohort == 2);
  CHECK(ex.written == 2);
  for (const auto& u : c.utterances) {
    auto p = config.out_dir / "spectrograms" / (u.id + ".usvt");
    REQUIRE(std::filesystem::exists(p));
    CHECK(std::filesystem::file_size(p) == 24u + 299u * 2049u * 4u);
  }
}
