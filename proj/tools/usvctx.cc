// tools/usvctx.cc

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

// usvctx: command-line driver for the vocalisation context pipeline.
//
//   usvctx synth --out DIR [--seed N] [--emitters 12] [--per-class 50]
//   usvctx extract --config run.cfg
//   usvctx partition --config run.cfg
//   usvctx train-eval --config run.cfg [--grid 0.1,1] [--replicates 1000]
//   usvctx export-spectrograms --config run.cfg
//   usvctx table1 --config run.cfg
//
// Exit codes: 0 success, 1 structural error, 2 per-file failure budget
// exceeded.

#include <spdlog/spdlog.h>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "usv/error.h"
#include "usv/pipeline.h"
#include "usv/synth.h"

namespace fs = std::filesystem;

namespace {

struct SharedOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string grid;
  std::optional<int> replicates;
  std::string audio_dir;
  std::string annotations;
  std::string schema;
  std::optional<unsigned> threads;
};

void add_shared(CLI::App* cmd, SharedOptions& opts) {
  cmd->add_option("--config", opts.config, "run configuration (key = value)");
  cmd->add_option("--seed", opts.seed, "random seed");
  cmd->add_option("--out", opts.out, "output directory");
  cmd->add_option("--grid", opts.grid, "comma-separated SVM cost grid");
  cmd->add_option("--replicates", opts.replicates, "bootstrap replicates");
  cmd->add_option("--audio-dir", opts.audio_dir, "directory holding the WAV files");
  cmd->add_option("--annotations", opts.annotations, "annotation table");
  cmd->add_option("--schema", opts.schema, "annotation schema configuration");
  cmd->add_option("--threads", opts.threads, "worker threads (0 = all cores)");
}

usv::RunConfig resolve(const SharedOptions& opts) {
  usv::RunConfig config;
  if (!opts.config.empty()) config = usv::RunConfig::load(opts.config);
  if (opts.seed) config.seed = *opts.seed;
  if (!opts.out.empty()) config.out_dir = opts.out;
  if (!opts.grid.empty()) config.grid = usv::parse_grid(opts.grid);
  if (opts.replicates) config.replicates = *opts.replicates;
  if (!opts.audio_dir.empty()) config.audio_dir = opts.audio_dir;
  if (!opts.annotations.empty()) config.annotations = opts.annotations;
  if (!opts.schema.empty()) config.schema = opts.schema;
  if (opts.threads) config.threads = *opts.threads;
  if (config.out_dir.empty()) throw usv::ConfigError("no output directory (--out or out_dir)");
  if (config.replicates < 1) throw usv::ConfigError("replicates must be at least 1");
  return config;
}

void require_corpus(const usv::RunConfig& config) {
  if (config.annotations.empty() || !fs::is_regular_file(config.annotations))
    throw usv::ConfigError("annotation file not found: " + config.annotations.string());
  if (config.schema.empty() || !fs::is_regular_file(config.schema))
    throw usv::ConfigError("schema file not found: " + config.schema.string());
  if (config.audio_dir.empty() || !fs::is_directory(config.audio_dir))
    throw usv::ConfigError("audio directory not found: " + config.audio_dir.string());
}

void require_output(const usv::RunConfig& config, std::string_view name) {
  fs::path p = config.out_dir / fs::path(name);
  if (!fs::is_regular_file(p))
    throw usv::ConfigError(p.string() + " not found; run the earlier stage first");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pitch features, subject-independent cross-validation and "
               "one-vs-one SVM classification of bat vocalisation contexts"};
  app.require_subcommand(1);
  spdlog::set_pattern("[%l] %v");

  SharedOptions opts;
  auto* extract = app.add_subcommand("extract", "F0 features for every cohort utterance");
  auto* partition = app.add_subcommand("partition", "subject-independent 3-fold plan");
  auto* train_eval = app.add_subcommand("train-eval", "nested model selection and pooled evaluation");
  auto* export_spec = app.add_subcommand("export-spectrograms", "3 s, 4096-point STFT tensors");
  auto* table = app.add_subcommand("table1", "per-context F0 statistics");
  for (auto* cmd : {extract, partition, train_eval, export_spec, table}) add_shared(cmd, opts);

  auto* synth = app.add_subcommand("synth", "write a synthetic corpus with known pitch");
  std::string synth_out;
  std::uint64_t synth_seed = 0;
  usv::SynthCorpusOptions synth_opts;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--emitters", synth_opts.n_emitters, "number of synthetic emitters");
  synth->add_option("--per-class", synth_opts.per_class_count, "utterances per class");
  synth->add_option("--sample-rate", synth_opts.sample_rate, "sample rate in Hz");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      synth_opts.seed = synth_seed;
      auto corpus = usv::synth_corpus(synth_out, usv::default_class_specs(), synth_opts);
      spdlog::info("wrote {} utterances; run config {}", corpus.utterances.size(),
                   corpus.run_config.string());
      return 0;
    }
    usv::RunConfig config = resolve(opts);
    if (extract->parsed()) {
      require_corpus(config);
      auto summary = usv::run_extract(config);
      if (!summary.within_failure_budget()) {
        spdlog::error("{} of {} files failed (more than 1%)", summary.failed, summary.cohort);
        return 2;
      }
    } else if (partition->parsed()) {
      require_output(config, usv::artifacts::kFeatures);
      auto summary = usv::run_partition(config);
      spdlog::info("partition: {} utterances from {} emitters", summary.utterances,
                   summary.emitters);
    } else if (train_eval->parsed()) {
      require_output(config, usv::artifacts::kFeatures);
      require_output(config, usv::artifacts::kFolds);
      usv::run_train_eval(config);
    } else if (export_spec->parsed()) {
      require_corpus(config);
      auto summary = usv::run_export_spectrograms(config);
      if (!summary.within_failure_budget()) return 2;
    } else if (table->parsed()) {
      require_output(config, usv::artifacts::kFeatures);
      auto rows = usv::run_table1(config);
      spdlog::info("table1: {} contexts", rows.size());
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
