// include/usv/pipeline.h

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

#ifndef USV_PIPELINE_H_
#define USV_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "usv/corpus.h"
#include "usv/evaluation.h"
#include "usv/pitch_features.h"

namespace usv {

inline constexpr std::string_view kToolName = "usvctx";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Per-file failures above this share of the cohort make a stage fail.
inline constexpr double kMaxFailureShare = 0.01;

struct RunConfig {
  std::filesystem::path audio_dir;
  std::filesystem::path annotations;
  std::filesystem::path schema;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  std::optional<std::vector<double>> grid;
  int replicates = kBootstrapReplicates;
  unsigned threads = 0;  // 0 = hardware concurrency

  // key = value file with the field names above; relative paths are
  // resolved against the file's directory. Throws ConfigError.
  static RunConfig load(const std::filesystem::path& path);

  std::vector<double> cost_grid() const;
  // Stable hash over every field except the seed and thread count.
  std::string hash() const;
  // "usvctx 0.1.0 seed=<seed> config=<hash>"
  std::string provenance() const;
};

// Comma list of positive numbers; throws ConfigError.
std::vector<double> parse_grid(std::string_view text);

// One row of features.csv.
struct FeatureRow {
  std::string id;
  std::string emitter_id;
  ContextLabel context = ContextLabel::kUnknown;
  double duration_s = 0.0;
  FeatureVector features;
};

std::string features_to_csv(const std::vector<FeatureRow>& rows,
                            std::string_view provenance);
std::vector<FeatureRow> features_from_csv(std::string_view text);

// Output file names inside RunConfig::out_dir.
namespace artifacts {
inline constexpr std::string_view kFeatures = "features.csv";
inline constexpr std::string_view kSkipped = "skipped.csv";
inline constexpr std::string_view kFilterReport = "filter_report.csv";
inline constexpr std::string_view kFolds = "folds.csv";
inline constexpr std::string_view kPredictions = "predictions.csv";
inline constexpr std::string_view kSelection = "selection.csv";
inline constexpr std::string_view kReport = "report.json";
inline constexpr std::string_view kConfusion = "confusion.csv";
inline constexpr std::string_view kTable1 = "table1.csv";
inline constexpr std::string_view kSpectrogramDir = "spectrograms";
}  // namespace artifacts

struct ExtractSummary {
  std::size_t cohort = 0;
  std::size_t rows = 0;
  std::size_t skipped = 0;  // no voiced frame, or shorter than one window
  std::size_t failed = 0;   // unreadable audio and similar per-file errors
  FilterReport filter;
  bool within_failure_budget() const;
};

// Stages read and write only files under config.out_dir (plus the corpus
// inputs). Structural problems throw; per-file problems are logged and
// counted in the returned summary.
ExtractSummary run_extract(const RunConfig& config);

struct PartitionSummary {
  std::size_t utterances = 0;
  std::size_t emitters = 0;
};
PartitionSummary run_partition(const RunConfig& config);

struct TrainEvalSummary {
  EvaluationReport report;
  std::vector<double> chosen_costs;  // per fold
};
TrainEvalSummary run_train_eval(const RunConfig& config);

struct ExportSummary {
  std::size_t cohort = 0;
  std::size_t written = 0;
  std::size_t failed = 0;
  bool within_failure_budget() const;
};
ExportSummary run_export_spectrograms(const RunConfig& config);

struct Table1Row {
  ContextLabel context = ContextLabel::kUnknown;
  std::size_t n = 0;
  double mean = 0, std = 0, max = 0, min = 0, slope = 0;
};
// Per-context averages of the voiced-only statistics.
std::vector<Table1Row> table1(const std::vector<FeatureRow>& rows);
std::vector<Table1Row> run_table1(const RunConfig& config);

}  // namespace usv

#endif  // USV_PIPELINE_H_
