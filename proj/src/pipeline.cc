// src/pipeline.cc

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

#include "usv/pipeline.h"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "json.hpp"
#include "usv/audio_io.h"
#include "usv/classifier.h"
#include "usv/error.h"
#include "usv/parallel.h"
#include "usv/partition.h"
#include "usv/random.h"
#include "usv/spectral.h"
#include "usv/text_io.h"

namespace usv {

namespace fs = std::filesystem;

namespace {

std::string features_header() {
  std::string h = "utterance_id,emitter_id,context,duration_s";
  for (auto name : kFeatureNames) h += fmt::format(",{}", name);
  return h;
}

double parse_double(const std::string& s, std::string_view what) {
  double v = 0.0;
  auto t = trim(s);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw ParseError(fmt::format("{}: '{}' is not a number", what, s));
  return v;
}

fs::path out_path(const RunConfig& config, std::string_view name) {
  return config.out_dir / fs::path(name);
}

std::vector<FeatureRow> read_features(const RunConfig& config) {
  return features_from_csv(read_file(out_path(config, artifacts::kFeatures)));
}

// Annotation table -> filtered cohort, probing WAV headers for durations the
// table does not carry.
Cohort load_cohort(const RunConfig& config) {
  SchemaConfig schema = SchemaConfig::load(config.schema);
  auto records = load_annotations(config.annotations, schema);
  DurationProbe probe = [&config](const RawRecord& r) -> std::optional<double> {
    try {
      return wav_duration_s(config.audio_dir / r.audio_file);
    } catch (const Error& e) {
      spdlog::warn("{}: no duration: {}", r.id, e.what());
      return std::nullopt;
    }
  };
  return filter_cohort(records, config.audio_dir, probe);
}

bool within_budget(std::size_t failed, std::size_t total) {
  return static_cast<double>(failed) <= kMaxFailureShare * static_cast<double>(total);
}

}  // namespace

RunConfig RunConfig::load(const fs::path& path) {
  KeyValueFile kv = KeyValueFile::load(path);
  const fs::path base = path.parent_path();
  auto resolve = [&base](const std::string& v) {
    fs::path p(v);
    return p.is_absolute() ? p : (base / p).lexically_normal();
  };
  RunConfig config;
  for (const auto& [key, value] : kv.entries) {
    try {
      if (key == "audio_dir") {
        config.audio_dir = resolve(value);
      } else if (key == "annotations") {
        config.annotations = resolve(value);
      } else if (key == "schema") {
        config.schema = resolve(value);
      } else if (key == "out_dir") {
        config.out_dir = resolve(value);
      } else if (key == "seed") {
        config.seed = std::stoull(value);
      } else if (key == "grid") {
        config.grid = parse_grid(value);
      } else if (key == "replicates") {
        config.replicates = std::stoi(value);
      } else if (key == "threads") {
        config.threads = static_cast<unsigned>(std::stoul(value));
      } else {
        throw ConfigError(fmt::format("{}: unknown key '{}'", path.string(), key));
      }
    } catch (const std::logic_error&) {
      throw ConfigError(fmt::format("{}: bad value '{}' for '{}'", path.string(),
                                    value, key));
    }
  }
  return config;
}

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> grid;
  for (const auto& item : split_delimited(text, ',')) {
    double v = 0.0;
    try {
      v = parse_double(item, "grid");
    } catch (const ParseError& e) {
      throw ConfigError(e.what());
    }
    if (!(v > 0.0)) throw ConfigError(fmt::format("grid value {} must be positive", v));
    grid.push_back(v);
  }
  if (grid.empty()) throw ConfigError("empty cost grid");
  return grid;
}

std::vector<double> RunConfig::cost_grid() const { return grid ? *grid : kCostGrid; }

std::string RunConfig::hash() const {
  std::string canonical = fmt::format(
      "audio_dir={}\nannotations={}\nschema={}\nout_dir={}\nreplicates={}\ngrid=",
      audio_dir.generic_string(), annotations.generic_string(),
      schema.generic_string(), out_dir.generic_string(), replicates);
  for (double c : cost_grid()) canonical += fmt::format("{:.17g};", c);
  return fmt::format("{:016x}", fnv1a64(canonical));
}

std::string RunConfig::provenance() const {
  return fmt::format("{} {} seed={} config={}", kToolName, kToolVersion, seed, hash());
}

std::string features_to_csv(const std::vector<FeatureRow>& rows,
                            std::string_view provenance) {
  std::string out = fmt::format("# {}\n{}\n", provenance, features_header());
  for (const FeatureRow& r : rows) {
    out += fmt::format("{},{},{},{}", quote_field(r.id), quote_field(r.emitter_id),
                       label_name(r.context), format_g6(r.duration_s));
    for (double v : r.features.values()) out += "," + format_g6(v);
    out += '\n';
  }
  return out;
}

std::vector<FeatureRow> features_from_csv(std::string_view text) {
  auto lines = data_lines(text);
  std::vector<FeatureRow> rows;
  if (lines.empty()) return rows;
  if (lines.front() != features_header())
    throw ParseError("features file: unexpected header '" + lines.front() + "'");
  for (std::size_t l = 1; l < lines.size(); ++l) {
    auto f = split_delimited(lines[l], ',');
    if (f.size() != 4 + kFeatureCount)
      throw ParseError(fmt::format("features row {}: expected {} fields, got {}", l,
                                   4 + kFeatureCount, f.size()));
    FeatureRow r;
    r.id = f[0];
    r.emitter_id = f[1];
    auto label = parse_label(f[2]);
    if (!label || !is_admissible(*label))
      throw ParseError(fmt::format("features row {}: bad context '{}'", l, f[2]));
    r.context = *label;
    r.duration_s = parse_double(f[3], "duration_s");
    std::array<double, kFeatureCount> v{};
    for (std::size_t k = 0; k < kFeatureCount; ++k)
      v[k] = parse_double(f[4 + k], kFeatureNames[k]);
    r.features = FeatureVector::from_values(v);
    rows.push_back(std::move(r));
  }
  return rows;
}

bool ExtractSummary::within_failure_budget() const { return within_budget(failed, cohort); }
bool ExportSummary::within_failure_budget() const { return within_budget(failed, cohort); }

ExtractSummary run_extract(const RunConfig& config) {
  Cohort cohort = load_cohort(config);
  fs::create_directories(config.out_dir);
  const std::string provenance = config.provenance();
  write_file(out_path(config, artifacts::kFilterReport),
             fmt::format("# {}\n{}", provenance, cohort.report.to_csv()));

  enum class Outcome { kOk, kSkipped, kFailed };
  const auto& utts = cohort.utterances;
  std::vector<FeatureRow> rows(utts.size());
  std::vector<Outcome> outcome(utts.size(), Outcome::kFailed);
  std::vector<std::string> reason(utts.size());
  parallel_for(
      utts.size(),
      [&](std::size_t i) {
        const Utterance& u = utts[i];
        try {
          AudioClip clip = load_wav(u.audio_path);
          ContourStats stats = contour_stats(extract_f0(clip));
          rows[i] = {u.id, u.emitter_id, u.context, u.duration_s, stats.features};
          outcome[i] = Outcome::kOk;
        } catch (const EmptyVoicedSet&) {
          outcome[i] = Outcome::kSkipped;
          reason[i] = "no_voiced_frames";
        } catch (const ClipTooShort&) {
          outcome[i] = Outcome::kSkipped;
          reason[i] = "shorter_than_window";
        } catch (const Error& e) {
          spdlog::error("{}: {}", u.id, e.what());
          reason[i] = e.what();
        }
      },
      config.threads);

  ExtractSummary summary;
  summary.cohort = utts.size();
  summary.filter = cohort.report;
  std::vector<FeatureRow> kept;
  std::string skipped = fmt::format("# {}\nutterance_id,reason\n", provenance);
  for (std::size_t i = 0; i < utts.size(); ++i) {
    switch (outcome[i]) {
      case Outcome::kOk:
        kept.push_back(std::move(rows[i]));
        break;
      case Outcome::kSkipped:
        ++summary.skipped;
        skipped += fmt::format("{},{}\n", quote_field(utts[i].id), reason[i]);
        break;
      case Outcome::kFailed:
        ++summary.failed;
        break;
    }
  }
  summary.rows = kept.size();
  write_file(out_path(config, artifacts::kFeatures), features_to_csv(kept, provenance));
  write_file(out_path(config, artifacts::kSkipped), skipped);
  spdlog::info("extract: cohort {} (dropped {}), {} feature rows, {} skipped, {} failed",
               summary.cohort, cohort.report.dropped(), summary.rows,
               summary.skipped, summary.failed);
  return summary;
}

PartitionSummary run_partition(const RunConfig& config) {
  auto rows = read_features(config);
  std::vector<Utterance> cohort;
  cohort.reserve(rows.size());
  for (const auto& r : rows) cohort.push_back({r.id, {}, r.emitter_id, r.context, r.duration_s});
  FoldPlan plan = make_folds(cohort, config.seed);
  for (int f = 0; f < kFoldCount; ++f) split_dev(plan, f, config.seed);
  const std::vector<std::string> comments = {config.provenance()};
  write_file(out_path(config, artifacts::kFolds), plan.to_csv(comments));

  PartitionSummary summary;
  summary.utterances = plan.size();
  summary.emitters = std::set<std::string>(plan.emitters.begin(), plan.emitters.end()).size();
  return summary;
}

TrainEvalSummary run_train_eval(const RunConfig& config) {
  auto rows = read_features(config);
  FoldPlan plan = FoldPlan::from_csv(read_file(out_path(config, artifacts::kFolds)));
  std::map<std::string, std::size_t> plan_index;
  for (std::size_t i = 0; i < plan.size(); ++i) plan_index[plan.ids[i]] = i;
  for (const auto& r : rows)
    if (!plan_index.contains(r.id))
      throw ParseError("fold plan has no entry for utterance " + r.id);
  if (rows.size() != plan.size())
    throw ParseError("fold plan and feature file cover different utterances");

  const std::vector<double> grid = config.cost_grid();
  const std::vector<std::string> comments = {config.provenance()};
  PredictionSet preds;
  TrainEvalSummary summary;
  std::string selection = fmt::format("# {}\nfold,cost,validation_uar,chosen\n",
                                      config.provenance());
  for (int f = 0; f < kFoldCount; ++f) {
    Matrix dev, test;
    std::vector<int> dev_labels;
    std::vector<bool> is_validation;
    std::vector<const FeatureRow*> test_rows;
    for (const auto& r : rows) {
      auto values = r.features.values();
      FoldRole role = plan.roles[plan_index.at(r.id)][f];
      if (role == FoldRole::kTest) {
        test.push_row(values);
        test_rows.push_back(&r);
      } else {
        dev.push_row(values);
        dev_labels.push_back(label_index(r.context));
        is_validation.push_back(role == FoldRole::kValidation);
      }
    }
    if (dev.rows == 0) throw ParseError(fmt::format("fold {} has an empty dev set", f));
    const std::uint64_t fold_seed = Rng(config.seed, {static_cast<std::uint64_t>(f)}).engine()();
    SelectionResult sel = nested_select(dev, dev_labels, is_validation, grid,
                                        kNumContexts, fold_seed);
    for (std::size_t g = 0; g < grid.size(); ++g)
      selection += fmt::format("{},{},{},{}\n", f, format_g6(grid[g]),
                               format_g6(sel.validation_uar[g]), g == sel.chosen ? 1 : 0);
    summary.chosen_costs.push_back(sel.model.cost);
    write_file(config.out_dir / fmt::format("model_fold{}.txt", f),
               sel.model.serialise(comments));
    for (std::size_t i = 0; i < test.rows; ++i) {
      int predicted = predict_index(sel.model, test.row(i));
      preds.push_back({test_rows[i]->id, label_index(test_rows[i]->context), predicted, f});
    }
    spdlog::info("fold {}: dev {}, test {}, cost {}", f, dev.rows, test.rows,
                 sel.model.cost);
  }
  std::sort(preds.begin(), preds.end(),
            [](const Prediction& a, const Prediction& b) { return a.id < b.id; });
  summary.report = evaluate(preds, kNumContexts, config.replicates, config.seed);
  const EvaluationReport& rep = summary.report;

  std::string pred_csv = fmt::format("# {}\nutterance_id,true,predicted,fold\n",
                                     config.provenance());
  for (const auto& p : preds)
    pred_csv += fmt::format("{},{},{},{}\n", quote_field(p.id),
                            label_name(label_from_index(p.truth)),
                            label_name(label_from_index(p.predicted)), p.fold);
  write_file(out_path(config, artifacts::kPredictions), pred_csv);
  write_file(out_path(config, artifacts::kSelection), selection);

  std::string conf = fmt::format("# {}\ntrue\\predicted", config.provenance());
  for (int c = 0; c < kNumContexts; ++c) conf += fmt::format(",{}", label_name(label_from_index(c)));
  conf += '\n';
  for (int r = 0; r < kNumContexts; ++r) {
    conf += label_name(label_from_index(r));
    for (double v : rep.confusion[r]) conf += "," + format_g6(v);
    conf += '\n';
  }
  write_file(out_path(config, artifacts::kConfusion), conf);

  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["seed"] = config.seed;
  j["config_hash"] = config.hash();
  j["n"] = rep.n;
  j["uar"] = rep.uar;
  j["ci"] = {{"level", 0.95}, {"low", rep.ci.low}, {"high", rep.ci.high},
             {"replicates", config.replicates}};
  nlohmann::ordered_json recall;
  for (int c = 0; c < kNumContexts; ++c)
    recall[std::string(label_name(label_from_index(c)))] = rep.per_class_recall[c];
  j["per_class_recall"] = recall;
  j["chosen_cost"] = summary.chosen_costs;
  std::vector<std::string> labels;
  for (int c = 0; c < kNumContexts; ++c) labels.emplace_back(label_name(label_from_index(c)));
  j["labels"] = labels;
  j["confusion"] = rep.confusion;
  write_file(out_path(config, artifacts::kReport), j.dump(2) + "\n");
  spdlog::info("train-eval: UAR {:.4f} [{:.4f} - {:.4f}] over {} predictions", rep.uar,
               rep.ci.low, rep.ci.high, rep.n);
  return summary;
}

ExportSummary run_export_spectrograms(const RunConfig& config) {
  Cohort cohort = load_cohort(config);
  const fs::path dir = out_path(config, artifacts::kSpectrogramDir);
  fs::create_directories(dir);
  const auto& utts = cohort.utterances;
  std::vector<char> ok(utts.size(), 0);
  parallel_for(
      utts.size(),
      [&](std::size_t i) {
        try {
          write_tensor(export_spectrogram(load_wav(utts[i].audio_path)),
                       dir / (utts[i].id + ".usvt"));
          ok[i] = 1;
        } catch (const Error& e) {
          spdlog::error("{}: {}", utts[i].id, e.what());
        }
      },
      config.threads);
  ExportSummary summary;
  summary.cohort = utts.size();
  summary.written = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 1));
  summary.failed = summary.cohort - summary.written;
  spdlog::info("export: {} of {} spectrograms written", summary.written, summary.cohort);
  return summary;
}

std::vector<Table1Row> table1(const std::vector<FeatureRow>& rows) {
  std::array<Table1Row, kNumContexts> acc{};
  for (const auto& r : rows) {
    Table1Row& t = acc[label_index(r.context)];
    ++t.n;
    t.mean += r.features.mean_voiced;
    t.std += r.features.std_voiced;
    t.max += r.features.max_voiced;
    t.min += r.features.min_voiced;
    t.slope += r.features.slope_voiced;
  }
  std::vector<Table1Row> out;
  for (int k = 0; k < kNumContexts; ++k) {
    Table1Row t = acc[k];
    if (t.n == 0) continue;
    const double n = static_cast<double>(t.n);
    t.context = label_from_index(k);
    t.mean /= n;
    t.std /= n;
    t.max /= n;
    t.min /= n;
    t.slope /= n;
    out.push_back(t);
  }
  return out;
}

std::vector<Table1Row> run_table1(const RunConfig& config) {
  auto table = table1(read_features(config));
  std::string csv = fmt::format(
      "# {}\ncontext,code,n,mean_hz,std_hz,max_hz,min_hz,slope_hz_per_s\n",
      config.provenance());
  for (const auto& t : table)
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", label_name(t.context),
                       label_code(t.context), t.n, std::lround(t.mean),
                       std::lround(t.std), std::lround(t.max), std::lround(t.min),
                       std::lround(t.slope));
  write_file(out_path(config, artifacts::kTable1), csv);
  return table;
}

}  // namespace usv
