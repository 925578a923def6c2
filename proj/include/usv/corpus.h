// include/usv/corpus.h

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

#ifndef USV_CORPUS_H_
#define USV_CORPUS_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace usv {

// The 11 admissible contexts come first, in alphabetical order; this is the
// class index order used by the classifier, the reports and the confusion
// matrix. kUnknown and kLanding exist only at ingestion.
enum class ContextLabel : int {
  kBiting = 0,
  kFeeding,
  kFighting,
  kGeneral,
  kGrooming,
  kIsolation,
  kKissing,
  kProtesting,
  kSeparation,
  kSleeping,
  kThreatening,
  kUnknown,
  kLanding,
};

inline constexpr int kNumContexts = 11;

std::string_view label_name(ContextLabel label);
// Two-letter code as used in table output (Bi, Fe, ...).
std::string_view label_code(ContextLabel label);
std::optional<ContextLabel> parse_label(std::string_view name);
inline bool is_admissible(ContextLabel label) {
  return static_cast<int>(label) < kNumContexts;
}
inline int label_index(ContextLabel label) { return static_cast<int>(label); }
inline ContextLabel label_from_index(int index) {
  return static_cast<ContextLabel>(index);
}

// Maps the annotation table's columns and codes onto our fields. Loaded from
// a key = value file:
//
//   delimiter = tab            # or comma, or a single character
//   column.id = ...            # required
//   column.emitter = ...       # required
//   column.context = ...       # required
//   column.file = ...          # required, relative to the audio directory
//   column.duration = ...      # optional; else column.start + column.end
//   context.<raw code> = <label name>
//   emitter.placeholders = <code>, <code>, ...
struct SchemaConfig {
  char delimiter = ',';
  std::string id_column;
  std::string emitter_column;
  std::string context_column;
  std::string file_column;
  std::string duration_column;
  std::string start_column;
  std::string end_column;
  std::map<std::string, ContextLabel> context_codes;
  std::set<std::string> emitter_placeholders;

  static SchemaConfig load(const std::filesystem::path& path);
  static SchemaConfig parse(std::string_view text, std::string_view origin);
};

struct RawRecord {
  std::string id;
  std::string audio_file;
  std::string emitter_id;
  ContextLabel context = ContextLabel::kUnknown;
  std::optional<double> duration_s;
  bool emitter_identified = false;  // non-empty and not a placeholder
  std::size_t line = 0;             // 1-based line in the annotation file
};

struct Utterance {
  std::string id;
  std::filesystem::path audio_path;
  std::string emitter_id;
  ContextLabel context = ContextLabel::kUnknown;
  double duration_s = 0.0;
};

// Throws SchemaMismatch when a configured column is absent from the header
// and ParseError (with the line number) for malformed rows.
std::vector<RawRecord> load_annotations(const std::filesystem::path& path,
                                        const SchemaConfig& schema);
std::vector<RawRecord> parse_annotations(std::string_view text,
                                         const SchemaConfig& schema,
                                         std::string_view origin);

inline constexpr double kMaxDurationS = 3.0;

// Counts per exclusion rule. A record is charged to the first rule it hits,
// in declaration order, so the counts sum to the number of dropped records.
struct FilterReport {
  std::size_t unknown_context = 0;
  std::size_t landing = 0;
  std::size_t unidentified_emitter = 0;
  std::size_t too_long = 0;
  std::size_t no_duration = 0;  // duration neither annotated nor probed

  std::size_t dropped() const {
    return unknown_context + landing + unidentified_emitter + too_long +
           no_duration;
  }
  std::string to_csv() const;
};

struct Cohort {
  std::vector<Utterance> utterances;  // sorted by id
  FilterReport report;
};

// Supplies a duration for records whose annotation carries none (typically
// the WAV length). Returning nullopt drops the record as no_duration.
using DurationProbe = std::function<std::optional<double>(const RawRecord&)>;

// Drops unknown/landing contexts, unidentified emitters and utterances longer
// than 3 s (exactly 3 s is kept). Audio paths are resolved against audio_dir.
Cohort filter_cohort(const std::vector<RawRecord>& records,
                     const std::filesystem::path& audio_dir = {},
                     const DurationProbe& probe = {});

}  // namespace usv

#endif  // USV_CORPUS_H_
