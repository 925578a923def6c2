// src/corpus.cc

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

#include "usv/corpus.h"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>

#include "usv/error.h"
#include "usv/text_io.h"

namespace usv {

namespace {

struct LabelInfo {
  std::string_view name;
  std::string_view code;
};

constexpr std::array<LabelInfo, 13> kLabels = {{
    {"biting", "Bi"},     {"feeding", "Fe"},     {"fighting", "Fi"},
    {"general", "Ge"},    {"grooming", "Gr"},    {"isolation", "Is"},
    {"kissing", "Ki"},    {"protesting", "Pr"},  {"separation", "Se"},
    {"sleeping", "Sl"},   {"threatening", "Th"}, {"unknown", "Un"},
    {"landing", "La"},
}};

double parse_seconds(const std::string& text, std::string_view what,
                     std::string_view origin, std::size_t line) {
  std::string_view s = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError(fmt::format("{}:{}: {} '{}' is not a number", origin, line,
                                 what, text));
  return v;
}

char parse_delimiter(std::string_view v) {
  if (v == "tab" || v == "\\t") return '\t';
  if (v == "comma") return ',';
  if (v == "semicolon") return ';';
  if (v.size() == 1) return v.front();
  throw ConfigError(fmt::format("unsupported delimiter '{}'", v));
}

}  // namespace

std::string_view label_name(ContextLabel label) {
  return kLabels.at(static_cast<std::size_t>(label)).name;
}

std::string_view label_code(ContextLabel label) {
  return kLabels.at(static_cast<std::size_t>(label)).code;
}

std::optional<ContextLabel> parse_label(std::string_view name) {
  for (std::size_t i = 0; i < kLabels.size(); ++i)
    if (kLabels[i].name == name) return static_cast<ContextLabel>(i);
  return std::nullopt;
}

SchemaConfig SchemaConfig::parse(std::string_view text, std::string_view origin) {
  KeyValueFile kv = KeyValueFile::parse(text, origin);
  SchemaConfig schema;
  for (const auto& [key, value] : kv.entries) {
    if (key == "delimiter") {
      schema.delimiter = parse_delimiter(value);
    } else if (key == "column.id") {
      schema.id_column = value;
    } else if (key == "column.emitter") {
      schema.emitter_column = value;
    } else if (key == "column.context") {
      schema.context_column = value;
    } else if (key == "column.file") {
      schema.file_column = value;
    } else if (key == "column.duration") {
      schema.duration_column = value;
    } else if (key == "column.start") {
      schema.start_column = value;
    } else if (key == "column.end") {
      schema.end_column = value;
    } else if (key.starts_with("context.")) {
      auto label = parse_label(value);
      if (!label)
        throw ConfigError(fmt::format("{}: unknown context label '{}'", origin, value));
      schema.context_codes[key.substr(8)] = *label;
    } else if (key == "emitter.placeholders") {
      for (const auto& code : split_delimited(value, ','))
        schema.emitter_placeholders.insert(std::string(trim(code)));
    } else {
      throw ConfigError(fmt::format("{}: unknown schema key '{}'", origin, key));
    }
  }
  for (auto [name, field] : {std::pair{"column.id", &schema.id_column},
                             std::pair{"column.emitter", &schema.emitter_column},
                             std::pair{"column.context", &schema.context_column},
                             std::pair{"column.file", &schema.file_column}}) {
    if (field->empty())
      throw ConfigError(fmt::format("{}: required key '{}' missing", origin, name));
  }
  if (schema.start_column.empty() != schema.end_column.empty())
    throw ConfigError(fmt::format(
        "{}: column.start and column.end must be given together", origin));
  return schema;
}

SchemaConfig SchemaConfig::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

std::vector<RawRecord> parse_annotations(std::string_view text,
                                         const SchemaConfig& schema,
                                         std::string_view origin) {
  std::vector<RawRecord> records;
  std::vector<std::string> header;
  std::size_t line_no = 0;
  auto column_of = [&](const std::string& name) -> std::optional<std::size_t> {
    if (name.empty()) return std::nullopt;
    auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) {
      return trim(h) == name;
    });
    if (it == header.end())
      throw SchemaMismatch(
          fmt::format("{}: column '{}' not found in header", origin, name));
    return static_cast<std::size_t>(it - header.begin());
  };

  std::optional<std::size_t> id_col, emitter_col, context_col, file_col,
      duration_col, start_col, end_col;
  std::size_t needed = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_delimited(line, schema.delimiter);
    if (header.empty()) {
      header = std::move(fields);
      id_col = column_of(schema.id_column);
      emitter_col = column_of(schema.emitter_column);
      context_col = column_of(schema.context_column);
      file_col = column_of(schema.file_column);
      duration_col = column_of(schema.duration_column);
      start_col = column_of(schema.start_column);
      end_col = column_of(schema.end_column);
      for (auto c : {id_col, emitter_col, context_col, file_col, duration_col,
                     start_col, end_col})
        if (c) needed = std::max(needed, *c + 1);
      continue;
    }
    if (fields.size() < needed)
      throw ParseError(fmt::format("{}:{}: expected at least {} fields, got {}",
                                   origin, line_no, needed, fields.size()));

    RawRecord r;
    r.line = line_no;
    r.id = std::string(trim(fields[*id_col]));
    if (r.id.empty())
      throw ParseError(fmt::format("{}:{}: empty utterance id", origin, line_no));
    r.audio_file = std::string(trim(fields[*file_col]));
    r.emitter_id = std::string(trim(fields[*emitter_col]));
    r.emitter_identified = !r.emitter_id.empty() &&
                           !schema.emitter_placeholders.contains(r.emitter_id);
    auto code = schema.context_codes.find(std::string(trim(fields[*context_col])));
    r.context = code == schema.context_codes.end() ? ContextLabel::kUnknown
                                                   : code->second;
    if (duration_col && !trim(fields[*duration_col]).empty()) {
      r.duration_s = parse_seconds(fields[*duration_col], "duration", origin, line_no);
    } else if (start_col && !trim(fields[*start_col]).empty() &&
               !trim(fields[*end_col]).empty()) {
      double start = parse_seconds(fields[*start_col], "start", origin, line_no);
      double end = parse_seconds(fields[*end_col], "end", origin, line_no);
      r.duration_s = end - start;
    }
    if (r.duration_s && *r.duration_s <= 0.0)
      throw ParseError(fmt::format("{}:{}: non-positive duration {}", origin,
                                   line_no, *r.duration_s));
    records.push_back(std::move(r));
  }
  if (header.empty())
    throw SchemaMismatch(fmt::format("{}: annotation file has no header", origin));
  return records;
}

std::vector<RawRecord> load_annotations(const std::filesystem::path& path,
                                        const SchemaConfig& schema) {
  return parse_annotations(read_file(path), schema, path.string());
}

std::string FilterReport::to_csv() const {
  return fmt::format(
      "rule,count\nunknown_context,{}\nlanding,{}\nunidentified_emitter,{}\n"
      "too_long,{}\nno_duration,{}\n",
      unknown_context, landing, unidentified_emitter, too_long, no_duration);
}

Cohort filter_cohort(const std::vector<RawRecord>& records,
                     const std::filesystem::path& audio_dir,
                     const DurationProbe& probe) {
  Cohort cohort;
  for (const RawRecord& r : records) {
    if (r.context == ContextLabel::kUnknown) {
      ++cohort.report.unknown_context;
      continue;
    }
    if (r.context == ContextLabel::kLanding) {
      ++cohort.report.landing;
      continue;
    }
    if (!r.emitter_identified) {
      ++cohort.report.unidentified_emitter;
      continue;
    }
    std::optional<double> duration = r.duration_s;
    if (!duration && probe) duration = probe(r);
    if (!duration || !(*duration > 0.0)) {
      ++cohort.report.no_duration;
      continue;
    }
    if (*duration > kMaxDurationS) {
      ++cohort.report.too_long;
      continue;
    }
    cohort.utterances.push_back(
        {r.id, audio_dir / r.audio_file, r.emitter_id, r.context, *duration});
  }
  std::sort(cohort.utterances.begin(), cohort.utterances.end(),
            [](const Utterance& a, const Utterance& b) { return a.id < b.id; });
  return cohort;
}

}  // namespace usv
