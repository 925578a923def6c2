// src/synth.cc

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

#include "usv/synth.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "usv/error.h"
#include "usv/parallel.h"
#include "usv/random.h"
#include "usv/text_io.h"

namespace usv {

void validate(const SynthSpec& spec, double sample_rate) {
  if (!(spec.amplitude > 0.0) || spec.amplitude > 1.0)
    throw SpecOutOfRange(fmt::format("amplitude {} outside (0, 1]", spec.amplitude));
  if (!(spec.duration_s > 0.0))
    throw SpecOutOfRange(fmt::format("duration {} s must be positive", spec.duration_s));
  if (!(spec.f0_std >= 0.0))
    throw SpecOutOfRange(fmt::format("negative f0 std {}", spec.f0_std));
  const double excursion =
      3.0 * spec.f0_std + std::abs(spec.f0_slope) * spec.duration_s / 2.0;
  if (!(spec.f0_mean - excursion > 0.0) ||
      !(spec.f0_mean + excursion < sample_rate / 2.0))
    throw SpecOutOfRange(fmt::format(
        "f0 range [{}, {}] Hz not inside (0, {}) Hz", spec.f0_mean - excursion,
        spec.f0_mean + excursion, sample_rate / 2.0));
}

AudioClip synth_utterance(const SynthSpec& spec, double sample_rate) {
  validate(spec, sample_rate);
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * sample_rate));
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.source_id = fmt::format("synth_{}", spec.seed);
  clip.samples.resize(n);

  Rng rng(spec.seed, {0x73796e74ULL});
  const double a = std::exp(-1.0 / (kJitterTimeConstantS * sample_rate));
  const double innovation = std::sqrt(1.0 - a * a) * spec.f0_std;
  const double limit = 3.0 * spec.f0_std;
  double jitter = spec.f0_std > 0.0 ? spec.f0_std * rng.normal() : 0.0;
  double phase = 0.0;
  const double half = spec.duration_s / 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    clip.samples[i] = static_cast<float>(spec.amplitude * std::sin(phase));
    double f = spec.f0_mean + spec.f0_slope * (t - half);
    if (spec.f0_std > 0.0) {
      f += std::clamp(jitter, -limit, limit);
      jitter = a * jitter + innovation * rng.normal();
    }
    phase += 2.0 * std::numbers::pi * f / sample_rate;
    if (phase > 2.0 * std::numbers::pi) phase -= 2.0 * std::numbers::pi;
  }
  return clip;
}

std::vector<SynthSpec> default_class_specs() {
  std::vector<SynthSpec> specs;
  for (int k = 0; k < kNumContexts; ++k) {
    SynthSpec s;
    s.context = label_from_index(k);
    s.f0_mean = 6000.0 + 500.0 * k;
    s.f0_std = 100.0;
    s.f0_slope = 0.0;
    s.duration_s = 0.5;
    s.amplitude = 0.5;
    specs.push_back(s);
  }
  return specs;
}

SynthCorpus synth_corpus(const std::filesystem::path& out_dir,
                         const std::vector<SynthSpec>& class_specs,
                         const SynthCorpusOptions& options) {
  if (options.n_emitters < 1) throw SpecOutOfRange("need at least one emitter");
  if (options.per_class_count < 0) throw SpecOutOfRange("negative class count");
  for (const auto& s : class_specs) validate(s, options.sample_rate);

  SynthCorpus corpus;
  corpus.audio_dir = out_dir / "audio";
  corpus.annotations = out_dir / "annotations.csv";
  corpus.schema = out_dir / "schema.cfg";
  corpus.run_config = out_dir / "run.cfg";
  std::filesystem::create_directories(corpus.audio_dir);

  std::vector<SynthSpec> jobs;
  std::size_t counter = 0;
  for (const SynthSpec& base : class_specs) {
    for (int i = 0; i < options.per_class_count; ++i, ++counter) {
      SynthSpec s = base;
      s.emitter_id = fmt::format("bat{:02d}", counter % options.n_emitters);
      s.seed = Rng(options.seed, {static_cast<std::uint64_t>(label_index(base.context)),
                                  static_cast<std::uint64_t>(i)})
                   .engine()();
      jobs.push_back(s);
      Utterance u;
      u.id = fmt::format("{}_{:04d}", label_name(base.context), i);
      u.emitter_id = s.emitter_id;
      u.context = base.context;
      u.audio_path = corpus.audio_dir / (u.id + ".wav");
      u.duration_s = std::llround(s.duration_s * options.sample_rate) / options.sample_rate;
      corpus.utterances.push_back(u);
    }
  }

  parallel_for(jobs.size(), [&](std::size_t j) {
    write_wav(synth_utterance(jobs[j], options.sample_rate),
              corpus.utterances[j].audio_path);
  });

  std::string table = "id,file,emitter,context,duration\n";
  for (const Utterance& u : corpus.utterances)
    table += fmt::format("{},{},{},{},{}\n", u.id, u.audio_path.filename().string(),
                         u.emitter_id, label_name(u.context), format_g6(u.duration_s));
  write_file(corpus.annotations, table);

  std::string schema =
      "delimiter = comma\n"
      "column.id = id\n"
      "column.file = file\n"
      "column.emitter = emitter\n"
      "column.context = context\n"
      "column.duration = duration\n"
      "emitter.placeholders = unknown\n";
  for (int k = 0; k < kNumContexts; ++k)
    schema += fmt::format("context.{0} = {0}\n", label_name(label_from_index(k)));
  write_file(corpus.schema, schema);

  write_file(corpus.run_config,
             fmt::format("audio_dir = audio\nannotations = annotations.csv\n"
                         "schema = schema.cfg\nout_dir = results\nseed = {}\n",
                         options.seed));
  return corpus;
}

}  // namespace usv
