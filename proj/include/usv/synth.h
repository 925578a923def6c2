// include/usv/synth.h

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

#ifndef USV_SYNTH_H_
#define USV_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "usv/audio_io.h"
#include "usv/corpus.h"

namespace usv {

// Frequency-modulated test tone with known pitch statistics.
struct SynthSpec {
  ContextLabel context = ContextLabel::kGeneral;
  double f0_mean = 11000.0;  // Hz
  double f0_std = 0.0;       // Hz, of the smoothed frequency jitter
  double f0_slope = 0.0;     // Hz/s, centred on the middle of the clip
  double duration_s = 1.0;
  double amplitude = 0.5;    // (0, 1]
  std::string emitter_id = "synth";
  std::uint64_t seed = 0;
};

// Correlation time of the single-pole low-pass applied to the jitter.
inline constexpr double kJitterTimeConstantS = 0.05;

// Throws SpecOutOfRange unless 0 < f0 +- (3 std + |slope| T/2) < rate/2,
// amplitude in (0, 1] and duration > 0.
void validate(const SynthSpec& spec, double sample_rate);

// Instantaneous frequency f0_mean + f0_slope (t - T/2) + jitter, where the
// jitter is an AR(1) process of stationary std f0_std clipped to 3 std.
// Phase-continuous; bit-identical for identical (spec, rate).
AudioClip synth_utterance(const SynthSpec& spec, double sample_rate);

// Eleven classes with means 6000, 6500, ... 11000 Hz, std 100 Hz, 0.5 s.
std::vector<SynthSpec> default_class_specs();

struct SynthCorpusOptions {
  int n_emitters = 12;
  int per_class_count = 50;
  double sample_rate = 50000.0;
  std::uint64_t seed = 0;
};

struct SynthCorpus {
  std::vector<Utterance> utterances;
  std::filesystem::path audio_dir;
  std::filesystem::path annotations;
  std::filesystem::path schema;
  std::filesystem::path run_config;
};

// Writes audio/<id>.wav (16-bit PCM), annotations.csv, schema.cfg and
// run.cfg under out_dir. Utterances are dealt round-robin to emitters
// bat00, bat01, ... in class-major order.
SynthCorpus synth_corpus(const std::filesystem::path& out_dir,
                         const std::vector<SynthSpec>& class_specs,
                         const SynthCorpusOptions& options);

}  // namespace usv

#endif  // USV_SYNTH_H_
