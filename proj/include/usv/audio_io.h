// include/usv/audio_io.h

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

#ifndef USV_AUDIO_IO_H_
#define USV_AUDIO_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace usv {

// Sample rate of the field recordings. Other rates are accepted; every
// window/hop length is derived from the clip's own rate.
inline constexpr double kCorpusSampleRate = 250000.0;

struct AudioClip {
  std::vector<float> samples;  // normalised to [-1, 1]
  double sample_rate = 0.0;    // Hz
  std::string source_id;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

enum class WavEncoding { kPcm16, kFloat32 };

// Reads a mono RIFF/WAVE file. Integer PCM (8/16/24/32 bit) is divided by
// the magnitude of the type's most negative value; IEEE float is taken as-is.
// Throws MalformedWav, UnsupportedFormat or IoError.
AudioClip load_wav(const std::filesystem::path& path);

// Header-only probe: number of frames / sample rate, without decoding data.
double wav_duration_s(const std::filesystem::path& path);

// Writes a mono WAV. kPcm16 rounds to nearest and saturates.
void write_wav(const AudioClip& clip, const std::filesystem::path& path,
               WavEncoding encoding = WavEncoding::kPcm16);

// Zero-pads to round(duration_s * sample_rate) samples, keeping the original
// prefix. Throws ClipTooLong if the clip is already longer.
AudioClip pad_to_duration(const AudioClip& clip, double duration_s);

}  // namespace usv

#endif  // USV_AUDIO_IO_H_
