// include/usv/spectral.h

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

#ifndef USV_SPECTRAL_H_
#define USV_SPECTRAL_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "usv/audio_io.h"

namespace usv {

// Magnitude STFT, row-major [frames x bins], linear magnitude.
struct Spectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;  // fft_size / 2 + 1
  std::vector<float> magnitudes;
  double frame_hop_s = 0.0;
  double window_s = 0.0;
  double bin_hz = 0.0;  // sample_rate / fft_size
  double sample_rate = 0.0;

  float at(std::size_t frame, std::size_t bin) const {
    return magnitudes[frame * bins + bin];
  }
  std::span<const float> row(std::size_t frame) const {
    return {magnitudes.data() + frame * bins, bins};
  }
};

// Analysis parameters for the F0 tracker and for the exported CNN input.
inline constexpr double kPitchWindowS = 0.100;
inline constexpr double kPitchHopS = 0.016;
inline constexpr std::size_t kExportWindowSamples = 4096;
inline constexpr double kExportHopS = 0.010;
inline constexpr double kExportDurationS = 3.0;

// floor((length - window) / hop) + 1, or 0 if length < window.
std::size_t stft_frame_count(std::size_t length, std::size_t window,
                             std::size_t hop);

// Periodic Hann window of the given length.
std::vector<double> hann_window(std::size_t length);

// Frame t covers samples [t*hop, t*hop + window); FFT size equals the window
// length. Throws ClipTooShort if the clip is shorter than one window and
// std::invalid_argument if window or hop is zero.
Spectrogram stft_samples(const AudioClip& clip, std::size_t window,
                         std::size_t hop);

// Seconds are converted to samples by rounding against the clip's rate.
Spectrogram stft(const AudioClip& clip, double window_s, double hop_s);

// Pads to 3 s, then a 4096-point STFT with a 10 ms hop (299 x 2049 frames
// at 250 kHz). Throws ClipTooLong for clips longer than 3 s.
Spectrogram export_spectrogram(const AudioClip& clip);

// Binary tensor: "USVT", version u32 = 1, dtype u32 = 1 (float32), rank
// u32 = 2, dims u32 (frames, bins), then row-major little-endian float32.
void write_tensor(const Spectrogram& spec, const std::filesystem::path& path);

// Reads back the magnitude matrix; timing metadata is not stored.
Spectrogram read_tensor(const std::filesystem::path& path);

}  // namespace usv

#endif  // USV_SPECTRAL_H_
