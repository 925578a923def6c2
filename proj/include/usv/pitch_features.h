// include/usv/pitch_features.h

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

#ifndef USV_PITCH_FEATURES_H_
#define USV_PITCH_FEATURES_H_

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "usv/audio_io.h"
#include "usv/spectral.h"

namespace usv {

struct PitchContour {
  std::vector<double> f0_hz;  // 0 for unvoiced frames
  std::vector<bool> voiced;
  std::vector<double> frame_times_s;  // frame start

  std::size_t size() const { return f0_hz.size(); }
  std::size_t voiced_count() const;
};

inline constexpr std::size_t kFeatureCount = 10;

// Contour statistics twice: over all frames (unvoiced counted as 0 Hz) and
// over voiced frames only. Slopes are in Hz/s.
struct FeatureVector {
  double mean_all = 0, std_all = 0, max_all = 0, min_all = 0, slope_all = 0;
  double mean_voiced = 0, std_voiced = 0, max_voiced = 0, min_voiced = 0,
         slope_voiced = 0;

  std::array<double, kFeatureCount> values() const;
  static FeatureVector from_values(const std::array<double, kFeatureCount>& v);
};

// Column names in FeatureVector::values() order.
extern const std::array<std::string_view, kFeatureCount> kFeatureNames;

struct ContourStats {
  FeatureVector features;
  // Set when a slope could not be fit (< 2 points); the slope is reported 0.
  bool degenerate_slope_all = false;
  bool degenerate_slope_voiced = false;
};

// Bins more than this many dB below the reference level are discarded.
inline constexpr double kGateDb = 20.0;

// F0 from an already computed magnitude spectrogram:
//   reference = max over bins of the frame-averaged energy |X|^2,
//   bins with 10*log10(|X|^2) < 10*log10(reference) - 20 are zeroed,
//   each frame's F0 is the centre frequency of its largest surviving bin.
// Frames with no surviving bin are unvoiced. The DC bin is never a pitch
// candidate. An all-zero spectrogram yields an all-unvoiced contour.
PitchContour track_f0(const Spectrogram& spec);

// STFT with 100 ms windows and 16 ms hop followed by track_f0.
// Throws ClipTooShort for clips shorter than one window.
PitchContour extract_f0(const AudioClip& clip);

// Population mean/std, extrema and least-squares slope against frame time.
// Throws EmptyVoicedSet if no frame is voiced and std::invalid_argument on an
// empty contour.
ContourStats contour_stats(const PitchContour& contour);

}  // namespace usv

#endif  // USV_PITCH_FEATURES_H_
