// src/pitch_features.cc

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

#include "usv/pitch_features.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "usv/error.h"

namespace usv {

const std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "f0_mean_all",    "f0_std_all",    "f0_max_all",    "f0_min_all",
    "f0_slope_all",   "f0_mean_voiced", "f0_std_voiced", "f0_max_voiced",
    "f0_min_voiced",  "f0_slope_voiced"};

std::size_t PitchContour::voiced_count() const {
  return static_cast<std::size_t>(std::count(voiced.begin(), voiced.end(), true));
}

std::array<double, kFeatureCount> FeatureVector::values() const {
  return {mean_all,    std_all,    max_all,    min_all,    slope_all,
          mean_voiced, std_voiced, max_voiced, min_voiced, slope_voiced};
}

FeatureVector FeatureVector::from_values(
    const std::array<double, kFeatureCount>& v) {
  FeatureVector f;
  f.mean_all = v[0];
  f.std_all = v[1];
  f.max_all = v[2];
  f.min_all = v[3];
  f.slope_all = v[4];
  f.mean_voiced = v[5];
  f.std_voiced = v[6];
  f.max_voiced = v[7];
  f.min_voiced = v[8];
  f.slope_voiced = v[9];
  return f;
}

PitchContour track_f0(const Spectrogram& spec) {
  PitchContour contour;
  contour.f0_hz.assign(spec.frames, 0.0);
  contour.voiced.assign(spec.frames, false);
  contour.frame_times_s.resize(spec.frames);
  for (std::size_t t = 0; t < spec.frames; ++t)
    contour.frame_times_s[t] = static_cast<double>(t) * spec.frame_hop_s;
  if (spec.frames == 0) return contour;

  // Time-averaged energy per bin; the loudest one sets the reference.
  std::vector<double> mean_energy(spec.bins, 0.0);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    auto row = spec.row(t);
    for (std::size_t k = 0; k < spec.bins; ++k) {
      double m = row[k];
      mean_energy[k] += m * m;
    }
  }
  double reference = 0.0;
  for (double& e : mean_energy) {
    e /= static_cast<double>(spec.frames);
    reference = std::max(reference, e);
  }
  // Silence: the reference level is -inf dB and nothing survives the gate.
  if (reference <= 0.0) return contour;

  // 10*log10(e) >= 10*log10(ref) - 20  <=>  e >= ref * 10^-2.
  const double threshold = reference * std::pow(10.0, -kGateDb / 10.0);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    auto row = spec.row(t);
    std::size_t best = 0;
    double best_mag = 0.0;
    for (std::size_t k = 1; k < spec.bins; ++k) {
      double m = row[k];
      if (m * m < threshold) continue;
      if (m > best_mag) {
        best_mag = m;
        best = k;
      }
    }
    if (best != 0) {
      contour.voiced[t] = true;
      contour.f0_hz[t] = static_cast<double>(best) * spec.bin_hz;
    }
  }
  return contour;
}

PitchContour extract_f0(const AudioClip& clip) {
  return track_f0(stft(clip, kPitchWindowS, kPitchHopS));
}

namespace {

struct Summary {
  double mean = 0, std = 0, max = 0, min = 0, slope = 0;
  bool degenerate_slope = false;
};

Summary summarise(const std::vector<double>& times,
                  const std::vector<double>& values) {
  Summary s;
  const std::size_t n = values.size();
  const double count = static_cast<double>(n);
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / count;
  // Rounding in the mean can leave a residue for constant inputs.
  if (s.min == s.max) s.mean = s.min;

  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / count);

  if (n < 2) {
    s.degenerate_slope = true;
    return s;
  }
  double t_mean = 0.0;
  for (double t : times) t_mean += t;
  t_mean /= count;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dt = times[i] - t_mean;
    sxy += dt * (values[i] - s.mean);
    sxx += dt * dt;
  }
  if (sxx <= 0.0) {
    s.degenerate_slope = true;
  } else {
    s.slope = sxy / sxx;
  }
  return s;
}

}  // namespace

ContourStats contour_stats(const PitchContour& contour) {
  if (contour.size() == 0)
    throw std::invalid_argument("contour_stats: empty contour");
  std::vector<double> voiced_times, voiced_f0;
  for (std::size_t i = 0; i < contour.size(); ++i) {
    if (contour.voiced[i]) {
      voiced_times.push_back(contour.frame_times_s[i]);
      voiced_f0.push_back(contour.f0_hz[i]);
    }
  }
  if (voiced_f0.empty()) throw EmptyVoicedSet("contour has no voiced frames");

  Summary all = summarise(contour.frame_times_s, contour.f0_hz);
  Summary voiced = summarise(voiced_times, voiced_f0);
  ContourStats out;
  out.features = {all.mean,    all.std,    all.max,    all.min,    all.slope,
                  voiced.mean, voiced.std, voiced.max, voiced.min, voiced.slope};
  out.degenerate_slope_all = all.degenerate_slope;
  out.degenerate_slope_voiced = voiced.degenerate_slope;
  return out;
}

}  // namespace usv
