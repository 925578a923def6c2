// src/spectral.cc

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

#include "usv/spectral.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "real_fft.h"
#include "usv/error.h"

namespace usv {

namespace {

std::mutex& planner_mutex() {
  static std::mutex mutex;
  return mutex;
}

// Plans live for the whole process; there are only a handful of sizes.
fftw_plan cached_plan(std::size_t size) {
  static std::map<std::size_t, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = plans.find(size);
  if (it != plans.end()) return it->second;
  double* in = fftw_alloc_real(size);
  fftw_complex* out = fftw_alloc_complex(size / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(size), in, out,
                                        FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
  plans.emplace(size, plan);
  return plan;
}

constexpr char kTensorMagic[4] = {'U', 'S', 'V', 'T'};
constexpr std::uint32_t kTensorVersion = 1;
constexpr std::uint32_t kDtypeFloat32 = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& name) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw IoError(name + ": truncated tensor header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

RealFft::RealFft(std::size_t size)
    : size_(size),
      in_(fftw_alloc_real(size)),
      out_(fftw_alloc_complex(size / 2 + 1)),
      plan_(cached_plan(size)) {
  std::memset(in_, 0, size * sizeof(double));
}

RealFft::~RealFft() {
  fftw_free(in_);
  fftw_free(out_);
}

void RealFft::execute() { fftw_execute_dft_r2c(plan_, in_, out_); }

std::size_t stft_frame_count(std::size_t length, std::size_t window,
                             std::size_t hop) {
  if (window == 0 || hop == 0 || length < window) return 0;
  return (length - window) / hop + 1;
}

std::vector<double> hann_window(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n)
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                static_cast<double>(length));
  return w;
}

Spectrogram stft_samples(const AudioClip& clip, std::size_t window,
                         std::size_t hop) {
  if (window == 0 || hop == 0)
    throw std::invalid_argument("STFT window and hop must be at least 1 sample");
  if (clip.samples.size() < window)
    throw ClipTooShort(clip.source_id + ": " + std::to_string(clip.samples.size()) +
                       " samples, window needs " + std::to_string(window));

  Spectrogram spec;
  spec.frames = stft_frame_count(clip.samples.size(), window, hop);
  spec.bins = window / 2 + 1;
  spec.sample_rate = clip.sample_rate;
  spec.bin_hz = clip.sample_rate / static_cast<double>(window);
  spec.window_s = static_cast<double>(window) / clip.sample_rate;
  spec.frame_hop_s = static_cast<double>(hop) / clip.sample_rate;
  spec.magnitudes.resize(spec.frames * spec.bins);

  const std::vector<double> taper = hann_window(window);
  RealFft fft(window);
  auto buffer = fft.input();
  for (std::size_t t = 0; t < spec.frames; ++t) {
    const float* frame = clip.samples.data() + t * hop;
    for (std::size_t n = 0; n < window; ++n) buffer[n] = frame[n] * taper[n];
    fft.execute();
    auto bins = fft.output();
    float* dst = spec.magnitudes.data() + t * spec.bins;
    for (std::size_t k = 0; k < spec.bins; ++k)
      dst[k] = static_cast<float>(std::abs(bins[k]));
  }
  return spec;
}

Spectrogram stft(const AudioClip& clip, double window_s, double hop_s) {
  const double window = std::round(window_s * clip.sample_rate);
  const double hop = std::round(hop_s * clip.sample_rate);
  if (!(window >= 1.0) || !(hop >= 1.0))
    throw std::invalid_argument("window and hop must cover at least 1 sample");
  return stft_samples(clip, static_cast<std::size_t>(window),
                      static_cast<std::size_t>(hop));
}

Spectrogram export_spectrogram(const AudioClip& clip) {
  AudioClip padded = pad_to_duration(clip, kExportDurationS);
  const auto hop =
      static_cast<std::size_t>(std::llround(kExportHopS * clip.sample_rate));
  return stft_samples(padded, kExportWindowSamples, std::max<std::size_t>(hop, 1));
}

void write_tensor(const Spectrogram& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(kTensorMagic, 4);
  put_u32(out, kTensorVersion);
  put_u32(out, kDtypeFloat32);
  put_u32(out, 2);
  put_u32(out, static_cast<std::uint32_t>(spec.frames));
  put_u32(out, static_cast<std::uint32_t>(spec.bins));
  static_assert(sizeof(float) == 4);
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(spec.magnitudes.data()),
              static_cast<std::streamsize>(spec.magnitudes.size() * 4));
  } else {
    for (float v : spec.magnitudes) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      put_u32(out, bits);
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

Spectrogram read_tensor(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + name);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kTensorMagic, 4) != 0)
    throw IoError(name + ": bad tensor magic");
  if (get_u32(in, name) != kTensorVersion) throw IoError(name + ": unknown version");
  if (get_u32(in, name) != kDtypeFloat32) throw IoError(name + ": unsupported dtype");
  if (get_u32(in, name) != 2) throw IoError(name + ": expected a rank-2 tensor");
  Spectrogram spec;
  spec.frames = get_u32(in, name);
  spec.bins = get_u32(in, name);
  spec.magnitudes.resize(spec.frames * spec.bins);
  for (float& v : spec.magnitudes) {
    std::uint32_t bits = get_u32(in, name);
    std::memcpy(&v, &bits, 4);
  }
  return spec;
}

}  // namespace usv
