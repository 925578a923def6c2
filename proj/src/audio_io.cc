// src/audio_io.cc

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

#include "usv/audio_io.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <set>

#include "usv/error.h"

namespace usv {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

struct WavLayout {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
  std::streamoff data_offset = 0;
  std::uint32_t data_bytes = 0;
};

// Walks the RIFF chunk list up to the data chunk and validates the format.
WavLayout read_layout(std::istream& in, const std::string& name) {
  unsigned char riff[12];
  if (!in.read(reinterpret_cast<char*>(riff), 12) ||
      std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(riff + 8, "WAVE", 4) != 0)
    throw MalformedWav(name + ": not a RIFF/WAVE file");

  WavLayout layout;
  bool have_fmt = false;
  while (true) {
    unsigned char head[8];
    if (!in.read(reinterpret_cast<char*>(head), 8))
      throw MalformedWav(name + ": no data chunk");
    std::uint32_t size = le32(head + 4);
    if (std::memcmp(head, "fmt ", 4) == 0) {
      if (size < 16) throw MalformedWav(name + ": fmt chunk too short");
      std::vector<unsigned char> fmt(size);
      if (!in.read(reinterpret_cast<char*>(fmt.data()), size))
        throw MalformedWav(name + ": truncated fmt chunk");
      layout.format = le16(&fmt[0]);
      layout.channels = le16(&fmt[2]);
      layout.sample_rate = le32(&fmt[4]);
      layout.block_align = le16(&fmt[12]);
      layout.bits = le16(&fmt[14]);
      if (layout.format == kFormatExtensible) {
        if (size < 40) throw MalformedWav(name + ": short extensible fmt chunk");
        layout.format = le16(&fmt[24]);  // first two bytes of the subformat GUID
      }
      if (size & 1) in.ignore(1);
      have_fmt = true;
    } else if (std::memcmp(head, "data", 4) == 0) {
      if (!have_fmt) throw MalformedWav(name + ": data chunk before fmt chunk");
      layout.data_offset = in.tellg();
      layout.data_bytes = size;
      break;
    } else {
      in.ignore(static_cast<std::streamsize>(size) + (size & 1));
    }
  }

  if (layout.format != kFormatPcm && layout.format != kFormatFloat)
    throw UnsupportedFormat(name + ": compressed or unknown format code " +
                            std::to_string(layout.format));
  if (layout.channels != 1)
    throw UnsupportedFormat(name + ": " + std::to_string(layout.channels) +
                            " channels, only mono is supported");
  if (layout.format == kFormatFloat && layout.bits != 32)
    throw UnsupportedFormat(name + ": float WAV must be 32-bit");
  if (layout.format == kFormatPcm && layout.bits != 8 && layout.bits != 16 &&
      layout.bits != 24 && layout.bits != 32)
    throw UnsupportedFormat(name + ": unsupported PCM depth " +
                            std::to_string(layout.bits));
  if (layout.sample_rate == 0) throw MalformedWav(name + ": zero sample rate");
  if (layout.block_align != layout.bits / 8)
    throw MalformedWav(name + ": inconsistent block alignment");
  return layout;
}

void warn_unusual_rate(std::uint32_t rate) {
  static std::mutex mutex;
  static std::set<std::uint32_t> seen;
  if (rate == static_cast<std::uint32_t>(kCorpusSampleRate)) return;
  std::lock_guard<std::mutex> lock(mutex);
  if (seen.insert(rate).second)
    spdlog::warn("sample rate {} Hz differs from the corpus rate; window and "
                 "hop lengths follow the actual rate", rate);
}

void put16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(v & 0xff);
  out.push_back(v >> 8);
}

void put32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
}

}  // namespace

AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string name = path.string();
  WavLayout layout = read_layout(in, name);

  // Some recorders leave the data size unpatched; trust the file length.
  in.seekg(0, std::ios::end);
  std::streamoff available = in.tellg() - layout.data_offset;
  std::size_t bytes = std::min<std::size_t>(layout.data_bytes,
                                            static_cast<std::size_t>(available));
  std::size_t width = layout.bits / 8;
  std::size_t count = bytes / width;
  if (count == 0) throw MalformedWav(name + ": empty data chunk");

  std::vector<unsigned char> raw(count * width);
  in.seekg(layout.data_offset);
  if (!in.read(reinterpret_cast<char*>(raw.data()),
               static_cast<std::streamsize>(raw.size())))
    throw MalformedWav(name + ": truncated data chunk");

  warn_unusual_rate(layout.sample_rate);
  AudioClip clip;
  clip.sample_rate = layout.sample_rate;
  clip.source_id = path.stem().string();
  clip.samples.resize(count);
  const unsigned char* p = raw.data();
  for (std::size_t i = 0; i < count; ++i, p += width) {
    float v = 0.0f;
    if (layout.format == kFormatFloat) {
      std::uint32_t bits = le32(p);
      std::memcpy(&v, &bits, 4);
    } else {
      switch (layout.bits) {
        case 8:
          v = static_cast<float>((static_cast<int>(p[0]) - 128) / 128.0);
          break;
        case 16:
          v = static_cast<float>(static_cast<std::int16_t>(le16(p)) / 32768.0);
          break;
        case 24: {
          std::int32_t s = static_cast<std::int32_t>(
              (static_cast<std::uint32_t>(p[0]) << 8) |
              (static_cast<std::uint32_t>(p[1]) << 16) |
              (static_cast<std::uint32_t>(p[2]) << 24));
          v = static_cast<float>((s >> 8) / 8388608.0);
          break;
        }
        case 32:
          v = static_cast<float>(static_cast<std::int32_t>(le32(p)) /
                                 2147483648.0);
          break;
      }
    }
    clip.samples[i] = v;
  }
  return clip;
}

double wav_duration_s(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  WavLayout layout = read_layout(in, path.string());
  in.seekg(0, std::ios::end);
  std::streamoff available = in.tellg() - layout.data_offset;
  std::size_t bytes = std::min<std::size_t>(layout.data_bytes,
                                            static_cast<std::size_t>(available));
  std::size_t count = bytes / (layout.bits / 8);
  if (count == 0) throw MalformedWav(path.string() + ": empty data chunk");
  return static_cast<double>(count) / layout.sample_rate;
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path,
               WavEncoding encoding) {
  if (clip.sample_rate <= 0 || clip.sample_rate > 4294967295.0)
    throw IoError("cannot write WAV with sample rate " +
                  std::to_string(clip.sample_rate));
  const bool pcm = encoding == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(clip.sample_rate));
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(clip.samples.size() * (bits / 8));

  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put32(out, 16);
  put16(out, pcm ? kFormatPcm : kFormatFloat);
  put16(out, 1);
  put32(out, rate);
  put32(out, rate * (bits / 8));
  put16(out, bits / 8);
  put16(out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put32(out, data_bytes);
  for (float s : clip.samples) {
    if (pcm) {
      double scaled = std::nearbyint(static_cast<double>(s) * 32768.0);
      scaled = std::clamp(scaled, -32768.0, 32767.0);
      put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    } else {
      std::uint32_t b;
      std::memcpy(&b, &s, 4);
      put32(out, b);
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path.string());
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for " + path.string());
}

AudioClip pad_to_duration(const AudioClip& clip, double duration_s) {
  const auto target =
      static_cast<std::size_t>(std::llround(duration_s * clip.sample_rate));
  if (clip.samples.size() > target)
    throw ClipTooLong(clip.source_id + ": " + std::to_string(clip.duration_s()) +
                      " s exceeds " + std::to_string(duration_s) + " s");
  AudioClip out = clip;
  out.samples.resize(target, 0.0f);
  return out;
}

}  // namespace usv
