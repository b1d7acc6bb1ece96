#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "draec/error.hpp"

namespace draec {

enum class WavEncoding { pcm16, float32 };

struct WavSpec {
  int sample_rate = 16000;
  int channels = 1;
  WavEncoding encoding = WavEncoding::float32;
};

struct WavData {
  WavSpec spec;
  std::vector<std::vector<double>> channels;  // deinterleaved, one vector per channel
  int num_samples() const { return channels.empty() ? 0 : static_cast<int>(channels[0].size()); }
};

namespace detail {

inline std::uint32_t rd_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t rd_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void wr_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
  b.push_back((v >> 16) & 0xff);
  b.push_back((v >> 24) & 0xff);
}

inline void wr_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
}

inline void wr_tag(std::vector<std::uint8_t>& b, const char* tag) {
  b.insert(b.end(), tag, tag + 4);
}

}  // namespace detail

// RIFF/WAVE reader for 16-bit PCM and 32-bit IEEE float. pcm16 samples are
// scaled to [-1, 1); float32 values are passed through.
inline WavData read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WavError("wav: cannot open " + path);
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 || std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw WavError("wav: not a RIFF/WAVE file: " + path);

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::uint16_t block_align = 0;
  const std::uint8_t* data = nullptr;
  std::uint32_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::uint8_t* chunk = buf.data() + pos;
    const std::uint32_t size = detail::rd_u32(chunk + 4);
    if (pos + 8 + size > buf.size()) throw WavError("wav: truncated chunk in " + path);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw WavError("wav: malformed fmt chunk in " + path);
      format = detail::rd_u16(chunk + 8);
      channels = detail::rd_u16(chunk + 10);
      rate = detail::rd_u32(chunk + 12);
      block_align = detail::rd_u16(chunk + 20);
      bits = detail::rd_u16(chunk + 22);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = size;
    }
    pos += 8 + size + (size & 1);  // chunks are word-aligned
  }
  if (!have_fmt || data == nullptr) throw WavError("wav: missing fmt or data chunk in " + path);
  if (channels == 0 || rate == 0) throw WavError("wav: malformed fmt chunk in " + path);

  WavData out;
  out.spec.sample_rate = static_cast<int>(rate);
  out.spec.channels = channels;
  if (format == 1 && bits == 16) {
    out.spec.encoding = WavEncoding::pcm16;
  } else if (format == 3 && bits == 32) {
    out.spec.encoding = WavEncoding::float32;
  } else {
    throw WavError("wav: unsupported encoding (format " + std::to_string(format) + ", " +
                   std::to_string(bits) + " bit) in " + path);
  }
  const int bytes_per_sample = bits / 8;
  if (block_align != channels * bytes_per_sample) throw WavError("wav: inconsistent block align in " + path);
  const std::uint32_t frames = data_size / block_align;

  out.channels.assign(channels, std::vector<double>(frames));
  for (std::uint32_t i = 0; i < frames; ++i) {
    for (int c = 0; c < channels; ++c) {
      const std::uint8_t* p = data + (static_cast<std::size_t>(i) * channels + c) * bytes_per_sample;
      if (out.spec.encoding == WavEncoding::pcm16) {
        const std::int16_t v = static_cast<std::int16_t>(detail::rd_u16(p));
        out.channels[c][i] = v / 32768.0;
      } else {
        float f;
        std::uint32_t raw = detail::rd_u32(p);
        std::memcpy(&f, &raw, 4);
        out.channels[c][i] = f;
      }
    }
  }
  return out;
}

inline void write_wav(const std::string& path, const std::vector<std::vector<double>>& channels,
                      int sample_rate, WavEncoding encoding = WavEncoding::float32) {
  if (channels.empty()) throw WavError("wav: no channels to write: " + path);
  const std::size_t n = channels[0].size();
  for (const auto& c : channels)
    if (c.size() != n) throw WavError("wav: channel length mismatch writing " + path);

  const int nch = static_cast<int>(channels.size());
  const int bytes_per_sample = encoding == WavEncoding::pcm16 ? 2 : 4;
  const std::uint32_t data_size = static_cast<std::uint32_t>(n * nch * bytes_per_sample);

  std::vector<std::uint8_t> b;
  b.reserve(data_size + 64);
  detail::wr_tag(b, "RIFF");
  const bool is_float = encoding == WavEncoding::float32;
  const std::uint32_t riff_size = 4 + (8 + 16) + (is_float ? 8 + 4 : 0) + (8 + data_size);
  detail::wr_u32(b, riff_size);
  detail::wr_tag(b, "WAVE");
  detail::wr_tag(b, "fmt ");
  detail::wr_u32(b, 16);
  detail::wr_u16(b, is_float ? 3 : 1);
  detail::wr_u16(b, static_cast<std::uint16_t>(nch));
  detail::wr_u32(b, static_cast<std::uint32_t>(sample_rate));
  detail::wr_u32(b, static_cast<std::uint32_t>(sample_rate * nch * bytes_per_sample));
  detail::wr_u16(b, static_cast<std::uint16_t>(nch * bytes_per_sample));
  detail::wr_u16(b, static_cast<std::uint16_t>(bytes_per_sample * 8));
  if (is_float) {  // non-PCM formats carry a fact chunk
    detail::wr_tag(b, "fact");
    detail::wr_u32(b, 4);
    detail::wr_u32(b, static_cast<std::uint32_t>(n));
  }
  detail::wr_tag(b, "data");
  detail::wr_u32(b, data_size);

  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < nch; ++c) {
      const double x = channels[c][i];
      if (encoding == WavEncoding::pcm16) {
        long v = std::lrint(x * 32768.0);
        if (v > 32767) v = 32767;
        if (v < -32768) v = -32768;
        detail::wr_u16(b, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
      } else {
        const float f = static_cast<float>(x);
        std::uint32_t raw;
        std::memcpy(&raw, &f, 4);
        detail::wr_u32(b, raw);
      }
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WavError("wav: cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  if (!out) throw WavError("wav: write failed: " + path);
}

}  // namespace draec
