#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "draec/error.hpp"
#include "draec/fft.hpp"

namespace draec {

struct StftConfig {
  int sample_rate_hz = 16000;
  int frame_len = 512;  // 32 ms at 16 kHz
  int hop = 256;        // 50% overlap
  int fft_size = 1024;

  int bins() const { return fft_size / 2 + 1; }

  bool operator==(const StftConfig&) const = default;

  void validate() const {
    if (sample_rate_hz <= 0) throw ConfigError("stft.sample_rate_hz: must be positive");
    if (frame_len <= 0) throw ConfigError("stft.frame_len: must be positive");
    if (hop <= 0 || frame_len % hop != 0) throw ConfigError("stft.hop: must be positive and divide frame_len");
    if (fft_size < frame_len) throw ConfigError("stft.fft_size: must be >= frame_len");
    if (!is_pow2(fft_size)) throw ConfigError("stft.fft_size: must be a power of two");
  }
};

// Complex frames for the non-negative frequency bins, one matrix per channel.
// Storage is (bins x frames); at(c, t, f) reads channel c, frame t, bin f.
struct Spectrogram {
  int channels = 0;
  int frames = 0;
  int bins = 0;
  std::vector<Eigen::MatrixXcd> ch;

  static Spectrogram zeros(int channels, int frames, int bins) {
    Spectrogram s;
    s.channels = channels;
    s.frames = frames;
    s.bins = bins;
    s.ch.assign(channels, Eigen::MatrixXcd::Zero(bins, frames));
    return s;
  }

  std::complex<double>& at(int c, int t, int f) { return ch[c](f, t); }
  std::complex<double> at(int c, int t, int f) const { return ch[c](f, t); }

  bool same_shape(const Spectrogram& o) const {
    return channels == o.channels && frames == o.frames && bins == o.bins;
  }
};

// Periodic sqrt-Hann; used for both analysis and synthesis so the
// overlap-added window product sums to one at 50% hop.
inline std::vector<double> sqrt_hann_window(int len) {
  std::vector<double> w(len);
  for (int n = 0; n < len; ++n) w[n] = std::sqrt(0.5 - 0.5 * std::cos(2.0 * M_PI * n / len));
  return w;
}

inline int stft_num_frames(std::size_t num_samples, const StftConfig& cfg) {
  if (num_samples < static_cast<std::size_t>(cfg.frame_len)) return 0;
  return static_cast<int>((num_samples - cfg.frame_len) / cfg.hop) + 1;
}

inline std::size_t stft_synthesis_len(int frames, const StftConfig& cfg) {
  return frames <= 0 ? 0 : static_cast<std::size_t>(frames - 1) * cfg.hop + cfg.frame_len;
}

inline Spectrogram analyze(const std::vector<std::vector<double>>& signal, const StftConfig& cfg) {
  cfg.validate();
  if (signal.empty()) throw Error("stft: no channels");
  const std::size_t len = signal[0].size();
  for (const auto& c : signal)
    if (c.size() != len) throw Error("stft: channel length mismatch");
  if (len < static_cast<std::size_t>(cfg.frame_len))
    throw Error("stft: signal shorter than one frame (" + std::to_string(len) + " < " +
                std::to_string(cfg.frame_len) + ")");

  const int T = stft_num_frames(len, cfg);
  const std::vector<double> win = sqrt_hann_window(cfg.frame_len);
  Spectrogram spec = Spectrogram::zeros(static_cast<int>(signal.size()), T, cfg.bins());

  std::vector<std::complex<double>> buf(cfg.fft_size);
  for (int c = 0; c < spec.channels; ++c) {
    const double* x = signal[c].data();
    for (int t = 0; t < T; ++t) {
      const double* frame = x + static_cast<std::size_t>(t) * cfg.hop;
      for (int n = 0; n < cfg.frame_len; ++n) buf[n] = frame[n] * win[n];
      std::fill(buf.begin() + cfg.frame_len, buf.end(), std::complex<double>(0.0, 0.0));
      fft_inplace(buf);
      for (int f = 0; f < spec.bins; ++f) spec.ch[c](f, t) = buf[f];
    }
  }
  return spec;
}

inline std::vector<std::vector<double>> synthesize(const Spectrogram& spec, const StftConfig& cfg) {
  cfg.validate();
  if (spec.bins != cfg.bins())
    throw Error("stft: spectrogram has " + std::to_string(spec.bins) + " bins, config expects " +
                std::to_string(cfg.bins()));

  const std::size_t out_len = stft_synthesis_len(spec.frames, cfg);
  const std::vector<double> win = sqrt_hann_window(cfg.frame_len);
  std::vector<std::vector<double>> out(spec.channels, std::vector<double>(out_len, 0.0));

  std::vector<std::complex<double>> buf(cfg.fft_size);
  for (int c = 0; c < spec.channels; ++c) {
    for (int t = 0; t < spec.frames; ++t) {
      for (int f = 0; f < spec.bins; ++f) buf[f] = spec.ch[c](f, t);
      for (int f = 1; f < cfg.fft_size / 2; ++f) buf[cfg.fft_size - f] = std::conj(spec.ch[c](f, t));
      fft_inplace(buf, true);
      double* dst = out[c].data() + static_cast<std::size_t>(t) * cfg.hop;
      for (int n = 0; n < cfg.frame_len; ++n) dst[n] += buf[n].real() * win[n];
    }
  }
  return out;
}

}  // namespace draec
