// Shared test oracles. Everything here is computed independently of the
// library code under test: plain DFT sums, backward-integration decay fits,
// and a direct transcription of the autoregressive signal model.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "draec/rng.hpp"
#include "draec/stft.hpp"

namespace testsupport {

inline double distance3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

// O(n^2) DFT of a real frame, one output bin.
inline std::complex<double> naive_dft_bin(const std::vector<double>& frame, int fft_size, int bin) {
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t n = 0; n < frame.size(); ++n) {
    const double ang = -2.0 * M_PI * bin * static_cast<double>(n) / fft_size;
    acc += frame[n] * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return acc;
}

// Schroeder backward integration; T60 from a least-squares line through the
// [-5, -15] dB section of the energy decay curve, extrapolated to -60 dB.
// The early-decay section is fitted on purpose: a specular shoebox model
// decays multi-exponentially, and the diffuse-field relation that maps
// absorption to T60 only governs the decay before slow axial tails take over.
inline double schroeder_t60(const std::vector<double>& rir, int sample_rate) {
  const int n = static_cast<int>(rir.size());
  std::vector<double> edc(n);
  double acc = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    acc += rir[i] * rir[i];
    edc[i] = acc;
  }
  if (acc <= 0.0) return 0.0;
  std::vector<double> db(n);
  for (int i = 0; i < n; ++i) db[i] = 10.0 * std::log10(std::max(edc[i] / edc[0], 1e-30));

  int i5 = -1, i15 = -1;
  for (int i = 0; i < n; ++i) {
    if (i5 < 0 && db[i] <= -5.0) i5 = i;
    if (i15 < 0 && db[i] <= -15.0) {
      i15 = i;
      break;
    }
  }
  if (i5 < 0 || i15 <= i5) return 0.0;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const int count = i15 - i5 + 1;
  for (int i = i5; i <= i15; ++i) {
    const double x = static_cast<double>(i) / sample_rate;
    sx += x;
    sy += db[i];
    sxx += x * x;
    sxy += x * db[i];
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);  // dB per second
  return slope < 0.0 ? -60.0 / slope : 0.0;
}

// STFT-domain scene drawn exactly from the autoregressive mixing model:
//   Y_m(t) = S_m(t) + sum_l conj(b_m[l]) X(t-l)
//                   + sum_n sum_l conj(c_{m,n}[l]) Y_n(t - delay - l)
// Written with its own index arithmetic on purpose; do not reuse library
// regressor helpers here.
struct ArScene {
  int mics = 0, bins = 0, frames = 0;
  int aec_taps = 0, dr_taps = 0, delay = 0;
  // w_true[m] stacks [b_m ; c_{m,0} ; c_{m,1} ; ...], shared across bins.
  std::vector<Eigen::VectorXcd> w_true;
  draec::Spectrogram mic, playback, target;
};

inline ArScene make_ar_scene(int mics, int bins, int frames, int aec_taps, int dr_taps, int delay,
                             draec::Rng& rng, double source_scale = 1.0) {
  ArScene sc;
  sc.mics = mics;
  sc.bins = bins;
  sc.frames = frames;
  sc.aec_taps = aec_taps;
  sc.dr_taps = dr_taps;
  sc.delay = delay;
  sc.mic = draec::Spectrogram::zeros(mics, frames, bins);
  sc.playback = draec::Spectrogram::zeros(1, frames, bins);
  sc.target = draec::Spectrogram::zeros(mics, frames, bins);

  const int len = aec_taps + mics * dr_taps;
  for (int m = 0; m < mics; ++m) {
    Eigen::VectorXcd w(len);
    for (int i = 0; i < aec_taps; ++i) w(i) = 0.5 * rng.cgaussian();
    // prediction taps kept small so the recursion stays stable
    const double c_scale = dr_taps > 0 ? 0.25 / std::sqrt(static_cast<double>(mics * dr_taps)) : 0.0;
    for (int i = aec_taps; i < len; ++i) w(i) = c_scale * rng.cgaussian();
    sc.w_true.push_back(w);
  }

  for (int f = 0; f < bins; ++f) {
    for (int t = 0; t < frames; ++t) {
      sc.playback.ch[0](f, t) = rng.cgaussian();
      for (int m = 0; m < mics; ++m) sc.target.ch[m](f, t) = source_scale * rng.cgaussian();
    }
    for (int t = 0; t < frames; ++t) {
      for (int m = 0; m < mics; ++m) {
        std::complex<double> y = sc.target.ch[m](f, t);
        for (int l = 0; l < aec_taps; ++l) {
          if (t - l < 0) continue;
          y += std::conj(sc.w_true[m](l)) * sc.playback.ch[0](f, t - l);
        }
        for (int n = 0; n < mics; ++n) {
          for (int l = 0; l < dr_taps; ++l) {
            const int tau = t - delay - l;
            if (tau < 0) continue;
            y += std::conj(sc.w_true[m](aec_taps + n * dr_taps + l)) * sc.mic.ch[n](f, tau);
          }
        }
        sc.mic.ch[m](f, t) = y;
      }
    }
  }
  return sc;
}

inline double relative_error_db(double err_energy, double ref_energy) {
  if (ref_energy <= 0.0) return err_energy <= 0.0 ? -300.0 : 300.0;
  if (err_energy <= 0.0) return -300.0;
  return 10.0 * std::log10(err_energy / ref_energy);
}

inline std::vector<double> white_noise(int n, draec::Rng& rng, double scale = 1.0) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = scale * rng.gaussian();
  return x;
}

inline double max_abs_diff(const draec::Spectrogram& a, const draec::Spectrogram& b) {
  double worst = 0.0;
  for (int c = 0; c < a.channels; ++c)
    for (int f = 0; f < a.bins; ++f)
      for (int t = 0; t < a.frames; ++t)
        worst = std::max(worst, std::abs(a.ch[c](f, t) - b.ch[c](f, t)));
  return worst;
}

}  // namespace testsupport
