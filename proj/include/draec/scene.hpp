#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "draec/error.hpp"
#include "draec/fft.hpp"
#include "draec/rng.hpp"
#include "draec/textio.hpp"
#include "draec/wav.hpp"

namespace draec {

constexpr double kSpeedOfSound = 343.0;
constexpr double kEarlyWindowS = 0.05;  // direct + early-reflection reference span

struct RoomSpec {
  std::array<double, 3> dimensions{6.0, 4.0, 3.0};
  double rt60_s = 0.3;
  std::array<double, 3> source_pos{2.0, 2.0, 1.5};
  std::array<double, 3> interferer_pos{4.5, 1.2, 1.6};
  std::array<double, 3> loudspeaker_pos{3.0, 2.1, 1.05};
  std::vector<std::array<double, 3>> mic_pos{{2.97, 2.0, 1.1}, {3.03, 2.0, 1.1}};
  int sample_rate = 16000;
  int max_rir_len = 16000;

  void validate() const {
    for (int i = 0; i < 3; ++i)
      if (!(dimensions[i] > 0.0)) throw ConfigError("room: dimensions must be positive");
    if (!(rt60_s >= 0.0)) throw ConfigError("room: rt60 must be >= 0");
    if (sample_rate <= 0) throw ConfigError("room: sample_rate must be positive");
    if (max_rir_len <= 0) throw ConfigError("room: max_rir_len must be positive");
    if (mic_pos.empty()) throw ConfigError("room: at least one microphone required");
    auto inside = [&](const std::array<double, 3>& p, const char* what) {
      for (int i = 0; i < 3; ++i)
        if (!(p[i] > 0.0 && p[i] < dimensions[i]))
          throw ConfigError(std::string("room: ") + what + " must lie strictly inside the room");
    };
    inside(source_pos, "source_pos");
    inside(interferer_pos, "interferer_pos");
    inside(loudspeaker_pos, "loudspeaker_pos");
    for (const auto& m : mic_pos) inside(m, "mic_pos");
    for (std::size_t i = 0; i < mic_pos.size(); ++i)
      for (std::size_t j = i + 1; j < mic_pos.size(); ++j) {
        double d2 = 0.0;
        for (int k = 0; k < 3; ++k) {
          const double d = mic_pos[i][k] - mic_pos[j][k];
          d2 += d * d;
        }
        if (!(d2 > 0.0)) throw ConfigError("room: microphone positions must be distinct");
      }
  }
};

struct SceneMeta {
  double ser_db = 0.0;
  double sir_db = std::numeric_limits<double>::infinity();
  double snr_db = std::numeric_limits<double>::infinity();
  double rt60_s = 0.3;
  std::int64_t change_point = -1;  // sample index of an echo-path change, -1 if none
  std::uint64_t seed = 0;
  int sample_rate = 16000;
  double clip_threshold = 0.0;  // 0 disables the loudspeaker clip
};

// Ground-truth stems plus their mixture. The mixture equals
// target_full + echo + interference + noise sample-wise by construction;
// target_early (direct + 50 ms) is the metric reference, not a summand.
struct Scene {
  std::vector<std::vector<double>> mics;
  std::vector<double> playback;
  std::vector<std::vector<double>> target_early;
  std::vector<std::vector<double>> target_full;
  std::vector<std::vector<double>> echo;
  std::vector<std::vector<double>> interference;
  std::vector<std::vector<double>> noise;
  SceneMeta meta;

  int num_mics() const { return static_cast<int>(mics.size()); }
  int num_samples() const { return mics.empty() ? 0 : static_cast<int>(mics[0].size()); }
};

namespace detail {

inline double distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(d2);
}

// 8-tap Hann-windowed sinc deposit at a fractional sample position.
inline void add_fractional_tap(std::vector<double>& h, double delay, double amp) {
  const int i0 = static_cast<int>(std::floor(delay)) - 3;
  for (int j = 0; j < 8; ++j) {
    const int idx = i0 + j;
    if (idx < 0 || idx >= static_cast<int>(h.size())) continue;
    const double u = idx - delay;
    const double win = 0.5 * (1.0 + std::cos(M_PI * u / 4.0));
    const double sinc = u == 0.0 ? 1.0 : std::sin(M_PI * u) / (M_PI * u);
    h[idx] += amp * win * sinc;
  }
}

struct AxisImage {
  double coord;     // image coordinate minus mic coordinate
  int reflections;  // wall hits contributed by this axis
};

inline std::vector<AxisImage> axis_images(double src, double mic, double room_len, double d_max) {
  std::vector<AxisImage> out;
  const int n_max = static_cast<int>(std::ceil(d_max / (2.0 * room_len))) + 1;
  for (int n = -n_max; n <= n_max; ++n) {
    for (int p = 0; p < 2; ++p) {
      const double coord = (1 - 2 * p) * src + 2.0 * n * room_len - mic;
      if (std::abs(coord) > d_max) continue;
      out.push_back({coord, std::abs(n - p) + std::abs(n)});
    }
  }
  return out;
}

}  // namespace detail

// Allen-Berkley image method with a frequency-independent wall reflection
// coefficient beta = sqrt(1 - a), where a is the uniform Sabine absorption
// for the requested rt60; a request below the room's Sabine limit (mean
// absorption > 1) is rejected.
inline std::vector<double> image_method_rir(const RoomSpec& spec, const std::array<double, 3>& src,
                                            const std::array<double, 3>& mic) {
  spec.validate();
  for (int i = 0; i < 3; ++i) {
    if (!(src[i] > 0.0 && src[i] < spec.dimensions[i]))
      throw ConfigError("image method: source position outside the room");
    if (!(mic[i] > 0.0 && mic[i] < spec.dimensions[i]))
      throw ConfigError("image method: mic position outside the room");
  }
  const double fs = spec.sample_rate;
  const double d_direct = detail::distance(src, mic);
  const double direct_delay = d_direct / kSpeedOfSound * fs;

  if (spec.rt60_s == 0.0) {  // free field: absorption 1, direct path only
    const int len = std::min(spec.max_rir_len, static_cast<int>(std::ceil(direct_delay)) + 8);
    std::vector<double> h(std::max(len, 1), 0.0);
    detail::add_fractional_tap(h, direct_delay, 1.0 / (4.0 * M_PI * d_direct));
    return h;
  }

  const auto& L = spec.dimensions;
  const double volume = L[0] * L[1] * L[2];
  const double surface = 2.0 * (L[0] * L[1] + L[0] * L[2] + L[1] * L[2]);
  const double sabine_absorption = 24.0 * std::log(10.0) / kSpeedOfSound * volume / (surface * spec.rt60_s);
  if (sabine_absorption > 1.0)
    throw Error("image method: rt60 " + format_double(spec.rt60_s) +
                " s is too small for the room (Sabine absorption " + format_double(sabine_absorption) +
                " > 1)");
  const double beta = std::sqrt(1.0 - sabine_absorption);

  const int len =
      std::min(spec.max_rir_len, static_cast<int>(std::ceil(spec.rt60_s * fs + direct_delay)) + 8);
  std::vector<double> h(len, 0.0);
  const double d_max = kSpeedOfSound * (len + 4.0) / fs;

  const auto xs = detail::axis_images(src[0], mic[0], L[0], d_max);
  const auto ys = detail::axis_images(src[1], mic[1], L[1], d_max);
  const auto zs = detail::axis_images(src[2], mic[2], L[2], d_max);
  int max_order = 0;
  for (const auto& v : {xs, ys, zs})
    for (const auto& a : v) max_order = std::max(max_order, a.reflections);
  std::vector<double> beta_pow(3 * max_order + 1);
  beta_pow[0] = 1.0;
  for (std::size_t i = 1; i < beta_pow.size(); ++i) beta_pow[i] = beta_pow[i - 1] * beta;

  const double d_max2 = d_max * d_max;
  for (const auto& x : xs) {
    const double x2 = x.coord * x.coord;
    for (const auto& y : ys) {
      const double xy2 = x2 + y.coord * y.coord;
      if (xy2 > d_max2) continue;
      const int rxy = x.reflections + y.reflections;
      for (const auto& z : zs) {
        const double d2 = xy2 + z.coord * z.coord;
        if (d2 > d_max2) continue;
        const double d = std::sqrt(d2);
        const double amp = beta_pow[rxy + z.reflections] / (4.0 * M_PI * std::max(d, 1e-6));
        detail::add_fractional_tap(h, d / kSpeedOfSound * fs, amp);
      }
    }
  }

  // All image amplitudes share the sign of beta, so the dense late tail sums
  // coherently at DC and drags the apparent decay out. The classic remedy is
  // a first-order 100 Hz high-pass on the finished response (Allen-Berkley's
  // original implementation); it keeps leading zeros exactly zero.
  const double hp_w = 2.0 * M_PI * 100.0 / fs;
  const double hp_r = std::exp(-hp_w);
  const double hp_b1 = 2.0 * hp_r * std::cos(hp_w), hp_b2 = -hp_r * hp_r, hp_a1 = -(1.0 + hp_r);
  double y0 = 0.0, y1 = 0.0, y2 = 0.0;
  for (double& sample : h) {
    y0 = sample + hp_b1 * y1 + hp_b2 * y2;
    sample = y0 + hp_a1 * y1 + hp_r * y2;
    y2 = y1;
    y1 = y0;
  }
  return h;
}

// Memoryless hard clip modelling loudspeaker overdrive.
inline std::vector<double> loudspeaker_nonlinearity(const std::vector<double>& x, double clip_threshold) {
  if (!(clip_threshold > 0.0)) throw ConfigError("clip_threshold must be positive");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = std::clamp(x[i], -clip_threshold, clip_threshold);
  return out;
}

namespace detail {

inline double mean_power(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

// Scale factor putting `part` (measured at mic 1) ratio_db below the target
// power: 10*log10(p_target / p_part_scaled) == ratio_db.
inline double ratio_scale(double p_target, double p_part, double ratio_db, const char* what) {
  if (std::isinf(ratio_db)) return ratio_db > 0 ? 0.0 : 1.0;
  if (p_target <= 0.0)
    throw Error(std::string("scene: target image is silent; finite ") + what + " is impossible");
  if (p_part <= 0.0)
    throw Error(std::string("scene: ") + what + " stem is silent; finite " + what + " is impossible");
  return std::sqrt(p_target / (p_part * std::pow(10.0, ratio_db / 10.0)));
}

}  // namespace detail

// Convolve the dry signals with image-method RIRs and mix at the requested
// power ratios. Ratios are measured on the full-utterance power of mic 1; the
// echo/interference/noise stems are scaled (the playback reference is not, so
// the scale becomes part of the echo path the AEC must identify).
inline Scene synthesize_scene(const std::vector<double>& speech, const std::vector<double>& interference,
                              const std::vector<double>& playback, const RoomSpec& spec, double ser_db,
                              double sir_db, double snr_db, std::uint64_t seed,
                              double clip_threshold = 0.0) {
  spec.validate();
  const int M = static_cast<int>(spec.mic_pos.size());
  const double fs = spec.sample_rate;

  std::vector<double> driven = playback;
  if (clip_threshold > 0.0) driven = loudspeaker_nonlinearity(playback, clip_threshold);

  Scene sc;
  sc.playback = playback;
  sc.meta = {ser_db, sir_db, snr_db, spec.rt60_s, -1, seed, spec.sample_rate, clip_threshold};
  sc.target_early.resize(M);
  sc.target_full.resize(M);
  sc.echo.resize(M);
  sc.interference.resize(M);
  sc.noise.resize(M);
  sc.mics.resize(M);

  std::size_t n = sc.playback.size();
  for (int m = 0; m < M; ++m) {
    const auto rir_t = image_method_rir(spec, spec.source_pos, spec.mic_pos[m]);
    const auto rir_i = image_method_rir(spec, spec.interferer_pos, spec.mic_pos[m]);
    const auto rir_e = image_method_rir(spec, spec.loudspeaker_pos, spec.mic_pos[m]);

    const double d_direct = detail::distance(spec.source_pos, spec.mic_pos[m]);
    const std::size_t cut = static_cast<std::size_t>(std::floor(d_direct / kSpeedOfSound * fs)) +
                            static_cast<std::size_t>(kEarlyWindowS * fs);
    std::vector<double> rir_t_early(rir_t.begin(), rir_t.begin() + std::min(cut, rir_t.size()));

    if (!speech.empty()) {
      sc.target_full[m] = fft_convolve(speech, rir_t);
      sc.target_early[m] = fft_convolve(speech, rir_t_early);
    }
    if (!interference.empty()) sc.interference[m] = fft_convolve(interference, rir_i);
    if (!driven.empty()) sc.echo[m] = fft_convolve(driven, rir_e);
    for (const auto* s : {&sc.target_full[m], &sc.interference[m], &sc.echo[m]})
      n = std::max(n, s->size());
  }
  for (int m = 0; m < M; ++m) {
    sc.target_full[m].resize(n, 0.0);
    sc.target_early[m].resize(n, 0.0);
    sc.interference[m].resize(n, 0.0);
    sc.echo[m].resize(n, 0.0);
    sc.noise[m].resize(n, 0.0);
  }
  sc.playback.resize(n, 0.0);

  const double p_target = detail::mean_power(sc.target_full[0]);
  const double g_echo = detail::ratio_scale(p_target, detail::mean_power(sc.echo[0]), ser_db, "ser_db");
  const double g_intf =
      detail::ratio_scale(p_target, detail::mean_power(sc.interference[0]), sir_db, "sir_db");

  Rng rng(seed);
  for (int m = 0; m < M; ++m) {
    Rng noise_rng = rng.child(0x6e6f6973 + static_cast<std::uint64_t>(m));
    if (!(std::isinf(snr_db) && snr_db > 0))
      for (auto& v : sc.noise[m]) v = noise_rng.gaussian();
  }
  const double g_noise = detail::ratio_scale(p_target, detail::mean_power(sc.noise[0]), snr_db, "snr_db");

  for (int m = 0; m < M; ++m) {
    sc.mics[m].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      sc.echo[m][i] *= g_echo;
      sc.interference[m][i] *= g_intf;
      sc.noise[m][i] *= g_noise;
      sc.mics[m][i] = sc.target_full[m][i] + sc.echo[m][i] + sc.interference[m][i] + sc.noise[m][i];
    }
  }
  return sc;
}

// Hard concatenation of two scenes: the echo path (and everything else)
// switches instantaneously at the junction.
inline Scene apply_path_change(const Scene& a, const Scene& b) {
  if (a.meta.sample_rate != b.meta.sample_rate)
    throw Error("path change: sample rates differ");
  if (a.num_mics() != b.num_mics() || a.num_mics() == 0)
    throw Error("path change: channel counts differ or are empty");

  auto concat1 = [](const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> out = x;
    out.insert(out.end(), y.begin(), y.end());
    return out;
  };
  auto concat = [&](const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& y) {
    std::vector<std::vector<double>> out(x.size());
    for (std::size_t m = 0; m < x.size(); ++m) out[m] = concat1(x[m], y[m]);
    return out;
  };

  Scene sc;
  sc.mics = concat(a.mics, b.mics);
  sc.playback = concat1(a.playback, b.playback);
  sc.target_early = concat(a.target_early, b.target_early);
  sc.target_full = concat(a.target_full, b.target_full);
  sc.echo = concat(a.echo, b.echo);
  sc.interference = concat(a.interference, b.interference);
  sc.noise = concat(a.noise, b.noise);
  sc.meta = a.meta;
  sc.meta.change_point = static_cast<std::int64_t>(a.num_samples());
  return sc;
}

// Random smart-speaker geometry: a small mic pair on a desk, the loudspeaker
// a few centimetres away, talkers 1-3 m out.
inline RoomSpec sample_room(Rng& rng, int num_mics = 2, double rt60_s = 0.3) {
  if (num_mics < 1) throw ConfigError("sample_room: num_mics must be >= 1");
  RoomSpec spec;
  spec.rt60_s = rt60_s;
  spec.dimensions = {rng.uniform(4.0, 8.0), rng.uniform(3.0, 6.0), rng.uniform(2.5, 3.5)};

  const double margin = 0.5;
  std::array<double, 3> center{rng.uniform(margin + 1.0, spec.dimensions[0] - margin - 1.0),
                               rng.uniform(margin + 1.0, spec.dimensions[1] - margin - 1.0),
                               rng.uniform(0.7, 1.2)};
  const double spacing = 0.06;
  spec.mic_pos.assign(num_mics, center);
  for (int m = 0; m < num_mics; ++m)
    spec.mic_pos[m][0] = center[0] + spacing * (m - 0.5 * (num_mics - 1));

  // Loudspeaker 5-15 cm from the nearest mic: anchor the draw on a uniformly
  // chosen mic and keep it only while that mic remains the nearest, so the
  // drawn distance is exactly the nearest-mic distance.
  for (int tries = 0;; ++tries) {
    const int anchor = rng.uniform_int(0, num_mics - 1);
    const double ls_dist = rng.uniform(0.05, 0.15);
    const double ls_az = rng.uniform(0.0, 2.0 * M_PI);
    const double ls_el = rng.uniform(-0.6, 0.2);
    const std::array<double, 3> u{std::cos(ls_el) * std::cos(ls_az),
                                  std::cos(ls_el) * std::sin(ls_az), std::sin(ls_el)};
    std::array<double, 3> p = spec.mic_pos[anchor];
    for (int i = 0; i < 3; ++i) p[i] += ls_dist * u[i];
    bool anchor_is_nearest = true;
    for (int m = 0; m < num_mics && anchor_is_nearest; ++m)
      anchor_is_nearest = m == anchor || detail::distance(p, spec.mic_pos[m]) >= ls_dist;
    if (anchor_is_nearest || tries >= 1000) {
      if (!anchor_is_nearest) {  // deterministic fallback: straight out along -x from mic 0
        p = spec.mic_pos[0];
        p[0] -= ls_dist;
      }
      spec.loudspeaker_pos = p;
      break;
    }
  }

  auto place_talker = [&]() {
    for (int tries = 0; tries < 1000; ++tries) {
      const double r = rng.uniform(1.0, 3.0);
      const double az = rng.uniform(0.0, 2.0 * M_PI);
      std::array<double, 3> p{center[0] + r * std::cos(az), center[1] + r * std::sin(az),
                              center[2] + rng.uniform(0.0, 0.6)};
      bool ok = true;
      for (int i = 0; i < 3; ++i) ok = ok && p[i] > 0.3 && p[i] < spec.dimensions[i] - 0.3;
      if (ok) return p;
    }
    return std::array<double, 3>{spec.dimensions[0] / 2.0, spec.dimensions[1] / 2.0, 1.5};
  };
  spec.source_pos = place_talker();
  spec.interferer_pos = place_talker();
  return spec;
}

// Deterministic speech-like source: white noise through a few random formant
// resonators, syllabic amplitude modulation, and pause gating.
inline std::vector<double> speechlike_signal(int num_samples, Rng& rng, int sample_rate = 16000) {
  if (num_samples <= 0) return {};
  const double fs = sample_rate;
  struct Biquad {
    double b0, a1, a2, z1 = 0.0, z2 = 0.0;
    double step(double x) {
      const double y = b0 * x - a1 * z1 - a2 * z2;
      z2 = z1;
      z1 = y;
      return y;
    }
  };
  auto resonator = [&](double f0, double bw) {
    const double r = std::exp(-M_PI * bw / fs);
    const double theta = 2.0 * M_PI * f0 / fs;
    return Biquad{(1.0 - r * r) * std::sin(theta), -2.0 * r * std::cos(theta), r * r};
  };
  std::array<Biquad, 3> formants{resonator(rng.uniform(300.0, 800.0), rng.uniform(80.0, 150.0)),
                                 resonator(rng.uniform(1000.0, 1900.0), rng.uniform(100.0, 200.0)),
                                 resonator(rng.uniform(2100.0, 3200.0), rng.uniform(150.0, 300.0))};
  const double f_syllable = rng.uniform(2.0, 4.0);
  const double ph_syllable = rng.uniform(0.0, 2.0 * M_PI);
  const double f_pause = rng.uniform(0.25, 0.6);
  const double ph_pause = rng.uniform(0.0, 2.0 * M_PI);

  std::vector<double> out(num_samples);
  double acc = 0.0;
  for (int i = 0; i < num_samples; ++i) {
    const double x = rng.gaussian();
    double y = 0.0;
    for (auto& f : formants) y += f.step(x);
    const double syl = 0.5 + 0.5 * std::sin(2.0 * M_PI * f_syllable * i / fs + ph_syllable);
    const double gate = std::sin(2.0 * M_PI * f_pause * i / fs + ph_pause) > -0.3 ? 1.0 : 0.05;
    out[i] = y * syl * syl * gate;
    acc += out[i] * out[i];
  }
  const double rms = std::sqrt(acc / num_samples);
  if (rms > 0.0)
    for (auto& v : out) v *= 0.1 / rms;
  return out;
}

// --- scene directory persistence ----------------------------------------

namespace detail {

inline void write_stem(const std::filesystem::path& dir, const char* name,
                       const std::vector<std::vector<double>>& chans, int fs) {
  write_wav((dir / name).string(), chans, fs, WavEncoding::float32);
}

inline std::vector<std::vector<double>> read_stem(const std::filesystem::path& dir, const char* name,
                                                  int expected_fs) {
  const WavData w = read_wav((dir / name).string());
  if (w.spec.sample_rate != expected_fs)
    throw Error("scene: " + std::string(name) + " sample rate mismatch");
  return w.channels;
}

}  // namespace detail

inline void write_scene(const std::string& dir, const Scene& sc) {
  namespace fs = std::filesystem;
  const fs::path d(dir);
  fs::create_directories(d);
  const int rate = sc.meta.sample_rate;
  detail::write_stem(d, "mics.wav", sc.mics, rate);
  detail::write_stem(d, "playback.wav", {sc.playback}, rate);
  detail::write_stem(d, "target_early.wav", sc.target_early, rate);
  detail::write_stem(d, "target_full.wav", sc.target_full, rate);
  detail::write_stem(d, "echo.wav", sc.echo, rate);
  detail::write_stem(d, "interference.wav", sc.interference, rate);
  detail::write_stem(d, "noise.wav", sc.noise, rate);
  std::string meta;
  meta += "ser_db = " + format_double(sc.meta.ser_db) + "\n";
  meta += "sir_db = " + format_double(sc.meta.sir_db) + "\n";
  meta += "snr_db = " + format_double(sc.meta.snr_db) + "\n";
  meta += "rt60_s = " + format_double(sc.meta.rt60_s) + "\n";
  meta += "change_point = " + std::to_string(sc.meta.change_point) + "\n";
  meta += "seed = " + std::to_string(sc.meta.seed) + "\n";
  meta += "sample_rate = " + std::to_string(sc.meta.sample_rate) + "\n";
  meta += "clip_threshold = " + format_double(sc.meta.clip_threshold) + "\n";
  write_text_file((d / "meta.txt").string(), meta);
}

inline Scene read_scene(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path d(dir);
  if (!fs::exists(d / "meta.txt")) throw Error("scene: missing meta.txt in " + dir);

  SceneMeta meta;
  for (const auto& [key, value] : parse_key_values(read_text_file((d / "meta.txt").string()), dir)) {
    if (key == "ser_db") meta.ser_db = parse_double(key, value);
    else if (key == "sir_db") meta.sir_db = parse_double(key, value);
    else if (key == "snr_db") meta.snr_db = parse_double(key, value);
    else if (key == "rt60_s") meta.rt60_s = parse_double(key, value);
    else if (key == "change_point") meta.change_point = parse_int(key, value);
    else if (key == "seed") meta.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "sample_rate") meta.sample_rate = static_cast<int>(parse_int(key, value));
    else if (key == "clip_threshold") meta.clip_threshold = parse_double(key, value);
    else throw ConfigError("scene meta: unknown key '" + key + "'");
  }

  Scene sc;
  sc.meta = meta;
  sc.mics = detail::read_stem(d, "mics.wav", meta.sample_rate);
  sc.playback = detail::read_stem(d, "playback.wav", meta.sample_rate).at(0);
  sc.target_early = detail::read_stem(d, "target_early.wav", meta.sample_rate);
  sc.target_full = detail::read_stem(d, "target_full.wav", meta.sample_rate);
  sc.echo = detail::read_stem(d, "echo.wav", meta.sample_rate);
  sc.interference = detail::read_stem(d, "interference.wav", meta.sample_rate);
  sc.noise = detail::read_stem(d, "noise.wav", meta.sample_rate);
  return sc;
}

}  // namespace draec
