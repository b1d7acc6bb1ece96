#pragma once

#include <complex>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "draec/adaptive.hpp"
#include "draec/parallel.hpp"
#include "draec/stft.hpp"
#include "draec/variant.hpp"
#include "draec/wav.hpp"

namespace draec {

enum class TraceMode { none, norms, full };

// Per-stage record of the adapted filters. In full mode every posterior
// filter is kept, indexed ((m * bins + f) * frames + t) * taps; in norms mode
// only an RMS-over-bins coefficient norm is sampled every norm_stride frames.
struct StageTrace {
  std::string name;
  int taps = 0;
  int mics = 0;
  int bins = 0;
  int frames = 0;
  std::vector<std::complex<double>> coeffs;
  int norm_stride = 0;
  std::vector<double> norms;  // m * snapshots + s

  int snapshots() const { return norm_stride <= 0 ? 0 : (frames + norm_stride - 1) / norm_stride; }

  const std::complex<double>* filter(int m, int f, int t) const {
    return coeffs.data() +
           ((static_cast<std::size_t>(m) * bins + f) * frames + t) * static_cast<std::size_t>(taps);
  }
  std::complex<double>* filter(int m, int f, int t) {
    return coeffs.data() +
           ((static_cast<std::size_t>(m) * bins + f) * frames + t) * static_cast<std::size_t>(taps);
  }
};

struct FilterTrace {
  TraceMode mode = TraceMode::none;
  std::vector<StageTrace> stages;
};

struct PipelineOutput {
  Spectrogram enhanced;
  std::optional<Spectrogram> intermediate;  // output of the first cascade stage
  FilterTrace trace;
};

// One stage of a topology: the filter configuration (aec_taps or dr_taps may
// be zeroed out) and whether its regressor consumes the playback spectrum.
struct StageSpec {
  std::string name;
  DraecConfig cfg;
  bool uses_playback = false;
};

inline std::vector<StageSpec> stage_plan(Topology topology, const DraecConfig& cfg) {
  std::vector<StageSpec> plan;
  auto aec_stage = [&] {
    DraecConfig c = cfg;
    c.dr_taps = 0;
    return StageSpec{"aec", c, true};
  };
  auto dr_stage = [&] {
    DraecConfig c = cfg;
    c.aec_taps = 0;
    return StageSpec{"dr", c, false};
  };
  switch (topology) {
    case Topology::joint:
      plan.push_back({"joint", cfg, cfg.aec_taps > 0});
      break;
    case Topology::aec_then_dr:
      if (cfg.aec_taps > 0) plan.push_back(aec_stage());
      if (cfg.dr_taps > 0) plan.push_back(dr_stage());
      break;
    case Topology::dr_then_aec:
      if (cfg.dr_taps > 0) plan.push_back(dr_stage());
      if (cfg.aec_taps > 0) plan.push_back(aec_stage());
      break;
  }
  return plan;
}

namespace detail {

// Frame-synchronous adaptation of one stage over all (mic, bin) pairs. Bins
// are independent; they are fanned out across workers and written to disjoint
// slices, so the result does not depend on the worker count.
inline Spectrogram run_stage(const Spectrogram& input, const Spectrogram* playback,
                             const DraecConfig& scfg, Estimator est, TraceMode tm, int norm_stride,
                             StageTrace* trace) {
  const int bins = input.bins;
  const int frames = input.frames;
  const int mics = scfg.num_mics;
  if (input.channels != mics)
    throw Error("pipeline: input has " + std::to_string(input.channels) + " channels, config expects " +
                std::to_string(mics));
  if (scfg.aec_taps > 0) {
    if (playback == nullptr) throw Error("pipeline: stage requires a playback spectrogram");
    if (playback->channels != 1) throw Error("pipeline: playback must be single channel");
    if (playback->frames != frames || playback->bins != bins)
      throw Error("pipeline: playback/input shape mismatch");
  }

  const int taps = scfg.filter_len();
  if (trace != nullptr) {
    trace->taps = taps;
    trace->mics = mics;
    trace->bins = bins;
    trace->frames = frames;
    if (tm == TraceMode::full)
      trace->coeffs.assign(static_cast<std::size_t>(mics) * bins * frames * taps, {0.0, 0.0});
    if (tm == TraceMode::norms) trace->norm_stride = norm_stride;
  }
  const int snaps = (tm == TraceMode::norms && trace != nullptr) ? trace->snapshots() : 0;
  std::vector<double> norm_acc;  // (f * mics + m) * snaps + s, reduced after the bin loop
  if (snaps > 0) norm_acc.assign(static_cast<std::size_t>(bins) * mics * snaps, 0.0);

  Spectrogram out = Spectrogram::zeros(mics, frames, bins);

  parallel_for(bins, [&](int f) {
    std::vector<FilterState> states(mics, init_state(scfg));
    BinSeries pb;
    if (playback != nullptr) pb = {playback->ch[0].data() + f, frames, bins};
    std::vector<BinSeries> in(mics);
    for (int m = 0; m < mics; ++m) in[m] = {input.ch[m].data() + f, frames, bins};

    Eigen::VectorXcd z(taps);
    for (int t = 0; t < frames; ++t) {
      build_regressor(pb, in, t, scfg, z);
      for (int m = 0; m < mics; ++m) {
        const std::complex<double> y = input.ch[m](f, t);
        const StepOutput so =
            est == Estimator::kalman ? kalman_step(states[m], z, y, scfg) : rls_step(states[m], z, y, scfg);
        out.ch[m](f, t) = so.s_hat;
        if (tm == TraceMode::full && trace != nullptr) {
          std::complex<double>* dst = trace->filter(m, f, t);
          Eigen::Map<Eigen::VectorXcd>(dst, taps) = states[m].w_prev;
        } else if (snaps > 0 && t % norm_stride == 0) {
          norm_acc[(static_cast<std::size_t>(f) * mics + m) * snaps + t / norm_stride] =
              states[m].w_prev.squaredNorm();
        }
      }
    }
  });

  if (snaps > 0 && trace != nullptr) {
    trace->norms.assign(static_cast<std::size_t>(mics) * snaps, 0.0);
    for (int m = 0; m < mics; ++m) {
      for (int s = 0; s < snaps; ++s) {
        double acc = 0.0;
        for (int f = 0; f < bins; ++f) acc += norm_acc[(static_cast<std::size_t>(f) * mics + m) * snaps + s];
        trace->norms[static_cast<std::size_t>(m) * snaps + s] = std::sqrt(acc / bins);
      }
    }
  }
  return out;
}

}  // namespace detail

inline PipelineOutput run_variant(const Spectrogram& mics, const Spectrogram& playback,
                                  const DraecConfig& cfg, AlgorithmVariant variant,
                                  TraceMode tm = TraceMode::none, int norm_stride = 10) {
  cfg.validate();
  if (mics.channels != cfg.num_mics)
    throw Error("pipeline: mic spectrogram has " + std::to_string(mics.channels) +
                " channels, config expects " + std::to_string(cfg.num_mics));
  if (playback.channels != 1) throw Error("pipeline: playback must be single channel");
  if (playback.frames != mics.frames || playback.bins != mics.bins)
    throw Error("pipeline: playback/mic shape mismatch");

  const std::vector<StageSpec> plan = stage_plan(variant.topology, cfg);
  PipelineOutput po;
  po.trace.mode = tm;

  const Spectrogram* cur = &mics;
  Spectrogram held;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    StageTrace* st = nullptr;
    if (tm != TraceMode::none) {
      po.trace.stages.emplace_back();
      st = &po.trace.stages.back();
      st->name = plan[i].name;
    }
    Spectrogram stage_out = detail::run_stage(*cur, plan[i].uses_playback ? &playback : nullptr,
                                              plan[i].cfg, variant.estimator, tm, norm_stride, st);
    if (i == 0 && plan.size() >= 2) po.intermediate = stage_out;
    held = std::move(stage_out);
    cur = &held;
  }
  po.enhanced = std::move(held);
  return po;
}

inline PipelineOutput run_joint(const Spectrogram& mics, const Spectrogram& playback,
                                const DraecConfig& cfg, Estimator est, TraceMode tm = TraceMode::none,
                                int norm_stride = 10) {
  return run_variant(mics, playback, cfg, {est, Topology::joint}, tm, norm_stride);
}

inline PipelineOutput run_aec_then_dr(const Spectrogram& mics, const Spectrogram& playback,
                                      const DraecConfig& cfg, Estimator est,
                                      TraceMode tm = TraceMode::none, int norm_stride = 10) {
  return run_variant(mics, playback, cfg, {est, Topology::aec_then_dr}, tm, norm_stride);
}

inline PipelineOutput run_dr_then_aec(const Spectrogram& mics, const Spectrogram& playback,
                                      const DraecConfig& cfg, Estimator est,
                                      TraceMode tm = TraceMode::none, int norm_stride = 10) {
  return run_variant(mics, playback, cfg, {est, Topology::dr_then_aec}, tm, norm_stride);
}

struct WavProcessResult {
  std::vector<std::vector<double>> enhanced;
  std::optional<std::vector<std::vector<double>>> intermediate;
  FilterTrace trace;
  int sample_rate = 0;
  int frames = 0;
};

// End to end: read WAVs, analyze, run one variant, synthesize. The playback
// reference may be advanced by cfg.bulk_delay samples to compensate fixed
// loudspeaker latency; both signals are truncated to the common length.
inline WavProcessResult process_wav(const std::string& mic_path, const std::string& playback_path,
                                    const StftConfig& scfg, const DraecConfig& fcfg,
                                    AlgorithmVariant variant, TraceMode tm = TraceMode::none,
                                    int norm_stride = 10) {
  scfg.validate();
  fcfg.validate();
  const WavData mic_wav = read_wav(mic_path);
  const WavData pb_wav = read_wav(playback_path);
  if (mic_wav.spec.sample_rate != scfg.sample_rate_hz)
    throw Error("process: mic sample rate " + std::to_string(mic_wav.spec.sample_rate) +
                " does not match configured " + std::to_string(scfg.sample_rate_hz));
  if (pb_wav.spec.sample_rate != scfg.sample_rate_hz)
    throw Error("process: playback sample rate " + std::to_string(pb_wav.spec.sample_rate) +
                " does not match configured " + std::to_string(scfg.sample_rate_hz));
  if (mic_wav.spec.channels != fcfg.num_mics)
    throw Error("process: mic file has " + std::to_string(mic_wav.spec.channels) +
                " channels, config expects " + std::to_string(fcfg.num_mics));
  if (pb_wav.spec.channels != 1) throw Error("process: playback file must have one channel");

  std::vector<double> pb = pb_wav.channels[0];
  if (fcfg.bulk_delay > 0) {
    pb.insert(pb.begin(), static_cast<std::size_t>(fcfg.bulk_delay), 0.0);
  }
  std::size_t len = std::min(mic_wav.channels[0].size(), pb.size());
  std::vector<std::vector<double>> mics = mic_wav.channels;
  for (auto& c : mics) c.resize(len);
  pb.resize(len);

  const Spectrogram mic_spec = analyze(mics, scfg);
  const Spectrogram pb_spec = analyze({pb}, scfg);
  PipelineOutput po = run_variant(mic_spec, pb_spec, fcfg, variant, tm, norm_stride);

  WavProcessResult res;
  res.sample_rate = scfg.sample_rate_hz;
  res.frames = po.enhanced.frames;
  res.enhanced = synthesize(po.enhanced, scfg);
  if (po.intermediate) res.intermediate = synthesize(*po.intermediate, scfg);
  res.trace = std::move(po.trace);
  return res;
}

// --- trace file format -------------------------------------------------
// Little-endian binary: magic, mode, stage count, then per stage the shape
// and the raw coefficient/norm payload.

namespace detail {

constexpr char kTraceMagic[8] = {'D', 'R', 'A', 'E', 'C', 'T', 'R', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error("trace: truncated file");
  return v;
}

}  // namespace detail

inline void write_trace(const std::string& path, const FilterTrace& trace) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("trace: cannot open for writing: " + path);
  out.write(detail::kTraceMagic, 8);
  detail::write_pod(out, static_cast<std::uint32_t>(trace.mode));
  detail::write_pod(out, static_cast<std::uint32_t>(trace.stages.size()));
  for (const auto& st : trace.stages) {
    detail::write_pod(out, static_cast<std::uint32_t>(st.name.size()));
    out.write(st.name.data(), static_cast<std::streamsize>(st.name.size()));
    detail::write_pod(out, static_cast<std::int32_t>(st.taps));
    detail::write_pod(out, static_cast<std::int32_t>(st.mics));
    detail::write_pod(out, static_cast<std::int32_t>(st.bins));
    detail::write_pod(out, static_cast<std::int32_t>(st.frames));
    detail::write_pod(out, static_cast<std::int32_t>(st.norm_stride));
    detail::write_pod(out, static_cast<std::uint64_t>(st.coeffs.size()));
    out.write(reinterpret_cast<const char*>(st.coeffs.data()),
              static_cast<std::streamsize>(st.coeffs.size() * sizeof(std::complex<double>)));
    detail::write_pod(out, static_cast<std::uint64_t>(st.norms.size()));
    out.write(reinterpret_cast<const char*>(st.norms.data()),
              static_cast<std::streamsize>(st.norms.size() * sizeof(double)));
  }
  if (!out) throw Error("trace: write failed: " + path);
}

inline FilterTrace read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("trace: cannot open: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, detail::kTraceMagic, 8) != 0)
    throw Error("trace: bad magic in " + path);
  FilterTrace trace;
  trace.mode = static_cast<TraceMode>(detail::read_pod<std::uint32_t>(in));
  const auto nstages = detail::read_pod<std::uint32_t>(in);
  trace.stages.resize(nstages);
  for (auto& st : trace.stages) {
    const auto name_len = detail::read_pod<std::uint32_t>(in);
    st.name.resize(name_len);
    in.read(st.name.data(), name_len);
    st.taps = detail::read_pod<std::int32_t>(in);
    st.mics = detail::read_pod<std::int32_t>(in);
    st.bins = detail::read_pod<std::int32_t>(in);
    st.frames = detail::read_pod<std::int32_t>(in);
    st.norm_stride = detail::read_pod<std::int32_t>(in);
    const auto ncoeff = detail::read_pod<std::uint64_t>(in);
    st.coeffs.resize(ncoeff);
    in.read(reinterpret_cast<char*>(st.coeffs.data()),
            static_cast<std::streamsize>(ncoeff * sizeof(std::complex<double>)));
    const auto nnorm = detail::read_pod<std::uint64_t>(in);
    st.norms.resize(nnorm);
    in.read(reinterpret_cast<char*>(st.norms.data()),
            static_cast<std::streamsize>(nnorm * sizeof(double)));
    if (!in) throw Error("trace: truncated file: " + path);
  }
  return trace;
}

}  // namespace draec
