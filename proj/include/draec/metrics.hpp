#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "draec/adaptive.hpp"
#include "draec/parallel.hpp"
#include "draec/pipeline.hpp"
#include "draec/scene.hpp"
#include "draec/stft.hpp"
#include "draec/textio.hpp"
#include "draec/variant.hpp"

namespace draec {

struct MetricsConfig {
  double erle_window_s = 1.0;
  double erle_hop_s = 0.25;
  double erle_cap_db = 80.0;
  int sdr_taps = 32;
  double sdr_cap_db = 60.0;
  double sier_cap_db = 80.0;

  void validate() const {
    if (!(erle_window_s > 0.0)) throw ConfigError("metrics.erle_window_s: must be positive");
    if (!(erle_hop_s > 0.0)) throw ConfigError("metrics.erle_hop_s: must be positive");
    if (sdr_taps < 1) throw ConfigError("metrics.sdr_taps: must be >= 1");
  }

  bool operator==(const MetricsConfig&) const = default;
};

struct ErleResult {
  std::vector<double> time_s;   // window centre times
  std::vector<double> erle_db;  // 10*log10(P_in / P_out) per window
  double steady_db = 0.0;       // mean over the final quarter of windows
};

// Sliding-window echo return loss enhancement of `out` relative to `mic`.
inline ErleResult erle(const std::vector<double>& mic, const std::vector<double>& out, int sample_rate,
                       double window_s = 1.0, double hop_s = 0.25, double cap_db = 80.0) {
  if (mic.size() != out.size()) throw Error("erle: input/output length mismatch");
  if (mic.empty()) throw Error("erle: empty signals");
  const int n = static_cast<int>(mic.size());
  const int win = std::max(1, std::min(n, static_cast<int>(std::lround(window_s * sample_rate))));
  const int hop = std::max(1, static_cast<int>(std::lround(hop_s * sample_rate)));

  ErleResult res;
  for (int start = 0; start + win <= n; start += hop) {
    double p_in = 0.0, p_out = 0.0;
    for (int i = start; i < start + win; ++i) {
      p_in += mic[i] * mic[i];
      p_out += out[i] * out[i];
    }
    double db;
    if (p_in <= 0.0) db = 0.0;
    else if (p_out <= 0.0) db = cap_db;
    else db = std::min(cap_db, 10.0 * std::log10(p_in / p_out));
    res.time_s.push_back((start + 0.5 * win) / sample_rate);
    res.erle_db.push_back(db);
  }
  if (res.erle_db.empty()) throw Error("erle: signal shorter than one window");

  const std::size_t count = res.erle_db.size();
  const std::size_t first = count - std::max<std::size_t>(1, count / 4);
  double acc = 0.0;
  for (std::size_t i = first; i < count; ++i) acc += res.erle_db[i];
  res.steady_db = acc / static_cast<double>(count - first);
  return res;
}

// Signal-to-distortion ratio with an allowed short FIR between reference and
// estimate: project the estimate onto {reference delayed 0..taps-1} by least
// squares and compare projection power against the residual.
inline double sdr(const std::vector<double>& reference, const std::vector<double>& estimate,
                  int taps = 32, double cap_db = 60.0) {
  if (reference.size() != estimate.size()) throw Error("sdr: length mismatch");
  const int n = static_cast<int>(reference.size());
  if (n == 0) throw Error("sdr: empty signals");
  double p_ref = 0.0;
  for (double v : reference) p_ref += v * v;
  if (p_ref <= 0.0) throw Error("sdr: reference is silent");
  taps = std::max(1, std::min(taps, n));

  std::vector<double> auto_corr(taps, 0.0);
  for (int d = 0; d < taps; ++d)
    for (int i = d; i < n; ++i) auto_corr[d] += reference[i] * reference[i - d];
  // Exact Gram of the zero-padded delayed references: the Toeplitz value
  // minus the products that fall off the end once both delays are applied.
  Eigen::MatrixXd gram(taps, taps);
  for (int i = 0; i < taps; ++i)
    for (int j = i; j < taps; ++j) {
      double g = auto_corr[j - i];
      for (int u = n - i; u < n; ++u) g -= reference[u] * reference[u - (j - i)];
      gram(i, j) = gram(j, i) = g;
    }
  gram.diagonal().array() += 1e-12 * auto_corr[0];

  Eigen::VectorXd cross(taps);
  for (int k = 0; k < taps; ++k) {
    double acc = 0.0;
    for (int i = k; i < n; ++i) acc += estimate[i] * reference[i - k];
    cross(k) = acc;
  }
  const Eigen::VectorXd h = gram.ldlt().solve(cross);

  double p_proj = 0.0, p_err = 0.0;
  for (int i = 0; i < n; ++i) {
    double proj = 0.0;
    for (int k = 0; k < taps && k <= i; ++k) proj += h(k) * reference[i - k];
    p_proj += proj * proj;
    const double e = estimate[i] - proj;
    p_err += e * e;
  }
  if (p_err <= 0.0) return cap_db;
  if (p_proj <= 0.0) return -cap_db;
  return std::clamp(10.0 * std::log10(p_proj / p_err), -cap_db, cap_db);
}

namespace detail {

// Re-apply one stage's recorded filter sequence (no adaptation) to an input.
inline Spectrogram replay_stage(const Spectrogram& input, const Spectrogram* playback,
                                const StageTrace& tr, const DraecConfig& scfg) {
  const int bins = input.bins;
  const int frames = input.frames;
  const int mics = scfg.num_mics;
  if (input.channels != mics) throw Error("shadow: stem channel count mismatch");
  if (tr.bins != bins || tr.frames != frames || tr.mics != mics || tr.taps != scfg.filter_len())
    throw Error("shadow: trace shape does not match stage configuration");
  if (static_cast<std::size_t>(tr.mics) * tr.bins * tr.frames * tr.taps != tr.coeffs.size())
    throw Error("shadow: trace payload size mismatch");

  Spectrogram out = Spectrogram::zeros(mics, frames, bins);
  parallel_for(bins, [&](int f) {
    BinSeries pb;
    if (playback != nullptr) pb = {playback->ch[0].data() + f, frames, bins};
    std::vector<BinSeries> in(mics);
    for (int m = 0; m < mics; ++m) in[m] = {input.ch[m].data() + f, frames, bins};
    Eigen::VectorXcd z(tr.taps);
    for (int t = 0; t < frames; ++t) {
      build_regressor(pb, in, t, scfg, z);
      for (int m = 0; m < mics; ++m) {
        const Eigen::Map<const Eigen::VectorXcd> w(tr.filter(m, f, t), tr.taps);
        out.ch[m](f, t) = input.ch[m](f, t) - w.dot(z);
      }
    }
  });
  return out;
}

}  // namespace detail

// Shadow filtering: replay the frozen per-frame filters on each stem
// separately. The playback regressor block belongs to the echo stem (the
// loudspeaker drives it); all other stems see zero playback. By linearity the
// per-stem outputs sum to the mixture output.
inline std::vector<Spectrogram> shadow_decompose(const FilterTrace& trace, Topology topology,
                                                 const DraecConfig& cfg,
                                                 const std::vector<Spectrogram>& stems,
                                                 const Spectrogram& playback, int echo_stem_index) {
  if (trace.mode != TraceMode::full)
    throw Error("shadow: a full-stride filter trace is required");
  const std::vector<StageSpec> plan = stage_plan(topology, cfg);
  if (plan.size() != trace.stages.size())
    throw Error("shadow: trace has " + std::to_string(trace.stages.size()) + " stages, topology expects " +
                std::to_string(plan.size()));
  if (echo_stem_index < 0 || echo_stem_index >= static_cast<int>(stems.size()))
    throw Error("shadow: echo stem index out of range");

  std::vector<Spectrogram> comps;
  comps.reserve(stems.size());
  for (std::size_t s = 0; s < stems.size(); ++s) {
    Spectrogram cur = stems[s];
    for (std::size_t i = 0; i < plan.size(); ++i) {
      const bool gets_playback = plan[i].uses_playback && static_cast<int>(s) == echo_stem_index;
      cur = detail::replay_stage(cur, gets_playback ? &playback : nullptr, trace.stages[i], plan[i].cfg);
    }
    comps.push_back(std::move(cur));
  }
  return comps;
}

// Total signal power of a one-sided spectrogram; interior bins count twice
// for conjugate symmetry so ratios match time-domain power ratios.
inline double spectrogram_power(const Spectrogram& s) {
  double acc = 0.0;
  for (int c = 0; c < s.channels; ++c)
    for (int f = 0; f < s.bins; ++f) {
      const double w = (f == 0 || f == s.bins - 1) ? 1.0 : 2.0;
      for (int t = 0; t < s.frames; ++t) acc += w * std::norm(s.ch[c](f, t));
    }
  return acc;
}

struct SierResult {
  double input_db = 0.0;
  double output_db = 0.0;
  double improvement_db = 0.0;
};

namespace detail {

inline double capped_ratio_db(double num, double den, double cap_db) {
  if (den <= 0.0) return cap_db;
  if (num <= 0.0) return -cap_db;
  return std::clamp(10.0 * std::log10(num / den), -cap_db, cap_db);
}

}  // namespace detail

// Target to interference-plus-echo ratio before and after processing, both
// evaluated in the STFT domain so the identity filter scores exactly 0 dB
// improvement.
inline SierResult sier(const Spectrogram& target_in, const Spectrogram& interf_in,
                       const Spectrogram& echo_in, const Spectrogram& target_out,
                       const Spectrogram& interf_out, const Spectrogram& echo_out,
                       double cap_db = 80.0) {
  SierResult r;
  r.input_db = detail::capped_ratio_db(spectrogram_power(target_in),
                                       spectrogram_power(interf_in) + spectrogram_power(echo_in), cap_db);
  r.output_db = detail::capped_ratio_db(
      spectrogram_power(target_out), spectrogram_power(interf_out) + spectrogram_power(echo_out), cap_db);
  r.improvement_db = r.output_db - r.input_db;
  return r;
}

struct MetricsReport {
  std::string variant;
  double rt60_s = 0.0;
  double ser_db = 0.0;
  double sir_db = 0.0;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  std::int64_t change_point = -1;
  std::vector<double> erle_time_s;
  std::vector<double> erle_db;
  double erle_steady_db = 0.0;
  double sdr_in_db = 0.0;
  double sdr_out_db = 0.0;
  double sdr_improvement_db = 0.0;
  double sier_in_db = 0.0;
  double sier_out_db = 0.0;
  double sier_improvement_db = 0.0;
};

namespace detail {

inline nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);  // "inf"/"-inf"/"nan" as strings: JSON has no literals for them
}

}  // namespace detail

inline nlohmann::json report_to_json(const MetricsReport& r) {
  nlohmann::json j;
  j["variant"] = r.variant;
  j["scene"] = {{"rt60_s", detail::json_number(r.rt60_s)},
                {"ser_db", detail::json_number(r.ser_db)},
                {"sir_db", detail::json_number(r.sir_db)},
                {"snr_db", detail::json_number(r.snr_db)},
                {"seed", r.seed},
                {"change_point", r.change_point}};
  j["erle"] = {{"time_s", r.erle_time_s},
               {"erle_db", r.erle_db},
               {"steady_db", detail::json_number(r.erle_steady_db)}};
  j["sdr"] = {{"input_db", detail::json_number(r.sdr_in_db)},
              {"output_db", detail::json_number(r.sdr_out_db)},
              {"improvement_db", detail::json_number(r.sdr_improvement_db)}};
  j["sier"] = {{"input_db", detail::json_number(r.sier_in_db)},
               {"output_db", detail::json_number(r.sier_out_db)},
               {"improvement_db", detail::json_number(r.sier_improvement_db)}};
  return j;
}

inline std::string metrics_csv_header() {
  return "variant,rt60_s,ser_db,sir_db,snr_db,seed,change_point,erle_steady_db,"
         "sdr_in_db,sdr_out_db,sdr_improvement_db,sier_in_db,sier_out_db,sier_improvement_db";
}

inline std::string metrics_csv_row(const MetricsReport& r) {
  std::string row = r.variant;
  for (double v : {r.rt60_s, r.ser_db, r.sir_db, r.snr_db}) row += "," + format_double(v);
  row += "," + std::to_string(r.seed) + "," + std::to_string(r.change_point);
  for (double v : {r.erle_steady_db, r.sdr_in_db, r.sdr_out_db, r.sdr_improvement_db, r.sier_in_db,
                   r.sier_out_db, r.sier_improvement_db})
    row += "," + format_double(v);
  return row;
}

// Full per-run evaluation: ERLE and SDR on mic 1 in the time domain, SIER via
// shadow decomposition of the recorded filter sequence.
inline MetricsReport evaluate_run(const Scene& scene, const std::vector<std::vector<double>>& enhanced,
                                  const FilterTrace& trace, AlgorithmVariant variant,
                                  const StftConfig& stft_cfg, const DraecConfig& filter_cfg,
                                  const MetricsConfig& mcfg = {}) {
  mcfg.validate();
  if (scene.num_mics() != filter_cfg.num_mics)
    throw Error("evaluate: scene has " + std::to_string(scene.num_mics()) + " mics, config expects " +
                std::to_string(filter_cfg.num_mics));
  if (static_cast<int>(enhanced.size()) != scene.num_mics())
    throw Error("evaluate: enhanced channel count mismatch");
  if (enhanced[0].size() > scene.mics[0].size())
    throw Error("evaluate: enhanced signal longer than the scene");

  MetricsReport rep;
  rep.variant = variant_name(variant);
  rep.rt60_s = scene.meta.rt60_s;
  rep.ser_db = scene.meta.ser_db;
  rep.sir_db = scene.meta.sir_db;
  rep.snr_db = scene.meta.snr_db;
  rep.seed = scene.meta.seed;
  rep.change_point = scene.meta.change_point;

  const std::size_t len = enhanced[0].size();
  std::vector<double> mic1(scene.mics[0].begin(), scene.mics[0].begin() + len);
  const ErleResult er =
      erle(mic1, enhanced[0], scene.meta.sample_rate, mcfg.erle_window_s, mcfg.erle_hop_s, mcfg.erle_cap_db);
  rep.erle_time_s = er.time_s;
  rep.erle_db = er.erle_db;
  rep.erle_steady_db = er.steady_db;

  std::vector<double> ref(scene.target_early[0].begin(), scene.target_early[0].begin() + len);
  double p_ref = 0.0;
  for (double v : ref) p_ref += v * v;
  if (p_ref > 0.0) {
    rep.sdr_in_db = sdr(ref, mic1, mcfg.sdr_taps, mcfg.sdr_cap_db);
    rep.sdr_out_db = sdr(ref, enhanced[0], mcfg.sdr_taps, mcfg.sdr_cap_db);
    rep.sdr_improvement_db = rep.sdr_out_db - rep.sdr_in_db;
  } else {  // echo-only scenes have no target; SDR is undefined
    rep.sdr_in_db = rep.sdr_out_db = rep.sdr_improvement_db = std::numeric_limits<double>::quiet_NaN();
  }

  // SIER through shadow filtering, with the playback aligned exactly as the
  // pipeline saw it (bulk delay, common truncation).
  std::vector<double> pb = scene.playback;
  if (filter_cfg.bulk_delay > 0)
    pb.insert(pb.begin(), static_cast<std::size_t>(filter_cfg.bulk_delay), 0.0);
  const std::size_t cut = std::min(scene.mics[0].size(), pb.size());
  pb.resize(cut);
  auto cut_stem = [&](const std::vector<std::vector<double>>& chans) {
    std::vector<std::vector<double>> out(chans.size());
    for (std::size_t m = 0; m < chans.size(); ++m)
      out[m] = std::vector<double>(chans[m].begin(), chans[m].begin() + cut);
    return out;
  };
  const Spectrogram pb_spec = analyze({pb}, stft_cfg);
  std::vector<Spectrogram> stem_specs;
  stem_specs.push_back(analyze(cut_stem(scene.target_full), stft_cfg));
  stem_specs.push_back(analyze(cut_stem(scene.interference), stft_cfg));
  stem_specs.push_back(analyze(cut_stem(scene.echo), stft_cfg));
  const std::vector<Spectrogram> comps =
      shadow_decompose(trace, variant.topology, filter_cfg, stem_specs, pb_spec, 2);

  const SierResult si = sier(stem_specs[0], stem_specs[1], stem_specs[2], comps[0], comps[1], comps[2],
                             mcfg.sier_cap_db);
  rep.sier_in_db = si.input_db;
  rep.sier_out_db = si.output_db;
  rep.sier_improvement_db = si.improvement_db;
  return rep;
}

}  // namespace draec
