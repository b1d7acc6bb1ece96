#pragma once

#include <functional>
#include <string>
#include <vector>

#include "draec/adaptive.hpp"
#include "draec/error.hpp"
#include "draec/metrics.hpp"
#include "draec/pipeline.hpp"
#include "draec/stft.hpp"
#include "draec/textio.hpp"
#include "draec/variant.hpp"

namespace draec {

inline std::string trace_mode_name(TraceMode m) {
  switch (m) {
    case TraceMode::none: return "none";
    case TraceMode::norms: return "norms";
    case TraceMode::full: return "full";
  }
  return "none";
}

inline TraceMode parse_trace_mode(const std::string& s) {
  if (s == "none") return TraceMode::none;
  if (s == "norms") return TraceMode::norms;
  if (s == "full") return TraceMode::full;
  throw ConfigError("trace.mode: expected none|norms|full, got '" + s + "'");
}

// Everything a processing/evaluation run needs. Defaults follow the reference
// operating point: 16 kHz, 32 ms frames at 50% overlap, 1024-point FFT,
// Lx = Ly = 5, delay 2, A = 1, eta = 1e-4, alpha = 0.8.
struct RunConfig {
  StftConfig stft;
  DraecConfig filter;
  AlgorithmVariant variant{Estimator::kalman, Topology::joint};
  MetricsConfig metrics;
  std::uint64_t seed = 1;
  TraceMode trace_mode = TraceMode::full;
  int trace_stride = 10;

  void validate() const {
    stft.validate();
    filter.validate();
    metrics.validate();
    if (trace_stride < 1) throw ConfigError("trace.stride: must be >= 1");
  }

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

struct ConfigKey {
  const char* key;
  const char* alias;  // symbol shorthand (lx, eta, ...), nullptr if none
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

inline const std::vector<ConfigKey>& config_registry() {
  auto int_field = [](auto member) {
    return std::pair{
        [member](RunConfig& c, const std::string& k, const std::string& v) {
          c.*member = static_cast<int>(parse_int(k, v));
        },
        [member](const RunConfig& c) { return std::to_string(c.*member); }};
  };
  auto sub_int = [](auto outer, auto member) {
    return std::pair{
        [outer, member](RunConfig& c, const std::string& k, const std::string& v) {
          (c.*outer).*member = static_cast<int>(parse_int(k, v));
        },
        [outer, member](const RunConfig& c) { return std::to_string((c.*outer).*member); }};
  };
  auto sub_dbl = [](auto outer, auto member) {
    return std::pair{
        [outer, member](RunConfig& c, const std::string& k, const std::string& v) {
          (c.*outer).*member = parse_double(k, v);
        },
        [outer, member](const RunConfig& c) { return format_double((c.*outer).*member); }};
  };

  static const std::vector<ConfigKey> registry = [&] {
    std::vector<ConfigKey> r;
    auto add = [&r](const char* key, const char* alias, auto pair) {
      r.push_back({key, alias, pair.first, pair.second});
    };
    add("stft.sample_rate_hz", nullptr, sub_int(&RunConfig::stft, &StftConfig::sample_rate_hz));
    add("stft.frame_len", nullptr, sub_int(&RunConfig::stft, &StftConfig::frame_len));
    add("stft.hop", nullptr, sub_int(&RunConfig::stft, &StftConfig::hop));
    add("stft.fft_size", nullptr, sub_int(&RunConfig::stft, &StftConfig::fft_size));

    add("filter.aec_taps", "filter.lx", sub_int(&RunConfig::filter, &DraecConfig::aec_taps));
    add("filter.dr_taps", "filter.ly", sub_int(&RunConfig::filter, &DraecConfig::dr_taps));
    add("filter.delay", "filter.delta", sub_int(&RunConfig::filter, &DraecConfig::delay));
    add("filter.num_mics", nullptr, sub_int(&RunConfig::filter, &DraecConfig::num_mics));
    add("filter.transition", "filter.a", sub_dbl(&RunConfig::filter, &DraecConfig::transition));
    add("filter.noise_floor", "filter.eta", sub_dbl(&RunConfig::filter, &DraecConfig::noise_floor));
    add("filter.psd_smoothing", "filter.alpha", sub_dbl(&RunConfig::filter, &DraecConfig::psd_smoothing));
    add("filter.forgetting", "filter.lambda", sub_dbl(&RunConfig::filter, &DraecConfig::forgetting));
    add("filter.psd_floor", nullptr, sub_dbl(&RunConfig::filter, &DraecConfig::psd_floor));
    add("filter.init_cov", nullptr, sub_dbl(&RunConfig::filter, &DraecConfig::init_cov));
    r.push_back({"filter.adapt_process_noise", nullptr,
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   c.filter.adapt_process_noise = parse_bool(k, v);
                 },
                 [](const RunConfig& c) {
                   return std::string(c.filter.adapt_process_noise ? "true" : "false");
                 }});
    add("filter.bulk_delay", nullptr, sub_int(&RunConfig::filter, &DraecConfig::bulk_delay));

    r.push_back({"variant", nullptr,
                 [](RunConfig& c, const std::string&, const std::string& v) { c.variant = parse_variant(v); },
                 [](const RunConfig& c) { return variant_name(c.variant); }});

    add("metrics.erle_window_s", nullptr, sub_dbl(&RunConfig::metrics, &MetricsConfig::erle_window_s));
    add("metrics.erle_hop_s", nullptr, sub_dbl(&RunConfig::metrics, &MetricsConfig::erle_hop_s));
    add("metrics.erle_cap_db", nullptr, sub_dbl(&RunConfig::metrics, &MetricsConfig::erle_cap_db));
    add("metrics.sdr_taps", nullptr, sub_int(&RunConfig::metrics, &MetricsConfig::sdr_taps));
    add("metrics.sdr_cap_db", nullptr, sub_dbl(&RunConfig::metrics, &MetricsConfig::sdr_cap_db));
    add("metrics.sier_cap_db", nullptr, sub_dbl(&RunConfig::metrics, &MetricsConfig::sier_cap_db));

    r.push_back({"seed", nullptr,
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   c.seed = static_cast<std::uint64_t>(parse_int(k, v));
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    r.push_back({"trace.mode", nullptr,
                 [](RunConfig& c, const std::string&, const std::string& v) {
                   c.trace_mode = parse_trace_mode(v);
                 },
                 [](const RunConfig& c) { return trace_mode_name(c.trace_mode); }});
    add("trace.stride", nullptr, int_field(&RunConfig::trace_stride));
    return r;
  }();
  return registry;
}

}  // namespace detail

// Apply one "key = value" assignment; symbol aliases are accepted and error
// messages repeat the key exactly as the user wrote it.
inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& entry : detail::config_registry()) {
    if (key == entry.key || (entry.alias != nullptr && key == entry.alias)) {
      entry.set(cfg, key, value);
      return;
    }
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

inline RunConfig parse_config(const std::string& text, const std::string& origin = "<config>") {
  RunConfig cfg;
  for (const auto& [key, value] : parse_key_values(text, origin)) apply_config_entry(cfg, key, value);
  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const std::string& path) { return parse_config(read_text_file(path), path); }

// Command-line overrides of the form "key=value" applied on top of a config.
inline void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides) {
  for (const auto& ov : overrides) {
    const std::size_t eq = ov.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override '" + ov + "': expected key=value");
    apply_config_entry(cfg, trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
  }
  cfg.validate();
}

inline std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& entry : detail::config_registry())
    out += std::string(entry.key) + " = " + entry.get(cfg) + "\n";
  return out;
}

}  // namespace draec
