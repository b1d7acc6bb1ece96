// draec: scene simulation, adaptive echo/reverberation processing,
// evaluation, and experiment sweeps. Subcommands: simulate | process |
// evaluate | experiment. Exit codes: 0 ok, 1 usage error, 2 runtime error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <draec/draec.hpp>

namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SceneRequest {
  double rt60_s = 0.3;
  double ser_db = 0.0;
  double sir_db = kInf;
  double snr_db = kInf;
  double duration_s = 12.0;
  bool path_change = false;
  double clip_threshold = 0.0;
  int num_mics = 2;
  int sample_rate = 16000;
  std::uint64_t seed = 1;
  std::string speech_wav, interference_wav, playback_wav;
};

std::vector<double> load_source_segment(const std::string& path, int sample_rate, int samples,
                                        int segment) {
  const draec::WavData w = draec::read_wav(path);
  if (w.spec.sample_rate != sample_rate)
    throw draec::Error("source '" + path + "': sample rate " + std::to_string(w.spec.sample_rate) +
                       " does not match configured " + std::to_string(sample_rate));
  const std::size_t begin = static_cast<std::size_t>(segment) * samples;
  if (w.channels[0].size() < begin + samples)
    throw draec::Error("source '" + path + "' is too short for the requested duration");
  return {w.channels[0].begin() + begin, w.channels[0].begin() + begin + samples};
}

// One synthetic scene; with path_change, two segments whose echo paths differ
// (the loudspeaker moves) are concatenated hard.
draec::Scene build_scene(const SceneRequest& req) {
  draec::Rng root(req.seed);
  const int samples = std::max(1, static_cast<int>(std::lround(req.duration_s * req.sample_rate)));
  const bool echo_only = std::isinf(req.ser_db) && req.ser_db < 0;
  const bool no_interferer = std::isinf(req.sir_db) && req.sir_db > 0;

  auto segment = [&](int k, const draec::RoomSpec& room) {
    draec::Rng sig = root.child(100 + k);
    std::vector<double> speech, interference, playback;
    if (!echo_only) {
      if (req.speech_wav.empty()) {
        draec::Rng r = sig.child(1);
        speech = draec::speechlike_signal(samples, r, req.sample_rate);
      } else {
        speech = load_source_segment(req.speech_wav, req.sample_rate, samples, k);
      }
    }
    if (!no_interferer) {
      if (req.interference_wav.empty()) {
        draec::Rng r = sig.child(2);
        interference = draec::speechlike_signal(samples, r, req.sample_rate);
      } else {
        interference = load_source_segment(req.interference_wav, req.sample_rate, samples, k);
      }
    }
    if (req.playback_wav.empty()) {
      draec::Rng r = sig.child(3);
      playback = draec::speechlike_signal(samples, r, req.sample_rate);
    } else {
      playback = load_source_segment(req.playback_wav, req.sample_rate, samples, k);
    }
    return draec::synthesize_scene(speech, interference, playback, room, req.ser_db, req.sir_db,
                                   req.snr_db, sig.child(4).seed(), req.clip_threshold);
  };

  draec::Rng room_rng = root.child(1);
  draec::RoomSpec room = draec::sample_room(room_rng, req.num_mics, req.rt60_s);
  room.sample_rate = req.sample_rate;
  draec::Scene scene = segment(0, room);
  scene.meta.seed = req.seed;

  if (req.path_change) {
    draec::RoomSpec room_b = room;  // same room, loudspeaker jumps
    draec::Rng move_rng = root.child(2);
    const double dist = move_rng.uniform(0.08, 0.18);
    const double az = move_rng.uniform(0.0, 2.0 * M_PI);
    const double el = move_rng.uniform(-0.6, 0.2);
    room_b.loudspeaker_pos = {room.mic_pos[0][0] + dist * std::cos(el) * std::cos(az),
                              room.mic_pos[0][1] + dist * std::cos(el) * std::sin(az),
                              room.mic_pos[0][2] + dist * std::sin(el)};
    draec::Scene second = segment(1, room_b);
    scene = draec::apply_path_change(scene, second);
    scene.meta.seed = req.seed;
  }
  return scene;
}

std::string ratio_tag(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::string s = draec::format_double(v);
  return s;
}

std::string scene_dir_name(const SceneRequest& req, int trial) {
  return "scene_rt" + ratio_tag(req.rt60_s) + "_ser" + ratio_tag(req.ser_db) + "_sir" +
         ratio_tag(req.sir_db) + "_t" + std::to_string(trial);
}

void append_csv(const std::string& path, const std::string& header, const std::string& row) {
  const bool fresh = !fs::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw draec::Error("cannot open csv for append: " + path);
  if (fresh) out << header << "\n";
  out << row << "\n";
}

// ----------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string out_dir;
  std::string config_path;
  std::vector<std::string> overrides;
  std::vector<double> rt60{0.3};
  std::vector<double> ser{0.0};
  std::vector<double> sir{kInf};
  double snr = kInf;
  double duration_s = 12.0;
  int trials = 1;
  bool path_change = false;
  double clip = 0.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string speech_wav, interference_wav, playback_wav;
};

int cmd_simulate(const SimulateArgs& a) {
  draec::RunConfig cfg;
  if (!a.config_path.empty()) cfg = draec::load_config(a.config_path);
  draec::apply_overrides(cfg, a.overrides);
  const std::uint64_t base_seed = a.seed_set ? a.seed : cfg.seed;
  if (a.trials < 1) throw draec::ConfigError("--trials must be >= 1");

  fs::create_directories(a.out_dir);
  std::string manifest = "dir,rt60_s,ser_db,sir_db,snr_db,seed,change_point,num_samples\n";
  draec::Rng root(base_seed);
  int cell = 0;
  for (double rt60 : a.rt60)
    for (double ser : a.ser)
      for (double sir : a.sir) {
        for (int trial = 0; trial < a.trials; ++trial) {
          SceneRequest req;
          req.rt60_s = rt60;
          req.ser_db = ser;
          req.sir_db = sir;
          req.snr_db = a.snr;
          req.duration_s = a.duration_s;
          req.path_change = a.path_change;
          req.clip_threshold = a.clip;
          req.num_mics = cfg.filter.num_mics;
          req.sample_rate = cfg.stft.sample_rate_hz;
          req.seed = root.child(cell).child(trial).seed();
          req.speech_wav = a.speech_wav;
          req.interference_wav = a.interference_wav;
          req.playback_wav = a.playback_wav;

          const draec::Scene scene = build_scene(req);
          const std::string name = scene_dir_name(req, trial);
          draec::write_scene((fs::path(a.out_dir) / name).string(), scene);
          manifest += name + "," + draec::format_double(rt60) + "," + ratio_tag(ser) + "," +
                      ratio_tag(sir) + "," + ratio_tag(a.snr) + "," + std::to_string(req.seed) + "," +
                      std::to_string(scene.meta.change_point) + "," +
                      std::to_string(scene.num_samples()) + "\n";
        }
        ++cell;
      }
  draec::write_text_file((fs::path(a.out_dir) / "manifest.csv").string(), manifest);
  std::cout << "simulated scenes in " << a.out_dir << "\n";
  return 0;
}

// ----------------------------------------------------------------------
// process

struct ProcessArgs {
  std::string scene_dir;
  std::string mic_wav, playback_wav;
  std::string out_dir;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string variant;
  std::string trace_mode;
};

void write_norms_csv(const std::string& path, const draec::FilterTrace& trace,
                     const draec::StftConfig& stft) {
  std::string csv = "stage,mic,frame,time_s,coeff_rms\n";
  for (const auto& st : trace.stages) {
    const int snaps = st.snapshots();
    for (int m = 0; m < st.mics; ++m)
      for (int s = 0; s < snaps; ++s) {
        const int frame = s * st.norm_stride;
        const double time_s = static_cast<double>(frame) * stft.hop / stft.sample_rate_hz;
        csv += st.name + "," + std::to_string(m) + "," + std::to_string(frame) + "," +
               draec::format_double(time_s) + "," +
               draec::format_double(st.norms[static_cast<std::size_t>(m) * snaps + s]) + "\n";
      }
  }
  draec::write_text_file(path, csv);
}

int cmd_process(const ProcessArgs& a) {
  draec::RunConfig cfg;
  if (!a.config_path.empty()) cfg = draec::load_config(a.config_path);
  draec::apply_overrides(cfg, a.overrides);
  if (!a.variant.empty()) cfg.variant = draec::parse_variant(a.variant);
  if (!a.trace_mode.empty()) cfg.trace_mode = draec::parse_trace_mode(a.trace_mode);

  std::string mic_path = a.mic_wav, pb_path = a.playback_wav;
  if (!a.scene_dir.empty()) {
    mic_path = (fs::path(a.scene_dir) / "mics.wav").string();
    pb_path = (fs::path(a.scene_dir) / "playback.wav").string();
  }
  if (mic_path.empty() || pb_path.empty())
    throw draec::ConfigError("process: provide --scene or both --mic and --playback");

  const draec::WavProcessResult res = draec::process_wav(
      mic_path, pb_path, cfg.stft, cfg.filter, cfg.variant, cfg.trace_mode, cfg.trace_stride);

  fs::create_directories(a.out_dir);
  draec::write_wav((fs::path(a.out_dir) / "enhanced.wav").string(), res.enhanced,
                   cfg.stft.sample_rate_hz, draec::WavEncoding::float32);
  if (res.intermediate)
    draec::write_wav((fs::path(a.out_dir) / "intermediate.wav").string(), *res.intermediate,
                     cfg.stft.sample_rate_hz, draec::WavEncoding::float32);
  if (cfg.trace_mode != draec::TraceMode::none)
    draec::write_trace((fs::path(a.out_dir) / "trace.bin").string(), res.trace);
  if (cfg.trace_mode == draec::TraceMode::norms)
    write_norms_csv((fs::path(a.out_dir) / "norms.csv").string(), res.trace, cfg.stft);
  draec::write_text_file((fs::path(a.out_dir) / "run_config.txt").string(),
                         draec::serialize_config(cfg));
  std::cout << "processed " << draec::variant_name(cfg.variant) << " -> " << a.out_dir << "\n";
  return 0;
}

// ----------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string scene_dir;
  std::string processed_dir;
  std::string out_dir;
  std::string results_csv;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const std::string out_dir = a.out_dir.empty() ? a.processed_dir : a.out_dir;
  const draec::Scene scene = draec::read_scene(a.scene_dir);
  const fs::path pdir(a.processed_dir);
  if (!fs::exists(pdir / "run_config.txt"))
    throw draec::Error("evaluate: missing run_config.txt in " + a.processed_dir);
  const draec::RunConfig cfg = draec::load_config((pdir / "run_config.txt").string());
  const draec::WavData enhanced = draec::read_wav((pdir / "enhanced.wav").string());
  if (!fs::exists(pdir / "trace.bin"))
    throw draec::Error("evaluate: missing trace.bin in " + a.processed_dir +
                       " (process with trace.mode = full)");
  const draec::FilterTrace trace = draec::read_trace((pdir / "trace.bin").string());

  const draec::MetricsReport rep = draec::evaluate_run(scene, enhanced.channels, trace, cfg.variant,
                                                       cfg.stft, cfg.filter, cfg.metrics);

  fs::create_directories(out_dir);
  draec::write_text_file((fs::path(out_dir) / "report.json").string(),
                         draec::report_to_json(rep).dump(2) + "\n");
  const std::string csv_path =
      a.results_csv.empty() ? (fs::path(out_dir) / "results.csv").string() : a.results_csv;
  append_csv(csv_path, draec::metrics_csv_header(), draec::metrics_csv_row(rep));
  std::cout << rep.variant << " sier_improvement_db=" << draec::format_double(rep.sier_improvement_db)
            << " sdr_improvement_db=" << draec::format_double(rep.sdr_improvement_db)
            << " erle_steady_db=" << draec::format_double(rep.erle_steady_db) << "\n";
  return 0;
}

// ----------------------------------------------------------------------
// experiment

struct ExperimentArgs {
  std::string out_dir;
  std::string config_path;
  std::vector<std::string> overrides;
  std::vector<double> rt60{0.0, 0.3, 0.6};
  std::vector<double> ser{0.0, -10.0, -20.0};
  std::vector<double> sir{kInf, 0.0};
  double snr = kInf;
  double duration_s = 12.0;
  int trials = 3;
  bool path_change = false;
  double clip = 0.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> variants;
};

struct CellKey {
  double rt60, ser, sir;
  std::string label() const {
    return "rt60=" + ratio_tag(rt60) + " ser=" + ratio_tag(ser) + " sir=" + ratio_tag(sir);
  }
};

struct CellResult {
  std::vector<draec::MetricsReport> reports;  // trials x variants, trial-major
  std::vector<std::string> errors;
};

double mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

int cmd_experiment(const ExperimentArgs& a) {
  draec::RunConfig cfg;
  if (!a.config_path.empty()) cfg = draec::load_config(a.config_path);
  draec::apply_overrides(cfg, a.overrides);
  const std::uint64_t base_seed = a.seed_set ? a.seed : cfg.seed;
  if (a.trials < 1) throw draec::ConfigError("--trials must be >= 1");

  std::vector<draec::AlgorithmVariant> variants;
  if (a.variants.empty())
    variants.assign(draec::kAllVariants.begin(), draec::kAllVariants.end());
  else
    for (const auto& name : a.variants) variants.push_back(draec::parse_variant(name));

  std::vector<CellKey> cells;
  for (double rt60 : a.rt60)
    for (double ser : a.ser)
      for (double sir : a.sir) cells.push_back({rt60, ser, sir});
  if (cells.empty() || variants.empty()) throw draec::ConfigError("experiment: empty grid");

  fs::create_directories(a.out_dir);
  draec::Rng root(base_seed);
  std::vector<CellResult> results(cells.size());

  draec::parallel_for(static_cast<int>(cells.size()), [&](int ci) {
    CellResult& res = results[ci];
    try {
      for (int trial = 0; trial < a.trials; ++trial) {
        SceneRequest req;
        req.rt60_s = cells[ci].rt60;
        req.ser_db = cells[ci].ser;
        req.sir_db = cells[ci].sir;
        req.snr_db = a.snr;
        req.duration_s = a.duration_s;
        req.path_change = a.path_change;
        req.clip_threshold = a.clip;
        req.num_mics = cfg.filter.num_mics;
        req.sample_rate = cfg.stft.sample_rate_hz;
        req.seed = root.child(ci).child(trial).seed();
        const draec::Scene scene = build_scene(req);

        const draec::Spectrogram mic_spec = draec::analyze(scene.mics, cfg.stft);
        const draec::Spectrogram pb_spec = draec::analyze({scene.playback}, cfg.stft);
        for (const auto& variant : variants) {
          draec::PipelineOutput po =
              draec::run_variant(mic_spec, pb_spec, cfg.filter, variant, draec::TraceMode::full);
          const auto enhanced = draec::synthesize(po.enhanced, cfg.stft);
          res.reports.push_back(draec::evaluate_run(scene, enhanced, po.trace, variant, cfg.stft,
                                                    cfg.filter, cfg.metrics));
        }
      }
    } catch (const std::exception& e) {
      res.errors.push_back(cells[ci].label() + ": " + e.what());
    }
  });

  // Merge in deterministic cell order.
  std::vector<std::string> errors;
  std::string results_csv = draec::metrics_csv_header() + "\n";
  std::string table_sdr = "rt60_s,ser_db,sir_db,variant,sdr_improvement_mean_db,sdr_improvement_std_db\n";
  std::string table_sier = "rt60_s,ser_db,sir_db,variant,sier_improvement_mean_db,sier_improvement_std_db\n";
  std::string ordering =
      "rt60_s,ser_db,sir_db,joint_kalman,aec_dr_kalman,dr_aec_kalman,joint_rls,"
      "joint_ge_aec_dr,aec_dr_ge_dr_aec,joint_kalman_ge_joint_rls\n";
  std::string curves = "rt60_s,ser_db,sir_db,variant,time_s,erle_db\n";

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const CellResult& res = results[ci];
    for (const auto& err : res.errors) errors.push_back(err);
    if (!res.errors.empty()) continue;
    const std::string cell_cols = draec::format_double(cells[ci].rt60) + "," + ratio_tag(cells[ci].ser) +
                                  "," + ratio_tag(cells[ci].sir);

    std::map<std::string, std::vector<double>> sier_by_variant, sdr_by_variant;
    std::map<std::string, std::vector<std::vector<double>>> erle_by_variant;
    std::vector<double> erle_time;
    for (const auto& rep : res.reports) {
      results_csv += draec::metrics_csv_row(rep) + "\n";
      sier_by_variant[rep.variant].push_back(rep.sier_improvement_db);
      sdr_by_variant[rep.variant].push_back(rep.sdr_improvement_db);
      erle_by_variant[rep.variant].push_back(rep.erle_db);
      if (erle_time.empty()) erle_time = rep.erle_time_s;
    }
    for (const auto& variant : variants) {
      const std::string name = draec::variant_name(variant);
      table_sdr += cell_cols + "," + name + "," + draec::format_double(mean(sdr_by_variant[name])) +
                   "," + draec::format_double(stddev(sdr_by_variant[name])) + "\n";
      table_sier += cell_cols + "," + name + "," + draec::format_double(mean(sier_by_variant[name])) +
                    "," + draec::format_double(stddev(sier_by_variant[name])) + "\n";
      const auto& runs = erle_by_variant[name];
      if (!runs.empty()) {
        for (std::size_t w = 0; w < erle_time.size(); ++w) {
          double acc = 0.0;
          int cnt = 0;
          for (const auto& run : runs)
            if (w < run.size()) {
              acc += run[w];
              ++cnt;
            }
          if (cnt > 0)
            curves += cell_cols + "," + name + "," + draec::format_double(erle_time[w]) + "," +
                      draec::format_double(acc / cnt) + "\n";
        }
      }
    }
    auto cell_mean = [&](const char* v) {
      auto it = sier_by_variant.find(v);
      return it == sier_by_variant.end() ? std::numeric_limits<double>::quiet_NaN() : mean(it->second);
    };
    const double jk = cell_mean("kalman-joint"), ak = cell_mean("kalman-aec-dr"),
                 dk = cell_mean("kalman-dr-aec"), jr = cell_mean("rls-joint");
    ordering += cell_cols + "," + draec::format_double(jk) + "," + draec::format_double(ak) + "," +
                draec::format_double(dk) + "," + draec::format_double(jr) + "," +
                std::to_string(jk >= ak ? 1 : 0) + "," + std::to_string(ak >= dk ? 1 : 0) + "," +
                std::to_string(jk >= jr ? 1 : 0) + "\n";
  }

  draec::write_text_file((fs::path(a.out_dir) / "results.csv").string(), results_csv);
  draec::write_text_file((fs::path(a.out_dir) / "table_sdr.csv").string(), table_sdr);
  draec::write_text_file((fs::path(a.out_dir) / "table_sier.csv").string(), table_sier);
  draec::write_text_file((fs::path(a.out_dir) / "ordering.csv").string(), ordering);
  draec::write_text_file((fs::path(a.out_dir) / "erle_curves.csv").string(), curves);
  draec::write_text_file((fs::path(a.out_dir) / "run_config.txt").string(),
                         draec::serialize_config(cfg));

  if (!errors.empty()) {
    std::string marker = "partial results: " + std::to_string(errors.size()) + " cell(s) failed\n";
    for (const auto& e : errors) marker += e + "\n";
    draec::write_text_file((fs::path(a.out_dir) / "PARTIAL").string(), marker);
    throw draec::Error("experiment: " + std::to_string(errors.size()) +
                       " cell(s) failed; partial results marked in " + a.out_dir + "/PARTIAL");
  }
  std::cout << "experiment complete: " << cells.size() << " cells x " << variants.size()
            << " variants x " << a.trials << " trials -> " << a.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint acoustic echo cancellation and dereverberation toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Generate synthetic scenes");
  simulate->add_option("--out", sim.out_dir, "Output directory")->required();
  simulate->add_option("--config", sim.config_path, "Config file");
  simulate->add_option("--set", sim.overrides, "Config override key=value");
  simulate->add_option("--rt60", sim.rt60, "Reverberation times, seconds")->delimiter(',');
  simulate->add_option("--ser", sim.ser, "Signal-to-echo ratios, dB")->delimiter(',');
  simulate->add_option("--sir", sim.sir, "Signal-to-interference ratios, dB")->delimiter(',');
  simulate->add_option("--snr", sim.snr, "Signal-to-noise ratio, dB");
  simulate->add_option("--duration", sim.duration_s, "Segment duration, seconds");
  simulate->add_option("--trials", sim.trials, "Scenes per grid cell");
  simulate->add_flag("--path-change", sim.path_change, "Concatenate two segments with moved loudspeaker");
  simulate->add_option("--clip", sim.clip, "Loudspeaker clip threshold (0 disables)");
  simulate->add_option("--seed", sim.seed, "Base seed")->each([&](const std::string&) { sim.seed_set = true; });
  simulate->add_option("--speech", sim.speech_wav, "Target speech WAV (default: built-in synthetic)");
  simulate->add_option("--interference", sim.interference_wav, "Interferer WAV");
  simulate->add_option("--playback-src", sim.playback_wav, "Far-end playback WAV");

  ProcessArgs proc;
  CLI::App* process = app.add_subcommand("process", "Run one algorithm variant");
  process->add_option("--scene", proc.scene_dir, "Scene directory (mics.wav + playback.wav)");
  process->add_option("--mic", proc.mic_wav, "Microphone WAV (M channels)");
  process->add_option("--playback", proc.playback_wav, "Playback WAV (1 channel)");
  process->add_option("--out", proc.out_dir, "Output directory")->required();
  process->add_option("--config", proc.config_path, "Config file");
  process->add_option("--set", proc.overrides, "Config override key=value");
  process->add_option("--variant", proc.variant,
                      "kalman-joint|kalman-aec-dr|kalman-dr-aec|rls-joint|rls-aec-dr|rls-dr-aec");
  process->add_option("--trace", proc.trace_mode, "none|norms|full");

  EvaluateArgs ev;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score a processed run against its scene");
  evaluate->add_option("--scene", ev.scene_dir, "Scene directory")->required();
  evaluate->add_option("--processed", ev.processed_dir, "Processed run directory")->required();
  evaluate->add_option("--out", ev.out_dir, "Report directory (default: processed dir)");
  evaluate->add_option("--results-csv", ev.results_csv, "CSV to append the result row to");

  ExperimentArgs ex;
  CLI::App* experiment = app.add_subcommand("experiment", "Full grid sweep with aggregated tables");
  experiment->add_option("--out", ex.out_dir, "Output directory")->required();
  experiment->add_option("--config", ex.config_path, "Config file");
  experiment->add_option("--set", ex.overrides, "Config override key=value");
  experiment->add_option("--rt60", ex.rt60, "Reverberation times, seconds")->delimiter(',');
  experiment->add_option("--ser", ex.ser, "Signal-to-echo ratios, dB")->delimiter(',');
  experiment->add_option("--sir", ex.sir, "Signal-to-interference ratios, dB")->delimiter(',');
  experiment->add_option("--snr", ex.snr, "Signal-to-noise ratio, dB");
  experiment->add_option("--duration", ex.duration_s, "Segment duration, seconds");
  experiment->add_option("--trials", ex.trials, "Trials per cell");
  experiment->add_flag("--path-change", ex.path_change, "Echo-path-change scenes");
  experiment->add_option("--clip", ex.clip, "Loudspeaker clip threshold (0 disables)");
  experiment->add_option("--seed", ex.seed, "Base seed")->each([&](const std::string&) { ex.seed_set = true; });
  experiment->add_option("--variants", ex.variants, "Subset of variants")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      return app.exit(e);  // --help and friends
    }
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (process->parsed()) return cmd_process(proc);
    if (evaluate->parsed()) return cmd_evaluate(ev);
    if (experiment->parsed()) return cmd_experiment(ex);
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
