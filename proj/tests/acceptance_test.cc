// Acceptance suite: one test per numbered criterion, each printing a PASS or
// FAIL line with the measured quantity so the run log doubles as a report.
#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "draec/draec.hpp"
#include "support.hpp"

namespace {

using draec::AlgorithmVariant;
using draec::DraecConfig;
using draec::Estimator;
using draec::Scene;
using draec::Spectrogram;
using draec::Topology;

constexpr double kInf = std::numeric_limits<double>::infinity();

void report(int criterion, const std::string& detail) {
  std::cout << "[criterion " << criterion << "] "
            << (::testing::Test::HasFailure() ? "FAIL" : "PASS") << " - " << detail << std::endl;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

DraecConfig degenerate_cfg() {
  DraecConfig cfg;  // L = 5 + 5*2 = 15
  cfg.transition = 1.0;
  cfg.adapt_process_noise = false;
  cfg.noise_floor = 0.0;
  cfg.psd_smoothing = 1.0;  // phi_S frozen at 1
  cfg.forgetting = 1.0;
  cfg.init_cov = 1.0;
  return cfg;
}

TEST(Acceptance, Criterion1KalmanRlsEquivalence) {
  const DraecConfig cfg = degenerate_cfg();
  draec::FilterState kalman = draec::init_state(cfg);
  draec::FilterState rls = draec::init_state(cfg);
  draec::Rng rng(101);

  double max_dev = 0.0;
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXcd z(cfg.filter_len());
    for (int i = 0; i < z.size(); ++i) z(i) = rng.cgaussian();
    const std::complex<double> y = rng.cgaussian();
    const auto out_k = draec::kalman_step(kalman, z, y, cfg);
    const auto out_r = draec::rls_step(rls, z, y, cfg);
    max_dev = std::max(max_dev, std::abs(out_k.s_hat - out_r.s_hat));
  }
  max_dev = std::max(max_dev, (kalman.w_pred - rls.w_pred).cwiseAbs().maxCoeff());
  EXPECT_LE(max_dev, 1e-8);
  report(1, "Kalman/RLS max deviation " + fmt(max_dev) + " over 200 frames at L=15 (tol 1e-8)");
}

TEST(Acceptance, Criterion2StftRoundTrip) {
  const draec::StftConfig cfg;
  draec::Rng rng(102);
  const std::vector<double> x = testsupport::white_noise(10 * cfg.sample_rate_hz, rng);
  const Spectrogram spec = draec::analyze({x}, cfg);
  const std::vector<std::vector<double>> back = draec::synthesize(spec, cfg);

  double err = 0.0, ref = 0.0;
  for (std::size_t i = cfg.frame_len; i + cfg.frame_len < back[0].size(); ++i) {
    const double d = back[0][i] - x[i];
    err += d * d;
    ref += x[i] * x[i];
  }
  const double db = testsupport::relative_error_db(err, ref);
  EXPECT_LE(db, -50.0);
  report(2, "STFT round-trip error " + fmt(db) + " dB on 10 s noise (tol -50 dB)");
}

TEST(Acceptance, Criterion3CovarianceHealth) {
  DraecConfig cfg;  // L = 15, adaptive process noise on
  draec::FilterState st = draec::init_state(cfg);
  draec::Rng rng(103);

  double min_eig = 1e300;
  bool hermitian = true;
  for (int t = 0; t < 10000; ++t) {
    Eigen::VectorXcd z(cfg.filter_len());
    for (int i = 0; i < z.size(); ++i) z(i) = rng.cgaussian();
    draec::kalman_step(st, z, rng.cgaussian(), cfg);

    if (st.phi_pred != st.phi_pred.adjoint().eval()) hermitian = false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(st.phi_pred,
                                                        Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
  }
  EXPECT_TRUE(hermitian);
  EXPECT_GE(min_eig, -1e-10);
  report(3, std::string("covariance ") + (hermitian ? "exactly Hermitian" : "NOT Hermitian") +
                ", min eigenvalue " + fmt(min_eig) + " over 1e4 steps (tol -1e-10)");
}

TEST(Acceptance, Criterion4ArOracle) {
  DraecConfig cfg;
  cfg.num_mics = 2;
  draec::Rng rng(104);
  const int frames = 30 * 16000 / 256;  // 30 s of frames at the default hop
  const int bins = 16;
  const auto sc = testsupport::make_ar_scene(2, bins, frames, cfg.aec_taps, cfg.dr_taps, cfg.delay, rng);

  // (a) frozen true filter: output equals the source to machine precision
  DraecConfig frozen = cfg;
  frozen.init_cov = 0.0;
  frozen.noise_floor = 0.0;
  frozen.adapt_process_noise = false;
  double frozen_err = 0.0, frozen_ref = 0.0;
  for (int f = 0; f < bins; ++f) {
    std::vector<draec::BinSeries> mics(2);
    for (int m = 0; m < 2; ++m) mics[m] = {sc.mic.ch[m].data() + f, frames, bins};
    const draec::BinSeries pb{sc.playback.ch[0].data() + f, frames, bins};
    std::vector<draec::FilterState> st(2);
    for (int m = 0; m < 2; ++m) {
      st[m] = draec::init_state(frozen);
      st[m].w_pred = sc.w_true[m];
      st[m].w_prev = sc.w_true[m];
    }
    for (int t = 0; t < frames; ++t) {
      const Eigen::VectorXcd z = draec::build_regressor(pb, mics, t, frozen);
      for (int m = 0; m < 2; ++m) {
        const auto out = draec::kalman_step(st[m], z, mics[m].at(t), frozen);
        frozen_err += std::norm(out.s_hat - sc.target.ch[m](f, t));
        frozen_ref += std::norm(sc.target.ch[m](f, t));
      }
    }
  }
  const double frozen_rel = std::sqrt(frozen_err / frozen_ref);
  EXPECT_LE(frozen_rel, 1e-10);

  // (b) adaptive joint Kalman converges to -20 dB over the last 20%. Run in
  // the settling regime (process noise 0, phi_S frozen): identification
  // accuracy is the point here; tracking with the default adaptive process
  // noise is criterion 5's subject.
  DraecConfig settling = cfg;
  settling.adapt_process_noise = false;
  settling.noise_floor = 0.0;
  settling.psd_smoothing = 1.0;
  const draec::PipelineOutput po =
      draec::run_variant(sc.mic, sc.playback, settling, {Estimator::kalman, Topology::joint});
  double err = 0.0, ref = 0.0;
  for (int f = 0; f < bins; ++f)
    for (int t = frames - frames / 5; t < frames; ++t)
      for (int m = 0; m < 2; ++m) {
        err += std::norm(po.enhanced.ch[m](f, t) - sc.target.ch[m](f, t));
        ref += std::norm(sc.target.ch[m](f, t));
      }
  const double db = testsupport::relative_error_db(err, ref);
  EXPECT_LE(db, -20.0);
  report(4, "frozen-filter relative error " + fmt(frozen_rel) + " (tol 1e-10); adaptive residual " +
                fmt(db) + " dB over last 20% of 30 s (tol -20 dB)");
}

TEST(Acceptance, Criterion5EchoOnlyTracking) {
  const int fs = 16000;
  draec::RoomSpec room;
  room.dimensions = {6.0, 5.0, 3.0};
  room.rt60_s = 0.0;  // linear free-field echo path
  room.source_pos = {1.5, 2.0, 1.2};
  room.interferer_pos = {4.5, 3.5, 1.6};
  room.loudspeaker_pos = {4.2, 2.5, 1.1};
  room.mic_pos = {{3.0, 2.5, 1.1}, {3.06, 2.5, 1.1}};

  draec::Rng rng(105);
  const std::vector<double> silence_a(8 * fs, 0.0), silence_b(5 * fs, 0.0);
  const Scene seg_a = draec::synthesize_scene(silence_a, silence_a, testsupport::white_noise(8 * fs, rng),
                                              room, -kInf, kInf, kInf, 1);
  draec::RoomSpec moved = room;
  moved.loudspeaker_pos = {3.0, 3.3, 1.1};  // path change: new distance and bearing
  const Scene seg_b = draec::synthesize_scene(silence_b, silence_b, testsupport::white_noise(5 * fs, rng),
                                              moved, -kInf, kInf, kInf, 2);
  const Scene scene = draec::apply_path_change(seg_a, seg_b);
  const double t_change = static_cast<double>(scene.meta.change_point) / fs;

  const draec::StftConfig scfg;
  DraecConfig cfg;
  cfg.num_mics = 2;
  const auto out = draec::run_variant(draec::analyze(scene.mics, scfg),
                                      draec::analyze({scene.playback}, scfg), cfg,
                                      {Estimator::kalman, Topology::joint});
  auto enhanced = draec::synthesize(out.enhanced, scfg);
  const std::size_t len = std::min(enhanced[0].size(), scene.mics[0].size());
  enhanced[0].resize(len);
  const std::vector<double> mic1(scene.mics[0].begin(), scene.mics[0].begin() + len);
  const draec::ErleResult erle = draec::erle(mic1, enhanced[0], fs);

  double steady = 0.0;
  int steady_n = 0;
  double post_min = 1e300, recovered = -1e300;
  for (std::size_t i = 0; i < erle.time_s.size(); ++i) {
    const double t = erle.time_s[i];
    if (t >= 5.0 && t <= t_change - 0.5) {
      steady += erle.erle_db[i];
      ++steady_n;
    }
    if (t > t_change && t <= t_change + 1.5) post_min = std::min(post_min, erle.erle_db[i]);
    if (t > t_change + 1.0 && t <= t_change + 3.0) recovered = std::max(recovered, erle.erle_db[i]);
  }
  ASSERT_GT(steady_n, 0);
  steady /= steady_n;
  const double drop = steady - post_min;

  EXPECT_GE(steady, 20.0);
  EXPECT_GE(drop, 10.0);
  EXPECT_GE(recovered, 15.0);
  report(5, "steady ERLE " + fmt(steady) + " dB (>= 20); drop " + fmt(drop) +
                " dB at path change (>= 10); recovery " + fmt(recovered) + " dB within 3 s (>= 15)");
}

TEST(Acceptance, Criterion6SierOrderingAcrossVariants) {
  const int fs = 16000;
  const int n = 12 * fs;
  const draec::StftConfig scfg;
  DraecConfig cfg;
  cfg.num_mics = 2;
  const std::vector<AlgorithmVariant> variants = {{Estimator::kalman, Topology::joint},
                                                  {Estimator::kalman, Topology::aec_then_dr},
                                                  {Estimator::kalman, Topology::dr_then_aec},
                                                  {Estimator::rls, Topology::joint}};
  std::map<std::string, std::vector<double>> sier;

  for (int trial = 0; trial < 5; ++trial) {
    draec::Rng root(1000 + trial);
    draec::Rng room_rng = root.child(1);
    const draec::RoomSpec room = draec::sample_room(room_rng, 2, 0.3);
    draec::Rng sig1 = root.child(2), sig2 = root.child(3), sig3 = root.child(4);
    const auto speech = draec::speechlike_signal(n, sig1, fs);
    const auto interference = draec::speechlike_signal(n, sig2, fs);
    const auto playback = draec::speechlike_signal(n, sig3, fs);

    // The trend under test hinges on the filters tracking acoustic
    // environment changes, so each trial moves the loudspeaker twice (at 25%
    // and 50% of the scene): through the array to the opposite side at the
    // complementary distance, then on to a third bearing. Gain, delay and
    // direction of the echo path all change at each junction.
    const auto& m0 = room.mic_pos[0];
    const double dx = room.loudspeaker_pos[0] - m0[0];
    const double dy = room.loudspeaker_pos[1] - m0[1];
    const double dz = room.loudspeaker_pos[2] - m0[2];
    const double d1 = std::sqrt(dx * dx + dy * dy + dz * dz);
    const double az1 = std::atan2(dy, dx);
    const double el1 = std::asin(dz / d1);
    const double bounds[4] = {0.0, 0.25, 0.5, 1.0};

    Scene scene;
    for (int k = 0; k < 3; ++k) {
      draec::RoomSpec seg_room = room;
      if (k > 0) {
        const double d = (k % 2 == 0) ? d1 : 0.20 - d1;
        const double az = az1 + k * (2.0 * M_PI / 3.0);
        seg_room.loudspeaker_pos = {m0[0] + d * std::cos(el1) * std::cos(az),
                                    m0[1] + d * std::cos(el1) * std::sin(az),
                                    m0[2] + d * std::sin(el1)};
      }
      const std::size_t a = static_cast<std::size_t>(bounds[k] * n);
      const std::size_t b = static_cast<std::size_t>(bounds[k + 1] * n);
      auto seg = [&](const std::vector<double>& x) {
        return std::vector<double>(x.begin() + a, x.begin() + b);
      };
      const Scene part =
          draec::synthesize_scene(seg(speech), seg(interference), seg(playback), seg_room,
                                  /*ser=*/-10.0, /*sir=*/0.0, /*snr=*/kInf,
                                  root.child(5 + k).seed());
      scene = (k == 0) ? part : draec::apply_path_change(scene, part);
    }

    const Spectrogram mic_spec = draec::analyze(scene.mics, scfg);
    const Spectrogram pb_spec = draec::analyze({scene.playback}, scfg);
    for (const auto& variant : variants) {
      const draec::PipelineOutput po =
          draec::run_variant(mic_spec, pb_spec, cfg, variant, draec::TraceMode::full);
      const auto enhanced = draec::synthesize(po.enhanced, scfg);
      const draec::MetricsReport rep =
          draec::evaluate_run(scene, enhanced, po.trace, variant, scfg, cfg);
      sier[rep.variant].push_back(rep.sier_improvement_db);
    }
  }

  auto mean = [&](const char* v) {
    const auto& xs = sier[v];
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
  };
  const double jk = mean("kalman-joint");
  const double ak = mean("kalman-aec-dr");
  const double dk = mean("kalman-dr-aec");
  const double jr = mean("rls-joint");

  EXPECT_GE(jk, ak);
  EXPECT_GE(ak, dk);
  EXPECT_GE(jk, jr);
  report(6, "mean SIER improvement (dB): joint-K " + fmt(jk) + " >= AEC->DR-K " + fmt(ak) +
                " >= DR->AEC-K " + fmt(dk) + "; joint-K " + fmt(jk) + " >= joint-RLS " + fmt(jr) +
                " (5 trials at rt60 0.3 / SER -10 / SIR 0, two echo path changes per scene)");
}

TEST(Acceptance, Criterion7DegenerateCollapse) {
  draec::Rng rng(107);
  Spectrogram mic = Spectrogram::zeros(2, 150, 33);
  Spectrogram pb = Spectrogram::zeros(1, 150, 33);
  for (int f = 0; f < 33; ++f)
    for (int t = 0; t < 150; ++t) {
      pb.ch[0](f, t) = rng.cgaussian();
      for (int m = 0; m < 2; ++m) mic.ch[m](f, t) = rng.cgaussian();
    }

  double worst = 0.0;
  for (const Estimator est : {Estimator::kalman, Estimator::rls}) {
    DraecConfig aec_only;
    aec_only.num_mics = 2;
    aec_only.dr_taps = 0;
    const auto joint_aec = draec::run_variant(mic, pb, aec_only, {est, Topology::joint});
    const auto casc_aec = draec::run_variant(mic, pb, aec_only, {est, Topology::aec_then_dr});
    worst = std::max(worst, testsupport::max_abs_diff(joint_aec.enhanced, casc_aec.enhanced));

    DraecConfig dr_only;
    dr_only.num_mics = 2;
    dr_only.aec_taps = 0;
    const auto joint_dr = draec::run_variant(mic, pb, dr_only, {est, Topology::joint});
    const auto casc_dr = draec::run_variant(mic, pb, dr_only, {est, Topology::dr_then_aec});
    worst = std::max(worst, testsupport::max_abs_diff(joint_dr.enhanced, casc_dr.enhanced));
  }
  EXPECT_EQ(worst, 0.0);
  report(7, "joint(Ly=0) vs AEC-only and joint(Lx=0) vs DR-only max deviation " + fmt(worst) +
                " (bit-identical required)");
}

TEST(Acceptance, Criterion8SceneFidelity) {
  const int fs = 16000;
  draec::Rng rng(108);
  const auto speech = draec::speechlike_signal(2 * fs, rng, fs);
  const auto interference = draec::speechlike_signal(2 * fs, rng, fs);
  const auto playback = draec::speechlike_signal(2 * fs, rng, fs);

  // (a) requested vs measured ratios on a sampled room
  draec::Rng room_rng(1);
  const draec::RoomSpec room = draec::sample_room(room_rng, 2, 0.3);
  const Scene sc = draec::synthesize_scene(speech, interference, playback, room, -10.0, 0.0, 20.0, 8);
  auto power = [](const std::vector<double>& x) {
    double p = 0.0;
    for (double v : x) p += v * v;
    return p / static_cast<double>(x.size());
  };
  const double ser = 10.0 * std::log10(power(sc.target_full[0]) / power(sc.echo[0]));
  const double sir = 10.0 * std::log10(power(sc.target_full[0]) / power(sc.interference[0]));
  const double snr = 10.0 * std::log10(power(sc.target_full[0]) / power(sc.noise[0]));
  EXPECT_NEAR(ser, -10.0, 0.01);
  EXPECT_NEAR(sir, 0.0, 0.01);
  EXPECT_NEAR(snr, 20.0, 0.01);

  // (b) T60 fidelity across sampled rooms at both requested values
  double worst_t60_ratio = 1.0;
  for (const double rt60 : {0.3, 0.6}) {
    for (int i = 0; i < 3; ++i) {
      draec::Rng rr(200 + i);
      const draec::RoomSpec spec = draec::sample_room(rr, 2, rt60);
      const auto rir = draec::image_method_rir(spec, spec.source_pos, spec.mic_pos[0]);
      const double t60 = testsupport::schroeder_t60(rir, fs);
      EXPECT_GE(t60, 0.8 * rt60) << "rt60 " << rt60 << " room " << i;
      EXPECT_LE(t60, 1.2 * rt60) << "rt60 " << rt60 << " room " << i;
      const double ratio = t60 / rt60;
      if (std::abs(ratio - 1.0) > std::abs(worst_t60_ratio - 1.0)) worst_t60_ratio = ratio;
    }
  }

  // (c) stem additivity
  double peak = 0.0, worst_dev = 0.0;
  for (int m = 0; m < sc.num_mics(); ++m)
    for (int i = 0; i < sc.num_samples(); ++i) {
      peak = std::max(peak, std::abs(sc.mics[m][i]));
      const double sum =
          sc.target_full[m][i] + sc.echo[m][i] + sc.interference[m][i] + sc.noise[m][i];
      worst_dev = std::max(worst_dev, std::abs(sc.mics[m][i] - sum));
    }
  EXPECT_LE(worst_dev, 1e-6 * peak);
  report(8, "ratios SER " + fmt(ser) + "/SIR " + fmt(sir) + "/SNR " + fmt(snr) +
                " dB (tol 0.01); worst T60 ratio " + fmt(worst_t60_ratio) +
                " (tol 0.8-1.2); stem additivity " + fmt(peak > 0 ? worst_dev / peak : 0.0) +
                " relative (tol 1e-6)");
}

TEST(Acceptance, Criterion9ShadowLinearity) {
  const int fs = 16000;
  draec::Rng rng(109);
  draec::RoomSpec room;
  room.dimensions = {6.0, 5.0, 3.0};
  room.rt60_s = 0.3;
  room.source_pos = {1.5, 2.0, 1.2};
  room.interferer_pos = {4.5, 3.5, 1.6};
  room.loudspeaker_pos = {3.2, 2.6, 1.0};
  room.mic_pos = {{3.0, 2.5, 1.1}, {3.06, 2.5, 1.1}};
  const int n = 3 * fs;
  const Scene sc = draec::synthesize_scene(draec::speechlike_signal(n, rng, fs),
                                           draec::speechlike_signal(n, rng, fs),
                                           draec::speechlike_signal(n, rng, fs), room, -10.0, 0.0,
                                           30.0, 9);

  const draec::StftConfig scfg;
  DraecConfig cfg;
  cfg.num_mics = 2;
  const Spectrogram mix = draec::analyze(sc.mics, scfg);
  const Spectrogram pb = draec::analyze({sc.playback}, scfg);
  const Spectrogram target = draec::analyze(sc.target_full, scfg);
  const Spectrogram interf = draec::analyze(sc.interference, scfg);
  const Spectrogram echo = draec::analyze(sc.echo, scfg);
  const Spectrogram noise = draec::analyze(sc.noise, scfg);

  double worst = 0.0;
  for (const auto& variant : draec::kAllVariants) {
    const draec::PipelineOutput po =
        draec::run_variant(mix, pb, cfg, variant, draec::TraceMode::full);
    const auto comps = draec::shadow_decompose(po.trace, variant.topology, cfg,
                                               {target, interf, echo, noise}, pb, 2);
    double err = 0.0, ref = 0.0;
    for (int m = 0; m < 2; ++m) {
      Eigen::MatrixXcd sum = comps[0].ch[m] + comps[1].ch[m] + comps[2].ch[m] + comps[3].ch[m];
      err += (sum - po.enhanced.ch[m]).squaredNorm();
      ref += po.enhanced.ch[m].squaredNorm();
    }
    worst = std::max(worst, std::sqrt(err / ref));
  }
  EXPECT_LE(worst, 1e-6);
  report(9, "shadow component sum vs mixture output: worst relative error " + fmt(worst) +
                " across all 6 variants (tol 1e-6)");
}

}  // namespace
