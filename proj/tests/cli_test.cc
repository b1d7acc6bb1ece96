// Exercises the CLI binary end to end via std::system. The binary path is
// injected by the build as the DRAEC_CLI_PATH macro.
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

#include "draec/scene.hpp"
#include "draec/wav.hpp"

namespace {

namespace fs = std::filesystem;

struct CmdResult {
  int code = -1;
  std::string output;
};

fs::path test_root() {
  static const fs::path root = [] {
    const fs::path p = fs::temp_directory_path() / "draec_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

CmdResult run_cli(const std::string& args) {
  const char* bin = DRAEC_CLI_PATH;  // injected by the build
  const fs::path log = test_root() / "cmd.log";
  const std::string cmd = std::string(bin) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  CmdResult res;
  res.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream in(log);
  res.output.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return res;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run_cli("--help").code, 0);
  EXPECT_NE(run_cli("--help").output.find("simulate"), std::string::npos);

  const CmdResult bad_flag = run_cli("simulate --no-such-flag --out x");
  EXPECT_EQ(bad_flag.code, 1);
  EXPECT_NE(bad_flag.output.find("error:"), std::string::npos);

  EXPECT_EQ(run_cli("").code, 1);  // subcommand required

  const CmdResult missing = run_cli("process --scene /nonexistent_dir --out " +
                                    (test_root() / "missing_out").string());
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.output.find("error:"), std::string::npos);
  EXPECT_EQ(count_lines(missing.output), 1);  // one-line reason
}

TEST(Cli, SimulateIsDeterministicAndRecordsPathChange) {
  const fs::path a = test_root() / "sim_a";
  const fs::path b = test_root() / "sim_b";
  const std::string grid = " --rt60 0.3 --ser 0 --trials 1 --duration 1.5 --seed 7";
  ASSERT_EQ(run_cli("simulate --out " + a.string() + grid).code, 0);
  ASSERT_EQ(run_cli("simulate --out " + b.string() + grid).code, 0);

  ASSERT_TRUE(fs::exists(a / "manifest.csv"));
  EXPECT_EQ(slurp(a / "manifest.csv"), slurp(b / "manifest.csv"));
  EXPECT_EQ(count_lines(slurp(a / "manifest.csv")), 2);  // header + one scene

  int scene_dirs = 0;
  fs::path scene_dir;
  for (const auto& e : fs::directory_iterator(a))
    if (e.is_directory()) {
      ++scene_dirs;
      scene_dir = e.path();
    }
  EXPECT_EQ(scene_dirs, 1);
  for (const char* stem : {"mics.wav", "playback.wav", "target_early.wav", "target_full.wav",
                           "echo.wav", "interference.wav", "noise.wav", "meta.txt"})
    EXPECT_TRUE(fs::exists(scene_dir / stem)) << stem;
  EXPECT_EQ(slurp(scene_dir / "mics.wav"), slurp(b / scene_dir.filename() / "mics.wav"));

  const draec::Scene plain = draec::read_scene(scene_dir.string());
  EXPECT_EQ(plain.meta.change_point, -1);

  const fs::path c = test_root() / "sim_c";
  ASSERT_EQ(run_cli("simulate --out " + c.string() + grid + " --path-change").code, 0);
  for (const auto& e : fs::directory_iterator(c))
    if (e.is_directory()) {
      const draec::Scene moved = draec::read_scene(e.path().string());
      EXPECT_GT(moved.meta.change_point, 0);
      EXPECT_LT(moved.meta.change_point, moved.num_samples());
    }
}

TEST(Cli, ProcessSilenceGivesSilence) {
  const fs::path dir = test_root() / "silence";
  fs::create_directories(dir);
  const std::vector<std::vector<double>> mics(2, std::vector<double>(8000, 0.0));
  draec::write_wav((dir / "mic.wav").string(), mics, 16000);
  draec::write_wav((dir / "pb.wav").string(), {std::vector<double>(8000, 0.0)}, 16000);

  const fs::path out = dir / "out";
  ASSERT_EQ(run_cli("process --mic " + (dir / "mic.wav").string() + " --playback " +
                    (dir / "pb.wav").string() + " --out " + out.string() + " --variant kalman-joint")
                .code,
            0);
  ASSERT_TRUE(fs::exists(out / "enhanced.wav"));
  EXPECT_TRUE(fs::exists(out / "trace.bin"));
  EXPECT_TRUE(fs::exists(out / "run_config.txt"));
  const draec::WavData enhanced = draec::read_wav((out / "enhanced.wav").string());
  for (const auto& ch : enhanced.channels)
    for (double v : ch) ASSERT_EQ(v, 0.0);
}

TEST(Cli, SceneProcessEvaluateChain) {
  const fs::path sim = test_root() / "chain_sim";
  ASSERT_EQ(run_cli("simulate --out " + sim.string() +
                    " --rt60 0.3 --ser 0 --sir 0 --snr 30 --trials 1 --duration 3 --seed 11")
                .code,
            0);
  fs::path scene_dir;
  for (const auto& e : fs::directory_iterator(sim))
    if (e.is_directory()) scene_dir = e.path();
  ASSERT_FALSE(scene_dir.empty());

  // cascade run: intermediate stage output is emitted alongside the result
  const fs::path run_a = test_root() / "chain_run_a";
  ASSERT_EQ(run_cli("process --scene " + scene_dir.string() + " --out " + run_a.string() +
                    " --variant kalman-aec-dr --trace full")
                .code,
            0);
  EXPECT_TRUE(fs::exists(run_a / "intermediate.wav"));

  // deterministic: same invocation gives byte-identical audio
  const fs::path run_a2 = test_root() / "chain_run_a2";
  ASSERT_EQ(run_cli("process --scene " + scene_dir.string() + " --out " + run_a2.string() +
                    " --variant kalman-aec-dr --trace full")
                .code,
            0);
  EXPECT_EQ(slurp(run_a / "enhanced.wav"), slurp(run_a2 / "enhanced.wav"));

  const std::string csv = (test_root() / "chain_results.csv").string();
  const CmdResult ev_a = run_cli("evaluate --scene " + scene_dir.string() + " --processed " +
                                 run_a.string() + " --results-csv " + csv);
  ASSERT_EQ(ev_a.code, 0) << ev_a.output;
  ASSERT_TRUE(fs::exists(run_a / "report.json"));
  {
    const nlohmann::json j = nlohmann::json::parse(slurp(run_a / "report.json"));
    EXPECT_EQ(j["variant"], "kalman-aec-dr");
    EXPECT_DOUBLE_EQ(j["scene"]["ser_db"].get<double>(), 0.0);
    EXPECT_TRUE(j["erle"]["erle_db"].is_array());
  }

  // frozen zero-filter run: identity processing scores ERLE ~0 and SIER
  // improvement exactly 0
  const fs::path run_id = test_root() / "chain_run_identity";
  ASSERT_EQ(run_cli("process --scene " + scene_dir.string() + " --out " + run_id.string() +
                    " --variant kalman-joint --trace full --set filter.init_cov=0" +
                    " --set filter.noise_floor=0 --set filter.adapt_process_noise=false")
                .code,
            0);
  const CmdResult ev_id = run_cli("evaluate --scene " + scene_dir.string() + " --processed " +
                                  run_id.string() + " --results-csv " + csv);
  ASSERT_EQ(ev_id.code, 0) << ev_id.output;
  {
    const nlohmann::json j = nlohmann::json::parse(slurp(run_id / "report.json"));
    EXPECT_NEAR(j["erle"]["steady_db"].get<double>(), 0.0, 0.05);
    EXPECT_NEAR(j["sier"]["improvement_db"].get<double>(), 0.0, 1e-9);
  }

  // one CSV row per (scene, variant) evaluation
  EXPECT_EQ(count_lines(slurp(csv)), 3);  // header + two runs

  // target stem presented as the estimate scores SDR at the cap
  fs::copy_file(scene_dir / "target_early.wav", run_id / "enhanced.wav",
                fs::copy_options::overwrite_existing);
  const fs::path rep_dir = test_root() / "chain_cap_report";
  ASSERT_EQ(run_cli("evaluate --scene " + scene_dir.string() + " --processed " + run_id.string() +
                    " --out " + rep_dir.string())
                .code,
            0);
  {
    const nlohmann::json j = nlohmann::json::parse(slurp(rep_dir / "report.json"));
    EXPECT_DOUBLE_EQ(j["sdr"]["output_db"].get<double>(), 60.0);
  }

  // missing trace is a structured failure
  fs::remove(run_id / "trace.bin");
  const CmdResult no_trace = run_cli("evaluate --scene " + scene_dir.string() + " --processed " +
                                     run_id.string());
  EXPECT_EQ(no_trace.code, 2);
  EXPECT_NE(no_trace.output.find("trace"), std::string::npos);
}

TEST(Cli, ExperimentEmitsAggregatedTables) {
  const fs::path out = test_root() / "experiment";
  const CmdResult res = run_cli("experiment --out " + out.string() +
                                " --rt60 0.3 --ser -10 --sir 0 --snr 30 --trials 1 --duration 2" +
                                " --seed 5");
  ASSERT_EQ(res.code, 0) << res.output;

  ASSERT_TRUE(fs::exists(out / "results.csv"));
  EXPECT_EQ(count_lines(slurp(out / "results.csv")), 7);  // header + 6 variants
  EXPECT_EQ(count_lines(slurp(out / "table_sdr.csv")), 7);
  EXPECT_EQ(count_lines(slurp(out / "table_sier.csv")), 7);
  EXPECT_FALSE(fs::exists(out / "PARTIAL"));

  const std::string ordering = slurp(out / "ordering.csv");
  EXPECT_EQ(count_lines(ordering), 2);
  EXPECT_NE(ordering.find("joint_ge_aec_dr"), std::string::npos);
  EXPECT_NE(ordering.find("joint_kalman_ge_joint_rls"), std::string::npos);

  const std::string curves = slurp(out / "erle_curves.csv");
  EXPECT_GT(count_lines(curves), 6);  // at least one window per variant
  EXPECT_NE(curves.find("kalman-joint"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "run_config.txt"));

  // restricting the variant set shrinks the tables accordingly
  const fs::path out2 = test_root() / "experiment_subset";
  ASSERT_EQ(run_cli("experiment --out " + out2.string() +
                    " --rt60 0.3 --ser -10 --sir 0 --snr 30 --trials 1 --duration 2 --seed 5" +
                    " --variants kalman-joint,rls-joint")
                .code,
            0);
  EXPECT_EQ(count_lines(slurp(out2 / "table_sier.csv")), 3);
}

}  // namespace
