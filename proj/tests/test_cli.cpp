#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "latcomp/patterns.hpp"
#include "latcomp/pipeline.hpp"
#include "latcomp/png_io.hpp"

#ifndef LATCOMP_CLI_PATH
#error "LATCOMP_CLI_PATH must point at the latcomp executable"
#endif

namespace latcomp {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("latcomp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  CliRun run(const std::string& args) const {
    const fs::path out = path("stdout.txt"), err = path("stderr.txt");
    const std::string cmd = std::string("\"") + LATCOMP_CLI_PATH + "\" " + args + " >\"" +
                            out.string() + "\" 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path dir_;
};

TriPlane pattern(PatternKind k, std::size_t w, std::size_t h) {
  PatternSpec s;
  s.kind = k;
  s.width = w;
  s.height = h;
  return generate(s);
}

nlohmann::json error_json(const CliRun& r) {
  const auto pos = r.err.rfind("{\"error\"");
  if (pos == std::string::npos) return {};
  return nlohmann::json::parse(r.err.substr(pos));
}

TEST_F(CliTest, PatternMatchesGenerator) {
  const CliRun r = run("pattern chevreul " + path("c.png").string() + " --width 90 --height 30");
  ASSERT_EQ(r.code, 0) << r.err;
  const DecodedPng png = read_png(path("c.png").string());
  EXPECT_EQ(png.bit_depth, 16);
  EXPECT_EQ(png.image, pattern(PatternKind::Chevreul, 90, 30));
  EXPECT_NE(run("pattern kanizsa " + path("k.png").string()).code, 0);
}

TEST_F(CliTest, CompensatePatternIsDeterministicAndMatchesLibrary) {
  const std::string args = "compensate --pattern stripes --width 200 --height 120 --distance-in 30 --ppi 94 ";
  const CliRun a = run(args + path("a.png").string());
  const CliRun b = run(args + path("b.png").string());
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  const std::string bytes = slurp(path("a.png"));
  EXPECT_EQ(bytes, slurp(path("b.png")));
  const auto direct = encode_png(compensate_image(pattern(PatternKind::Stripes, 200, 120), {}).image, 16);
  EXPECT_EQ(std::vector<std::uint8_t>(bytes.begin(), bytes.end()), direct);

  EXPECT_NE(a.err.find("resolved-config: "), std::string::npos);
  const auto meta = nlohmann::json::parse(slurp(path("a.png.json")));
  EXPECT_EQ(meta["config"]["viewing"]["distance_in"].get<double>(), 30.0);
  EXPECT_EQ(meta["resolved"]["kernel_radius"], 61);
  EXPECT_EQ(meta["clip_fraction"].get<double>(), 0.0);
}

TEST_F(CliTest, ZeroAlphaRoundTripsInputFile) {
  ASSERT_EQ(run("pattern sim-contrast " + path("in.png").string() + " --width 64 --height 48").code, 0);
  const CliRun r = run("compensate --alpha 0 " + path("in.png").string() + " " + path("out.png").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const TriPlane in = read_png(path("in.png").string()).image;
  const TriPlane out = read_png(path("out.png").string()).image;
  for (int c = 0; c < 3; ++c) EXPECT_LE(max_abs_diff(in[c], out[c]), 1.0 / 65535.0);
}

TEST_F(CliTest, EightBitOutputAndNoMetadata) {
  const CliRun r = run("compensate --pattern step-edge --width 32 --height 16 --bits 8 --no-metadata " +
                    path("o.png").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_png(path("o.png").string()).bit_depth, 8);
  EXPECT_FALSE(fs::exists(path("o.png.json")));
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  std::ofstream(path("cfg.json")) << R"({"inhibition": {"alpha": 0.02}, "viewing": {"distance_in": 40}})";
  const CliRun r = run("kernel-info --config " + path("cfg.json").string() + " --alpha 0.03");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["config"]["inhibition"]["alpha"].get<double>(), 0.03);
  EXPECT_EQ(j["config"]["viewing"]["distance_in"].get<double>(), 40.0);
  EXPECT_NEAR(j["kernel"]["sigma_px"].get<double>(), 7.1e-3 * 94 * 40, 1e-9);
}

TEST_F(CliTest, KernelInfoDefaults) {
  const CliRun r = run("kernel-info");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["kernel"]["radius"], 61);
  EXPECT_EQ(j["kernel"]["alpha"].get<double>(), 0.037);
  EXPECT_NEAR(j["kernel"]["center_tap"].get<double>(), 0.0007940490307316795, 1e-15);
  EXPECT_EQ(j["kernel"]["taps"].size(), 62u);
}

TEST_F(CliTest, ScanlineCsv) {
  const CliRun r = run("scanline --pattern step-edge --width 120 --height 16 --row 8 --col0 50 --col1 69");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("col_index,perceived_input_total,perceived_compensated_total\n", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 21);
  EXPECT_EQ(r.out, format_scanline_csv(
                       Pipeline(CompensationConfig{}).scanline(pattern(PatternKind::StepEdge, 120, 16), 8, 50, 69)));

  const CliRun zero = run("scanline --alpha 0 --pattern mach-ramp --width 60 --height 16 --row 1 "
                       "--col0 0 --col1 59 -o " + path("s.csv").string());
  ASSERT_EQ(zero.code, 0) << zero.err;
  std::istringstream csv(slurp(path("s.csv")));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto a = line.find(','), b = line.rfind(',');
    EXPECT_EQ(line.substr(a + 1, b - a - 1), line.substr(b + 1)) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 60);
}

TEST_F(CliTest, PerceiveWritesImage) {
  const CliRun r = run("perceive --pattern mach-ramp --width 64 --height 16 " + path("p.png").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("solver: "), std::string::npos);
  const TriPlane p = read_png(path("p.png").string()).image;
  EXPECT_EQ(p.width(), 64u);
}

TEST_F(CliTest, ExitCodesCarryErrorCategory) {
  const CliRun io = run("compensate " + path("missing.png").string() + " " + path("o.png").string());
  EXPECT_EQ(io.code, 2);
  EXPECT_EQ(error_json(io)["error"], "IO");

  const CliRun cfg = run("compensate --alpha 0.9 --pattern stripes " + path("o.png").string());
  EXPECT_EQ(cfg.code, 3);
  EXPECT_EQ(error_json(cfg)["error"], "Config");
  EXPECT_NE(error_json(cfg)["message"].get<std::string>().find("alpha"), std::string::npos);

  const CliRun oob = run("scanline --pattern step-edge --width 32 --height 16 --row 99 --col0 0 --col1 3");
  EXPECT_EQ(oob.code, 3);
  EXPECT_EQ(error_json(oob)["error"], "OutOfRange");

  const CliRun nc = run("perceive --max-iter 2 --pattern step-edge --width 32 --height 16 " +
                     path("p.png").string());
  EXPECT_EQ(nc.code, 4);
  EXPECT_EQ(error_json(nc)["error"], "NoConvergence");

  PatternSpec bw;
  bw.kind = PatternKind::StepEdge;
  bw.width = 32;
  bw.height = 16;
  bw.low = 0.0;
  bw.high = 1.0;
  write_png(path("bw.png").string(), generate(bw), 8);
  const CliRun deg = run("compensate --model barlow-lange --alpha 0.5 --beta 0.9 --sigma 2 "
                      "--color-mode channel-independent " +
                      path("bw.png").string() + " " + path("o.png").string());
  EXPECT_EQ(deg.code, 5);
  EXPECT_EQ(error_json(deg)["error"], "Degenerate");

  EXPECT_NE(run("compensate").code, 0);
  EXPECT_NE(run("compensate --bits 12 --pattern stripes " + path("o.png").string()).code, 0);
  const CliRun both = run("compensate --pattern stripes " + path("a.png").string() + " " + path("b.png").string());
  EXPECT_EQ(both.code, 3);
}

}  // namespace
}  // namespace latcomp
