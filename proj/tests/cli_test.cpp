#include "scz/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace scz {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "scz");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("scz_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, CompressDecompressRoundTrip) {
  const auto t = gen_synthetic(SyntheticKind::kReluLaplace, {32, 14, 14}, 0.85, 6);
  write_rtf(path("in.rtf"), t);

  auto c = run({"compress", path("in.rtf"), "--q", "4", "-o", path("out.scz")});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_NE(c.out.find("payload_bytes="), std::string::npos);
  auto d = run({"decompress", path("out.scz"), "-o", path("back.rtf")});
  ASSERT_EQ(d.code, 0) << d.err;

  const auto back = read_rtf(path("back.rtf"));
  const auto container = deserialize(read_file(path("out.scz")));
  ASSERT_EQ(back.dims, t.dims);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.data[i] == 0.0f) {
      ASSERT_EQ(back.data[i], 0.0f);
    } else {
      ASSERT_LE(std::abs(static_cast<double>(back.data[i]) - t.data[i]), container.header.scale);
    }
  }
}

TEST_F(CliTest, CompressWithExplicitRows) {
  write_rtf(path("in.rtf"), gen_synthetic(SyntheticKind::kUniform, {4, 6}, 0.3, 1));
  auto ok = run({"compress", path("in.rtf"), "--q", "3", "--n", "8", "-o", path("a.scz")});
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("N=8 K=3"), std::string::npos);
  auto bad = run({"compress", path("in.rtf"), "--q", "3", "--n", "5", "-o", path("b.scz")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("NonDivisible"), std::string::npos);
}

TEST_F(CliTest, AnalyzeListsFeasibleCandidates) {
  write_rtf(path("t16.rtf"), gen_synthetic(SyntheticKind::kReluLaplace, {16}, 0.5, 3));
  auto r = run({"analyze", path("t16.rtf"), "--q", "4", "--csv", path("report.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);  // header
  std::vector<std::size_t> listed;
  while (std::getline(lines, line) && !line.starts_with("search:")) {
    listed.push_back(std::stoul(line));
  }
  EXPECT_EQ(listed, (std::vector<std::size_t>{16, 8}));
  std::ifstream csv(path("report.csv"));
  std::getline(csv, line);
  EXPECT_EQ(line, "N,K,nnz,entropy_bits_per_symbol,t_tot_bits,chosen");
}

TEST_F(CliTest, BenchWritesCsv) {
  auto r = run({"bench", "--kind", "relu-laplace", "--dims", "16,14,14", "--sparsity", "0.9",
                "--q-list", "2,4", "--reps", "2", "--csv", path("bench.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream csv(path("bench.csv"));
  std::string line;
  int count = 0;
  while (std::getline(csv, line)) ++count;
  EXPECT_EQ(count, 3);

  auto bad_kind = run({"bench", "--kind", "gauss", "--csv", path("x.csv")});
  EXPECT_EQ(bad_kind.code, 2);
}

TEST_F(CliTest, LatencyReportsRatesAndHonoursFlags) {
  write_rtf(path("in.rtf"), gen_synthetic(SyntheticKind::kReluLaplace, {8, 8, 8}, 0.5, 1));
  ASSERT_EQ(run({"compress", path("in.rtf"), "--q", "4", "-o", path("a.scz")}).code, 0);
  auto r = run({"latency", path("a.scz"), "--bw-hz", "1e6", "--snr-db", "10", "--eps", "0.001",
                "--sigma2", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("rate_bps=14362.43978"), std::string::npos) << r.out;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  auto unknown_flag = run({"decompress", "x.scz", "-o", "y.rtf", "--bogus"});
  EXPECT_EQ(unknown_flag.code, 1);
  EXPECT_NE(unknown_flag.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run({"compress", "in.rtf", "--q", "9", "-o", "x"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, DataErrors) {
  EXPECT_EQ(run({"decompress", path("missing.scz"), "-o", path("y.rtf")}).code, 2);
  std::ofstream(path("junk.scz")) << "not a container";
  EXPECT_EQ(run({"decompress", path("junk.scz"), "-o", path("y.rtf")}).code, 2);
}

TEST_F(CliTest, BinaryExitCodes) {
  const std::string cli = SCZ_CLI_PATH;
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " > /dev/null 2>&1").c_str())), 1);
  write_rtf(path("in.rtf"), gen_synthetic(SyntheticKind::kReluLaplace, {4, 4}, 0.5, 1));
  const auto cmd = cli + " compress " + path("in.rtf") + " --q 4 -o " + path("o.scz") + " > /dev/null";
  EXPECT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
  EXPECT_TRUE(fs::exists(path("o.scz")));
}

}  // namespace
}  // namespace scz
