#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

namespace {

struct Result {
  int code;
  std::string out;
};

Result run_cli(const std::string& args) {
  const std::string cmd = std::string(ASCLAB_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 512> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST(Cli, ExperimentWritesFilesAndEchoesPaths) {
  const auto dir = std::filesystem::temp_directory_path() / "asclab_cli_test";
  std::filesystem::remove_all(dir);
  const auto r = run_cli("experiment source_growth --out-dir " + dir.string() + " --seed 42 --n 500");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(std::filesystem::exists(dir / "source_growth.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
  EXPECT_NE(r.out.find("summary.json"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Cli, SolvePrintsNorms) {
  const auto r = run_cli("solve --problem deriv2 --n 64 --delta 0.005 --alpha 1e-4");
  EXPECT_EQ(r.code, 0) << r.out;
  for (const char* k : {"residual_norm=", "error_norm=", "xi_norm="})
    EXPECT_NE(r.out.find(k), std::string::npos) << k;
}

TEST(Cli, DiscrepancyWithoutNoiseIsConfigError) {
  const auto r = run_cli("choose --rule discrepancy --tau 1.5 --delta 0");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("noise-free"), std::string::npos) << r.out;
}

TEST(Cli, ChooseAndAsc) {
  auto r = run_cli("choose --rule discrepancy --problem diagonal --n 500 --delta 0.01");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("alpha="), std::string::npos);
  r = run_cli("asc --n 200 --r-count 5");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.rfind("R,d,lambda,regime_flag", 0), 0u) << r.out;
}

TEST(Cli, ErrorExitCodes) {
  EXPECT_EQ(run_cli("experiment source_growth --bogus 1 --out-dir /tmp/x").code, 2);
  EXPECT_EQ(run_cli("experiment nothing").code, 2);
  EXPECT_EQ(run_cli("solve --alpha -1").code, 2);
  EXPECT_EQ(run_cli("frobnicate").code, 2);
  // A tiny noise level below what the search interval can reach.
  EXPECT_EQ(run_cli("choose --rule discrepancy --problem diagonal --n 50 --delta 1e-300").code, 3);
}
