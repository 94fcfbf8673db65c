#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <sys/wait.h>
#include <unistd.h>

#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(WWL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("wwl_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string mutag() const { return wwl::testing::data_dir() + "/MUTAG"; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GramThenCheck) {
  const auto out = dir_ / "g";
  ASSERT_EQ(run("gram --data " + mutag() + " --allow-missing-class-labels -H 2 --lambda 0.1 --lambda 1 --out " +
                out.string()),
            0);
  EXPECT_TRUE(fs::exists(out / "distance.txt.meta.json"));
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_EQ(run("check --matrix " + (out / "kernel_lambda_1.txt").string()), 0);
  EXPECT_EQ(run("check --matrix " + (out / "kernel_lambda_0.1.txt").string() + " --mode psd"), 0);
  EXPECT_EQ(run("check --matrix " + (out / "distance.txt").string()), 0);
  EXPECT_EQ(run("check --matrix " + (out / "distance.txt").string() + " --mode psd"), 2);

  const auto meta = nlohmann::json::parse(slurp(out / "kernel_lambda_1.txt.meta.json"));
  EXPECT_EQ(meta["kind"], "kernel");
  EXPECT_EQ(meta["h"], 2);
  EXPECT_EQ(meta["lambda"], 1.0);
  EXPECT_EQ(meta["ground_distance"], "hamming");
  EXPECT_EQ(meta["solver"], "exact");
}

TEST_F(Cli, Reproducible) {
  const std::string common = "gram --data " + mutag() + " --allow-missing-class-labels -H 1 --threads 2 --out ";
  ASSERT_EQ(run(common + (dir_ / "a").string()), 0);
  ASSERT_EQ(run(common + (dir_ / "b").string()), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "distance.txt"), slurp(dir_ / "b" / "distance.txt"));
  EXPECT_EQ(slurp(dir_ / "a" / "kernel_lambda_1.txt"), slurp(dir_ / "b" / "kernel_lambda_1.txt"));
}

TEST_F(Cli, CorruptedKernelFails) {
  std::ofstream(dir_ / "k.txt") << "1 2\n2 1\n";
  std::ofstream(dir_ / "k.txt.meta.json") << R"({"kind": "kernel"})";
  EXPECT_EQ(run("check --matrix " + (dir_ / "k.txt").string()), 1);
  EXPECT_EQ(run("check --matrix " + (dir_ / "k.txt").string() + " --report-only"), 0);
  std::ofstream(dir_ / "a.txt") << "1 2\n3 1\n";
  std::ofstream(dir_ / "a.txt.meta.json") << R"({"kind": "kernel"})";
  EXPECT_EQ(run("check --matrix " + (dir_ / "a.txt").string()), 2);
}

TEST_F(Cli, UsageAndDataErrors) {
  EXPECT_EQ(run("gram --data " + mutag() + " --out " + (dir_ / "x").string()), 2);
  EXPECT_EQ(run("gram --data " + (dir_ / "nothing").string() + " --out " + (dir_ / "x").string()), 2);
  EXPECT_EQ(run("gram --data " + mutag() + " --allow-missing-class-labels --scheme continuous --out " +
                (dir_ / "x").string()),
            2);
  EXPECT_EQ(run("gram --bogus"), 2);
  EXPECT_EQ(run("check"), 2);
  EXPECT_EQ(run("--version"), 0);
}

TEST_F(Cli, ExperimentsWriteTables) {
  const auto table = dir_ / "rob.tsv";
  ASSERT_EQ(run("robustness --trials 3 --noise 0,0.5 --out " + table.string()), 0);
  EXPECT_TRUE(fs::exists(table.string() + ".manifest.json"));
  const std::string rows = slurp(table);
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 3);

  const auto bench = dir_ / "bench.tsv";
  ASSERT_EQ(run("bench --graphs 3 --avg-nodes 6,12 --out " + bench.string()), 0);
  const std::string text = slurp(bench);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}
