#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "biostego/biostego.hpp"
#include "support/fingerprint.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("biostego_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    biostego::save_gray(fixture::ridges(fixture::enrollment_print()), dir_ / "finger.tif");
    biostego::save_gray(fixture::ridges(fixture::impostor_print()), dir_ / "impostor.tif");
    biostego::save_gray(fixture::random_texture(96, 96, 5), dir_ / "cover.pgm");
    std::ofstream(dir_ / "secret.txt") << "the eagle lands at dawn\n";
  }
  void TearDown() override { fs::remove_all(dir_); }

  /// Runs the tool with `--store <dir>/store` and returns its exit status;
  /// stdout lands in out_.
  int run(const std::string& args) {
    const fs::path log = dir_ / "stdout.txt";
    const std::string cmd = "cd '" + dir_.string() + "' && '" + std::string(BIOSTEGO_CLI) + "' --store store " + args +
                            " > '" + log.string() + "' 2> '" + (dir_ / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    out_.assign(std::istreambuf_iterator<char>(in), {});
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
  std::string out_;
};

}  // namespace

TEST_F(Cli, EnrollVerify) {
  ASSERT_EQ(run("enroll --user ann --fingerprint finger.tif"), 0);
  EXPECT_EQ(out_.rfind("enrolled ann minutiae=", 0), 0u);
  EXPECT_EQ(run("enroll --user ann --fingerprint finger.tif"), 2);
  EXPECT_EQ(run("enroll --user ann --fingerprint finger.tif --overwrite"), 0);
  EXPECT_EQ(run("verify --user ann --fingerprint finger.tif"), 0);
  EXPECT_EQ(out_, "score=100 accepted=true\n");
  EXPECT_EQ(run("verify --user ann --fingerprint impostor.tif"), 1);
  EXPECT_NE(out_.find("accepted=false"), std::string::npos);
  EXPECT_EQ(run("verify --user nobody --fingerprint finger.tif"), 2);
}

TEST_F(Cli, SendReceiveBothChannels) {
  ASSERT_EQ(run("enroll --user ann --fingerprint finger.tif"), 0);
  ASSERT_EQ(run("send --user ann --fingerprint finger.tif --channel lsb --payload secret.txt --cover cover.pgm "
                "--out stego.pgm"),
            0);
  ASSERT_EQ(run("receive --user ann --fingerprint finger.tif --channel lsb --in stego.pgm --out got.txt"), 0);
  EXPECT_EQ(slurp(dir_ / "got.txt"), slurp(dir_ / "secret.txt"));

  ASSERT_EQ(run("send --user ann --fingerprint finger.tif --channel list --payload secret.txt --bank '" +
                std::string(BIOSTEGO_SONGBANK) + "' --seed 9 --out playlist.txt"),
            0);
  ASSERT_EQ(run("receive --user ann --fingerprint finger.tif --channel list --in playlist.txt --out got2.txt"), 0);
  EXPECT_EQ(slurp(dir_ / "got2.txt"), slurp(dir_ / "secret.txt"));
}

TEST_F(Cli, RejectedSendWritesNothing) {
  ASSERT_EQ(run("enroll --user ann --fingerprint finger.tif"), 0);
  EXPECT_EQ(run("send --user ann --fingerprint impostor.tif --channel lsb --payload secret.txt --cover cover.pgm "
                "--out stego.pgm"),
            1);
  EXPECT_FALSE(fs::exists(dir_ / "stego.pgm"));
}

TEST_F(Cli, DataAndUsageErrors) {
  ASSERT_EQ(run("enroll --user ann --fingerprint finger.tif"), 0);
  EXPECT_EQ(run("receive --user ann --fingerprint finger.tif --channel lsb --in cover.pgm --out x.bin"), 3);
  EXPECT_FALSE(fs::exists(dir_ / "x.bin"));
  EXPECT_EQ(run("send --user ann --fingerprint finger.tif --channel lsb --payload secret.txt --out y.pgm"), 2);
  EXPECT_EQ(run("bogus"), 2);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("--set k=oops verify --user ann --fingerprint finger.tif"), 2);
  EXPECT_EQ(run("verify --user 'a/b' --fingerprint finger.tif"), 2);
  EXPECT_EQ(run("enroll --user zed --fingerprint missing.tif"), 2);
}

TEST_F(Cli, ConfigOverridesApply) {
  // A threshold of 100 still accepts the self-match.
  ASSERT_EQ(run("enroll --user ann --fingerprint finger.tif"), 0);
  EXPECT_EQ(run("--set decision_threshold=100 verify --user ann --fingerprint finger.tif"), 0);
  std::ofstream(dir_ / "cfg.json") << R"({"min_minutiae": 1000})";
  EXPECT_EQ(run("--config cfg.json enroll --user bea --fingerprint finger.tif"), 3);
}

TEST_F(Cli, Analyze) {
  ASSERT_EQ(run("analyze --fingerprint finger.tif --out-dir stages"), 0);
  EXPECT_NE(out_.find("template_minutiae "), std::string::npos);
  for (const char* f : {"equalized.tif", "enhanced.tif", "binarized.tif", "roi.tif", "thinned.tif", "minutiae.tif",
                        "report.txt"})
    EXPECT_TRUE(fs::exists(dir_ / "stages" / f)) << f;
}
