#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "biostego/biostego.hpp"
#include "support/fingerprint.hpp"

namespace fs = std::filesystem;
using namespace biostego;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidImage;
}

class AuthTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("biostego_auth_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path put_image(const std::string& name, const GrayImage& img) {
    save_gray(img, dir_ / name);
    return dir_ / name;
  }
  fs::path put_text(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name, std::ios::binary) << text;
    return dir_ / name;
  }
  std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  TemplateStore store() const { return TemplateStore(dir_ / "store"); }

  fs::path dir_;
  PipelineConfig cfg_;
};

Verifier fixed_verdict(bool accept, int* calls = nullptr) {
  return [=](const std::string&, const fs::path&) {
    if (calls) ++*calls;
    MatchResult r;
    r.accepted = accept;
    r.score = accept ? 100 : 0;
    return r;
  };
}

}  // namespace

TEST(UserId, Pattern) {
  EXPECT_TRUE(valid_user_id("alice"));
  EXPECT_TRUE(valid_user_id("A_b-9"));
  EXPECT_TRUE(valid_user_id(std::string(64, 'x')));
  EXPECT_FALSE(valid_user_id(std::string(65, 'x')));
  EXPECT_FALSE(valid_user_id(""));
  EXPECT_FALSE(valid_user_id("../etc"));
  EXPECT_FALSE(valid_user_id("a b"));
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code(ErrorCode::AuthenticationFailed), 1);
  EXPECT_EQ(exit_code(ErrorCode::UnknownUser), 2);
  EXPECT_EQ(exit_code(ErrorCode::UserExists), 2);
  EXPECT_EQ(exit_code(ErrorCode::MissingFile), 2);
  EXPECT_EQ(exit_code(ErrorCode::NoMagic), 3);
  EXPECT_EQ(exit_code(ErrorCode::TooFewMinutiae), 3);
}

TEST_F(AuthTest, EnrollSixEndings) {
  const fs::path fp = put_image("six.tif", fixture::ridges(fixture::six_endings()));
  const EnrollSummary s = enroll(store(), "alice", fp, cfg_);
  EXPECT_EQ(s.minutiae, 6u);
  const MinutiaeTemplate t = store().load("alice");
  ASSERT_EQ(t.minutiae.size(), 6u);
  for (const Minutia& m : t.minutiae) EXPECT_EQ(m.kind, MinutiaKind::Termination);
  // Header plus one line per record.
  const std::string text = slurp(s.file);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
  EXPECT_EQ(text.rfind("BIOSTEGO-TPL v1 alice 256 256 ", 0), 0u);
}

TEST_F(AuthTest, EnrollTwiceNeedsOverwrite) {
  const fs::path fp = put_image("six.tif", fixture::ridges(fixture::six_endings()));
  enroll(store(), "bob", fp, cfg_);
  EXPECT_EQ(code_of([&] { enroll(store(), "bob", fp, cfg_); }), ErrorCode::UserExists);
  EXPECT_NO_THROW(enroll(store(), "bob", fp, cfg_, true));
}

TEST_F(AuthTest, BlankImageHasTooFewMinutiae) {
  const fs::path fp = put_image("blank.tif", GrayImage(256, 256, 200));
  EXPECT_EQ(code_of([&] { enroll(store(), "carol", fp, cfg_); }), ErrorCode::TooFewMinutiae);
  EXPECT_FALSE(store().contains("carol"));
}

TEST_F(AuthTest, BadIdsAndMissingInputs) {
  const fs::path fp = put_image("six.tif", fixture::ridges(fixture::six_endings()));
  EXPECT_EQ(code_of([&] { enroll(store(), "no/slash", fp, cfg_); }), ErrorCode::InvalidUserId);
  EXPECT_EQ(code_of([&] { enroll(store(), "dave", dir_ / "missing.tif", cfg_); }), ErrorCode::MissingFile);
  EXPECT_EQ(code_of([&] { verify(store(), "nobody", fp, cfg_); }), ErrorCode::UnknownUser);
  // Unknown user wins over a missing probe.
  EXPECT_EQ(code_of([&] { verify(store(), "nobody", dir_ / "missing.tif", cfg_); }), ErrorCode::UnknownUser);
}

TEST_F(AuthTest, CorruptStoredTemplate) {
  fs::create_directories(dir_ / "store");
  put_text("store/eve.tpl", "garbage\n");
  const fs::path fp = put_image("six.tif", fixture::ridges(fixture::six_endings()));
  EXPECT_EQ(code_of([&] { verify(store(), "eve", fp, cfg_); }), ErrorCode::CorruptTemplate);
}

TEST_F(AuthTest, VerifySameImageAndRejectTexture) {
  const GrayImage print = fixture::ridges(fixture::enrollment_print());
  enroll(store(), "frank", print, cfg_);
  const MatchResult same = verify(store(), "frank", print, cfg_);
  EXPECT_EQ(same.score, 100);
  EXPECT_TRUE(same.accepted);
  const MatchResult noise = verify(store(), "frank", fixture::random_texture(256, 256, 77), cfg_);
  EXPECT_FALSE(noise.accepted);
  const MatchResult other = verify(store(), "frank", fixture::ridges(fixture::impostor_print()), cfg_);
  EXPECT_FALSE(other.accepted);
  EXPECT_LT(other.score, cfg_.decision_threshold);
}

TEST_F(AuthTest, GateBlocksEveryOutput) {
  const fs::path payload = put_text("secret.txt", "top secret");
  const fs::path cover = put_image("cover.tif", GrayImage(64, 64, 90));
  int calls = 0;
  for (Channel ch : {Channel::Lsb, Channel::List}) {
    ChannelArgs a{ch, payload, cover, BIOSTEGO_SONGBANK, 1, dir_ / "out.bin"};
    EXPECT_EQ(code_of([&] { send(fixed_verdict(false, &calls), "u", "fp.tif", a); }), ErrorCode::AuthenticationFailed);
    EXPECT_FALSE(fs::exists(a.out));
    a.input = cover;
    EXPECT_EQ(code_of([&] { receive(fixed_verdict(false, &calls), "u", "fp.tif", a); }),
              ErrorCode::AuthenticationFailed);
    EXPECT_FALSE(fs::exists(a.out));
  }
  EXPECT_EQ(calls, 4);
  // Nothing else appeared in the working directory either.
  std::size_t files = 0;
  for (auto it = fs::directory_iterator(dir_); it != fs::directory_iterator(); ++it) ++files;
  EXPECT_EQ(files, 2u);
}

TEST_F(AuthTest, ChannelsRoundTripWhenAccepted) {
  std::string secret(300, '\0');
  std::mt19937_64 rng(3);
  for (char& c : secret) c = static_cast<char>(rng());
  const fs::path payload = put_text("secret.bin", secret);
  GrayImage cover_img(80, 80);
  for (auto& p : cover_img.pixels()) p = static_cast<std::uint8_t>(rng());
  const fs::path cover = put_image("cover.tif", cover_img);

  ChannelArgs lsb{Channel::Lsb, payload, cover, {}, 0, dir_ / "stego.tif"};
  send(fixed_verdict(true), "u", "fp", lsb);
  const GrayImage stego = load_gray(lsb.out);
  for (std::size_t i = 0; i < stego.size(); ++i) ASSERT_LE(std::abs(stego.pixels()[i] - cover_img.pixels()[i]), 1);
  ChannelArgs back{Channel::Lsb, lsb.out, {}, {}, 0, dir_ / "back.bin"};
  receive(fixed_verdict(true), "u", "fp", back);
  EXPECT_EQ(slurp(back.out), secret);

  ChannelArgs list{Channel::List, payload, {}, BIOSTEGO_SONGBANK, 42, dir_ / "playlist.txt"};
  send(fixed_verdict(true), "u", "fp", list);
  ChannelArgs list_back{Channel::List, list.out, {}, {}, 0, dir_ / "back2.bin"};
  receive(fixed_verdict(true), "u", "fp", list_back);
  EXPECT_EQ(slurp(list_back.out), secret);
}

TEST_F(AuthTest, ChannelErrorsWriteNothing) {
  const fs::path payload = put_text("secret.txt", "hello");
  const fs::path thin_bank = put_text("bank.txt", "Abba\nBlondie\n");
  ChannelArgs list{Channel::List, payload, {}, thin_bank, 1, dir_ / "cover.txt"};
  EXPECT_EQ(code_of([&] { send(fixed_verdict(true), "u", "fp", list); }), ErrorCode::InadequateBank);
  EXPECT_FALSE(fs::exists(list.out));

  const fs::path tiny = put_image("tiny.tif", GrayImage(8, 8, 0));
  ChannelArgs big{Channel::Lsb, payload, tiny, {}, 0, dir_ / "stego.tif"};
  EXPECT_EQ(code_of([&] { send(fixed_verdict(true), "u", "fp", big); }), ErrorCode::PayloadTooLarge);
  EXPECT_FALSE(fs::exists(big.out));

  const fs::path plain = put_image("plain.tif", GrayImage(32, 32, 0));
  ChannelArgs rx{Channel::Lsb, plain, {}, {}, 0, dir_ / "out.bin"};
  EXPECT_EQ(code_of([&] { receive(fixed_verdict(true), "u", "fp", rx); }), ErrorCode::NoMagic);
  EXPECT_EQ(exit_code(ErrorCode::NoMagic), kExitData);
  EXPECT_FALSE(fs::exists(rx.out));
}

TEST_F(AuthTest, RealGateEndToEnd) {
  const fs::path fp = put_image("finger.tif", fixture::ridges(fixture::enrollment_print()));
  const fs::path impostor = put_image("impostor.tif", fixture::ridges(fixture::impostor_print()));
  enroll(store(), "gina", fp, cfg_);
  const Verifier v = store_verifier(store(), cfg_);
  const fs::path payload = put_text("note.txt", "meet at noon");
  ChannelArgs list{Channel::List, payload, {}, BIOSTEGO_SONGBANK, 5, dir_ / "list.txt"};
  send(v, "gina", fp, list);
  EXPECT_TRUE(fs::exists(list.out));
  list.out = dir_ / "list2.txt";
  EXPECT_EQ(code_of([&] { send(v, "gina", impostor, list); }), ErrorCode::AuthenticationFailed);
  EXPECT_FALSE(fs::exists(list.out));
}

TEST_F(AuthTest, AnalyzeWritesStagesAndMatchesEnroll) {
  const GrayImage img = fixture::ridges(fixture::enrollment_print());
  const AnalysisReport r = analyze(img, dir_ / "stages", cfg_);
  ASSERT_EQ(r.images.size(), 6u);
  for (const auto& p : r.images) EXPECT_TRUE(fs::exists(p)) << p;
  EXPECT_TRUE(fs::exists(r.report));
  std::size_t files = 0;
  for (auto it = fs::directory_iterator(dir_ / "stages"); it != fs::directory_iterator(); ++it) ++files;
  EXPECT_EQ(files, 7u);

  const EnrollSummary s = enroll(store(), "hank", img, cfg_);
  EXPECT_EQ(r.template_terminations + r.template_bifurcations, s.minutiae);
  const std::string report = slurp(r.report);
  EXPECT_NE(report.find("template_minutiae " + std::to_string(s.minutiae) + "\n"), std::string::npos);

  // Every template record has its marker in the overlay.
  const GrayImage overlay = load_gray(dir_ / "stages" / "minutiae.tif");
  for (const Minutia& m : store().load("hank").minutiae) {
    if (m.kind == MinutiaKind::Termination) {
      EXPECT_EQ(overlay.get_or(m.x - 3, m.y - 3, 0), kOverlayMarker);
      EXPECT_EQ(overlay.get_or(m.x + 3, m.y + 3, 0), kOverlayMarker);
    } else {
      EXPECT_EQ(overlay.get_or(m.x, m.y, 0), kOverlayMarker);
      EXPECT_EQ(overlay.get_or(m.x + 2, m.y - 2, 0), kOverlayMarker);
    }
  }
}

TEST_F(AuthTest, AnalyzeOnBlankStillWritesEverything) {
  const AnalysisReport r = analyze(GrayImage(64, 64, 10), dir_ / "blank", cfg_);
  EXPECT_EQ(r.images.size(), 6u);
  EXPECT_EQ(r.template_terminations + r.template_bifurcations, 0u);
}

TEST(Overlay, MarkerShapes) {
  RoiMask bits(20, 20);
  for (int x = 2; x < 18; ++x) bits(x, 10) = 1;
  const Skeleton s(bits);
  const GrayImage o = minutiae_overlay(s, {{5, 5, 0.0, MinutiaKind::Termination, 1, std::nullopt},
                                            {14, 14, 0.0, MinutiaKind::Bifurcation, 1, Pixel{13, 13}}});
  EXPECT_EQ(o(2, 5), kOverlayMarker);  // left edge of the square
  EXPECT_EQ(o(5, 5), 255);             // hollow centre
  EXPECT_EQ(o(14, 14), kOverlayMarker);
  EXPECT_EQ(o(11, 17), kOverlayMarker);
  EXPECT_EQ(o(10, 10), kOverlayRidge);
  EXPECT_EQ(o(0, 0), 255);
}
