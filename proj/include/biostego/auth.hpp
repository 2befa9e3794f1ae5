#pragma once

// Fingerprint-gated workflow: template store, enroll/verify, the two stego
// channels behind the verification gate, and the analyze dump.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "biostego/config.hpp"
#include "biostego/error.hpp"
#include "biostego/image_io.hpp"
#include "biostego/listega.hpp"
#include "biostego/matching.hpp"
#include "biostego/pipeline.hpp"
#include "biostego/stego_lsb.hpp"
#include "biostego/template.hpp"

namespace biostego {

namespace fs = std::filesystem;

namespace detail {

/// Writes next to the target, then renames over it.
inline void write_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  write_file(tmp, bytes);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename onto " + path.string());
  }
}

inline void write_atomic(const fs::path& path, const std::string& text) {
  write_atomic(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline std::string read_text(const fs::path& path) {
  const auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace detail

inline bool valid_user_id(const std::string& id) {
  static const std::regex pattern("[A-Za-z0-9_-]{1,64}");
  return std::regex_match(id, pattern);
}

/// One `<user_id>.tpl` file per user under `root`.
class TemplateStore {
 public:
  explicit TemplateStore(fs::path root) : root_(std::move(root)) {}

  const fs::path& root() const noexcept { return root_; }

  fs::path path_for(const std::string& user_id) const {
    if (!valid_user_id(user_id)) throw Error(ErrorCode::InvalidUserId, "invalid user id '" + user_id + "'");
    return root_ / (user_id + ".tpl");
  }

  bool contains(const std::string& user_id) const { return fs::exists(path_for(user_id)); }

  MinutiaeTemplate load(const std::string& user_id) const {
    const fs::path p = path_for(user_id);
    if (!fs::exists(p)) throw Error(ErrorCode::UnknownUser, "no template for '" + user_id + "'");
    return parse_template(detail::read_text(p));
  }

  void save(const MinutiaeTemplate& t, bool overwrite) const {
    const fs::path p = path_for(t.user_id);
    if (!overwrite && fs::exists(p)) throw Error(ErrorCode::UserExists, "'" + t.user_id + "' is already enrolled");
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create store " + root_.string());
    detail::write_atomic(p, format_template(t));
  }

 private:
  fs::path root_;
};

struct EnrollSummary {
  std::size_t minutiae = 0;
  double D = 0.0;
  fs::path file;
};

inline EnrollSummary enroll(const TemplateStore& store, const std::string& user_id, const GrayImage& fingerprint,
                            const PipelineConfig& config, bool overwrite = false) {
  if (!overwrite && store.contains(user_id)) throw Error(ErrorCode::UserExists, "'" + user_id + "' is already enrolled");
  const MinutiaeTemplate t = extract_template(fingerprint, config, user_id);
  if (t.size() < static_cast<std::size_t>(config.min_minutiae)) {
    throw Error(ErrorCode::TooFewMinutiae, "found " + std::to_string(t.size()) + " minutiae, need " +
                                               std::to_string(config.min_minutiae));
  }
  store.save(t, overwrite);
  return {t.size(), t.D, store.path_for(user_id)};
}

inline EnrollSummary enroll(const TemplateStore& store, const std::string& user_id, const fs::path& fingerprint,
                            const PipelineConfig& config, bool overwrite = false) {
  store.path_for(user_id);
  return enroll(store, user_id, load_gray(fingerprint), config, overwrite);
}

inline MatchResult verify(const TemplateStore& store, const std::string& user_id, const GrayImage& probe,
                          const PipelineConfig& config) {
  const MinutiaeTemplate enrolled = store.load(user_id);
  return match_templates(enrolled, extract_template(probe, config, user_id), config.match_config());
}

inline MatchResult verify(const TemplateStore& store, const std::string& user_id, const fs::path& probe,
                          const PipelineConfig& config) {
  store.load(user_id);
  return verify(store, user_id, load_gray(probe), config);
}

/// Decides whether a (user, fingerprint) pair may use a channel.
using Verifier = std::function<MatchResult(const std::string& user_id, const fs::path& fingerprint)>;

inline Verifier store_verifier(TemplateStore store, PipelineConfig config) {
  return [store = std::move(store), config](const std::string& user, const fs::path& fp) {
    return verify(store, user, fp, config);
  };
}

enum class Channel { Lsb, List };

struct ChannelArgs {
  Channel channel = Channel::Lsb;
  fs::path input;   ///< send: payload file; receive: stego image or cover list
  fs::path cover;   ///< send lsb: cover image
  fs::path bank;    ///< send list: song bank
  std::uint64_t seed = 0;
  fs::path out;
};

namespace detail {

inline void require_gate(const Verifier& verifier, const std::string& user_id, const fs::path& fingerprint) {
  const MatchResult r = verifier(user_id, fingerprint);
  if (!r.accepted) {
    throw Error(ErrorCode::AuthenticationFailed, "verification rejected (score " + std::to_string(r.score) + ")");
  }
}

}  // namespace detail

/// Hides the payload file. Nothing is written unless verification accepts
/// and the channel encode succeeds.
inline void send(const Verifier& verifier, const std::string& user_id, const fs::path& fingerprint,
                 const ChannelArgs& args) {
  detail::require_gate(verifier, user_id, fingerprint);
  const auto payload = detail::read_file(args.input);
  if (args.channel == Channel::Lsb) {
    const GrayImage stego = embed_lsb(load_gray(args.cover), payload);
    detail::write_atomic(args.out, encode_gray(stego, format_for_path(args.out)));
  } else {
    const SongBank bank = load_bank(args.bank);
    detail::write_atomic(args.out, format_cover(generate_cover(payload, bank, args.seed)));
  }
}

inline void receive(const Verifier& verifier, const std::string& user_id, const fs::path& fingerprint,
                    const ChannelArgs& args) {
  detail::require_gate(verifier, user_id, fingerprint);
  const auto payload =
      args.channel == Channel::Lsb ? extract_lsb(load_gray(args.input)) : decode_cover(read_cover(args.input));
  detail::write_atomic(args.out, std::span<const std::uint8_t>(payload));
}

// ------------------------------------------------------------ analyze

inline constexpr std::uint8_t kOverlayRidge = 170;
inline constexpr std::uint8_t kOverlayMarker = 0;

/// Skeleton in light gray on white; hollow 7x7 squares on terminations,
/// 7x7 diagonal crosses on bifurcation arm records.
inline GrayImage minutiae_overlay(const Skeleton& skel, const std::vector<Minutia>& minutiae) {
  GrayImage out(skel.width(), skel.height(), 255);
  for (int y = 0; y < skel.height(); ++y) {
    for (int x = 0; x < skel.width(); ++x) {
      if (skel.at(x, y)) out(x, y) = kOverlayRidge;
    }
  }
  auto put = [&](int x, int y) {
    if (out.contains(x, y)) out(x, y) = kOverlayMarker;
  };
  for (const Minutia& m : minutiae) {
    for (int d = -3; d <= 3; ++d) {
      if (m.kind == MinutiaKind::Termination) {
        put(m.x + d, m.y - 3);
        put(m.x + d, m.y + 3);
        put(m.x - 3, m.y + d);
        put(m.x + 3, m.y + d);
      } else {
        put(m.x + d, m.y + d);
        put(m.x + d, m.y - d);
      }
    }
  }
  return out;
}

inline GrayImage render_binary(const BinaryImage& b) {
  GrayImage g(b.width(), b.height());
  for (std::size_t i = 0; i < b.size(); ++i) g.pixels()[i] = b.pixels()[i] ? 255 : 0;
  return g;
}

inline GrayImage render_mask(const RoiMask& m) {
  GrayImage g(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) g.pixels()[i] = m.pixels()[i] ? 255 : 0;
  return g;
}

struct AnalysisReport {
  std::vector<fs::path> images;
  fs::path report;
  std::size_t marked_terminations = 0;
  std::size_t marked_bifurcations = 0;
  std::size_t removed = 0;
  std::size_t template_terminations = 0;
  std::size_t template_bifurcations = 0;
  int ridges = 0;
  double D = 0.0;
};

inline std::string format_report(const AnalysisReport& r) {
  std::ostringstream s;
  s << "ridges " << r.ridges << "\n"
    << "D " << detail::fixed6(r.D) << "\n"
    << "marked_terminations " << r.marked_terminations << "\n"
    << "marked_bifurcations " << r.marked_bifurcations << "\n"
    << "removed " << r.removed << "\n"
    << "template_terminations " << r.template_terminations << "\n"
    << "template_bifurcations " << r.template_bifurcations << "\n"
    << "template_minutiae " << r.template_terminations + r.template_bifurcations << "\n";
  return s.str();
}

inline AnalysisReport analyze(const GrayImage& image, const fs::path& out_dir, const PipelineConfig& config) {
  const PipelineStages s = run_pipeline(image, config);
  AnalysisReport r;
  r.ridges = s.skeleton.ridge_count;
  r.D = s.D;
  for (const Minutia& m : s.marked) ++(m.kind == MinutiaKind::Termination ? r.marked_terminations : r.marked_bifurcations);
  r.removed = s.marked.size() - (s.D > 0.0 ? s.removal.kept.size() : s.marked.size());
  for (const Minutia& m : s.templ.minutiae) {
    ++(m.kind == MinutiaKind::Termination ? r.template_terminations : r.template_bifurcations);
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string());
  const std::vector<std::pair<std::string, GrayImage>> images{
      {"equalized.tif", s.equalized},
      {"enhanced.tif", s.enhanced},
      {"binarized.tif", render_binary(s.binary)},
      {"roi.tif", render_mask(s.roi)},
      {"thinned.tif", render_binary(to_binary(s.skeleton))},
      {"minutiae.tif", minutiae_overlay(s.skeleton, s.templ.minutiae)},
  };
  for (const auto& [name, img] : images) {
    r.images.push_back(out_dir / name);
    save_gray(img, r.images.back());
  }
  r.report = out_dir / "report.txt";
  detail::write_atomic(r.report, format_report(r));
  return r;
}

inline AnalysisReport analyze(const fs::path& fingerprint, const fs::path& out_dir, const PipelineConfig& config) {
  return analyze(load_gray(fingerprint), out_dir, config);
}

// ------------------------------------------------------------ exit codes

inline constexpr int kExitOk = 0;
inline constexpr int kExitRejected = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

inline int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::AuthenticationFailed:
      return kExitRejected;
    case ErrorCode::MissingFile:
    case ErrorCode::UserExists:
    case ErrorCode::UnknownUser:
    case ErrorCode::InvalidUserId:
    case ErrorCode::InvalidConfig:
      return kExitUsage;
    default:
      return kExitData;
  }
}

}  // namespace biostego
