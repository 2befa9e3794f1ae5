#pragma once

// Persisted per-user minutiae template.
//
//   BIOSTEGO-TPL v1 <user_id> <width> <height> <D>
//   <x> <y> <theta> <kind> <ridge_id> <n> <s1> ... <sn>
//   ...
//
// D, theta and samples are printed with six decimals; kind is
// `termination` or `bifurcation`.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "biostego/error.hpp"
#include "biostego/minutiae.hpp"

namespace biostego {

struct MinutiaeTemplate {
  std::string user_id;
  int image_width = 0;
  int image_height = 0;
  double D = 0.0;
  std::vector<Minutia> minutiae;
  /// Local-frame x coordinates of the sampled ridge, one list per minutia.
  std::vector<std::vector<double>> ridge_samples;

  std::size_t size() const noexcept { return minutiae.size(); }
};

inline constexpr std::string_view kTemplateMagic = "BIOSTEGO-TPL";
inline constexpr std::string_view kTemplateVersion = "v1";

namespace detail {

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace detail

inline std::string format_template(const MinutiaeTemplate& t) {
  std::string out;
  out += std::string(kTemplateMagic) + " " + std::string(kTemplateVersion) + " " + t.user_id + " " +
         std::to_string(t.image_width) + " " + std::to_string(t.image_height) + " " + detail::fixed6(t.D) + "\n";
  for (std::size_t i = 0; i < t.minutiae.size(); ++i) {
    const Minutia& m = t.minutiae[i];
    const auto& s = i < t.ridge_samples.size() ? t.ridge_samples[i] : std::vector<double>{};
    out += std::to_string(m.x) + " " + std::to_string(m.y) + " " + detail::fixed6(m.theta) + " " +
           std::string(to_string(m.kind)) + " " + std::to_string(m.ridge_id) + " " + std::to_string(s.size());
    for (double v : s) out += " " + detail::fixed6(v);
    out += "\n";
  }
  return out;
}

inline MinutiaeTemplate parse_template(const std::string& text) {
  auto fail = [](const std::string& why) { return Error(ErrorCode::CorruptTemplate, why); };
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw fail("empty template");
  MinutiaeTemplate t;
  {
    std::istringstream hs(line);
    std::string magic, version, extra;
    if (!(hs >> magic >> version)) throw fail("missing header");
    if (magic != kTemplateMagic) throw fail("bad magic '" + magic + "'");
    if (version != kTemplateVersion) throw fail("unsupported template version '" + version + "'");
    if (!(hs >> t.user_id >> t.image_width >> t.image_height >> t.D) || (hs >> extra)) {
      throw fail("malformed header");
    }
    if (t.image_width < 1 || t.image_height < 1 || !(t.D > 0.0)) throw fail("invalid header values");
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    Minutia m;
    std::string kind;
    std::size_t n = 0;
    if (!(ls >> m.x >> m.y >> m.theta >> kind >> m.ridge_id >> n)) {
      throw fail("malformed minutia on line " + std::to_string(lineno));
    }
    if (kind == "termination") {
      m.kind = MinutiaKind::Termination;
    } else if (kind == "bifurcation") {
      m.kind = MinutiaKind::Bifurcation;
    } else {
      throw fail("unknown minutia kind '" + kind + "' on line " + std::to_string(lineno));
    }
    if (n > kMaxRidgeSamples) throw fail("too many ridge samples on line " + std::to_string(lineno));
    std::vector<double> samples(n);
    for (double& v : samples) {
      if (!(ls >> v)) throw fail("missing ridge sample on line " + std::to_string(lineno));
    }
    std::string extra;
    if (ls >> extra) throw fail("trailing data on line " + std::to_string(lineno));
    t.minutiae.push_back(m);
    t.ridge_samples.push_back(std::move(samples));
  }
  return t;
}

}  // namespace biostego
