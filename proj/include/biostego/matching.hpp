#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "biostego/image.hpp"
#include "biostego/minutiae.hpp"
#include "biostego/template.hpp"

namespace biostego {

struct MatchConfig {
  double r0 = 10.0;                         ///< elastic position tolerance, pixels
  double theta0 = std::numbers::pi / 6.0;   ///< elastic direction tolerance, radians
  double similarity_threshold = 0.8;        ///< ridge correlation gate for reference pairs
  int decision_threshold = 25;              ///< accept iff score >= this
};

/// A minutia as the matcher sees it: pose plus its sampled ridge.
struct MatchPoint {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  std::vector<double> samples;
};

/// Pose relative to a reference minutia; the reference itself maps to (0, 0, 0).
struct AlignedMinutia {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

struct MatchResult {
  int score = 0;
  std::size_t matched_pairs = 0;
  std::size_t template_count = 0;
  bool accepted = false;
  /// (template index, input index) of the winning reference pair.
  std::optional<std::pair<std::size_t, std::size_t>> best_reference;
};

/// Normalized correlation over the first min(|a|, |b|) entries:
/// S = sum a_i b_i / sqrt(sum a_i^2 * sum b_i^2), 0 when undefined.
inline double ridge_similarity(std::span<const double> a, std::span<const double> b) {
  const std::size_t m = std::min(a.size(), b.size());
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (m == 0 || aa == 0.0 || bb == 0.0) return 0.0;
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

/// Moves the reference to the origin and turns its direction onto the +x
/// axis: (x, y) -> R(-theta_ref) (x - x_ref, y - y_ref), theta -> theta - theta_ref.
template <typename Pose>
std::vector<AlignedMinutia> align_set(std::span<const Pose> set, const Pose& ref) {
  const double c = std::cos(ref.theta), s = std::sin(ref.theta);
  std::vector<AlignedMinutia> out;
  out.reserve(set.size());
  for (const Pose& p : set) {
    const double dx = static_cast<double>(p.x) - static_cast<double>(ref.x);
    const double dy = static_cast<double>(p.y) - static_cast<double>(ref.y);
    out.push_back({c * dx + s * dy, -s * dx + c * dy, wrap_angle(p.theta - ref.theta)});
  }
  return out;
}

template <typename Pose>
std::vector<AlignedMinutia> align_set(const std::vector<Pose>& set, const Pose& ref) {
  return align_set(std::span<const Pose>(set), ref);
}

/// Greedy one-to-one pairing by increasing distance (ties by template index,
/// then input index). A pair qualifies when distance <= r0 and the wrapped
/// direction difference <= theta0.
inline std::size_t elastic_match(std::span<const AlignedMinutia> templ, std::span<const AlignedMinutia> input,
                                 double r0, double theta0) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  const double r0sq = r0 * r0;
  for (std::size_t i = 0; i < templ.size(); ++i) {
    for (std::size_t j = 0; j < input.size(); ++j) {
      const double dx = templ[i].x - input[j].x;
      const double dy = templ[i].y - input[j].y;
      const double d2 = dx * dx + dy * dy;
      if (d2 > r0sq) continue;
      if (std::abs(wrap_angle(templ[i].theta - input[j].theta)) > theta0) continue;
      pairs.emplace_back(std::sqrt(d2), i, j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> used_t(templ.size(), false), used_i(input.size(), false);
  std::size_t matched = 0;
  for (const auto& [d, i, j] : pairs) {
    if (used_t[i] || used_i[j]) continue;
    used_t[i] = used_i[j] = true;
    ++matched;
  }
  return matched;
}

inline int match_score(std::size_t matched, std::size_t template_count) {
  if (template_count == 0) return 0;
  return static_cast<int>(round_half_up(100.0 * static_cast<double>(matched) / static_cast<double>(template_count)));
}

/// Tries every cross-set reference pair whose ridge similarity exceeds the
/// gate, aligns both sets on it and keeps the largest elastic match count.
/// Ties on count keep the smallest (template, input) index pair.
inline MatchResult match_sets(std::span<const MatchPoint> templ, std::span<const MatchPoint> input,
                              const MatchConfig& config = {}) {
  MatchResult result;
  result.template_count = templ.size();
  for (std::size_t i = 0; i < templ.size(); ++i) {
    std::vector<AlignedMinutia> aligned_t;
    for (std::size_t j = 0; j < input.size(); ++j) {
      if (ridge_similarity(templ[i].samples, input[j].samples) <= config.similarity_threshold) continue;
      if (aligned_t.empty()) aligned_t = align_set(templ, templ[i]);
      const auto aligned_i = align_set(input, input[j]);
      const std::size_t count = elastic_match(aligned_t, aligned_i, config.r0, config.theta0);
      if (!result.best_reference || count > result.matched_pairs) {
        result.matched_pairs = count;
        result.best_reference = std::make_pair(i, j);
      }
    }
  }
  result.score = match_score(result.matched_pairs, result.template_count);
  result.accepted = result.best_reference.has_value() && result.score >= config.decision_threshold;
  return result;
}

inline std::vector<MatchPoint> to_match_points(const MinutiaeTemplate& t) {
  std::vector<MatchPoint> out;
  out.reserve(t.minutiae.size());
  for (std::size_t i = 0; i < t.minutiae.size(); ++i) {
    const Minutia& m = t.minutiae[i];
    out.push_back({static_cast<double>(m.x), static_cast<double>(m.y), m.theta,
                   i < t.ridge_samples.size() ? t.ridge_samples[i] : std::vector<double>{}});
  }
  return out;
}

inline MatchResult match_templates(const MinutiaeTemplate& templ, const MinutiaeTemplate& input,
                                   const MatchConfig& config = {}) {
  const auto a = to_match_points(templ);
  const auto b = to_match_points(input);
  return match_sets(a, b, config);
}

}  // namespace biostego
