#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "biostego/error.hpp"
#include "biostego/skeleton.hpp"

namespace biostego {

inline constexpr int kDefaultBorderMargin = 10;
inline constexpr int kDefaultSpurIterations = 5;
inline constexpr std::size_t kMaxRidgeSamples = 10;
inline constexpr double kDefaultBrokenRidgeAngle = std::numbers::pi / 6.0;

enum class MinutiaKind { Termination, Bifurcation };

constexpr std::string_view to_string(MinutiaKind k) {
  return k == MinutiaKind::Termination ? "termination" : "bifurcation";
}

struct Minutia {
  int x = 0;
  int y = 0;
  double theta = 0.0;  ///< radians in (-pi, pi], y-down image frame
  MinutiaKind kind = MinutiaKind::Termination;
  int ridge_id = 0;
  /// Set on the per-arm records a bifurcation decomposes into: the branch
  /// pixel the arm leaves from.
  std::optional<Pixel> junction;

  friend bool operator==(const Minutia&, const Minutia&) = default;
};

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

// ------------------------------------------------------------ marking

/// Neighbour-count marking: one set neighbour is a termination, three is a
/// bifurcation candidate. Candidates touching each other (Chebyshev
/// distance 1) collapse to one: the first, in raster order, whose crossing
/// number is >= 3, else the first. Pixels closer than `border_margin` to the
/// image edge are skipped. Theta is left at 0.
inline std::vector<Minutia> mark_minutiae(const Skeleton& input, int border_margin = kDefaultBorderMargin) {
  if (has_full_2x2(input.bits)) throw Error(ErrorCode::NotThinned, "skeleton has a 2x2 block of ridge pixels");
  const Skeleton skel = input.labeled() ? input : label_ridges(input);
  const int w = skel.width();
  const int h = skel.height();
  auto inside = [&](int x, int y) {
    return x >= border_margin && y >= border_margin && x < w - border_margin && y < h - border_margin;
  };

  std::vector<Minutia> out;
  std::vector<Pixel> forks;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!skel.bits(x, y) || !inside(x, y)) continue;
      const int n = neighbor_count(skel, x, y);
      if (n == 1) out.push_back({x, y, 0.0, MinutiaKind::Termination, skel.label(x, y), std::nullopt});
      if (n == 3) forks.push_back({x, y});
    }
  }

  // Union-find over touching fork candidates; forks is in raster order.
  std::vector<std::size_t> parent(forks.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < forks.size(); ++i) {
    for (std::size_t j = i + 1; j < forks.size() && forks[j].y <= forks[i].y + 1; ++j) {
      if (std::abs(forks[j].x - forks[i].x) <= 1) parent[find(j)] = find(i);
    }
  }
  std::vector<std::optional<std::size_t>> chosen(forks.size());
  for (std::size_t i = 0; i < forks.size(); ++i) {
    const std::size_t root = find(i);
    const bool junction = crossing_number(skel, forks[i].x, forks[i].y) >= 3;
    if (!chosen[root]) {
      chosen[root] = i;
    } else if (junction && crossing_number(skel, forks[*chosen[root]].x, forks[*chosen[root]].y) < 3) {
      chosen[root] = i;
    }
  }
  for (std::size_t i = 0; i < forks.size(); ++i) {
    if (chosen[i] && find(i) == i) {
      const Pixel p = forks[*chosen[i]];
      out.push_back({p.x, p.y, 0.0, MinutiaKind::Bifurcation, skel.label(p.x, p.y), std::nullopt});
    }
  }
  std::sort(out.begin(), out.end(), [](const Minutia& a, const Minutia& b) {
    return Pixel{a.x, a.y} < Pixel{b.x, b.y};
  });
  return out;
}

// ------------------------------------------------------------ inter-ridge distance

/// Mean over rows containing ridge pixels of (row length / ridge pixels in row).
inline double inter_ridge_distance(const Skeleton& skel) {
  double total = 0.0;
  int rows = 0;
  for (int y = 0; y < skel.height(); ++y) {
    int count = 0;
    for (int x = 0; x < skel.width(); ++x) count += skel.bits(x, y) ? 1 : 0;
    if (count > 0) {
      total += static_cast<double>(skel.width()) / count;
      ++rows;
    }
  }
  if (rows == 0) throw Error(ErrorCode::EmptySkeleton, "no ridge pixels");
  return total / rows;
}

// ------------------------------------------------------------ orientation

namespace detail {

inline std::vector<Pixel> arm_blockers(const Skeleton& skel, Pixel junction, Pixel arm) {
  std::vector<Pixel> blocked{junction};
  for (const auto& [dx, dy] : kRing) {
    const Pixel p{junction.x + dx, junction.y + dy};
    if (skel.at(p.x, p.y) && !(p == arm)) blocked.push_back(p);
  }
  return blocked;
}

inline RidgeWalk walk_from(const Skeleton& skel, const Minutia& m, double max_length) {
  if (m.junction) return walk_ridge(skel, {m.x, m.y}, max_length, arm_blockers(skel, *m.junction, {m.x, m.y}));
  return walk_ridge(skel, {m.x, m.y}, max_length);
}

}  // namespace detail

/// Walks up to path length D from the minutia, averages the visited
/// coordinates to (sx, sy) and returns atan2(sy - y, sx - x). A ridge that
/// holds only the minutia pixel gives 0.
inline double minutia_orientation(const Skeleton& skel, const Minutia& m, double D) {
  const RidgeWalk walk = detail::walk_from(skel, m, D);
  if (walk.pixels.size() < 2) return 0.0;
  double sx = 0.0, sy = 0.0;
  for (const Pixel& p : walk.pixels) {
    sx += p.x;
    sy += p.y;
  }
  sx /= static_cast<double>(walk.pixels.size());
  sy /= static_cast<double>(walk.pixels.size());
  if (sx == m.x && sy == m.y) return 0.0;
  return wrap_angle(std::atan2(sy - m.y, sx - m.x));
}

/// One record per arm leaving a bifurcation: the pixel on each run of
/// touching ring neighbours (the 4-neighbour when the run has one), tagged
/// with the branch pixel.
inline std::vector<Minutia> decompose_bifurcation(const Skeleton& skel, const Minutia& fork) {
  const auto ring = ring_of(fork.x, fork.y, [&](int u, int v) { return skel.at(u, v); });
  std::vector<Minutia> arms;
  std::size_t start = 0;
  while (start < 8 && ring[start]) ++start;
  if (start == 8) return arms;  // fully surrounded, no distinct arms
  for (std::size_t k = 1; k <= 8; ++k) {
    const std::size_t i = (start + k) % 8;
    if (!ring[i]) continue;
    if (ring[(i + 7) % 8]) continue;  // not the start of a run
    std::size_t pick = i;
    for (std::size_t j = i; ring[j % 8] && j < i + 8; ++j) {
      if ((j % 8) % 2 == 0) {
        pick = j % 8;
        break;
      }
    }
    const Pixel p{fork.x + kRing[pick].first, fork.y + kRing[pick].second};
    arms.push_back({p.x, p.y, 0.0, MinutiaKind::Bifurcation, skel.label(p.x, p.y), Pixel{fork.x, fork.y}});
  }
  return arms;
}

/// Terminations get their orientation; bifurcations become per-arm records.
inline std::vector<Minutia> orient_minutiae(const Skeleton& skel, const std::vector<Minutia>& minutiae, double D) {
  std::vector<Minutia> out;
  for (const Minutia& m : minutiae) {
    if (m.kind == MinutiaKind::Bifurcation && !m.junction) {
      for (Minutia arm : decompose_bifurcation(skel, m)) {
        arm.theta = minutia_orientation(skel, arm, D);
        out.push_back(arm);
      }
    } else {
      Minutia t = m;
      t.theta = minutia_orientation(skel, t, D);
      out.push_back(t);
    }
  }
  return out;
}

// ------------------------------------------------------------ false minutiae

enum class FalseMinutiaRule { BifurcationTermination, BifurcationBifurcation, BrokenRidge, ShortRidge };

struct Removal {
  FalseMinutiaRule rule;
  std::size_t first;   ///< index into the input sequence
  std::size_t second;
};

struct FalseMinutiaeResult {
  std::vector<Minutia> kept;
  std::vector<Removal> removals;
};

/// Applies the four pair rules in order, each over index pairs (i < j) of
/// the still-alive minutiae; a triggered pair is removed together.
///   1. bifurcation + termination, d < D, same ridge
///   1b. bifurcation + bifurcation, d < D, same ridge
///   2. termination + termination, d < D, different ridges, ridge lines
///      within `angle_tolerance` of each other (compared mod pi), and no
///      other termination inside their bounding box grown by 2 px
///   3. termination + termination, d < D, same ridge
inline FalseMinutiaeResult remove_false_minutiae(const std::vector<Minutia>& minutiae, const Skeleton& skel,
                                                 double D, double angle_tolerance = kDefaultBrokenRidgeAngle) {
  const std::size_t n = minutiae.size();
  std::vector<bool> alive(n, true);
  std::vector<double> direction(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (minutiae[i].kind == MinutiaKind::Termination) direction[i] = minutia_orientation(skel, minutiae[i], D);
  }
  auto dist = [&](std::size_t i, std::size_t j) {
    return std::hypot(double(minutiae[i].x - minutiae[j].x), double(minutiae[i].y - minutiae[j].y));
  };
  auto is = [&](std::size_t i, MinutiaKind k) { return minutiae[i].kind == k; };
  constexpr auto T = MinutiaKind::Termination;
  constexpr auto B = MinutiaKind::Bifurcation;

  auto line_difference = [](double a, double b) {
    double d = std::fmod(std::abs(a - b), std::numbers::pi);
    return std::min(d, std::numbers::pi - d);
  };
  auto corridor_empty = [&](std::size_t i, std::size_t j) {
    const int x0 = std::min(minutiae[i].x, minutiae[j].x) - 2, x1 = std::max(minutiae[i].x, minutiae[j].x) + 2;
    const int y0 = std::min(minutiae[i].y, minutiae[j].y) - 2, y1 = std::max(minutiae[i].y, minutiae[j].y) + 2;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i || k == j || !alive[k] || !is(k, T)) continue;
      if (minutiae[k].x >= x0 && minutiae[k].x <= x1 && minutiae[k].y >= y0 && minutiae[k].y <= y1) return false;
    }
    return true;
  };

  const std::array<FalseMinutiaRule, 4> order{FalseMinutiaRule::BifurcationTermination,
                                              FalseMinutiaRule::BifurcationBifurcation,
                                              FalseMinutiaRule::BrokenRidge, FalseMinutiaRule::ShortRidge};
  FalseMinutiaeResult result;
  for (FalseMinutiaRule rule : order) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!alive[i] || !alive[j] || dist(i, j) >= D) continue;
        const bool same_ridge = minutiae[i].ridge_id == minutiae[j].ridge_id;
        bool hit = false;
        switch (rule) {
          case FalseMinutiaRule::BifurcationTermination:
            hit = same_ridge && ((is(i, B) && is(j, T)) || (is(i, T) && is(j, B)));
            break;
          case FalseMinutiaRule::BifurcationBifurcation:
            hit = same_ridge && is(i, B) && is(j, B);
            break;
          case FalseMinutiaRule::BrokenRidge:
            hit = !same_ridge && is(i, T) && is(j, T) &&
                  line_difference(direction[i], direction[j]) < angle_tolerance && corridor_empty(i, j);
            break;
          case FalseMinutiaRule::ShortRidge:
            hit = same_ridge && is(i, T) && is(j, T);
            break;
        }
        if (hit) {
          alive[i] = alive[j] = false;
          result.removals.push_back({rule, i, j});
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i]) result.kept.push_back(minutiae[i]);
  }
  return result;
}

// ------------------------------------------------------------ ridge sampling

struct LocalPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Walks the minutia's ridge and records a point each time the path length
/// passes a multiple of L, at most n_max points, expressed in the minutia's
/// frame (origin at the minutia, x axis along theta).
inline std::vector<LocalPoint> sample_ridge(const Skeleton& skel, const Minutia& m, double L,
                                            std::size_t n_max = kMaxRidgeSamples) {
  std::vector<LocalPoint> out;
  if (!(L > 0.0) || n_max == 0) return out;
  const RidgeWalk walk = detail::walk_from(skel, m, L * static_cast<double>(n_max));
  const double c = std::cos(m.theta), s = std::sin(m.theta);
  std::size_t next = 1;
  for (std::size_t i = 1; i < walk.pixels.size() && out.size() < n_max; ++i) {
    while (out.size() < n_max && walk.length[i] >= static_cast<double>(next) * L - 1e-9) {
      const double dx = walk.pixels[i].x - m.x;
      const double dy = walk.pixels[i].y - m.y;
      out.push_back({c * dx + s * dy, -s * dx + c * dy});
      ++next;
    }
  }
  return out;
}

inline std::vector<double> sample_ridge_x(const Skeleton& skel, const Minutia& m, double L,
                                          std::size_t n_max = kMaxRidgeSamples) {
  std::vector<double> xs;
  for (const LocalPoint& p : sample_ridge(skel, m, L, n_max)) xs.push_back(p.x);
  return xs;
}

}  // namespace biostego
