#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "biostego/enhancement.hpp"
#include "biostego/image.hpp"

namespace biostego {

inline constexpr int kDefaultDirectionBlock = 16;
/// Foreground iff E >= coefficient / W^2. A perfectly coherent block has
/// E = 1 / W^2, so the coefficient is the minimum coherence fraction.
inline constexpr double kDefaultCertaintyCoefficient = 0.4;

/// Per-block orientation and certainty on a W-pixel grid.
///
/// `angle` is the dominant gradient orientation in [0, pi) from the doubled
/// angle least-squares estimate; ridges run perpendicular to it.
struct DirectionMap {
  int width = 0;   ///< source image width in pixels
  int height = 0;  ///< source image height in pixels
  int block = 0;   ///< W
  int blocks_x = 0;
  int blocks_y = 0;
  std::vector<double> angle;
  std::vector<double> certainty;
  std::vector<std::uint8_t> foreground;

  std::size_t index(int bx, int by) const noexcept {
    return static_cast<std::size_t>(by) * static_cast<std::size_t>(blocks_x) + static_cast<std::size_t>(bx);
  }
};

namespace detail {

struct BlockMoments {
  double sxy2 = 0.0;  // sum 2 gx gy
  double sdiff = 0.0; // sum gx^2 - gy^2
  double senergy = 0.0; // sum gx^2 + gy^2
};

inline std::vector<BlockMoments> block_moments(const GradientField& field, int W, int& bx, int& by) {
  if (W < 2) throw Error(ErrorCode::InvalidBlockSize, "direction block must be >= 2");
  bx = (field.width + W - 1) / W;
  by = (field.height + W - 1) / W;
  std::vector<BlockMoments> m(static_cast<std::size_t>(bx) * static_cast<std::size_t>(by));
  for (int y = 0; y < field.height; ++y) {
    for (int x = 0; x < field.width; ++x) {
      const double gx = field.gx[field.index(x, y)];
      const double gy = field.gy[field.index(x, y)];
      auto& b = m[static_cast<std::size_t>(y / W) * static_cast<std::size_t>(bx) + static_cast<std::size_t>(x / W)];
      b.sxy2 += 2.0 * gx * gy;
      b.sdiff += gx * gx - gy * gy;
      b.senergy += gx * gx + gy * gy;
    }
  }
  return m;
}

inline double fold_half_turn(double a) {
  a = std::fmod(a, std::numbers::pi);
  if (a < 0.0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return a;
}

}  // namespace detail

/// beta = 1/2 atan2(sum 2 gx gy, sum (gx^2 - gy^2)), folded into [0, pi).
inline double block_orientation(double sum_2gxgy, double sum_diff) {
  if (sum_2gxgy == 0.0 && sum_diff == 0.0) return 0.0;
  return detail::fold_half_turn(0.5 * std::atan2(sum_2gxgy, sum_diff));
}

/// E = sqrt(sdiff^2 + sxy2^2) / (W * W * senergy); 0 when senergy is 0.
inline double block_certainty_value(double sum_2gxgy, double sum_diff, double sum_energy, int W) {
  if (sum_energy <= 0.0) return 0.0;
  return std::hypot(sum_diff, sum_2gxgy) / (static_cast<double>(W) * W * sum_energy);
}

/// Orientation only; certainty/foreground left empty.
inline DirectionMap block_direction(const GradientField& field, int W = kDefaultDirectionBlock) {
  DirectionMap map;
  const auto moments = detail::block_moments(field, W, map.blocks_x, map.blocks_y);
  map.width = field.width;
  map.height = field.height;
  map.block = W;
  map.angle.reserve(moments.size());
  for (const auto& m : moments) map.angle.push_back(block_orientation(m.sxy2, m.sdiff));
  return map;
}

inline std::vector<double> block_certainty(const GradientField& field, int W = kDefaultDirectionBlock) {
  int bx = 0, by = 0;
  const auto moments = detail::block_moments(field, W, bx, by);
  std::vector<double> e;
  e.reserve(moments.size());
  for (const auto& m : moments) e.push_back(block_certainty_value(m.sxy2, m.sdiff, m.senergy, W));
  return e;
}

/// Full direction map: angle, certainty and the foreground classification.
inline DirectionMap segment_blocks(const GradientField& field, int W = kDefaultDirectionBlock,
                                   double certainty_coefficient = kDefaultCertaintyCoefficient) {
  DirectionMap map = block_direction(field, W);
  map.certainty = block_certainty(field, W);
  const double threshold = certainty_coefficient / (static_cast<double>(W) * W);
  map.foreground.reserve(map.certainty.size());
  for (double e : map.certainty) map.foreground.push_back(e >= threshold ? 1 : 0);
  return map;
}

// ------------------------------------------------------------ morphology

namespace detail {

// Square-window erosion/dilation over in-image pixels only, via a summed-area
// table. Restricting the window to the image keeps erosion/dilation adjoint,
// so open and close stay idempotent.
inline RoiMask window_filter(const RoiMask& mask, int radius, bool erode) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::int64_t> sat(static_cast<std::size_t>(w + 1) * static_cast<std::size_t>(h + 1), 0);
  auto at = [&](int x, int y) -> std::int64_t& {
    return sat[static_cast<std::size_t>(y) * static_cast<std::size_t>(w + 1) + static_cast<std::size_t>(x)];
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) at(x + 1, y + 1) = mask(x, y) + at(x, y + 1) + at(x + 1, y) - at(x, y);
  }
  RoiMask out(w, h);
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - radius), y1 = std::min(h, y + radius + 1);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - radius), x1 = std::min(w, x + radius + 1);
      const std::int64_t set = at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0);
      const std::int64_t cells = static_cast<std::int64_t>(x1 - x0) * (y1 - y0);
      out(x, y) = erode ? (set == cells ? 1 : 0) : (set > 0 ? 1 : 0);
    }
  }
  return out;
}

}  // namespace detail

/// Square structuring element of side 2 * radius + 1.
inline RoiMask erode(const RoiMask& mask, int radius) { return detail::window_filter(mask, radius, true); }
inline RoiMask dilate(const RoiMask& mask, int radius) { return detail::window_filter(mask, radius, false); }
inline RoiMask morph_open(const RoiMask& mask, int radius) { return dilate(erode(mask, radius), radius); }
inline RoiMask morph_close(const RoiMask& mask, int radius) { return erode(dilate(mask, radius), radius); }

/// Paints each block's foreground flag onto a pixel mask of the source size.
inline RoiMask rasterize_blocks(const DirectionMap& map) {
  RoiMask mask(map.width, map.height);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) mask(x, y) = map.foreground[map.index(x / map.block, y / map.block)];
  }
  return mask;
}

/// OPEN drops specks left by background noise; CLOSE then fills small holes.
inline RoiMask roi_extract(const DirectionMap& map, int structuring_radius) {
  return morph_close(morph_open(rasterize_blocks(map), structuring_radius), structuring_radius);
}

}  // namespace biostego
