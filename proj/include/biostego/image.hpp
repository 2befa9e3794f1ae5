#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "biostego/error.hpp"

namespace biostego {

struct GrayTag {};
struct BinaryTag {};
struct MaskTag {};

/// Row-major raster with value semantics. x grows rightward, y grows downward.
template <typename T, typename Tag = void>
class Raster {
 public:
  using value_type = T;

  Raster() = default;

  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    validate();
  }

  Raster(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw Error(ErrorCode::InvalidImage,
                  "data length " + std::to_string(data_.size()) + " != " +
                      std::to_string(width) + "x" + std::to_string(height));
    }
    validate();
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }
  T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }

  /// Out-of-range reads return `outside`.
  T get_or(int x, int y, T outside) const noexcept {
    return contains(x, y) ? data_[index(x, y)] : outside;
  }

  std::span<const T> pixels() const noexcept { return data_; }
  std::span<T> pixels() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::InvalidImage, "image dimensions must be >= 1, got " +
                                               std::to_string(width) + "x" +
                                               std::to_string(height));
    }
  }

  void validate() const {
    if constexpr (std::is_same_v<Tag, BinaryTag> || std::is_same_v<Tag, MaskTag>) {
      for (T v : data_) {
        if (v > 1) throw Error(ErrorCode::InvalidImage, "binary raster values must be 0 or 1");
      }
    }
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// 8-bit grayscale intensities.
using GrayImage = Raster<std::uint8_t, GrayTag>;
/// 1-bit ridge map: 0 = ridge, 1 = furrow.
using BinaryImage = Raster<std::uint8_t, BinaryTag>;
/// 1 = inside the region of interest.
using RoiMask = Raster<std::uint8_t, MaskTag>;

/// Round half up; used for every float to intensity conversion.
inline double round_half_up(double v) { return std::floor(v + 0.5); }

inline std::uint8_t to_intensity(double v) {
  const double r = round_half_up(v);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

/// Square tile of a parent image. Tiles on the right/bottom edge may extend
/// past the image; those cells are filled by mirror padding when extracted.
struct Block {
  int x = 0;
  int y = 0;
  int size = 0;

  int in_width(int image_width) const noexcept { return std::min(size, image_width - x); }
  int in_height(int image_height) const noexcept { return std::min(size, image_height - y); }

  friend bool operator==(const Block&, const Block&) = default;
};

inline std::vector<Block> split_blocks(int width, int height, int block_size) {
  if (block_size < 1) {
    throw Error(ErrorCode::InvalidBlockSize, "block size must be >= 1");
  }
  std::vector<Block> blocks;
  const int bx = (width + block_size - 1) / block_size;
  const int by = (height + block_size - 1) / block_size;
  blocks.reserve(static_cast<std::size_t>(bx) * static_cast<std::size_t>(by));
  for (int j = 0; j < by; ++j) {
    for (int i = 0; i < bx; ++i) {
      blocks.push_back(Block{i * block_size, j * block_size, block_size});
    }
  }
  return blocks;
}

template <typename T, typename Tag>
std::vector<Block> split_blocks(const Raster<T, Tag>& image, int block_size) {
  return split_blocks(image.width(), image.height(), block_size);
}

/// Reflects an out-of-range coordinate back into [0, n) without repeating the
/// edge sample (…, 2, 1, 0, 1, 2, …).
inline int mirror_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

/// Copies a block into a size*size buffer, mirror-padding cells outside the image.
template <typename T, typename Tag>
std::vector<double> extract_block(const Raster<T, Tag>& image, const Block& block) {
  std::vector<double> out(static_cast<std::size_t>(block.size) * static_cast<std::size_t>(block.size));
  for (int dy = 0; dy < block.size; ++dy) {
    const int sy = mirror_index(block.y + dy, image.height());
    for (int dx = 0; dx < block.size; ++dx) {
      const int sx = mirror_index(block.x + dx, image.width());
      out[static_cast<std::size_t>(dy) * block.size + dx] = static_cast<double>(image(sx, sy));
    }
  }
  return out;
}

}  // namespace biostego
