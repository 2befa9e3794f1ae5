#pragma once

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "biostego/error.hpp"
#include "biostego/image.hpp"

namespace biostego {

/// Default FFT exponent. Larger values fill holes in ridges, but values that
/// are too high falsely join neighbouring ridges and can turn a termination
/// into a bifurcation.
inline constexpr double kDefaultFftExponent = 0.45;
inline constexpr int kDefaultFftBlock = 32;
inline constexpr int kDefaultBinarizeBlock = 16;

/// Per-pixel Sobel responses. |gx|, |gy| <= 4 * 255.
struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<int> gx;
  std::vector<int> gy;

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
};

struct GradientPolar {
  std::vector<double> magnitude;
  std::vector<double> angle;
};

// ------------------------------------------------------------ equalization

/// out = round(255 * CDF(in)); the largest occupied intensity maps to 255.
inline GrayImage histogram_equalize(const GrayImage& image) {
  std::array<std::size_t, 256> hist{};
  for (std::uint8_t v : image.pixels()) ++hist[v];
  std::array<std::uint8_t, 256> lut{};
  std::size_t cumulative = 0;
  const double total = static_cast<double>(image.size());
  for (int v = 0; v < 256; ++v) {
    cumulative += hist[static_cast<std::size_t>(v)];
    lut[static_cast<std::size_t>(v)] = to_intensity(255.0 * static_cast<double>(cumulative) / total);
  }
  GrayImage out = image;
  for (auto& p : out.pixels()) p = lut[p];
  return out;
}

// ------------------------------------------------------------ FFT enhancement

namespace detail {

// FFTW's planner is not thread-safe; execution of an existing plan is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

class FftwPlan {
 public:
  FftwPlan(int n, int sign, fftw_complex* in, fftw_complex* out) {
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_2d(n, n, in, out, sign, FFTW_ESTIMATE);
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  ~FftwPlan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const noexcept { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

}  // namespace detail

/// Spectral enhancement of one n*n block: g = IDFT(F * |F|^k), real part,
/// then affinely rescaled onto the input block's [min, max].
/// Returns unrounded values so callers can quantize once.
inline std::vector<double> fft_enhance_block(std::span<const double> block, int n, double k) {
  const std::size_t count = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  detail::FftwBuffer spatial(fftw_alloc_complex(count));
  detail::FftwBuffer spectrum(fftw_alloc_complex(count));
  detail::FftwPlan forward(n, FFTW_FORWARD, spatial.get(), spectrum.get());
  detail::FftwPlan inverse(n, FFTW_BACKWARD, spectrum.get(), spatial.get());

  for (std::size_t i = 0; i < count; ++i) {
    spatial[i][0] = block[i];
    spatial[i][1] = 0.0;
  }
  forward.execute();
  for (std::size_t i = 0; i < count; ++i) {
    const double mag = std::hypot(spectrum[i][0], spectrum[i][1]);
    const double gain = std::pow(mag, k);  // pow(0, 0) == 1
    spectrum[i][0] *= gain;
    spectrum[i][1] *= gain;
  }
  inverse.execute();

  const auto [in_lo, in_hi] = std::minmax_element(block.begin(), block.end());
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = spatial[i][0] / static_cast<double>(count);
  const auto [out_lo_it, out_hi_it] = std::minmax_element(out.begin(), out.end());
  const double out_lo = *out_lo_it;
  const double out_hi = *out_hi_it;
  const double span_out = out_hi - out_lo;
  const double span_in = *in_hi - *in_lo;
  if (span_in == 0.0 || span_out <= 1e-12 * std::max(1.0, std::abs(out_hi))) {
    std::fill(out.begin(), out.end(), *in_lo);
    return out;
  }
  for (double& v : out) v = *in_lo + (v - out_lo) * span_in / span_out;
  return out;
}

/// Block-wise FFT enhancement. Edge blocks are mirror-padded; only the
/// in-image part of each block is written back.
inline GrayImage fft_enhance(const GrayImage& image, double k = kDefaultFftExponent,
                             int block_size = kDefaultFftBlock) {
  if (!(k >= 0.0)) throw Error(ErrorCode::InvalidConfig, "FFT exponent must be >= 0");
  GrayImage out(image.width(), image.height());
  for (const Block& b : split_blocks(image, block_size)) {
    const auto enhanced = fft_enhance_block(extract_block(image, b), block_size, k);
    for (int dy = 0; dy < b.in_height(image.height()); ++dy) {
      for (int dx = 0; dx < b.in_width(image.width()); ++dx) {
        out(b.x + dx, b.y + dy) = to_intensity(enhanced[static_cast<std::size_t>(dy) * block_size + dx]);
      }
    }
  }
  return out;
}

// ------------------------------------------------------------ Sobel

/// 3x3 Sobel responses under cross-correlation (no kernel flip):
///
///   Gx = [+1 0 -1; +2 0 -2; +1 0 -1]    Gy = [+1 +2 +1; 0 0 0; -1 -2 -1]
///
/// so a rightward-increasing ramp gives negative gx. Borders replicate.
inline GradientField sobel_gradients(const GrayImage& image) {
  if (image.width() < 3 || image.height() < 3) {
    throw Error(ErrorCode::ImageTooSmall, "Sobel needs at least 3x3 pixels");
  }
  const int w = image.width();
  const int h = image.height();
  GradientField field{w, h, std::vector<int>(image.size()), std::vector<int>(image.size())};
  auto px = [&](int x, int y) -> int {
    return image(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int tl = px(x - 1, y - 1), tc = px(x, y - 1), tr = px(x + 1, y - 1);
      const int ml = px(x - 1, y), mr = px(x + 1, y);
      const int bl = px(x - 1, y + 1), bc = px(x, y + 1), br = px(x + 1, y + 1);
      field.gx[field.index(x, y)] = (tl + 2 * ml + bl) - (tr + 2 * mr + br);
      field.gy[field.index(x, y)] = (tl + 2 * tc + tr) - (bl + 2 * bc + br);
    }
  }
  return field;
}

/// Magnitude sqrt(gx^2 + gy^2) and quadrant-aware angle atan2(gy, gx) in
/// (-pi, pi]; (0, 0) maps to angle 0.
inline std::pair<double, double> gradient_polar(double gx, double gy) {
  if (gx == 0.0 && gy == 0.0) return {0.0, 0.0};
  double angle = std::atan2(gy, gx);
  if (angle == -std::numbers::pi) angle = std::numbers::pi;
  return {std::hypot(gx, gy), angle};
}

inline GradientPolar gradient_magnitude_direction(const GradientField& field) {
  GradientPolar out;
  out.magnitude.resize(field.gx.size());
  out.angle.resize(field.gx.size());
  for (std::size_t i = 0; i < field.gx.size(); ++i) {
    std::tie(out.magnitude[i], out.angle[i]) = gradient_polar(field.gx[i], field.gy[i]);
  }
  return out;
}

// ------------------------------------------------------------ binarization

/// Bit = 1 (furrow) iff the pixel is strictly brighter than the mean of its
/// block; the mean covers in-image pixels only.
inline BinaryImage binarize_adaptive(const GrayImage& image, int block_size = kDefaultBinarizeBlock) {
  BinaryImage out(image.width(), image.height());
  for (const Block& b : split_blocks(image, block_size)) {
    const int bw = b.in_width(image.width());
    const int bh = b.in_height(image.height());
    std::uint64_t sum = 0;
    for (int y = b.y; y < b.y + bh; ++y) {
      for (int x = b.x; x < b.x + bw; ++x) sum += image(x, y);
    }
    const std::uint64_t n = static_cast<std::uint64_t>(bw) * static_cast<std::uint64_t>(bh);
    // pixel > sum / n, kept in integers
    for (int y = b.y; y < b.y + bh; ++y) {
      for (int x = b.x; x < b.x + bw; ++x) out(x, y) = std::uint64_t{image(x, y)} * n > sum ? 1 : 0;
    }
  }
  return out;
}

}  // namespace biostego
