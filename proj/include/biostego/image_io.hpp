#pragma once

// Minimal 8-bit grayscale codecs: binary PGM (P5) and baseline TIFF.
//
// TIFF reading covers single-sample 8-bit images stored in strips or tiles,
// uncompressed or LZW, with optional horizontal differencing. Only the first
// IFD is read. TIFF writing emits one uncompressed little-endian strip.

#include <array>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biostego/error.hpp"
#include "biostego/image.hpp"

namespace biostego {

enum class ImageFormat { Pgm, Tiff };

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::MissingFile, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

// ---------------------------------------------------------------- PGM

inline GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 2;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&]() -> long {
    skip_space();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
      throw Error(ErrorCode::CorruptFile, "malformed PGM header");
    }
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos] - '0');
      if (v > (1L << 24)) throw Error(ErrorCode::CorruptFile, "PGM header value too large");
      ++pos;
    }
    return v;
  };
  const long width = read_uint();
  const long height = read_uint();
  const long maxval = read_uint();
  if (width < 1 || height < 1) throw Error(ErrorCode::CorruptFile, "PGM with empty raster");
  if (maxval < 1 || maxval > 255) {
    throw Error(ErrorCode::UnsupportedFormat, "PGM maxval " + std::to_string(maxval) + " is not 8-bit");
  }
  // Exactly one whitespace byte separates the header from the raster.
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw Error(ErrorCode::CorruptFile, "malformed PGM header");
  }
  ++pos;
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - pos < n) throw Error(ErrorCode::CorruptFile, "PGM raster truncated");
  return GrayImage(static_cast<int>(width), static_cast<int>(height),
                   std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                             bytes.begin() + static_cast<std::ptrdiff_t>(pos + n)));
}

inline std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  const std::string header = "P5\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.data().begin(), image.data().end());
  return out;
}

// ---------------------------------------------------------------- TIFF

class TiffReader {
 public:
  explicit TiffReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {
    if (bytes.size() < 8) throw Error(ErrorCode::CorruptFile, "TIFF header truncated");
    little_ = bytes[0] == 'I';
    if (u16(2) != 42) throw Error(ErrorCode::CorruptFile, "bad TIFF magic");
  }

  GrayImage decode() {
    read_ifd(u32(4));
    const std::uint32_t width = scalar(kImageWidth).value_or(0);
    const std::uint32_t height = scalar(kImageLength).value_or(0);
    if (width == 0 || height == 0 || width > (1u << 20) || height > (1u << 20)) {
      throw Error(ErrorCode::CorruptFile, "TIFF dimensions missing or invalid");
    }
    const std::uint32_t spp = scalar(kSamplesPerPixel).value_or(1);
    const std::uint32_t photometric = scalar(kPhotometric).value_or(1);
    if (spp != 1 || photometric > 1) {
      throw Error(ErrorCode::UnsupportedFormat, "TIFF is not single-channel grayscale");
    }
    for (std::uint32_t bits : array(kBitsPerSample)) {
      if (bits != 8) throw Error(ErrorCode::UnsupportedFormat, "TIFF is not 8 bits per sample");
    }
    if (array(kBitsPerSample).empty()) {
      throw Error(ErrorCode::UnsupportedFormat, "TIFF bilevel images are not supported");
    }
    const std::uint32_t compression = scalar(kCompression).value_or(1);
    if (compression != 1 && compression != 5) {
      throw Error(ErrorCode::UnsupportedFormat,
                  "TIFF compression " + std::to_string(compression) + " not supported");
    }
    const std::uint32_t predictor = scalar(kPredictor).value_or(1);
    if (predictor != 1 && predictor != 2) {
      throw Error(ErrorCode::UnsupportedFormat, "TIFF predictor not supported");
    }

    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height);
    const bool tiled = entries_.count(kTileOffsets) != 0;
    const std::uint32_t seg_w = tiled ? scalar(kTileWidth).value_or(0) : width;
    const std::uint32_t seg_h =
        tiled ? scalar(kTileLength).value_or(0) : std::min(scalar(kRowsPerStrip).value_or(height), height);
    if (seg_w == 0 || seg_h == 0) throw Error(ErrorCode::CorruptFile, "TIFF segment size missing");
    const auto offsets = array(tiled ? kTileOffsets : kStripOffsets);
    const auto counts = array(tiled ? kTileByteCounts : kStripByteCounts);
    const std::uint32_t across = tiled ? (width + seg_w - 1) / seg_w : 1;
    const std::uint32_t down = (height + seg_h - 1) / seg_h;
    if (offsets.size() < std::size_t{across} * down || counts.size() < offsets.size()) {
      throw Error(ErrorCode::CorruptFile, "TIFF segment tables incomplete");
    }

    const std::size_t seg_bytes = std::size_t{seg_w} * seg_h;
    for (std::uint32_t s = 0; s < across * down; ++s) {
      if (offsets[s] > bytes_.size() || counts[s] > bytes_.size() - offsets[s]) {
        throw Error(ErrorCode::CorruptFile, "TIFF segment outside file");
      }
      auto raw = bytes_.subspan(offsets[s], counts[s]);
      std::vector<std::uint8_t> seg =
          compression == 5 ? lzw_decode(raw, seg_bytes) : std::vector<std::uint8_t>(raw.begin(), raw.end());
      const std::uint32_t ox = (s % across) * seg_w;
      const std::uint32_t oy = (s / across) * seg_h;
      // Strips at the bottom may legitimately hold fewer rows.
      const std::uint32_t rows = std::min(seg_h, height - oy);
      const std::size_t needed = tiled ? seg_bytes : std::size_t{seg_w} * rows;
      if (seg.size() < needed) throw Error(ErrorCode::CorruptFile, "TIFF segment truncated");
      if (predictor == 2) {
        for (std::uint32_t r = 0; r < (tiled ? seg_h : rows); ++r) {
          for (std::uint32_t c = 1; c < seg_w; ++c) {
            seg[std::size_t{r} * seg_w + c] =
                static_cast<std::uint8_t>(seg[std::size_t{r} * seg_w + c] + seg[std::size_t{r} * seg_w + c - 1]);
          }
        }
      }
      for (std::uint32_t r = 0; r < rows; ++r) {
        const std::uint32_t cols = std::min(seg_w, width - ox);
        std::memcpy(&pixels[std::size_t{oy + r} * width + ox], &seg[std::size_t{r} * seg_w], cols);
      }
    }
    if (photometric == 0) {
      for (auto& p : pixels) p = static_cast<std::uint8_t>(255 - p);
    }
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
  }

  /// TIFF flavour of LZW: MSB-first codes of 9..12 bits with early change.
  static std::vector<std::uint8_t> lzw_decode(std::span<const std::uint8_t> in, std::size_t expected) {
    constexpr std::uint32_t kClear = 256;
    constexpr std::uint32_t kEoi = 257;
    struct Entry {
      std::int32_t prefix;
      std::uint8_t last;
      std::uint8_t first;
      std::uint32_t length;
    };
    std::vector<Entry> table;
    table.reserve(4096);
    auto reset = [&] {
      table.clear();
      for (std::uint32_t i = 0; i < 256; ++i) {
        table.push_back({-1, static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(i), 1});
      }
      table.push_back({-1, 0, 0, 0});  // clear
      table.push_back({-1, 0, 0, 0});  // eoi
    };
    std::vector<std::uint8_t> out;
    out.reserve(expected);
    auto emit = [&](std::uint32_t code) {
      const std::size_t start = out.size();
      out.resize(start + table[code].length);
      std::int32_t c = static_cast<std::int32_t>(code);
      for (std::size_t i = table[code].length; i-- > 0;) {
        out[start + i] = table[static_cast<std::size_t>(c)].last;
        c = table[static_cast<std::size_t>(c)].prefix;
      }
    };

    std::size_t bitpos = 0;
    int width = 9;
    auto read_code = [&]() -> std::optional<std::uint32_t> {
      if (bitpos + static_cast<std::size_t>(width) > in.size() * 8) return std::nullopt;
      std::uint32_t v = 0;
      for (int i = 0; i < width; ++i, ++bitpos) {
        v = (v << 1) | ((in[bitpos >> 3] >> (7 - (bitpos & 7))) & 1u);
      }
      return v;
    };

    reset();
    std::int32_t prev = -1;
    while (true) {
      auto code = read_code();
      if (!code || *code == kEoi) break;
      if (*code == kClear) {
        reset();
        width = 9;
        prev = -1;
        continue;
      }
      if (prev < 0) {
        if (*code > 255) throw Error(ErrorCode::CorruptFile, "LZW stream starts with a non-literal");
        emit(*code);
        prev = static_cast<std::int32_t>(*code);
        continue;
      }
      const Entry& p = table[static_cast<std::size_t>(prev)];
      if (*code < table.size()) {
        emit(*code);
        table.push_back({prev, table[*code].first, p.first, p.length + 1});
      } else if (*code == table.size()) {
        table.push_back({prev, p.first, p.first, p.length + 1});
        emit(*code);
      } else {
        throw Error(ErrorCode::CorruptFile, "LZW code out of range");
      }
      if (table.size() >= 4096) throw Error(ErrorCode::CorruptFile, "LZW table overflow");
      prev = static_cast<std::int32_t>(*code);
      if (table.size() + 1 >= (std::size_t{1} << width) && width < 12) ++width;
    }
    return out;
  }

 private:
  static constexpr std::uint16_t kImageWidth = 256;
  static constexpr std::uint16_t kImageLength = 257;
  static constexpr std::uint16_t kBitsPerSample = 258;
  static constexpr std::uint16_t kCompression = 259;
  static constexpr std::uint16_t kPhotometric = 262;
  static constexpr std::uint16_t kStripOffsets = 273;
  static constexpr std::uint16_t kSamplesPerPixel = 277;
  static constexpr std::uint16_t kRowsPerStrip = 278;
  static constexpr std::uint16_t kStripByteCounts = 279;
  static constexpr std::uint16_t kPredictor = 317;
  static constexpr std::uint16_t kTileWidth = 322;
  static constexpr std::uint16_t kTileLength = 323;
  static constexpr std::uint16_t kTileOffsets = 324;
  static constexpr std::uint16_t kTileByteCounts = 325;

  std::uint16_t u16(std::size_t at) const {
    if (at + 2 > bytes_.size()) throw Error(ErrorCode::CorruptFile, "TIFF read past end");
    return little_ ? static_cast<std::uint16_t>(bytes_[at] | (bytes_[at + 1] << 8))
                   : static_cast<std::uint16_t>((bytes_[at] << 8) | bytes_[at + 1]);
  }
  std::uint32_t u32(std::size_t at) const {
    if (at + 4 > bytes_.size()) throw Error(ErrorCode::CorruptFile, "TIFF read past end");
    const std::uint32_t b0 = bytes_[at], b1 = bytes_[at + 1], b2 = bytes_[at + 2], b3 = bytes_[at + 3];
    return little_ ? (b0 | (b1 << 8) | (b2 << 16) | (b3 << 24)) : ((b0 << 24) | (b1 << 16) | (b2 << 8) | b3);
  }

  void read_ifd(std::uint32_t offset) {
    const std::uint16_t n = u16(offset);
    for (std::uint16_t i = 0; i < n; ++i) {
      const std::size_t e = offset + 2 + std::size_t{i} * 12;
      const std::uint16_t tag = u16(e);
      const std::uint16_t type = u16(e + 2);
      const std::uint32_t count = u32(e + 4);
      std::size_t elem = 0;
      switch (type) {
        case 1: elem = 1; break;  // BYTE
        case 3: elem = 2; break;  // SHORT
        case 4: elem = 4; break;  // LONG
        default: continue;        // tags we read are never other types
      }
      if (count > bytes_.size()) throw Error(ErrorCode::CorruptFile, "TIFF tag count too large");
      const std::size_t base = elem * count <= 4 ? e + 8 : u32(e + 8);
      std::vector<std::uint32_t> values(count);
      for (std::uint32_t k = 0; k < count; ++k) {
        const std::size_t at = base + k * elem;
        if (elem == 1) {
          if (at >= bytes_.size()) throw Error(ErrorCode::CorruptFile, "TIFF read past end");
          values[k] = bytes_[at];
        } else {
          values[k] = elem == 2 ? u16(at) : u32(at);
        }
      }
      entries_[tag] = std::move(values);
    }
  }

  std::optional<std::uint32_t> scalar(std::uint16_t tag) const {
    auto it = entries_.find(tag);
    if (it == entries_.end() || it->second.empty()) return std::nullopt;
    return it->second.front();
  }
  std::vector<std::uint32_t> array(std::uint16_t tag) const {
    auto it = entries_.find(tag);
    return it == entries_.end() ? std::vector<std::uint32_t>{} : it->second;
  }

  std::span<const std::uint8_t> bytes_;
  bool little_ = true;
  std::map<std::uint16_t, std::vector<std::uint32_t>> entries_;
};

inline std::vector<std::uint8_t> encode_tiff(const GrayImage& image) {
  std::vector<std::uint8_t> out;
  auto put16 = [&](std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  };
  auto put32 = [&](std::uint32_t v) {
    put16(v & 0xffff);
    put16(v >> 16);
  };
  const auto w = static_cast<std::uint32_t>(image.width());
  const auto h = static_cast<std::uint32_t>(image.height());
  const std::uint32_t data_bytes = w * h;

  out.insert(out.end(), {'I', 'I'});
  put16(42);
  const std::uint32_t ifd_offset = 8 + data_bytes + (data_bytes & 1);
  put32(ifd_offset);
  out.insert(out.end(), image.data().begin(), image.data().end());
  if (data_bytes & 1) out.push_back(0);

  struct Tag {
    std::uint16_t id;
    std::uint16_t type;
    std::uint32_t value;
  };
  const std::array<Tag, 10> tags{{
      {256, 4, w},
      {257, 4, h},
      {258, 3, 8},
      {259, 3, 1},
      {262, 3, 1},
      {273, 4, 8},
      {277, 3, 1},
      {278, 4, h},
      {279, 4, data_bytes},
      {284, 3, 1},
  }};
  put16(static_cast<std::uint32_t>(tags.size()));
  for (const Tag& t : tags) {
    put16(t.id);
    put16(t.type);
    put32(1);
    if (t.type == 3) {
      put16(t.value);
      put16(0);
    } else {
      put32(t.value);
    }
  }
  put32(0);
  return out;
}

}  // namespace detail

/// Decodes an in-memory image, dispatching on the container's magic bytes.
inline GrayImage decode_gray(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 2 && bytes[0] == 'P') {
    if (bytes[1] == '5') return detail::decode_pgm(bytes);
    if (bytes[1] >= '1' && bytes[1] <= '7') {
      throw Error(ErrorCode::UnsupportedFormat, std::string("netpbm variant P") + char(bytes[1]) + " is not 8-bit binary gray");
    }
  }
  if (bytes.size() >= 4 && ((bytes[0] == 'I' && bytes[1] == 'I' && bytes[2] == 42 && bytes[3] == 0) ||
                            (bytes[0] == 'M' && bytes[1] == 'M' && bytes[2] == 0 && bytes[3] == 42))) {
    return detail::TiffReader(bytes).decode();
  }
  throw Error(ErrorCode::UnsupportedFormat, "unrecognized image container");
}

inline std::vector<std::uint8_t> encode_gray(const GrayImage& image, ImageFormat format) {
  return format == ImageFormat::Pgm ? detail::encode_pgm(image) : detail::encode_tiff(image);
}

/// `.pgm` selects PGM; every other extension is written as TIFF.
inline ImageFormat format_for_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".pgm" ? ImageFormat::Pgm : ImageFormat::Tiff;
}

inline GrayImage load_gray(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  return decode_gray(bytes);
}

inline void save_gray(const GrayImage& image, const std::filesystem::path& path) {
  detail::write_file(path, encode_gray(image, format_for_path(path)));
}

}  // namespace biostego
