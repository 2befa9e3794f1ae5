#pragma once

// LSB channel. Bitstream, one bit per sample LSB in storage order, MSB first
// within each byte:
//   bits  0..31  magic "BSG1"
//   bits 32..63  payload length in bytes, unsigned big-endian
//   bits 64..    payload bytes

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "biostego/error.hpp"
#include "biostego/image.hpp"

namespace biostego {

inline constexpr std::array<std::uint8_t, 4> kStegoMagic{'B', 'S', 'G', '1'};
inline constexpr std::size_t kStegoHeaderBits = 64;

struct StegoHeader {
  std::array<std::uint8_t, 4> magic = kStegoMagic;
  std::uint32_t payload_length = 0;
};

/// One bit per 8-bit sample.
inline std::size_t capacity(std::size_t width, std::size_t height, std::size_t channels = 1) {
  return width * height * channels;
}

inline std::size_t capacity(const GrayImage& cover) { return cover.size(); }

/// Bits needed to carry `payload_bytes` including the header.
inline std::size_t required_bits(std::size_t payload_bytes) { return kStegoHeaderBits + 8 * payload_bytes; }

namespace detail {

inline std::vector<std::uint8_t> frame_payload(std::span<const std::uint8_t> payload) {
  if (payload.size() > 0xffffffffu) throw Error(ErrorCode::PayloadTooLarge, "payload exceeds 32-bit length field");
  std::vector<std::uint8_t> framed(kStegoMagic.begin(), kStegoMagic.end());
  const auto n = static_cast<std::uint32_t>(payload.size());
  for (int shift = 24; shift >= 0; shift -= 8) framed.push_back(static_cast<std::uint8_t>(n >> shift));
  framed.insert(framed.end(), payload.begin(), payload.end());
  return framed;
}

inline std::uint8_t read_byte(std::span<const std::uint8_t> samples, std::size_t bit_offset) {
  std::uint8_t v = 0;
  for (std::size_t b = 0; b < 8; ++b) v = static_cast<std::uint8_t>((v << 1) | (samples[bit_offset + b] & 1u));
  return v;
}

}  // namespace detail

/// Writes header + payload into the LSBs of `samples` (any channel layout, in
/// storage order). Samples past the framed bits are left untouched.
inline std::vector<std::uint8_t> embed_lsb_samples(std::span<const std::uint8_t> samples,
                                                   std::span<const std::uint8_t> payload) {
  const std::size_t need = required_bits(payload.size());
  if (need > samples.size()) {
    throw Error(ErrorCode::PayloadTooLarge, "need " + std::to_string(need) + " bits, cover holds " +
                                                std::to_string(samples.size()));
  }
  std::vector<std::uint8_t> out(samples.begin(), samples.end());
  const auto framed = detail::frame_payload(payload);
  std::size_t bit = 0;
  for (std::uint8_t byte : framed) {
    for (int k = 7; k >= 0; --k, ++bit) {
      out[bit] = static_cast<std::uint8_t>((out[bit] & 0xFEu) | ((byte >> k) & 1u));
    }
  }
  return out;
}

inline std::vector<std::uint8_t> extract_lsb_samples(std::span<const std::uint8_t> samples) {
  if (samples.size() < 32) throw Error(ErrorCode::NoMagic, "cover too small to hold a header");
  for (std::size_t i = 0; i < 4; ++i) {
    if (detail::read_byte(samples, i * 8) != kStegoMagic[i]) throw Error(ErrorCode::NoMagic, "no stego header");
  }
  if (samples.size() < kStegoHeaderBits) throw Error(ErrorCode::TruncatedPayload, "header truncated");
  std::uint32_t n = 0;
  for (std::size_t i = 4; i < 8; ++i) n = (n << 8) | detail::read_byte(samples, i * 8);
  if (required_bits(n) > samples.size()) {
    throw Error(ErrorCode::TruncatedPayload, "declared length " + std::to_string(n) + " bytes exceeds capacity");
  }
  std::vector<std::uint8_t> payload(n);
  for (std::size_t i = 0; i < n; ++i) payload[i] = detail::read_byte(samples, kStegoHeaderBits + 8 * i);
  return payload;
}

inline GrayImage embed_lsb(const GrayImage& cover, std::span<const std::uint8_t> payload) {
  return GrayImage(cover.width(), cover.height(), embed_lsb_samples(cover.pixels(), payload));
}

inline std::vector<std::uint8_t> extract_lsb(const GrayImage& stego) { return extract_lsb_samples(stego.pixels()); }

}  // namespace biostego
