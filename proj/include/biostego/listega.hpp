#pragma once

// List-cover channel. Each payload byte becomes two titles whose initial
// letters spell its nibbles ('a' + nibble, high first); a title starting
// with 'z' terminates the message. Anything after the terminator is decoy.

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biostego/error.hpp"

namespace biostego {

inline constexpr char kTerminatorLetter = 'z';

/// Lowercased first ASCII letter of a title, if any.
inline std::optional<char> title_initial(std::string_view title) {
  for (char c : title) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::isalpha(u)) return static_cast<char>(std::tolower(u));
  }
  return std::nullopt;
}

/// Letters a bank must cover: the 16 nibble letters and the terminator.
inline std::string required_letters() {
  std::string s;
  for (char c = 'a'; c <= 'p'; ++c) s.push_back(c);
  s.push_back(kTerminatorLetter);
  return s;
}

class SongBank {
 public:
  /// Builds and verifies a bank; throws EmptyBank / InadequateBank.
  static SongBank from_titles(std::vector<std::string> titles) {
    SongBank bank;
    for (auto& t : titles) {
      if (t.empty()) continue;
      const auto initial = title_initial(t);
      bank.entries_.push_back(std::move(t));
      if (initial) bank.index_[*initial].push_back(bank.entries_.size() - 1);
    }
    if (bank.entries_.empty()) throw Error(ErrorCode::EmptyBank, "bank has no titles");
    const std::string missing = bank.missing_letters();
    if (!missing.empty()) throw Error(ErrorCode::InadequateBank, "no titles for letters {" + missing + "}");
    return bank;
  }

  const std::vector<std::string>& entries() const noexcept { return entries_; }

  /// Indices into entries() of titles starting with `letter`.
  std::span<const std::size_t> bucket(char letter) const {
    auto it = index_.find(letter);
    return it == index_.end() ? std::span<const std::size_t>{} : std::span<const std::size_t>(it->second);
  }

  std::string missing_letters() const {
    std::string missing;
    for (char c : required_letters()) {
      if (bucket(c).empty()) missing.push_back(c);
    }
    return missing;
  }

 private:
  std::vector<std::string> entries_;
  std::map<char, std::vector<std::size_t>> index_;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path, bool skip_comments) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw Error(ErrorCode::MissingFile, path.string());
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    if (skip_comments && t.front() == '#') continue;
    lines.push_back(std::move(t));
  }
  return lines;
}

}  // namespace detail

/// One title per line, UTF-8; blank lines and `#` comments ignored.
inline SongBank load_bank(const std::filesystem::path& path) {
  return SongBank::from_titles(detail::read_lines(path, true));
}

struct ListCover {
  std::vector<std::string> lines;
};

/// Byte b -> letters 'a' + (b >> 4), 'a' + (b & 15); then the terminator.
inline std::string encode_message(std::span<const std::uint8_t> payload) {
  std::string code;
  code.reserve(payload.size() * 2 + 1);
  for (std::uint8_t b : payload) {
    code.push_back(static_cast<char>('a' + (b >> 4)));
    code.push_back(static_cast<char>('a' + (b & 0x0f)));
  }
  code.push_back(kTerminatorLetter);
  return code;
}

/// Picks one title per code letter with a seeded mt19937_64. A title never
/// repeats on the next line when its bucket offers an alternative.
inline ListCover generate_cover(std::span<const std::uint8_t> payload, const SongBank& bank, std::uint64_t seed) {
  const std::string missing = bank.missing_letters();
  if (!missing.empty()) throw Error(ErrorCode::InadequateBank, "no titles for letters {" + missing + "}");
  std::mt19937_64 rng(seed);
  ListCover cover;
  std::optional<std::size_t> previous;
  for (char letter : encode_message(payload)) {
    const auto bucket = bank.bucket(letter);
    std::size_t pick = static_cast<std::size_t>(rng() % bucket.size());
    if (bucket.size() > 1 && previous && bucket[pick] == *previous) pick = (pick + 1) % bucket.size();
    previous = bucket[pick];
    cover.lines.push_back(bank.entries()[bucket[pick]]);
  }
  return cover;
}

inline std::vector<std::uint8_t> decode_cover(const ListCover& cover) {
  std::vector<std::uint8_t> out;
  std::optional<int> high;
  for (std::size_t i = 0; i < cover.lines.size(); ++i) {
    const auto initial = title_initial(cover.lines[i]);
    if (initial == kTerminatorLetter) {
      if (high) throw Error(ErrorCode::OddNibbleCount, "terminator follows an unpaired letter");
      return out;
    }
    if (!initial || *initial < 'a' || *initial > 'p') {
      throw Error(ErrorCode::InvalidCodeLetter, "line " + std::to_string(i + 1) + " '" + cover.lines[i] +
                                                    "' does not start with a code letter");
    }
    const int nibble = *initial - 'a';
    if (high) {
      out.push_back(static_cast<std::uint8_t>((*high << 4) | nibble));
      high.reset();
    } else {
      high = nibble;
    }
  }
  throw Error(ErrorCode::MissingTerminator, "cover has no terminating title");
}

inline ListCover read_cover(const std::filesystem::path& path) { return {detail::read_lines(path, false)}; }

inline std::string format_cover(const ListCover& cover) {
  std::string s;
  for (const auto& l : cover.lines) s += l + "\n";
  return s;
}

}  // namespace biostego
