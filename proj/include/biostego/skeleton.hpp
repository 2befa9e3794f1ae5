#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "biostego/image.hpp"

namespace biostego {

/// Unit-width ridge map. Bit 1 = ridge pixel (note: inverted relative to
/// BinaryImage). `labels` holds 8-connected component ids 1..ridge_count,
/// 0 for background; it is empty until label_ridges runs.
struct Skeleton {
  RoiMask bits;
  std::vector<int> labels;
  int ridge_count = 0;

  Skeleton() = default;
  explicit Skeleton(RoiMask b) : bits(std::move(b)) {}

  int width() const noexcept { return bits.width(); }
  int height() const noexcept { return bits.height(); }
  bool at(int x, int y) const noexcept { return bits.get_or(x, y, 0) != 0; }
  int label(int x, int y) const noexcept {
    return labels.empty() || !bits.contains(x, y) ? 0 : labels[bits.index(x, y)];
  }
  bool labeled() const noexcept { return labels.size() == bits.size(); }
};

struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel& a, const Pixel& b) {
    return a.y != b.y ? a.y <=> b.y : a.x <=> b.x;
  }
};

/// Clockwise ring starting north: N, NE, E, SE, S, SW, W, NW.
/// Even indices are the 4-neighbours.
inline constexpr std::array<std::pair<int, int>, 8> kRing{{
    {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}}};

template <typename Pred>
std::array<bool, 8> ring_of(int x, int y, Pred&& set) {
  std::array<bool, 8> r{};
  for (std::size_t i = 0; i < 8; ++i) r[i] = set(x + kRing[i].first, y + kRing[i].second);
  return r;
}

inline int neighbor_count(const std::array<bool, 8>& r) {
  int n = 0;
  for (bool b : r) n += b ? 1 : 0;
  return n;
}

/// Number of 0 -> 1 transitions around the ring.
inline int crossing_number(const std::array<bool, 8>& r) {
  int n = 0;
  for (std::size_t i = 0; i < 8; ++i) n += (!r[i] && r[(i + 1) % 8]) ? 1 : 0;
  return n;
}

/// Yokoi connectivity number for 8-connected foreground. A set pixel with
/// value 1 can be deleted without changing the topology.
inline int connectivity8(const std::array<bool, 8>& r) {
  int c = 0;
  for (std::size_t k = 0; k < 8; k += 2) {
    const bool a = !r[k], b = !r[(k + 1) % 8], d = !r[(k + 2) % 8];
    c += (a ? 1 : 0) - ((a && b && d) ? 1 : 0);
  }
  return c;
}

inline int neighbor_count(const Skeleton& s, int x, int y) {
  return neighbor_count(ring_of(x, y, [&](int u, int v) { return s.at(u, v); }));
}

inline int crossing_number(const Skeleton& s, int x, int y) {
  return crossing_number(ring_of(x, y, [&](int u, int v) { return s.at(u, v); }));
}

/// True if some 2x2 window has all four pixels set.
inline bool has_full_2x2(const RoiMask& bits) {
  for (int y = 0; y + 1 < bits.height(); ++y) {
    for (int x = 0; x + 1 < bits.width(); ++x) {
      if (bits(x, y) && bits(x + 1, y) && bits(x, y + 1) && bits(x + 1, y + 1)) return true;
    }
  }
  return false;
}

// ------------------------------------------------------------ labeling

/// 8-connected component labeling; ids are dense 1..K in raster order of
/// each component's first pixel.
inline Skeleton label_ridges(Skeleton skel) {
  const int w = skel.width();
  const int h = skel.height();
  skel.labels.assign(skel.bits.size(), 0);
  int next = 0;
  std::vector<Pixel> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!skel.bits(x, y) || skel.labels[skel.bits.index(x, y)] != 0) continue;
      ++next;
      skel.labels[skel.bits.index(x, y)] = next;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (const auto& [dx, dy] : kRing) {
          const int u = p.x + dx, v = p.y + dy;
          if (!skel.at(u, v)) continue;
          int& l = skel.labels[skel.bits.index(u, v)];
          if (l == 0) {
            l = next;
            stack.push_back({u, v});
          }
        }
      }
    }
  }
  skel.ridge_count = next;
  return skel;
}

inline int count_components(const RoiMask& bits) { return label_ridges(Skeleton(bits)).ridge_count; }

// ------------------------------------------------------------ thinning

namespace detail {

// One directional sub-iteration: gather border pixels facing `dir`, then
// delete them one by one, re-testing each against the current state. Deleting
// only simple, non-end pixels sequentially preserves 8-connected topology.
inline bool thin_pass(RoiMask& bits, std::size_t dir) {
  auto set = [&](int u, int v) { return bits.get_or(u, v, 0) != 0; };
  auto deletable = [&](int x, int y) {
    const auto r = ring_of(x, y, set);
    return neighbor_count(r) >= 2 && connectivity8(r) == 1;
  };
  std::vector<Pixel> candidates;
  for (int y = 0; y < bits.height(); ++y) {
    for (int x = 0; x < bits.width(); ++x) {
      if (!bits(x, y) || set(x + kRing[dir].first, y + kRing[dir].second)) continue;
      if (deletable(x, y)) candidates.push_back({x, y});
    }
  }
  bool changed = false;
  for (const Pixel& p : candidates) {
    if (deletable(p.x, p.y)) {
      bits(p.x, p.y) = 0;
      changed = true;
    }
  }
  return changed;
}

inline bool full_2x2_at(const RoiMask& bits, int x, int y) {
  return bits.get_or(x, y, 0) && bits.get_or(x + 1, y, 0) && bits.get_or(x, y + 1, 0) && bits.get_or(x + 1, y + 1, 0);
}

inline bool touches_full_2x2(const RoiMask& bits, int x, int y) {
  return full_2x2_at(bits, x - 1, y - 1) || full_2x2_at(bits, x, y - 1) || full_2x2_at(bits, x - 1, y) ||
         full_2x2_at(bits, x, y);
}

// A 2x2 block whose four pixels each carry a separate diagonal arm has no
// simple pixel left. Shift one corner outward instead: add a simple
// background neighbour q, then delete the now simple corner p. Both steps
// are simple-point moves, so topology is kept. Returns false if no block
// could be shifted; as a last resort one corner is then deleted outright.
inline bool untangle_2x2(RoiMask& bits) {
  auto set = [&](int u, int v) { return bits.get_or(u, v, 0) != 0; };
  bool any = false;
  for (int y = 0; y + 1 < bits.height(); ++y) {
    for (int x = 0; x + 1 < bits.width(); ++x) {
      if (!full_2x2_at(bits, x, y)) continue;
      bool done = false;
      for (int c = 0; c < 4 && !done; ++c) {
        const Pixel p{x + (c & 1), y + (c >> 1)};
        for (const auto& [dx, dy] : kRing) {
          const Pixel q{p.x + dx, p.y + dy};
          if (!bits.contains(q.x, q.y) || set(q.x, q.y)) continue;
          if (connectivity8(ring_of(q.x, q.y, set)) != 1) continue;
          bits(q.x, q.y) = 1;
          if (connectivity8(ring_of(p.x, p.y, set)) == 1) {
            bits(p.x, p.y) = 0;
            if (!touches_full_2x2(bits, q.x, q.y)) {
              done = true;
              break;
            }
            bits(p.x, p.y) = 1;
          }
          bits(q.x, q.y) = 0;
        }
      }
      if (!done) bits(x, y) = 0;
      any = true;
    }
  }
  return any;
}

}  // namespace detail

/// Thins a 0 = ridge binary map to a unit-width skeleton (1 = ridge) by
/// repeated north/south/east/west boundary peeling until nothing changes.
inline Skeleton thin(const BinaryImage& binary) {
  RoiMask bits(binary.width(), binary.height());
  for (std::size_t i = 0; i < binary.size(); ++i) bits.pixels()[i] = binary.pixels()[i] == 0 ? 1 : 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t dir : {0u, 4u, 2u, 6u}) changed = detail::thin_pass(bits, dir) || changed;
    if (!changed) changed = detail::untangle_2x2(bits);
  }
  return Skeleton(std::move(bits));
}

/// Inverse of the bit convention used by thin(): ridge pixels become 0.
inline BinaryImage to_binary(const Skeleton& skel) {
  BinaryImage out(skel.width(), skel.height());
  for (std::size_t i = 0; i < out.size(); ++i) out.pixels()[i] = skel.bits.pixels()[i] ? 0 : 1;
  return out;
}

// ------------------------------------------------------------ ridge walking

/// Ordered pixels of a ridge walk, with the cumulative path length at each
/// pixel (steps count 1 or sqrt 2).
struct RidgeWalk {
  std::vector<Pixel> pixels;
  std::vector<double> length;
};

/// Follows a ridge from `start` without branching. `blocked` pixels are never
/// entered. The walk stops after entering a junction (crossing number >= 3),
/// at a ridge end, or once the path length reaches `max_length`.
inline RidgeWalk walk_ridge(const Skeleton& skel, Pixel start, double max_length,
                            const std::vector<Pixel>& blocked = {}) {
  RidgeWalk walk;
  if (!skel.at(start.x, start.y)) return walk;
  const int w = skel.width();
  std::vector<std::uint8_t> visited(skel.bits.size(), 0);
  auto mark = [&](Pixel p) {
    if (skel.bits.contains(p.x, p.y)) visited[static_cast<std::size_t>(p.y) * w + p.x] = 1;
  };
  auto seen = [&](Pixel p) { return visited[static_cast<std::size_t>(p.y) * w + p.x] != 0; };
  for (const Pixel& b : blocked) mark(b);
  mark(start);
  walk.pixels.push_back(start);
  walk.length.push_back(0.0);

  Pixel cur = start;
  double len = 0.0;
  while (len < max_length) {
    std::vector<Pixel> cands;
    for (const auto& [dx, dy] : kRing) {
      const Pixel p{cur.x + dx, cur.y + dy};
      if (skel.at(p.x, p.y) && !seen(p)) cands.push_back(p);
    }
    if (cands.empty()) break;
    auto adjacent_to_cur = [&](Pixel q) { return std::abs(q.x - cur.x) <= 1 && std::abs(q.y - cur.y) <= 1; };
    // A junction among the candidates ends the walk there.
    const Pixel* next = nullptr;
    for (const Pixel& c : cands) {
      if (crossing_number(skel, c.x, c.y) >= 3) {
        next = &c;
        break;
      }
    }
    bool stop = next != nullptr;
    if (!next) {
      // Prefer the candidate the ridge continues from; among those, 4-adjacent first.
      auto continues = [&](const Pixel& c) {
        for (const auto& [dx, dy] : kRing) {
          const Pixel q{c.x + dx, c.y + dy};
          if (skel.at(q.x, q.y) && !seen(q) && !adjacent_to_cur(q) && !(q == cur)) return true;
        }
        return false;
      };
      for (int pass = 0; pass < 4 && !next; ++pass) {
        for (const Pixel& c : cands) {
          const bool four = c.x == cur.x || c.y == cur.y;
          const bool cont = continues(c);
          if ((pass == 0 && cont && four) || (pass == 1 && cont) || (pass == 2 && four) || pass == 3) {
            next = &c;
            break;
          }
        }
      }
    }
    for (const Pixel& c : cands) mark(c);
    const Pixel chosen = *next;
    len += (chosen.x == cur.x || chosen.y == cur.y) ? 1.0 : std::numbers::sqrt2;
    walk.pixels.push_back(chosen);
    walk.length.push_back(len);
    cur = chosen;
    if (stop) break;
  }
  return walk;
}

// ------------------------------------------------------------ cleanup

namespace detail {

inline bool is_h_bridge(const Skeleton& s, int x, int y) {
  auto b = [&](int dx, int dy) { return s.at(x + dx, y + dy); };
  // Two vertical strokes joined by the centre, or two horizontal strokes.
  const bool vertical = b(-1, -1) && b(-1, 0) && b(-1, 1) && b(1, -1) && b(1, 0) && b(1, 1) && !b(0, -1) && !b(0, 1);
  const bool horizontal = b(-1, -1) && b(0, -1) && b(1, -1) && b(-1, 1) && b(0, 1) && b(1, 1) && !b(-1, 0) && !b(1, 0);
  return vertical || horizontal;
}

}  // namespace detail

/// Removes isolated pixels, H-bridge pixels whose removal keeps the ridge
/// count, and open-ended spurs of at most `spur_iterations` pixels that hang
/// off a junction. Returns a labeled skeleton.
inline Skeleton clean_skeleton(Skeleton skel, int spur_iterations) {
  const int w = skel.width();
  const int h = skel.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (skel.bits(x, y) && neighbor_count(skel, x, y) == 0) skel.bits(x, y) = 0;
    }
  }

  int components = count_components(skel.bits);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!skel.bits(x, y) || !detail::is_h_bridge(skel, x, y)) continue;
      skel.bits(x, y) = 0;
      if (count_components(skel.bits) != components) skel.bits(x, y) = 1;
    }
  }

  if (spur_iterations > 0) {
    std::vector<Pixel> doomed;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!skel.bits(x, y) || neighbor_count(skel, x, y) != 1) continue;
        const RidgeWalk walk = walk_ridge(skel, {x, y}, static_cast<double>(spur_iterations) * 2.0);
        // Walk pixels before the junction form the branch.
        std::size_t branch = 0;
        bool hit_junction = false;
        for (std::size_t i = 1; i < walk.pixels.size(); ++i) {
          if (crossing_number(skel, walk.pixels[i].x, walk.pixels[i].y) >= 3) {
            branch = i;
            hit_junction = true;
            break;
          }
        }
        if (hit_junction && branch <= static_cast<std::size_t>(spur_iterations)) {
          doomed.insert(doomed.end(), walk.pixels.begin(), walk.pixels.begin() + static_cast<std::ptrdiff_t>(branch));
        }
      }
    }
    for (const Pixel& p : doomed) skel.bits(p.x, p.y) = 0;
  }
  return label_ridges(std::move(skel));
}

}  // namespace biostego
