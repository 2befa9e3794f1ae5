#pragma once

// Slow, direct reference implementations the library is checked against.
// None of them reuse library code beyond the value types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <numbers>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "biostego/image.hpp"
#include "biostego/matching.hpp"

namespace oracle {

using biostego::RoiMask;

/// O(N^4) DFT, multiply by |F|^k, inverse DFT, real part, affine rescale to
/// the source min/max, round half up, clamp.
inline std::vector<int> enhance_block(const std::vector<double>& f, int n, double k) {
  using cd = std::complex<double>;
  const double tau = 2.0 * std::numbers::pi;
  // e^{-i tau m / n}; every exponent below reduces to one of these.
  std::vector<cd> w(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) w[static_cast<std::size_t>(m)] = std::polar(1.0, -tau * m / n);
  auto twiddle = [&](int m, bool inverse) {
    const cd t = w[static_cast<std::size_t>(((m % n) + n) % n)];
    return inverse ? std::conj(t) : t;
  };
  std::vector<cd> F(static_cast<std::size_t>(n) * n);
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) {
      cd acc = 0.0;
      for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) acc += f[static_cast<std::size_t>(y) * n + x] * twiddle(u * x + v * y, false);
      }
      F[static_cast<std::size_t>(v) * n + u] = acc * std::pow(std::abs(acc), k);
    }
  }
  std::vector<double> g(F.size());
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      cd acc = 0.0;
      for (int v = 0; v < n; ++v) {
        for (int u = 0; u < n; ++u) acc += F[static_cast<std::size_t>(v) * n + u] * twiddle(u * x + v * y, true);
      }
      g[static_cast<std::size_t>(y) * n + x] = acc.real() / (double(n) * n);
    }
  }
  const auto [fmin, fmax] = std::minmax_element(f.begin(), f.end());
  const auto [gmin, gmax] = std::minmax_element(g.begin(), g.end());
  std::vector<int> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double span = *gmax - *gmin;
    const double v = span > 0.0 ? *fmin + (g[i] - *gmin) * (*fmax - *fmin) / span : *fmin;
    out[i] = std::clamp(static_cast<int>(std::floor(v + 0.5)), 0, 255);
  }
  return out;
}

/// 8-connected component count by breadth-first flood fill.
inline int components(const RoiMask& m) {
  std::vector<char> seen(m.size(), 0);
  int count = 0;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m(x, y) || seen[m.index(x, y)]) continue;
      ++count;
      std::deque<std::pair<int, int>> q{{x, y}};
      seen[m.index(x, y)] = 1;
      while (!q.empty()) {
        auto [cx, cy] = q.front();
        q.pop_front();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int u = cx + dx, v = cy + dy;
            if (!m.contains(u, v) || !m(u, v) || seen[m.index(u, v)]) continue;
            seen[m.index(u, v)] = 1;
            q.push_back({u, v});
          }
        }
      }
    }
  }
  return count;
}

/// Flood-fill labels, 1..K in raster order of first pixel.
inline std::vector<int> labels(const RoiMask& m) {
  std::vector<int> lab(m.size(), 0);
  int next = 0;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m(x, y) || lab[m.index(x, y)]) continue;
      lab[m.index(x, y)] = ++next;
      std::deque<std::pair<int, int>> q{{x, y}};
      while (!q.empty()) {
        auto [cx, cy] = q.front();
        q.pop_front();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int u = cx + dx, v = cy + dy;
            if (!m.contains(u, v) || !m(u, v) || lab[m.index(u, v)]) continue;
            lab[m.index(u, v)] = next;
            q.push_back({u, v});
          }
        }
      }
    }
  }
  return lab;
}

struct Mark {
  int x, y;
  bool fork;
  friend auto operator<=>(const Mark&, const Mark&) = default;
};

/// Per-pixel neighbour counting, then touching fork candidates grouped by
/// flood fill; each group keeps its first raster pixel whose ring shows three
/// or more separate runs, otherwise its first pixel.
inline std::vector<Mark> marks(const RoiMask& m, int margin) {
  auto at = [&](int x, int y) { return m.contains(x, y) && m(x, y) != 0; };
  auto count = [&](int x, int y) {
    int n = 0;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) n += (dx || dy) && at(x + dx, y + dy);
    return n;
  };
  auto runs = [&](int x, int y) {
    const int ring[8][2] = {{0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}};
    int r = 0;
    for (int i = 0; i < 8; ++i) r += !at(x + ring[i][0], y + ring[i][1]) && at(x + ring[(i + 1) % 8][0], y + ring[(i + 1) % 8][1]);
    return r;
  };
  std::vector<Mark> out;
  std::set<std::pair<int, int>> forks;  // (y, x) for raster order
  for (int y = margin; y < m.height() - margin; ++y) {
    for (int x = margin; x < m.width() - margin; ++x) {
      if (!at(x, y)) continue;
      const int n = count(x, y);
      if (n == 1) out.push_back({x, y, false});
      if (n == 3) forks.insert({y, x});
    }
  }
  std::set<std::pair<int, int>> done;
  for (const auto& start : forks) {
    if (done.count(start)) continue;
    std::vector<std::pair<int, int>> group{start};
    done.insert(start);
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (const auto& other : forks) {
        if (done.count(other)) continue;
        if (std::abs(other.first - group[i].first) <= 1 && std::abs(other.second - group[i].second) <= 1) {
          done.insert(other);
          group.push_back(other);
        }
      }
    }
    std::sort(group.begin(), group.end());
    auto pick = group.front();
    for (const auto& g : group) {
      if (runs(g.second, g.first) >= 3) {
        pick = g;
        break;
      }
    }
    out.push_back({pick.second, pick.first, true});
  }
  std::sort(out.begin(), out.end(), [](const Mark& a, const Mark& b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
  return out;
}

/// Largest one-to-one pairing under the elastic tolerances, by exhaustive
/// search over template assignments (small sets only).
inline std::size_t max_pairing(const std::vector<biostego::AlignedMinutia>& t,
                               const std::vector<biostego::AlignedMinutia>& in, double r0, double theta0) {
  auto ok = [&](std::size_t i, std::size_t j) {
    const double d = std::hypot(t[i].x - in[j].x, t[i].y - in[j].y);
    double a = std::fmod(std::abs(t[i].theta - in[j].theta), 2.0 * std::numbers::pi);
    a = std::min(a, 2.0 * std::numbers::pi - a);
    return d <= r0 && a <= theta0;
  };
  std::vector<bool> used(in.size(), false);
  std::size_t best = 0;
  auto rec = [&](auto&& self, std::size_t i, std::size_t got) -> void {
    if (got + (t.size() - i) <= best) return;
    if (i == t.size()) {
      best = std::max(best, got);
      return;
    }
    for (std::size_t j = 0; j < in.size(); ++j) {
      if (used[j] || !ok(i, j)) continue;
      used[j] = true;
      self(self, i + 1, got + 1);
      used[j] = false;
    }
    self(self, i + 1, got);
  };
  rec(rec, 0, 0);
  return best;
}

// ------------------------------------------------------------ generators

/// Union of random filled discs and rectangles, plus a sprinkle of noise.
inline RoiMask random_blobs(std::mt19937_64& rng, int max_side = 32) {
  std::uniform_int_distribution<int> side(6, max_side);
  const int w = side(rng), h = side(rng);
  RoiMask m(w, h);
  std::uniform_int_distribution<int> shapes(1, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = shapes(rng);
  for (int s = 0; s < n; ++s) {
    const double cx = unit(rng) * w, cy = unit(rng) * h;
    const double rx = 1.5 + unit(rng) * w / 3.0, ry = 1.5 + unit(rng) * h / 3.0;
    const bool disc = unit(rng) < 0.5;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double dx = (x - cx) / rx, dy = (y - cy) / ry;
        if (disc ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0) m(x, y) = 1;
      }
    }
  }
  for (auto& p : m.pixels()) {
    if (unit(rng) < 0.03) p = static_cast<std::uint8_t>(1 - p);
  }
  return m;
}

/// Random 8-connected polylines drawn one pixel wide with no 2x2 block.
inline RoiMask random_skeleton(std::mt19937_64& rng, int max_side = 16) {
  std::uniform_int_distribution<int> side(5, max_side);
  const int w = side(rng), h = side(rng);
  RoiMask m(w, h);
  auto full = [&](int x, int y) {
    for (int oy = -1; oy <= 0; ++oy)
      for (int ox = -1; ox <= 0; ++ox) {
        const int a = x + ox, b = y + oy;
        if (m.contains(a, b) && m.contains(a + 1, b + 1) && m(a, b) && m(a + 1, b) && m(a, b + 1) && m(a + 1, b + 1))
          return true;
      }
    return false;
  };
  std::uniform_int_distribution<int> walks(1, 4), len(2, 2 * max_side), dir(0, 7), px(0, w - 1), py(0, h - 1);
  const int dirs[8][2] = {{0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}};
  const int n = walks(rng);
  for (int s = 0; s < n; ++s) {
    int x = px(rng), y = py(rng), d = dir(rng);
    const int steps = len(rng);
    for (int i = 0; i < steps; ++i) {
      if (!m.contains(x, y)) break;
      const std::uint8_t before = m(x, y);
      m(x, y) = 1;
      if (full(x, y)) m(x, y) = before;
      if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) d = (d + std::uniform_int_distribution<int>(-1, 1)(rng) + 8) % 8;
      x += dirs[d][0];
      y += dirs[d][1];
    }
  }
  return m;
}

/// Draws a list of (x, y) pixels into a blank mask.
inline RoiMask draw(int w, int h, const std::vector<std::pair<int, int>>& px) {
  RoiMask m(w, h);
  for (auto [x, y] : px) m(x, y) = 1;
  return m;
}

}  // namespace oracle
