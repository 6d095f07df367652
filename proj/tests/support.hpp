#pragma once

// Fixtures and independent oracles shared by the unit tests and the
// acceptance harness.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "newsfmt/band_detection.hpp"
#include "newsfmt/classifier.hpp"
#include "newsfmt/geometry.hpp"
#include "newsfmt/image.hpp"

namespace newsfmt::fixtures {

/// True when a pixel of `other` lies 2..8 px beyond an end of `line` along its
/// axis. PPHT bridges such gaps, so the planted endpoint would be ambiguous.
inline bool endNearLine(const LineSegment& line, const LineSegment& other) {
  const auto onOther = [&](int x, int y) {
    return x >= std::min(other.p0.x, other.p1.x) && x <= std::max(other.p0.x, other.p1.x) &&
           y >= std::min(other.p0.y, other.p1.y) && y <= std::max(other.p0.y, other.p1.y);
  };
  const bool horizontal = line.p0.y == line.p1.y;
  for (int d = 2; d <= 8; ++d) {
    if (horizontal) {
      const int y = line.p0.y;
      if (onOther(std::min(line.p0.x, line.p1.x) - d, y) || onOther(std::max(line.p0.x, line.p1.x) + d, y)) return true;
    } else {
      const int x = line.p0.x;
      if (onOther(x, std::min(line.p0.y, line.p1.y) - d) || onOther(x, std::max(line.p0.y, line.p1.y) + d)) return true;
    }
  }
  return false;
}

/// Axis-aligned lines of set pixels: horizontal lines keep >= 12 px from
/// other horizontal lines and from the frame border, likewise vertical ones;
/// no line ends just short of another.
inline std::vector<LineSegment> plantLines(std::mt19937_64& rng, int width, int height, int count) {
  std::vector<LineSegment> out;
  std::vector<int> rows, cols;
  const auto farFrom = [](const std::vector<int>& used, int v) {
    return std::ranges::all_of(used, [v](int u) { return std::abs(u - v) >= 12; });
  };
  while (static_cast<int>(out.size()) < count) {
    const bool horizontal = rng() % 2 == 0;
    const int extent = horizontal ? width : height;
    const int across = horizontal ? height : width;
    const int pos = 12 + static_cast<int>(rng() % static_cast<std::uint64_t>(across - 24));
    auto& used = horizontal ? rows : cols;
    if (!farFrom(used, pos)) continue;
    const int minLen = extent / 2;
    const int len = minLen + static_cast<int>(rng() % static_cast<std::uint64_t>(extent - minLen + 1));
    const int start = static_cast<int>(rng() % static_cast<std::uint64_t>(extent - len + 1));
    const LineSegment candidate = horizontal ? LineSegment{{start, pos}, {start + len - 1, pos}}
                                             : LineSegment{{pos, start}, {pos, start + len - 1}};
    if (std::ranges::any_of(out, [&](const LineSegment& o) {
          return endNearLine(candidate, o) || endNearLine(o, candidate);
        }))
      continue;
    used.push_back(pos);
    out.push_back(candidate);
  }
  return out;
}

inline GrayImage rasterizeLines(int width, int height, const std::vector<LineSegment>& lines) {
  GrayImage img(width, height, 0);
  for (const auto& l : lines) {
    for (int y = std::min(l.p0.y, l.p1.y); y <= std::max(l.p0.y, l.p1.y); ++y)
      for (int x = std::min(l.p0.x, l.p1.x); x <= std::max(l.p0.x, l.p1.x); ++x) img(x, y) = 1;
  }
  return img;
}

/// Endpoint error of `found` against `truth`, trying both orientations.
inline double endpointError(const LineSegment& found, const LineSegment& truth) {
  const auto d = [](Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); };
  return std::min(std::max(d(found.p0, truth.p0), d(found.p1, truth.p1)),
                  std::max(d(found.p0, truth.p1), d(found.p1, truth.p0)));
}

/// Set pixels within one pixel of the digital segment between the endpoints.
inline int supportingPixels(const GrayImage& edges, const LineSegment& s) {
  const int steps = std::max(std::abs(s.p1.x - s.p0.x), std::abs(s.p1.y - s.p0.y));
  int count = 0;
  for (int t = 0; t <= steps; ++t) {
    const double f = steps == 0 ? 0.0 : static_cast<double>(t) / steps;
    const int x = static_cast<int>(std::lround(s.p0.x + f * (s.p1.x - s.p0.x)));
    const int y = static_cast<int>(std::lround(s.p0.y + f * (s.p1.y - s.p0.y)));
    bool hit = false;
    for (int dy = -1; dy <= 1 && !hit; ++dy)
      for (int dx = -1; dx <= 1 && !hit; ++dx) hit = edges.contains(x + dx, y + dy) && edges(x + dx, y + dy) != 0;
    count += hit ? 1 : 0;
  }
  return count;
}

/// Text stripe whose strokes span the whole rectangle: full-height stems 2 px
/// wide with 2-3 px spacing, one or two horizontal bars per glyph, word gaps of
/// at most 8 px, the last stem flush with the right edge.
inline void paintDenseStripe(FrameImage& img, const Band& r, Rgb fg, std::mt19937_64& rng) {
  const auto fill = [&](int x0, int y0, int w, int h) {
    for (int y = y0; y < std::min(y0 + h, r.bottom()); ++y)
      for (int x = x0; x < std::min(x0 + w, r.right()); ++x) img(x, y) = fg;
  };
  int x = r.x;
  int word = 0;
  while (x + 2 <= r.right()) {
    const int gw = 5 + static_cast<int>(rng() % 4);
    fill(x, r.y, 2, r.h);
    fill(std::min(x + gw - 2, r.right() - 2), r.y, 2, r.h);
    fill(x, r.y + static_cast<int>(rng() % static_cast<std::uint64_t>(r.h - 2)), gw, 2);
    if (rng() % 2 == 0) fill(x, r.y + static_cast<int>(rng() % static_cast<std::uint64_t>(r.h - 2)), gw, 2);
    x += gw + 2 + static_cast<int>(rng() % 2);
    if (++word % 5 == 0) x += 4 + static_cast<int>(rng() % 5);
  }
  fill(r.right() - 2, r.y, 2, r.h);
}

/// Two isotropic 2-D Gaussian blobs (sigma 1) whose centres are
/// `separation` apart; graphics at the origin, natural on the x axis.
inline TrainingSet gaussianBlobs(std::mt19937_64& rng, int perClass, double separation) {
  std::normal_distribution<double> n(0.0, 1.0);
  TrainingSet set;
  for (int i = 0; i < perClass; ++i) {
    set.samples.push_back({{n(rng), n(rng)}, ImageClass::graphics});
    set.samples.push_back({{separation + n(rng), n(rng)}, ImageClass::natural});
  }
  return set;
}

/// Seeded shuffle, then the first `fraction` of samples for training.
inline std::pair<TrainingSet, TrainingSet> splitHoldout(TrainingSet all, double fraction, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::shuffle(all.samples.begin(), all.samples.end(), rng);
  const auto cut = static_cast<std::ptrdiff_t>(fraction * static_cast<double>(all.samples.size()));
  TrainingSet train, test;
  train.samples.assign(all.samples.begin(), all.samples.begin() + cut);
  test.samples.assign(all.samples.begin() + cut, all.samples.end());
  return {train, test};
}

/// ||H beta - T|| / ||T|| on the model's own training set.
inline double trainingResidual(const ElmModel& model, const TrainingSet& data) {
  const Eigen::MatrixXd x = detail::toMatrix(data);
  const Eigen::MatrixXd h = hiddenLayerOutput(model, detail::standardize(model, x));
  Eigen::MatrixXd t = Eigen::MatrixXd::Constant(x.rows(), kClassCount, -1.0);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    t(i, static_cast<Eigen::Index>(data.samples[static_cast<std::size_t>(i)].label)) = 1.0;
  return (h * model.outputWeights - t).norm() / t.norm();
}

inline double pinvResidual(const Eigen::MatrixXd& h) {
  return (h * pseudoinverse(h) * h - h).norm() / h.norm();
}

struct HoughPeak {
  int theta = 0;  // degrees
  int rho = 0;
  int votes = 0;
};

/// Standard (exhaustive) Hough transform: every set pixel votes in every
/// 1-degree angle, peak returned.
inline HoughPeak standardHoughPeak(const GrayImage& edges) {
  const int diag = edges.width() + edges.height();
  std::vector<int> acc(180 * (2 * diag + 1), 0);
  HoughPeak best;
  for (int y = 0; y < edges.height(); ++y) {
    for (int x = 0; x < edges.width(); ++x) {
      if (edges(x, y) == 0) continue;
      for (int n = 0; n < 180; ++n) {
        const double th = n * std::numbers::pi / 180.0;
        const int r = static_cast<int>(std::lround(x * std::cos(th) + y * std::sin(th)));
        const int v = ++acc[n * (2 * diag + 1) + r + diag];
        if (v > best.votes) best = {n, r, v};
      }
    }
  }
  return best;
}

/// Pixel-raster intersection-over-union of two rectangles.
inline double rasterIou(const Band& a, const Band& b) {
  const int x0 = std::min(a.x, b.x), y0 = std::min(a.y, b.y);
  const int x1 = std::max(a.right(), b.right()), y1 = std::max(a.bottom(), b.bottom());
  std::int64_t inter = 0, uni = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const bool ia = x >= a.x && x < a.right() && y >= a.y && y < a.bottom();
      const bool ib = x >= b.x && x < b.right() && y >= b.y && y < b.bottom();
      inter += (ia && ib) ? 1 : 0;
      uni += (ia || ib) ? 1 : 0;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Exact partition check by painting every pixel's owner count.
inline bool pixelPartition(const FormatProfile& p) {
  std::vector<int> owners(static_cast<std::size_t>(p.width) * p.height, 0);
  for (const Band& b : p.bands) {
    if (b.w <= 0 || b.h <= 0 || b.x < 0 || b.y < 0 || b.right() > p.width || b.bottom() > p.height) return false;
    for (int y = b.y; y < b.bottom(); ++y)
      for (int x = b.x; x < b.right(); ++x) ++owners[static_cast<std::size_t>(y) * p.width + x];
  }
  return std::ranges::all_of(owners, [](int c) { return c == 1; });
}

}  // namespace newsfmt::fixtures
