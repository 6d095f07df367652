#pragma once

// Straight-line detection with the progressive probabilistic Hough transform
// and the low-level rectangular grid built from the extended lines.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "newsfmt/error.hpp"
#include "newsfmt/geometry.hpp"
#include "newsfmt/image.hpp"
#include "newsfmt/imaging.hpp"

namespace newsfmt {

struct Point {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(const Point&, const Point&) = default;
};

struct LineSegment {
  Point p0;
  Point p1;

  [[nodiscard]] double length() const noexcept {
    return std::hypot(static_cast<double>(p1.x - p0.x), static_cast<double>(p1.y - p0.y));
  }
  /// Angle to the horizontal axis in degrees, in [0, 90].
  [[nodiscard]] double inclination() const noexcept {
    return std::atan2(std::abs(p1.y - p0.y), std::abs(p1.x - p0.x)) * 180.0 / std::numbers::pi;
  }
};

struct HoughConfig {
  int voteThreshold = 30;
  /// Zero means "derive from the frame": 0.2 * min(width, height).
  double minLineLength = 0.0;
  int maxGap = 5;
  double angleTolerance = 2.0;
  int coordinateClusterTolerance = 5;

  [[nodiscard]] HoughConfig resolvedFor(int width, int height) const {
    HoughConfig out = *this;
    if (out.minLineLength <= 0.0) out.minLineLength = 0.2 * std::min(width, height);
    return out;
  }

  void validate() const {
    require(voteThreshold > 0, "hough: voteThreshold must be positive");
    require(minLineLength > 0.0, "hough: minLineLength must be positive");
    require(maxGap > 0, "hough: maxGap must be positive");
    require(angleTolerance > 0.0 && angleTolerance < 45.0, "hough: angleTolerance must be in (0,45)");
    require(coordinateClusterTolerance > 0, "hough: coordinateClusterTolerance must be positive");
  }
};

/// Progressive probabilistic Hough transform over a binary edge map (non-zero
/// = edge). Accumulator resolution is 1 px in rho and 1 degree in theta.
///
/// Each iteration draws a random remaining pixel, votes with it and removes it
/// from the candidate pool. When the strongest accumulator cell it touched
/// reaches voteThreshold, the line through that pixel is walked in both
/// directions, tolerating up to maxGap consecutive missing pixels. Pixels on the
/// walked segment are removed from the image and any votes they cast are
/// withdrawn; the segment is kept when it is at least minLineLength long.
inline std::vector<LineSegment> ppht(const GrayImage& edges, const HoughConfig& cfg,
                                     std::uint64_t seed) {
  cfg.validate();
  const int width = edges.width();
  const int height = edges.height();
  if (edges.empty()) return {};

  constexpr int kAngles = 180;
  const int rhoCount = 2 * (width + height) + 1;
  const int rhoOffset = (rhoCount - 1) / 2;
  std::vector<double> cosTable(kAngles), sinTable(kAngles);
  for (int n = 0; n < kAngles; ++n) {
    const double theta = n * std::numbers::pi / kAngles;
    cosTable[n] = std::cos(theta);
    sinTable[n] = std::sin(theta);
  }

  const auto at = [width](int x, int y) { return static_cast<std::size_t>(y) * width + x; };
  std::vector<std::uint8_t> present(edges.size(), 0);
  std::vector<std::uint8_t> voted(edges.size(), 0);
  std::vector<Point> pending;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (edges(x, y) != 0) {
        present[at(x, y)] = 1;
        pending.push_back({x, y});
      }
    }
  }

  std::vector<int> accumulator(static_cast<std::size_t>(kAngles) * rhoCount, 0);
  const auto cell = [&](int n, Point p) {
    const auto r = std::lround(p.x * cosTable[n] + p.y * sinTable[n]) + rhoOffset;
    return static_cast<std::size_t>(n) * rhoCount + static_cast<std::size_t>(r);
  };
  const auto unvote = [&](Point p) {
    for (int n = 0; n < kAngles; ++n) --accumulator[cell(n, p)];
  };

  std::mt19937_64 rng(seed);
  std::vector<LineSegment> segments;

  while (!pending.empty()) {
    const std::size_t pick = static_cast<std::size_t>(rng() % pending.size());
    const Point seedPoint = pending[pick];
    pending[pick] = pending.back();
    pending.pop_back();
    if (!present[at(seedPoint.x, seedPoint.y)]) continue;  // already consumed by a segment

    int peak = -1;
    int peakAngle = 0;
    for (int n = 0; n < kAngles; ++n) {
      const int votes = ++accumulator[cell(n, seedPoint)];
      if (votes > peak) {
        peak = votes;
        peakAngle = n;
      }
    }
    voted[at(seedPoint.x, seedPoint.y)] = 1;
    if (peak < cfg.voteThreshold) continue;

    // Walk along the line direction (perpendicular to the normal).
    const double dirX = -sinTable[peakAngle];
    const double dirY = cosTable[peakAngle];
    const bool xMajor = std::abs(dirX) >= std::abs(dirY);
    const double stepX = xMajor ? (dirX > 0 ? 1.0 : -1.0) : dirX / std::abs(dirY);
    const double stepY = xMajor ? dirY / std::abs(dirX) : (dirY > 0 ? 1.0 : -1.0);
    const auto position = [&](int sign, int t) {
      return Point{static_cast<int>(std::floor(seedPoint.x + sign * t * stepX + 0.5)),
                   static_cast<int>(std::floor(seedPoint.y + sign * t * stepY + 0.5))};
    };

    std::array<int, 2> lastStep{0, 0};
    std::array<Point, 2> ends{seedPoint, seedPoint};
    for (int k = 0; k < 2; ++k) {
      const int sign = k == 0 ? 1 : -1;
      int gap = 0;
      for (int t = 1;; ++t) {
        const Point p = position(sign, t);
        if (!edges.contains(p.x, p.y)) break;
        if (present[at(p.x, p.y)]) {
          gap = 0;
          lastStep[k] = t;
          ends[k] = p;
        } else if (++gap > cfg.maxGap) {
          break;
        }
      }
    }

    for (int k = 0; k < 2; ++k) {
      const int sign = k == 0 ? 1 : -1;
      for (int t = k == 0 ? 0 : 1; t <= lastStep[k]; ++t) {
        const Point p = position(sign, t);
        const std::size_t i = at(p.x, p.y);
        if (!present[i]) continue;
        present[i] = 0;
        if (voted[i]) {
          unvote(p);
          voted[i] = 0;
        }
      }
    }

    LineSegment segment{ends[1], ends[0]};
    if (segment.length() >= cfg.minLineLength) segments.push_back(segment);
  }
  return segments;
}

/// Binary edge map (values 0/1): normalized Scharr magnitude of the gray frame
/// at or above `binarizeThreshold`.
inline GrayImage detectEdges(const FrameImage& frame, double binarizeThreshold) {
  const FloatImage magnitude = scharrMagnitude(toGray(frame));
  GrayImage out(frame.width(), frame.height(), 0);
  std::ranges::transform(magnitude.pixels(), out.pixels().begin(), [&](double m) {
    return static_cast<std::uint8_t>(m >= binarizeThreshold ? 1 : 0);
  });
  return out;
}

struct CutSet {
  std::vector<int> xCuts;
  std::vector<int> yCuts;
};

namespace detail {

inline std::vector<int> clusterCuts(std::vector<double> values, int extent, int tolerance) {
  std::ranges::sort(values);
  std::vector<int> cuts{0};
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i + 1;
    double sum = values[i];
    while (j < values.size() && values[j] - values[j - 1] < tolerance) sum += values[j++];
    const double mean = sum / static_cast<double>(j - i);
    // Clusters within tolerance of a frame border collapse onto that border.
    if (mean >= tolerance && mean <= extent - tolerance) {
      const int cut = static_cast<int>(std::lround(mean));
      if (cut > cuts.back() && cut < extent) cuts.push_back(cut);
    }
    i = j;
  }
  cuts.push_back(extent);
  return cuts;
}

}  // namespace detail

/// Extends near-axis-aligned segments across the whole frame and quantizes
/// them to cut coordinates. Oblique segments are ignored. Cuts are strictly
/// increasing and always include 0 and the frame extent.
inline CutSet extendAndQuantize(const std::vector<LineSegment>& lines, int width, int height,
                                const HoughConfig& cfg) {
  require(width > 0 && height > 0, "extendAndQuantize: empty frame");
  std::vector<double> xs, ys;
  for (const auto& line : lines) {
    const double angle = line.inclination();
    if (angle <= cfg.angleTolerance) {
      ys.push_back((line.p0.y + line.p1.y) / 2.0);
    } else if (angle >= 90.0 - cfg.angleTolerance) {
      xs.push_back((line.p0.x + line.p1.x) / 2.0);
    }
  }
  return {detail::clusterCuts(std::move(xs), width, cfg.coordinateClusterTolerance),
          detail::clusterCuts(std::move(ys), height, cfg.coordinateClusterTolerance)};
}

struct BandGrid {
  std::vector<int> xCuts;
  std::vector<int> yCuts;
  std::vector<Band> cells;  // row-major, (|xCuts|-1) * (|yCuts|-1)

  [[nodiscard]] int width() const { return xCuts.empty() ? 0 : xCuts.back(); }
  [[nodiscard]] int height() const { return yCuts.empty() ? 0 : yCuts.back(); }
  [[nodiscard]] int columns() const { return static_cast<int>(xCuts.size()) - 1; }
  [[nodiscard]] int rows() const { return static_cast<int>(yCuts.size()) - 1; }
};

inline BandGrid generateBands(const std::vector<int>& xCuts, const std::vector<int>& yCuts) {
  require(xCuts.size() >= 2 && yCuts.size() >= 2, "generateBands: need at least two cuts per axis");
  require(xCuts.front() == 0 && yCuts.front() == 0, "generateBands: cuts must start at 0");
  require(std::ranges::adjacent_find(xCuts, std::greater_equal<>{}) == xCuts.end() &&
              std::ranges::adjacent_find(yCuts, std::greater_equal<>{}) == yCuts.end(),
          "generateBands: cuts must be strictly increasing");
  BandGrid grid{xCuts, yCuts, {}};
  grid.cells.reserve((xCuts.size() - 1) * (yCuts.size() - 1));
  for (std::size_t r = 0; r + 1 < yCuts.size(); ++r) {
    for (std::size_t c = 0; c + 1 < xCuts.size(); ++c) {
      grid.cells.push_back(Band{xCuts[c], yCuts[r], xCuts[c + 1] - xCuts[c],
                                yCuts[r + 1] - yCuts[r], BandLabel::unlabeled, Provenance::grid});
    }
  }
  return grid;
}

struct BandDetection {
  std::vector<LineSegment> lines;
  BandGrid grid;
};

/// Edges -> PPHT -> extension -> grid, with minLineLength resolved for the frame.
inline BandDetection detectBands(const FrameImage& frame, const HoughConfig& config,
                                 double binarizeThreshold, std::uint64_t seed) {
  require(!frame.empty(), "detectBands: empty frame");
  const HoughConfig cfg = config.resolvedFor(frame.width(), frame.height());
  BandDetection out;
  out.lines = ppht(detectEdges(frame, binarizeThreshold), cfg, seed);
  const CutSet cuts = extendAndQuantize(out.lines, frame.width(), frame.height(), cfg);
  out.grid = generateBands(cuts.xCuts, cuts.yCuts);
  return out;
}

}  // namespace newsfmt
