#pragma once

// Text localization from projection profiles of a contrast-enhanced gradient
// map: Scharr magnitude -> linear contrast stretch -> histogram equalization ->
// row profile -> column profile inside each row band.

#include <algorithm>
#include <cmath>
#include <vector>

#include "newsfmt/error.hpp"
#include "newsfmt/geometry.hpp"
#include "newsfmt/image.hpp"
#include "newsfmt/imaging.hpp"

namespace newsfmt {

struct TextDetectorConfig {
  double alpha = 2.0;
  double hpThresholdFraction = 0.25;
  double vpThresholdFraction = 0.25;
  int minBandHeight = 8;
  int minRegionWidth = 8;
  /// Column runs separated by at most this many band heights of
  /// sub-threshold columns are joined (letter and word spacing).
  double vpGapFactor = 1.0;

  void validate() const {
    require(alpha > 0.0, "text: alpha must be positive");
    require(hpThresholdFraction > 0.0 && hpThresholdFraction <= 1.0,
            "text: hpThresholdFraction must be in (0,1]");
    require(vpThresholdFraction > 0.0 && vpThresholdFraction <= 1.0,
            "text: vpThresholdFraction must be in (0,1]");
    require(minBandHeight > 0, "text: minBandHeight must be positive");
    require(minRegionWidth > 0, "text: minRegionWidth must be positive");
    require(vpGapFactor >= 0.0, "text: vpGapFactor must be non-negative");
  }
};

/// Inclusive pixel interval [first, last].
struct Interval {
  int first = 0;
  int last = 0;
  [[nodiscard]] int length() const noexcept { return last - first + 1; }
  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

struct TextRegion {
  Band rect;  // label == text
};

/// beta = alpha * (m - 0.5) + 0.5; non-positive beta -> 0; positive beta is
/// divided by the image's largest beta so the output peaks at 1.
inline FloatImage contrastEnhance(const FloatImage& magnitude, const TextDetectorConfig& cfg) {
  FloatImage out(magnitude.width(), magnitude.height(), 0.0);
  double lambda = 0.0;
  auto dst = out.pixels();
  auto src = magnitude.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double beta = cfg.alpha * (src[i] - 0.5) + 0.5;
    dst[i] = beta > 0.0 ? beta : 0.0;
    lambda = std::max(lambda, dst[i]);
  }
  if (lambda > 0.0) {
    for (double& v : dst) v /= lambda;
  }
  return out;
}

/// Contrast-enhanced edge map quantized to 8 bits and equalized.
inline GrayImage enhancedEdgeMap(const FrameImage& frame, const TextDetectorConfig& cfg) {
  const FloatImage enhanced = contrastEnhance(scharrMagnitude(toGray(frame)), cfg);
  GrayImage quantized(frame.width(), frame.height());
  std::ranges::transform(enhanced.pixels(), quantized.pixels().begin(), [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  });
  // A single-level map has no structure; equalizing it would lift it to 255.
  const auto levels = std::ranges::minmax(quantized.pixels());
  if (levels.min == levels.max) return quantized;
  return histogramEqualize(quantized);
}

namespace detail {

/// Maximal runs of entries >= fraction * max, joining runs separated by at most
/// maxGap entries and dropping runs shorter than minLength.
inline std::vector<Interval> thresholdRuns(const std::vector<double>& profile, double fraction,
                                           int maxGap, int minLength) {
  std::vector<Interval> runs;
  const double peak = profile.empty() ? 0.0 : *std::ranges::max_element(profile);
  if (peak <= 0.0) return runs;
  const double threshold = fraction * peak;
  for (int i = 0; i < static_cast<int>(profile.size()); ++i) {
    if (profile[static_cast<std::size_t>(i)] < threshold) continue;
    if (!runs.empty() && i - runs.back().last - 1 <= maxGap) {
      runs.back().last = i;
    } else {
      runs.push_back({i, i});
    }
  }
  std::erase_if(runs, [&](const Interval& r) { return r.length() < minLength; });
  return runs;
}

}  // namespace detail

inline std::vector<double> horizontalProfile(const GrayImage& omega) {
  std::vector<double> profile(static_cast<std::size_t>(omega.height()), 0.0);
  for (int y = 0; y < omega.height(); ++y) {
    for (const auto v : omega.row(y)) profile[static_cast<std::size_t>(y)] += v;
  }
  return profile;
}

inline std::vector<double> verticalProfile(const GrayImage& omega, Interval rows) {
  require(rows.first >= 0 && rows.first <= rows.last && rows.last < omega.height(),
          "verticalProfile: invalid row interval");
  std::vector<double> profile(static_cast<std::size_t>(omega.width()), 0.0);
  for (int y = rows.first; y <= rows.last; ++y) {
    const auto row = omega.row(y);
    for (int x = 0; x < omega.width(); ++x) profile[static_cast<std::size_t>(x)] += row[x];
  }
  return profile;
}

/// Row intervals whose profile reaches hpThresholdFraction of its maximum.
inline std::vector<Interval> horizontalBands(const GrayImage& omega, const TextDetectorConfig& cfg) {
  cfg.validate();
  return detail::thresholdRuns(horizontalProfile(omega), cfg.hpThresholdFraction, 0,
                               cfg.minBandHeight);
}

/// Column intervals inside one row band.
inline std::vector<Interval> verticalBands(const GrayImage& omega, Interval hband,
                                           const TextDetectorConfig& cfg) {
  cfg.validate();
  const int maxGap = static_cast<int>(std::lround(cfg.vpGapFactor * hband.length()));
  return detail::thresholdRuns(verticalProfile(omega, hband), cfg.vpThresholdFraction, maxGap,
                               cfg.minRegionWidth);
}

inline std::vector<TextRegion> detectText(const FrameImage& frame, const TextDetectorConfig& cfg) {
  cfg.validate();
  const GrayImage omega = enhancedEdgeMap(frame, cfg);
  std::vector<TextRegion> regions;
  for (const Interval rows : horizontalBands(omega, cfg)) {
    for (const Interval cols : verticalBands(omega, rows, cfg)) {
      regions.push_back({Band{cols.first, rows.first, cols.length(), rows.length(),
                              BandLabel::text, Provenance::grid}});
    }
  }
  return regions;
}

}  // namespace newsfmt
