#pragma once

// Colour and spatial descriptors for natural-vs-graphics band classification,
// assembled into a fixed 1320-value vector:
//   [ 8 scalars | 512 ranked-histogram | 768 HSV-histogram | 32 edge-magnitude ]
// Scalars, in order: distinct colour score, prevalent colour score, saturation
// average, saturation score, colour histogram metric, farthest neighbour score,
// farthest neighbour histogram metric, gray histogram smoothness.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "newsfmt/error.hpp"
#include "newsfmt/image.hpp"
#include "newsfmt/imaging.hpp"

namespace newsfmt {

constexpr int kScalarFeatures = 8;
constexpr int kRankedBins = 512;
constexpr int kHsvBins = 768;
constexpr int kEdgeBins = 32;
constexpr int kFeatureDimension = kScalarFeatures + kRankedBins + kHsvBins + kEdgeBins;
constexpr int kFarthestNeighborBins = 766;

static_assert(kFeatureDimension == 1320);

/// Class statistics and thresholds shared by all feature computations.
struct FeatureContext {
  Histogram avgColorHistGraphics;  // kMonochromeCodes bins
  Histogram avgColorHistNatural;
  Histogram avgFnhGraphics;        // kFarthestNeighborBins bins
  Histogram avgFnhNatural;
  int saturationThreshold = 64;
  int farthestNeighborThreshold = 100;
  int rankedBins = kRankedBins;

  void validate() const {
    require(saturationThreshold >= 0 && saturationThreshold <= 765,
            "features: saturationThreshold out of [0,765]");
    require(farthestNeighborThreshold >= 0 && farthestNeighborThreshold <= 765,
            "features: farthestNeighborThreshold out of [0,765]");
    require(rankedBins >= 1 && rankedBins <= kMonochromeCodes, "features: rankedBins out of range");
  }
};

struct FeatureVector {
  std::vector<double> values;
};

namespace detail {

inline void requirePixels(const FrameImage& img, const char* what) {
  require(!img.empty(), std::string(what) + ": empty image");
}

inline void requireNeighbors(const FrameImage& img, const char* what) {
  require(img.width() >= 2 && img.height() >= 2,
          std::string(what) + ": image must be at least 2x2");
}

inline int saturationLevel(Rgb c) noexcept {
  const int r = c.r, g = c.g, b = c.b;
  return std::max({std::abs(r - g), std::abs(g - b), std::abs(b - r)});
}

inline int colorDistance(Rgb a, Rgb b) noexcept {
  return std::abs(a.r - b.r) + std::abs(a.g - b.g) + std::abs(a.b - b.b);
}

/// Occurrence count of each packed 24-bit colour, sorted by colour.
inline std::vector<std::size_t> colorMultiplicities(const FrameImage& img) {
  std::vector<std::uint32_t> codes;
  codes.reserve(img.size());
  for (const Rgb c : img.pixels()) codes.push_back((c.r << 16) | (c.g << 8) | c.b);
  std::ranges::sort(codes);
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < codes.size();) {
    std::size_t j = i;
    while (j < codes.size() && codes[j] == codes[i]) ++j;
    counts.push_back(j - i);
    i = j;
  }
  return counts;
}

/// Per-pixel maximum L1 colour distance to the 8-neighbourhood.
inline Image<int> farthestNeighborDistances(const FrameImage& img) {
  Image<int> out(img.width(), img.height(), 0);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      int best = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if ((dx != 0 || dy != 0) && img.contains(x + dx, y + dy))
            best = std::max(best, colorDistance(img(x, y), img(x + dx, y + dy)));
        }
      }
      out(x, y) = best;
    }
  }
  return out;
}

inline double correlation(const Histogram& a, const Histogram& b) {
  require(a.binCount() == b.binCount(), "correlation: histogram sizes differ");
  return std::inner_product(a.bins.begin(), a.bins.end(), b.bins.begin(), 0.0);
}

/// first / (first + second), with 0.5 when both correlations vanish.
inline double correlationRatio(double first, double second) {
  const double sum = first + second;
  return sum > 0.0 ? first / sum : 0.5;
}

}  // namespace detail

inline double distinctColorScore(const FrameImage& img) {
  detail::requirePixels(img, "distinctColorScore");
  return static_cast<double>(detail::colorMultiplicities(img).size()) / static_cast<double>(img.size());
}

inline double prevalentColorScore(const FrameImage& img) {
  detail::requirePixels(img, "prevalentColorScore");
  const auto counts = detail::colorMultiplicities(img);
  return static_cast<double>(*std::ranges::max_element(counts)) / static_cast<double>(img.size());
}

inline double saturationAverage(const FrameImage& img) {
  detail::requirePixels(img, "saturationAverage");
  double sum = 0.0;
  for (const Rgb c : img.pixels()) sum += detail::saturationLevel(c);
  return sum / static_cast<double>(img.size());
}

inline double saturationScore(const FrameImage& img, const FeatureContext& ctx) {
  detail::requirePixels(img, "saturationScore");
  const auto hits = std::ranges::count_if(img.pixels(), [&](Rgb c) {
    return detail::saturationLevel(c) >= ctx.saturationThreshold;
  });
  return static_cast<double>(hits) / static_cast<double>(img.size());
}

/// L1-normalized histogram over the 32x32x32 quantized colour cube.
inline Histogram colorHistogram(const FrameImage& img) {
  detail::requirePixels(img, "colorHistogram");
  Histogram h(kMonochromeCodes);
  for (const Rgb c : img.pixels()) h.bins[monochromeCode(c)] += 1.0;
  return h.normalizedCopy();
}

inline double colorHistMetric(const FrameImage& img, const FeatureContext& ctx) {
  const Histogram h = colorHistogram(img);
  return detail::correlationRatio(detail::correlation(h, ctx.avgColorHistGraphics),
                                  detail::correlation(h, ctx.avgColorHistNatural));
}

/// The `rankedBins` largest entries of the quantized colour histogram, descending.
inline std::vector<double> rankedHistogram(const FrameImage& img, const FeatureContext& ctx) {
  ctx.validate();
  std::vector<double> bins = colorHistogram(img).bins;
  const auto m = static_cast<std::size_t>(ctx.rankedBins);
  std::ranges::partial_sort(bins, bins.begin() + static_cast<std::ptrdiff_t>(m), std::greater<>{});
  bins.resize(m);
  return bins;
}

/// Hexcone HSV with every channel scaled to [0,255].
inline std::array<std::uint8_t, 3> toHsv(Rgb c) noexcept {
  const int maxC = std::max({c.r, c.g, c.b});
  const int minC = std::min({c.r, c.g, c.b});
  const int delta = maxC - minC;
  double hueDegrees = 0.0;
  if (delta > 0) {
    if (maxC == c.r) {
      hueDegrees = 60.0 * (static_cast<double>(c.g - c.b) / delta);
    } else if (maxC == c.g) {
      hueDegrees = 60.0 * (static_cast<double>(c.b - c.r) / delta + 2.0);
    } else {
      hueDegrees = 60.0 * (static_cast<double>(c.r - c.g) / delta + 4.0);
    }
    if (hueDegrees < 0.0) hueDegrees += 360.0;
  }
  const int hue = std::min(255, static_cast<int>(hueDegrees * 256.0 / 360.0));
  const int saturation = maxC == 0 ? 0 : static_cast<int>(std::lround(255.0 * delta / maxC));
  return {static_cast<std::uint8_t>(hue), static_cast<std::uint8_t>(saturation),
          static_cast<std::uint8_t>(maxC)};
}

/// Concatenated H|S|V histograms, each with 256 bins and L1-normalized.
inline std::vector<double> hsvHistogram(const FrameImage& img) {
  detail::requirePixels(img, "hsvHistogram");
  std::vector<double> bins(kHsvBins, 0.0);
  for (const Rgb c : img.pixels()) {
    const auto hsv = toHsv(c);
    for (int ch = 0; ch < 3; ++ch) bins[static_cast<std::size_t>(ch * 256 + hsv[ch])] += 1.0;
  }
  const double n = static_cast<double>(img.size());
  for (double& b : bins) b /= n;
  return bins;
}

inline double farthestNeighborScore(const FrameImage& img, const FeatureContext& ctx) {
  detail::requireNeighbors(img, "farthestNeighborScore");
  const auto distances = detail::farthestNeighborDistances(img);
  const auto hits = std::ranges::count_if(distances.pixels(), [&](int d) {
    return d >= ctx.farthestNeighborThreshold;
  });
  return static_cast<double>(hits) / static_cast<double>(img.size());
}

/// Fraction of pixels at each farthest-neighbour distance 0..765.
inline Histogram farthestNeighborHistogram(const FrameImage& img) {
  detail::requireNeighbors(img, "farthestNeighborHistogram");
  Histogram h(kFarthestNeighborBins);
  const auto distances = detail::farthestNeighborDistances(img);
  for (const int d : distances.pixels()) h.bins[static_cast<std::size_t>(d)] += 1.0;
  return h.normalizedCopy();
}

/// nat / (nat + graph) with nat, graph the correlations of the image's
/// farthest-neighbour histogram to the class averages.
inline double farthestNeighborHistMetric(const FrameImage& img, const FeatureContext& ctx) {
  const Histogram h = farthestNeighborHistogram(img);
  return detail::correlationRatio(detail::correlation(h, ctx.avgFnhNatural),
                                  detail::correlation(h, ctx.avgFnhGraphics));
}

/// Sum of absolute bin-to-bin changes of the normalized 256-bin gray histogram.
inline double graySmoothness(const FrameImage& img) {
  detail::requirePixels(img, "graySmoothness");
  const Histogram h = normalizedHistogram(toGray(img), 256);
  double sum = 0.0;
  for (std::size_t i = 1; i < h.bins.size(); ++i) sum += std::abs(h.bins[i] - h.bins[i - 1]);
  return sum;
}

/// 32 equal-width bins over the normalized Scharr magnitude, L1-normalized.
inline std::vector<double> edgeMagnitudeHistogram(const FrameImage& img) {
  require(img.width() >= 3 && img.height() >= 3, "edgeMagnitudeHistogram: image must be at least 3x3");
  const FloatImage magnitude = scharrMagnitude(toGray(img));
  return normalizedHistogram(magnitude, kEdgeBins, 1.0).bins;
}

inline FeatureVector assembleFeatureVector(const FrameImage& img, const FeatureContext& ctx) {
  ctx.validate();
  require(ctx.rankedBins == kRankedBins, "assembleFeatureVector: rankedBins must be 512");
  FeatureVector fv;
  auto& v = fv.values;
  v.reserve(kFeatureDimension);
  v.push_back(distinctColorScore(img));
  v.push_back(prevalentColorScore(img));
  v.push_back(saturationAverage(img));
  v.push_back(saturationScore(img, ctx));
  v.push_back(colorHistMetric(img, ctx));
  v.push_back(farthestNeighborScore(img, ctx));
  v.push_back(farthestNeighborHistMetric(img, ctx));
  v.push_back(graySmoothness(img));
  const auto append = [&v](const std::vector<double>& part) { v.insert(v.end(), part.begin(), part.end()); };
  append(rankedHistogram(img, ctx));
  append(hsvHistogram(img));
  append(edgeMagnitudeHistogram(img));
  return fv;
}

/// Class averages of the per-image normalized colour and farthest-neighbour
/// histograms.
inline FeatureContext buildFeatureContext(const std::vector<FrameImage>& graphics,
                                          const std::vector<FrameImage>& natural,
                                          FeatureContext base = {}) {
  require(!graphics.empty() && !natural.empty(), "buildFeatureContext: each class needs images");
  const auto average = [](const std::vector<FrameImage>& images, auto histogramOf, int bins) {
    Histogram sum(bins);
    for (const auto& img : images) sum += histogramOf(img);
    for (double& b : sum.bins) b /= static_cast<double>(images.size());
    sum.normalized = true;
    return sum;
  };
  base.avgColorHistGraphics = average(graphics, colorHistogram, kMonochromeCodes);
  base.avgColorHistNatural = average(natural, colorHistogram, kMonochromeCodes);
  base.avgFnhGraphics = average(graphics, farthestNeighborHistogram, kFarthestNeighborBins);
  base.avgFnhNatural = average(natural, farthestNeighborHistogram, kFarthestNeighborBins);
  return base;
}

}  // namespace newsfmt
