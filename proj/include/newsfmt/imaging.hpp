#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "newsfmt/error.hpp"
#include "newsfmt/image.hpp"

namespace newsfmt {

/// Channel mean, rounded to nearest. (r+g+b)/3 never lands on a .5 fraction.
inline GrayImage toGray(const FrameImage& frame) {
  GrayImage out(frame.width(), frame.height());
  auto src = frame.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const int sum = src[i].r + src[i].g + src[i].b;
    dst[i] = static_cast<std::uint8_t>((sum + 1) / 3);
  }
  return out;
}

constexpr int kMonochromeLevels = 32;
constexpr int kMonochromeCodes = kMonochromeLevels * kMonochromeLevels * kMonochromeLevels;

/// Packs a colour into 1024*r' + 32*g' + b' with each channel quantized to
/// floor(c*32/256), so the code is injective on quantized triples.
constexpr std::uint16_t monochromeCode(Rgb c) noexcept {
  return static_cast<std::uint16_t>(((c.r >> 3) << 10) | ((c.g >> 3) << 5) | (c.b >> 3));
}

inline CodeImage toMonochrome32(const FrameImage& frame) {
  CodeImage out(frame.width(), frame.height());
  std::ranges::transform(frame.pixels(), out.pixels().begin(), monochromeCode);
  return out;
}

struct Histogram {
  std::vector<double> bins;
  bool normalized = false;

  Histogram() = default;
  explicit Histogram(int binCount) : bins(static_cast<std::size_t>(binCount), 0.0) {}
  Histogram(std::vector<double> values, bool isNormalized)
      : bins(std::move(values)), normalized(isNormalized) {}

  [[nodiscard]] int binCount() const noexcept { return static_cast<int>(bins.size()); }
  [[nodiscard]] double total() const noexcept {
    return std::accumulate(bins.begin(), bins.end(), 0.0);
  }

  /// Divides by the total mass. An all-zero histogram is rejected.
  [[nodiscard]] Histogram normalizedCopy() const {
    const double sum = total();
    require(sum > 0.0, "cannot normalize an empty histogram");
    Histogram out(*this);
    for (double& b : out.bins) b /= sum;
    out.normalized = true;
    return out;
  }

  Histogram& operator+=(const Histogram& other) {
    require(other.bins.size() == bins.size(), "histogram bin counts differ");
    for (std::size_t i = 0; i < bins.size(); ++i) bins[i] += other.bins[i];
    normalized = false;
    return *this;
  }
};

/// Raw counts of values in [0, rangeMax) over `binCount` equal-width bins.
template <typename T>
Histogram countHistogram(std::span<const T> values, int binCount, double rangeMax) {
  require(binCount >= 1, "histogram needs at least one bin");
  require(rangeMax > 0.0, "histogram range must be positive");
  Histogram h(binCount);
  const double scale = binCount / rangeMax;
  for (const T v : values) {
    const auto bin = static_cast<int>(static_cast<double>(v) * scale);
    h.bins[static_cast<std::size_t>(std::clamp(bin, 0, binCount - 1))] += 1.0;
  }
  return h;
}

template <typename T>
Histogram normalizedHistogram(const Image<T>& img, int binCount, double rangeMax) {
  require(!img.empty(), "histogram of an empty image");
  return countHistogram(img.pixels(), binCount, rangeMax).normalizedCopy();
}

/// 8-bit images default to the byte range.
inline Histogram normalizedHistogram(const GrayImage& img, int binCount) {
  return normalizedHistogram(img, binCount, 256.0);
}

/// Bhattacharyya distance in the form used by OpenCV's HISTCMP_BHATTACHARYYA:
///   sqrt(1 - sum_i sqrt(h1_i h2_i) / sqrt(mean1 * mean2 * N^2)).
/// Works on raw counts or normalized histograms alike. Clamped to [0,1].
inline double bhattacharyyaDistance(const Histogram& h1, const Histogram& h2) {
  require(h1.binCount() == h2.binCount(), "Bhattacharyya distance: bin counts differ");
  require(h1.binCount() > 0, "Bhattacharyya distance: empty histogram");
  // sqrt(mean1 * mean2 * N^2) == sqrt(total1 * total2); the latter is exact
  // for identical inputs, so d(h, h) is 0 rather than sqrt(rounding error).
  const double total1 = h1.total();
  const double total2 = h2.total();
  require(total1 > 0.0 && total2 > 0.0, "Bhattacharyya distance: all-zero histogram");
  double overlap = 0.0;
  for (std::size_t i = 0; i < h1.bins.size(); ++i) overlap += std::sqrt(h1.bins[i] * h2.bins[i]);
  const double coefficient = overlap / std::sqrt(total1 * total2);
  return std::sqrt(std::clamp(1.0 - coefficient, 0.0, 1.0));
}

/// Cumulative-distribution remap: v -> round((cdf(v) - cdf_min) * 255 / (N - cdf_min)).
/// A single-level image maps every pixel to 255.
inline GrayImage histogramEqualize(const GrayImage& img) {
  require(!img.empty(), "equalize: empty image");
  std::array<std::size_t, 256> counts{};
  for (const auto v : img.pixels()) ++counts[v];
  std::array<std::size_t, 256> cdf{};
  std::partial_sum(counts.begin(), counts.end(), cdf.begin());
  const std::size_t total = img.size();
  const auto firstLevel = static_cast<std::size_t>(
      std::ranges::find_if(counts, [](std::size_t c) { return c > 0; }) - counts.begin());
  const std::size_t cdfMin = cdf[firstLevel];

  std::array<std::uint8_t, 256> lut{};
  if (total == cdfMin) {
    lut.fill(255);
  } else {
    const double scale = 255.0 / static_cast<double>(total - cdfMin);
    for (std::size_t v = 0; v < 256; ++v) {
      const double mapped = cdf[v] < cdfMin ? 0.0 : static_cast<double>(cdf[v] - cdfMin) * scale;
      lut[v] = static_cast<std::uint8_t>(std::lround(mapped));
    }
  }
  GrayImage out(img.width(), img.height());
  std::ranges::transform(img.pixels(), out.pixels().begin(), [&](std::uint8_t v) { return lut[v]; });
  return out;
}

/// Largest gradient magnitude the 3x3 Scharr pair can produce on 8-bit input.
/// Reached by a corner configuration where Gx = 10*255 and Gy = 16*255.
inline const double kScharrMaxMagnitude = 255.0 * std::sqrt(356.0);

/// Scharr gradient magnitude divided by kScharrMaxMagnitude. Border pixels are 0.
inline FloatImage scharrMagnitude(const GrayImage& img) {
  require(img.width() >= 3 && img.height() >= 3, "Scharr: image smaller than 3x3 kernel");
  FloatImage out(img.width(), img.height(), 0.0);
  for (int y = 1; y + 1 < img.height(); ++y) {
    for (int x = 1; x + 1 < img.width(); ++x) {
      const int tl = img(x - 1, y - 1), tc = img(x, y - 1), tr = img(x + 1, y - 1);
      const int ml = img(x - 1, y), mr = img(x + 1, y);
      const int bl = img(x - 1, y + 1), bc = img(x, y + 1), br = img(x + 1, y + 1);
      const int gx = 3 * (tr - tl) + 10 * (mr - ml) + 3 * (br - bl);
      const int gy = 3 * (bl - tl) + 10 * (bc - tc) + 3 * (br - tr);
      out(x, y) = std::sqrt(static_cast<double>(gx * gx + gy * gy)) / kScharrMaxMagnitude;
    }
  }
  return out;
}

}  // namespace newsfmt
