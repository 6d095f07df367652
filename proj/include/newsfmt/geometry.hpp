#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "newsfmt/error.hpp"

namespace newsfmt {

enum class BandLabel : std::uint8_t { unlabeled, synthetic, natural, text };

/// Which stage produced a band: an untouched grid cell or a merge in one of the
/// three reasoning tiers.
enum class Provenance : std::uint8_t { grid, histogram_tier, natural_tier, text_tier };

constexpr std::string_view toString(BandLabel label) noexcept {
  switch (label) {
    case BandLabel::synthetic: return "synthetic";
    case BandLabel::natural: return "natural";
    case BandLabel::text: return "text";
    case BandLabel::unlabeled: break;
  }
  return "unlabeled";
}

inline std::optional<BandLabel> parseBandLabel(std::string_view s) {
  if (s == "synthetic") return BandLabel::synthetic;
  if (s == "natural") return BandLabel::natural;
  if (s == "text") return BandLabel::text;
  if (s == "unlabeled") return BandLabel::unlabeled;
  return std::nullopt;
}

constexpr std::string_view toString(Provenance p) noexcept {
  switch (p) {
    case Provenance::histogram_tier: return "histogram";
    case Provenance::natural_tier: return "natural";
    case Provenance::text_tier: return "text";
    case Provenance::grid: break;
  }
  return "grid";
}

/// Axis-aligned rectangle [x, x+w) x [y, y+h) with a content label.
struct Band {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  BandLabel label = BandLabel::unlabeled;
  Provenance origin = Provenance::grid;

  [[nodiscard]] constexpr int right() const noexcept { return x + w; }
  [[nodiscard]] constexpr int bottom() const noexcept { return y + h; }
  [[nodiscard]] constexpr std::int64_t area() const noexcept {
    return static_cast<std::int64_t>(w) * h;
  }
  [[nodiscard]] constexpr bool sameRect(const Band& o) const noexcept {
    return x == o.x && y == o.y && w == o.w && h == o.h;
  }

  friend constexpr bool operator==(const Band&, const Band&) = default;
};

constexpr std::int64_t intersectionArea(const Band& a, const Band& b) noexcept {
  const int w = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const int h = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  return (w > 0 && h > 0) ? static_cast<std::int64_t>(w) * h : 0;
}

/// Row-major order: by top edge, then left edge.
constexpr bool rowMajorLess(const Band& a, const Band& b) noexcept {
  return a.y != b.y ? a.y < b.y : a.x < b.x;
}

/// A labeled partition of a frame into bands.
struct FormatProfile {
  int width = 0;
  int height = 0;
  std::vector<Band> bands;

  void sortRowMajor() { std::ranges::stable_sort(bands, rowMajorLess); }
};

/// Checks the partition invariants: every band inside the frame with positive
/// extent, bands pairwise disjoint, areas summing to the frame area. Returns a
/// description of the first violation, or an empty string.
inline std::string partitionViolation(const FormatProfile& p) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < p.bands.size(); ++i) {
    const Band& b = p.bands[i];
    if (b.w <= 0 || b.h <= 0) return "band " + std::to_string(i) + " has no area";
    if (b.x < 0 || b.y < 0 || b.right() > p.width || b.bottom() > p.height)
      return "band " + std::to_string(i) + " exceeds the frame";
    total += b.area();
    for (std::size_t j = i + 1; j < p.bands.size(); ++j) {
      if (intersectionArea(b, p.bands[j]) > 0)
        return "bands " + std::to_string(i) + " and " + std::to_string(j) + " overlap";
    }
  }
  if (total != static_cast<std::int64_t>(p.width) * p.height)
    return "band areas sum to " + std::to_string(total) + ", frame area is " +
           std::to_string(static_cast<std::int64_t>(p.width) * p.height);
  return {};
}

}  // namespace newsfmt
