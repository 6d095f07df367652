#pragma once

// Band adjacency and the three-tier merge: histogram similarity, natural
// content without a boundary edge, then text overlap.

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "newsfmt/band_detection.hpp"
#include "newsfmt/change_detection.hpp"
#include "newsfmt/error.hpp"
#include "newsfmt/geometry.hpp"
#include "newsfmt/image.hpp"
#include "newsfmt/imaging.hpp"
#include "newsfmt/text_detection.hpp"

namespace newsfmt {

/// a_ij codes: where band j lies relative to band i.
enum Adjacency : std::uint8_t { kNone = 0, kAbove = 1, kRight = 2, kBelow = 3, kLeft = 4 };

constexpr Adjacency converse(Adjacency a) noexcept {
  switch (a) {
    case kAbove: return kBelow;
    case kBelow: return kAbove;
    case kRight: return kLeft;
    case kLeft: return kRight;
    case kNone: break;
  }
  return kNone;
}

struct AdjacencyMatrix {
  int n = 0;
  std::vector<std::uint8_t> entries;

  explicit AdjacencyMatrix(int count = 0)
      : n(count), entries(static_cast<std::size_t>(count) * static_cast<std::size_t>(count), kNone) {}

  [[nodiscard]] Adjacency operator()(int i, int j) const {
    return static_cast<Adjacency>(entries[static_cast<std::size_t>(i) * n + j]);
  }
  void set(int i, int j, Adjacency a) { entries[static_cast<std::size_t>(i) * n + j] = a; }
};

/// Relation of j to i; sharing a boundary needs a shared edge of positive
/// length.
inline Adjacency relation(const Band& i, const Band& j) noexcept {
  const int colOverlap = std::min(i.right(), j.right()) - std::max(i.x, j.x);
  const int rowOverlap = std::min(i.bottom(), j.bottom()) - std::max(i.y, j.y);
  if (colOverlap > 0 && j.bottom() == i.y) return kAbove;
  if (colOverlap > 0 && j.y == i.bottom()) return kBelow;
  if (rowOverlap > 0 && j.x == i.right()) return kRight;
  if (rowOverlap > 0 && j.right() == i.x) return kLeft;
  return kNone;
}

inline AdjacencyMatrix buildAdjacency(const std::vector<Band>& bands) {
  const int n = static_cast<int>(bands.size());
  AdjacencyMatrix m(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      require(intersectionArea(bands[i], bands[j]) == 0, "buildAdjacency: overlapping bands");
      const Adjacency a = relation(bands[i], bands[j]);
      m.set(i, j, a);
      m.set(j, i, converse(a));
    }
  }
  return m;
}

/// True when i and j share a complete side, so that their union is a rectangle.
inline bool fullSideAligned(const Band& i, const Band& j, Adjacency a) noexcept {
  switch (a) {
    case kAbove:
    case kBelow: return i.x == j.x && i.w == j.w && relation(i, j) == a;
    case kRight:
    case kLeft: return i.y == j.y && i.h == j.h && relation(i, j) == a;
    case kNone: break;
  }
  return false;
}

/// Union of two bands sharing a full side. The result keeps the label of the
/// larger band (i on ties).
inline Band mergeBands(const Band& i, const Band& j, Adjacency a) {
  require(a != kNone, "mergeBands: bands are not adjacent");
  require(fullSideAligned(i, j, a), "mergeBands: bands do not share a full side");
  Band k = i;
  switch (a) {
    case kAbove: k = Band{j.x, j.y, j.w, i.h + j.h}; break;
    case kRight: k = Band{i.x, i.y, i.w + j.w, i.h}; break;
    case kBelow: k = Band{i.x, i.y, i.w, i.h + j.h}; break;
    case kLeft: k = Band{j.x, j.y, i.w + j.w, j.h}; break;
    case kNone: break;
  }
  k.label = j.area() > i.area() ? j.label : i.label;
  k.origin = i.origin;
  return k;
}

struct ReasoningConfig {
  double histogramThreshold = 0.2;
  double edgeThreshold = 0.08;
  double overlapThreshold = 0.5;

  void validate() const {
    require(histogramThreshold >= 0.0 && histogramThreshold <= 1.0, "reasoning: histogramThreshold out of [0,1]");
    require(edgeThreshold >= 0.0, "reasoning: edgeThreshold must be non-negative");
    require(overlapThreshold > 0.0 && overlapThreshold <= 1.0, "reasoning: overlapThreshold out of (0,1]");
  }
};

namespace detail {

template <typename Payload>
struct Node {
  Band band;
  Payload payload;
};

struct Empty {};

/// Repeatedly merges the first eligible pair (i < j in row-major order) until
/// none is left. `eligible(nodeI, nodeJ, a)` decides; `combine(pI, pJ)` folds
/// payloads.
template <typename Payload, typename Eligible, typename Combine>
void mergeToFixpoint(std::vector<Node<Payload>>& nodes, Provenance tier, Eligible eligible, Combine combine) {
  const auto order = [](const Node<Payload>& a, const Node<Payload>& b) { return rowMajorLess(a.band, b.band); };
  for (;;) {
    std::ranges::stable_sort(nodes, order);
    std::vector<Band> bands;
    bands.reserve(nodes.size());
    for (const auto& node : nodes) bands.push_back(node.band);
    const AdjacencyMatrix adjacency = buildAdjacency(bands);
    bool merged = false;
    const int n = static_cast<int>(nodes.size());
    for (int i = 0; i < n && !merged; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const Adjacency a = adjacency(i, j);
        if (a == kNone || !fullSideAligned(nodes[i].band, nodes[j].band, a)) continue;
        if (!eligible(nodes[i], nodes[j], a)) continue;
        Band k = mergeBands(nodes[i].band, nodes[j].band, a);
        k.origin = tier;
        nodes[i] = Node<Payload>{k, combine(nodes[i].payload, nodes[j].payload)};
        nodes.erase(nodes.begin() + j);
        merged = true;
        break;
      }
    }
    if (!merged) return;
  }
}

inline std::vector<Band> bandsOf(const auto& nodes) {
  std::vector<Band> out;
  out.reserve(nodes.size());
  for (const auto& node : nodes) out.push_back(node.band);
  return out;
}

/// Mean normalized gradient over the two 1-px strips either side of the
/// shared boundary.
inline double boundaryEdgeStrength(const FloatImage& magnitude, const Band& i, Adjacency a) {
  double sum = 0.0;
  std::int64_t count = 0;
  const auto add = [&](int x, int y) {
    if (!magnitude.contains(x, y)) return;
    sum += magnitude(x, y);
    ++count;
  };
  if (a == kAbove || a == kBelow) {
    const int boundary = a == kAbove ? i.y : i.bottom();
    for (int x = i.x; x < i.right(); ++x) {
      add(x, boundary - 1);
      add(x, boundary);
    }
  } else {
    const int boundary = a == kLeft ? i.x : i.right();
    for (int y = i.y; y < i.bottom(); ++y) {
      add(boundary - 1, y);
      add(boundary, y);
    }
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace detail

/// 64-bin count histogram of monochrome codes inside a band.
inline Histogram bandHistogram(const CodeImage& codes, const Band& band) {
  Histogram h(kChangeHistogramBins);
  const double scale = static_cast<double>(kChangeHistogramBins) / kMonochromeCodes;
  for (int y = band.y; y < band.bottom(); ++y) {
    const auto row = codes.row(y);
    for (int x = band.x; x < band.right(); ++x)
      h.bins[static_cast<std::size_t>(static_cast<double>(row[static_cast<std::size_t>(x)]) * scale)] += 1.0;
  }
  return h;
}

/// Tier 1: adjacent bands whose colour histograms are closer than `threshold`
/// are parts of one parent band.
inline FormatProfile tier1HistogramMerge(const FormatProfile& profile, const FrameImage& frame, double threshold) {
  require(frame.width() == profile.width && frame.height() == profile.height,
          "tier1HistogramMerge: frame does not match profile");
  const CodeImage codes = toMonochrome32(frame);
  std::vector<detail::Node<Histogram>> nodes;
  for (const Band& b : profile.bands) nodes.push_back({b, bandHistogram(codes, b)});
  detail::mergeToFixpoint(
      nodes, Provenance::histogram_tier,
      [&](const auto& i, const auto& j, Adjacency) {
        return bhattacharyyaDistance(i.payload, j.payload) < threshold;
      },
      [](Histogram a, const Histogram& b) { return a += b; });
  return {profile.width, profile.height, detail::bandsOf(nodes)};
}

/// Tier 2: neighbouring natural bands merge when their common boundary carries
/// no edge.
inline FormatProfile tier2NaturalMerge(const FormatProfile& profile, const FrameImage& frame,
                                       double edgeThreshold) {
  require(frame.width() == profile.width && frame.height() == profile.height,
          "tier2NaturalMerge: frame does not match profile");
  const FloatImage magnitude = scharrMagnitude(toGray(frame));
  std::vector<detail::Node<detail::Empty>> nodes;
  for (const Band& b : profile.bands) nodes.push_back({b, {}});
  detail::mergeToFixpoint(
      nodes, Provenance::natural_tier,
      [&](const auto& i, const auto& j, Adjacency a) {
        return i.band.label == BandLabel::natural && j.band.label == BandLabel::natural &&
               detail::boundaryEdgeStrength(magnitude, i.band, a) < edgeThreshold;
      },
      [](detail::Empty, detail::Empty) { return detail::Empty{}; });
  return {profile.width, profile.height, detail::bandsOf(nodes)};
}

/// Fraction of the band covered by one text region.
inline double textOverlap(const Band& band, const Band& region) {
  require(band.area() > 0, "textOverlap: zero-area band");
  return static_cast<double>(intersectionArea(band, region)) / static_cast<double>(band.area());
}

/// Tier 3: bands mostly covered by a text region become text; horizontally
/// adjacent text bands of equal height merge.
inline FormatProfile tier3TextMerge(const FormatProfile& profile, const std::vector<TextRegion>& regions,
                                    double overlapThreshold) {
  std::vector<detail::Node<detail::Empty>> nodes;
  for (Band b : profile.bands) {
    double best = 0.0;
    for (const auto& r : regions) best = std::max(best, textOverlap(b, r.rect));
    if (best >= overlapThreshold) b.label = BandLabel::text;
    nodes.push_back({b, {}});
  }
  detail::mergeToFixpoint(
      nodes, Provenance::text_tier,
      [](const auto& i, const auto& j, Adjacency a) {
        return (a == kRight || a == kLeft) && i.band.label == BandLabel::text && j.band.label == BandLabel::text;
      },
      [](detail::Empty, detail::Empty) { return detail::Empty{}; });
  return {profile.width, profile.height, detail::bandsOf(nodes)};
}

struct ReasoningResult {
  FormatProfile profile;                 // final, unlabeled bands emitted as synthetic
  std::array<FormatProfile, 3> afterTier;  // state after tiers 1, 2, 3
};

/// Grid cells with their classifier labels -> tier 1 -> tier 2 -> tier 3.
inline ReasoningResult runThreeTier(const FrameImage& frame, const BandGrid& grid,
                                    const std::vector<BandLabel>& labels, const std::vector<TextRegion>& textRegions,
                                    const ReasoningConfig& cfg) {
  cfg.validate();
  require(labels.size() == grid.cells.size(), "runThreeTier: one label per grid cell required");
  require(grid.width() == frame.width() && grid.height() == frame.height(), "runThreeTier: grid does not match frame");
  FormatProfile start{frame.width(), frame.height(), grid.cells};
  for (std::size_t i = 0; i < labels.size(); ++i) start.bands[i].label = labels[i];
  start.sortRowMajor();

  ReasoningResult out;
  out.afterTier[0] = tier1HistogramMerge(start, frame, cfg.histogramThreshold);
  out.afterTier[1] = tier2NaturalMerge(out.afterTier[0], frame, cfg.edgeThreshold);
  out.afterTier[2] = tier3TextMerge(out.afterTier[1], textRegions, cfg.overlapThreshold);
  out.profile = out.afterTier[2];
  for (Band& b : out.profile.bands) {
    if (b.label == BandLabel::unlabeled) b.label = BandLabel::synthetic;
  }
  return out;
}

}  // namespace newsfmt
