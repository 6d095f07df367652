#pragma once

// Static/dynamic labeling of frame cells from consecutive frames.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "newsfmt/error.hpp"
#include "newsfmt/geometry.hpp"
#include "newsfmt/image.hpp"
#include "newsfmt/imaging.hpp"

namespace newsfmt {

enum class CellState : std::uint8_t { static_content = 0, dynamic_content = 1 };

/// Cells of side cellSize tiling the frame; the last column and row may be
/// narrower.
struct ChangeGrid {
  int frameWidth = 0;
  int frameHeight = 0;
  int cellSize = 50;
  int columns = 0;
  int rows = 0;
  std::vector<CellState> labels;  // row-major

  ChangeGrid() = default;
  ChangeGrid(int width, int height, int cell)
      : frameWidth(width), frameHeight(height), cellSize(cell) {
    require(cell > 0, "change grid: cellSize must be positive");
    require(width > 0 && height > 0, "change grid: empty frame");
    columns = (width + cell - 1) / cell;
    rows = (height + cell - 1) / cell;
    labels.assign(static_cast<std::size_t>(columns) * rows, CellState::static_content);
  }

  [[nodiscard]] CellState at(int col, int row) const { return labels[static_cast<std::size_t>(row) * columns + col]; }
  CellState& at(int col, int row) { return labels[static_cast<std::size_t>(row) * columns + col]; }

  [[nodiscard]] Band cellRect(int col, int row) const {
    const int x = col * cellSize;
    const int y = row * cellSize;
    return Band{x, y, std::min(cellSize, frameWidth - x), std::min(cellSize, frameHeight - y)};
  }

  [[nodiscard]] std::size_t dynamicCount() const {
    return static_cast<std::size_t>(std::ranges::count(labels, CellState::dynamic_content));
  }
};

namespace detail {

inline void requireSameSize(const FrameImage& a, const FrameImage& b) {
  require(!a.empty() && !b.empty(), "change detection: empty frame");
  require(a.width() == b.width() && a.height() == b.height(), "change detection: frame dimensions differ");
}

}  // namespace detail

/// A pixel changes when its gray difference exceeds diffThreshold; a cell is
/// dynamic when changed pixels are a strict majority (ties stay static).
inline ChangeGrid pixelChangeDetect(const FrameImage& curr, const FrameImage& prev, int diffThreshold,
                                    int cellSize) {
  detail::requireSameSize(curr, prev);
  const GrayImage a = toGray(curr);
  const GrayImage b = toGray(prev);
  ChangeGrid grid(curr.width(), curr.height(), cellSize);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.columns; ++c) {
      const Band cell = grid.cellRect(c, r);
      std::int64_t changed = 0;
      for (int y = cell.y; y < cell.bottom(); ++y) {
        for (int x = cell.x; x < cell.right(); ++x) {
          if (std::abs(static_cast<int>(a(x, y)) - static_cast<int>(b(x, y))) > diffThreshold) ++changed;
        }
      }
      if (2 * changed > cell.area()) grid.at(c, r) = CellState::dynamic_content;
    }
  }
  return grid;
}

constexpr int kChangeHistogramBins = 64;

/// Per-cell Bhattacharyya distance between 64-bin histograms of monochrome
/// codes; dynamic when the distance exceeds distThreshold.
inline ChangeGrid histogramChangeDetect(const FrameImage& curr, const FrameImage& prev, double distThreshold,
                                        int cellSize) {
  detail::requireSameSize(curr, prev);
  const CodeImage a = toMonochrome32(curr);
  const CodeImage b = toMonochrome32(prev);
  ChangeGrid grid(curr.width(), curr.height(), cellSize);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.columns; ++c) {
      const Band cell = grid.cellRect(c, r);
      const auto ha = normalizedHistogram(crop(a, cell.x, cell.y, cell.w, cell.h), kChangeHistogramBins,
                                          static_cast<double>(kMonochromeCodes));
      const auto hb = normalizedHistogram(crop(b, cell.x, cell.y, cell.w, cell.h), kChangeHistogramBins,
                                          static_cast<double>(kMonochromeCodes));
      if (bhattacharyyaDistance(ha, hb) > distThreshold) grid.at(c, r) = CellState::dynamic_content;
    }
  }
  return grid;
}

/// Relabels natural bands as synthetic when every change cell lying fully
/// inside the band was static in each of the last `minStaticPairs` grids.
/// Bands containing no whole cell, or with fewer grids available, are left
/// alone.
inline void applyChangeVotes(std::vector<Band>& bands, const std::vector<ChangeGrid>& history,
                             int minStaticPairs) {
  require(minStaticPairs >= 1, "applyChangeVotes: minStaticPairs must be positive");
  if (static_cast<int>(history.size()) < minStaticPairs) return;
  const auto recent = std::span(history).last(static_cast<std::size_t>(minStaticPairs));
  for (Band& band : bands) {
    if (band.label != BandLabel::natural) continue;
    bool anyCell = false;
    bool allStatic = true;
    for (const ChangeGrid& grid : recent) {
      for (int r = 0; r < grid.rows && allStatic; ++r) {
        for (int c = 0; c < grid.columns; ++c) {
          const Band cell = grid.cellRect(c, r);
          if (cell.x < band.x || cell.y < band.y || cell.right() > band.right() || cell.bottom() > band.bottom())
            continue;
          anyCell = true;
          if (grid.at(c, r) == CellState::dynamic_content) {
            allStatic = false;
            break;
          }
        }
      }
    }
    if (anyCell && allStatic) band.label = BandLabel::synthetic;
  }
}

/// Binary PGM (P5) at frame resolution: dynamic cells 255, static 0.
inline void writeChangeMask(const ChangeGrid& grid, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), "cannot write " + path);
  os << "P5\n" << grid.frameWidth << ' ' << grid.frameHeight << "\n255\n";
  std::string row(static_cast<std::size_t>(grid.frameWidth), '\0');
  for (int y = 0; y < grid.frameHeight; ++y) {
    for (int x = 0; x < grid.frameWidth; ++x) {
      row[static_cast<std::size_t>(x)] =
          grid.at(x / grid.cellSize, y / grid.cellSize) == CellState::dynamic_content ? '\xff' : '\0';
    }
    os.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  require(static_cast<bool>(os), "failed writing " + path);
}

}  // namespace newsfmt
