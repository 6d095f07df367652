#pragma once

// Band list text files, profile JSON and debug overlays.
//
// Text format, one band per line, sorted by (y, x):
//   <label> <x> <y> <w> <h>
// label is natural, synthetic or text. Lines starting with '#' and blank
// lines are ignored.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "newsfmt/error.hpp"
#include "newsfmt/geometry.hpp"
#include "newsfmt/image.hpp"

namespace newsfmt {

/// Bands in file order. When width and height are positive every band must
/// lie inside that frame.
inline std::vector<Band> parseGroundTruth(const std::string& text, int width = 0, int height = 0) {
  std::vector<Band> bands;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string label;
    Band b;
    std::string extra;
    const auto where = "ground truth line " + std::to_string(lineNo);
    if (!(fields >> label >> b.x >> b.y >> b.w >> b.h) || (fields >> extra))
      throw Error(where + ": expected '<label> <x> <y> <w> <h>'");
    const auto parsed = parseBandLabel(label);
    require(parsed && *parsed != BandLabel::unlabeled, where + ": unknown label '" + label + "'");
    b.label = *parsed;
    require(b.x >= 0 && b.y >= 0 && b.w > 0 && b.h > 0, where + ": invalid rectangle");
    if (width > 0 && height > 0)
      require(b.right() <= width && b.bottom() <= height, where + ": band outside the frame");
    bands.push_back(b);
  }
  return bands;
}

/// Canonical text: sorted by (y, x), unlabeled bands written as synthetic.
inline std::string serializeGroundTruth(std::vector<Band> bands) {
  std::ranges::stable_sort(bands, rowMajorLess);
  std::string out;
  for (const Band& b : bands) {
    const BandLabel label = b.label == BandLabel::unlabeled ? BandLabel::synthetic : b.label;
    out += std::string(toString(label)) + ' ' + std::to_string(b.x) + ' ' + std::to_string(b.y) + ' ' +
           std::to_string(b.w) + ' ' + std::to_string(b.h) + '\n';
  }
  return out;
}

inline std::vector<Band> readGroundTruth(const std::filesystem::path& path, int width = 0, int height = 0) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot read ground truth " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parseGroundTruth(ss.str(), width, height);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

inline void writeTextFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot write " + path.string());
  out << content;
  require(static_cast<bool>(out), "failed writing " + path.string());
}

inline void writeGroundTruth(const std::filesystem::path& path, const std::vector<Band>& bands) {
  writeTextFile(path, serializeGroundTruth(bands));
}

inline nlohmann::json bandToJson(const Band& b) {
  return {{"label", toString(b.label)}, {"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h},
          {"provenance", toString(b.origin)}};
}

inline nlohmann::json profileToJson(const FormatProfile& p) {
  nlohmann::json bands = nlohmann::json::array();
  for (const Band& b : p.bands) bands.push_back(bandToJson(b));
  return {{"width", p.width}, {"height", p.height}, {"bands", bands}};
}

inline Rgb labelColor(BandLabel label) noexcept {
  switch (label) {
    case BandLabel::natural: return {0, 200, 0};
    case BandLabel::synthetic: return {30, 80, 255};
    case BandLabel::text: return {255, 40, 40};
    case BandLabel::unlabeled: break;
  }
  return {160, 160, 160};
}

/// Copy of the frame with each band outlined in its label colour.
inline FrameImage renderOverlay(const FrameImage& frame, const std::vector<Band>& bands, int thickness = 2) {
  FrameImage out = frame;
  for (const Band& b : bands) {
    const Rgb color = labelColor(b.label);
    for (int y = b.y; y < b.bottom(); ++y) {
      for (int x = b.x; x < b.right(); ++x) {
        const bool border = x - b.x < thickness || b.right() - 1 - x < thickness || y - b.y < thickness ||
                            b.bottom() - 1 - y < thickness;
        if (border && out.contains(x, y)) out(x, y) = color;
      }
    }
  }
  return out;
}

}  // namespace newsfmt
