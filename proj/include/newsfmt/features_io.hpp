#pragma once

// Persistence for feature contexts (JSON) and feature matrices (CSV, one
// 1320-value row per image, no header).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "newsfmt/error.hpp"
#include "newsfmt/features.hpp"
#include "newsfmt/image_io.hpp"

namespace newsfmt {

namespace detail {

/// Sparse [[bin, value], ...] encoding; most colour bins are empty.
inline nlohmann::json histogramToJson(const Histogram& h) {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < h.bins.size(); ++i) {
    if (h.bins[i] != 0.0) entries.push_back({i, h.bins[i]});
  }
  return {{"bins", h.bins.size()}, {"entries", entries}};
}

inline Histogram histogramFromJson(const nlohmann::json& j, int expectedBins, const char* name) {
  const auto bins = j.at("bins").get<int>();
  require(bins == expectedBins, std::string("feature context: ") + name + " has the wrong bin count");
  Histogram h(bins);
  h.normalized = true;
  for (const auto& e : j.at("entries")) {
    const auto i = e.at(0).get<std::size_t>();
    require(i < h.bins.size(), std::string("feature context: ") + name + " bin index out of range");
    h.bins[i] = e.at(1).get<double>();
  }
  return h;
}

}  // namespace detail

inline nlohmann::json featureContextToJson(const FeatureContext& ctx) {
  return {{"format", "newsfmt-feature-context"},
          {"version", 1},
          {"saturation_threshold", ctx.saturationThreshold},
          {"farthest_neighbor_threshold", ctx.farthestNeighborThreshold},
          {"ranked_bins", ctx.rankedBins},
          {"color_hist_graphics", detail::histogramToJson(ctx.avgColorHistGraphics)},
          {"color_hist_natural", detail::histogramToJson(ctx.avgColorHistNatural)},
          {"fnh_graphics", detail::histogramToJson(ctx.avgFnhGraphics)},
          {"fnh_natural", detail::histogramToJson(ctx.avgFnhNatural)}};
}

inline FeatureContext featureContextFromJson(const nlohmann::json& j) {
  try {
    require(j.at("format") == "newsfmt-feature-context" && j.at("version") == 1,
            "not a feature context file");
    FeatureContext ctx;
    ctx.saturationThreshold = j.at("saturation_threshold").get<int>();
    ctx.farthestNeighborThreshold = j.at("farthest_neighbor_threshold").get<int>();
    ctx.rankedBins = j.at("ranked_bins").get<int>();
    ctx.avgColorHistGraphics = detail::histogramFromJson(j.at("color_hist_graphics"), kMonochromeCodes, "color_hist_graphics");
    ctx.avgColorHistNatural = detail::histogramFromJson(j.at("color_hist_natural"), kMonochromeCodes, "color_hist_natural");
    ctx.avgFnhGraphics = detail::histogramFromJson(j.at("fnh_graphics"), kFarthestNeighborBins, "fnh_graphics");
    ctx.avgFnhNatural = detail::histogramFromJson(j.at("fnh_natural"), kFarthestNeighborBins, "fnh_natural");
    ctx.validate();
    return ctx;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed feature context: ") + e.what());
  }
}

inline void saveFeatureContext(const FeatureContext& ctx, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), "cannot write " + path.string());
  out << featureContextToJson(ctx).dump() << '\n';
}

inline FeatureContext loadFeatureContext(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot read feature context " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return featureContextFromJson(j);
}

/// Context from two directories of class example images.
inline FeatureContext buildFeatureContext(const std::filesystem::path& graphicsDir,
                                          const std::filesystem::path& naturalDir, FeatureContext base = {}) {
  const auto load = [](const std::filesystem::path& dir) {
    std::vector<FrameImage> images;
    for (const auto& p : listImages(dir)) images.push_back(readImage(p));
    require(!images.empty(), "no images in " + dir.string());
    return images;
  };
  return buildFeatureContext(load(graphicsDir), load(naturalDir), base);
}

inline std::string featureRowCsv(const std::vector<double>& values) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    const auto n = std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    out.append(buf, static_cast<std::size_t>(n));
  }
  out += '\n';
  return out;
}

inline void writeFeatureCsv(const std::filesystem::path& path, const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot write " + path.string());
  for (const auto& row : rows) {
    require(row.size() == static_cast<std::size_t>(kFeatureDimension), "feature rows must have 1320 values");
    out << featureRowCsv(row);
  }
}

inline std::vector<std::vector<double>> readFeatureCsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(kFeatureDimension);
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(field, &used));
        require(used == field.size(), "trailing characters");
      } catch (const std::exception&) {
        throw Error(path.string() + ":" + std::to_string(lineNo) + ": not a number: '" + field + "'");
      }
    }
    require(row.size() == static_cast<std::size_t>(kFeatureDimension),
            path.string() + ":" + std::to_string(lineNo) + ": expected 1320 values, found " +
                std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace newsfmt
