#pragma once

// Pipeline configuration: a flat key-value file
//
//   # comment
//   hough.vote_threshold = 30
//   classifier.model = models/elm.bin
//
// with the same keys accepted as overrides. Unknown keys are rejected.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "newsfmt/band_detection.hpp"
#include "newsfmt/classifier.hpp"
#include "newsfmt/error.hpp"
#include "newsfmt/features.hpp"
#include "newsfmt/reasoning.hpp"
#include "newsfmt/text_detection.hpp"

namespace newsfmt {

inline constexpr const char* kConfigEnvVar = "NEWSFMT_CONFIG";

enum class ChangeMethod : std::uint8_t { pixel, histogram };

struct ChangeConfig {
  ChangeMethod method = ChangeMethod::histogram;
  int cellSize = 50;
  int diffThreshold = 20;
  double distThreshold = 0.3;
  int minStaticPairs = 5;
};

struct PipelineConfig {
  std::uint64_t seed = 1;
  double edgeThreshold = 0.1;
  HoughConfig hough;
  TextDetectorConfig text;
  FeatureContext featureDefaults;
  std::string featureContextPath;
  std::string modelPath;
  int hiddenNodes = 1000;
  Activation activation = Activation::sigmoid;
  ChangeConfig change;
  ReasoningConfig reasoning;
  bool writeOverlay = false;

  void validate() const {
    try {
      require(edgeThreshold > 0.0 && edgeThreshold <= 1.0, "edges.threshold must be in (0,1]");
      hough.resolvedFor(100, 100).validate();
      require(hough.minLineLength >= 0.0, "hough.min_line_length must be non-negative");
      text.validate();
      featureDefaults.validate();
      require(hiddenNodes >= 1, "classifier.hidden must be at least 1");
      require(change.cellSize > 0, "change.cell_size must be positive");
      require(change.diffThreshold >= 0, "change.diff_threshold must be non-negative");
      require(change.distThreshold >= 0.0 && change.distThreshold <= 1.0, "change.dist_threshold must be in [0,1]");
      require(change.minStaticPairs >= 1, "change.min_static_pairs must be at least 1");
      reasoning.validate();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parseNumber(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  std::string rest;
  if (!(in >> value) || (in >> rest)) throw ConfigError(key + ": not a valid number: '" + text + "'");
  return value;
}

inline bool parseBool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

struct ConfigKey {
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

template <typename T>
std::string show(const T& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

inline const std::map<std::string, ConfigKey>& configKeys() {
  using C = PipelineConfig;
  static const std::map<std::string, ConfigKey> keys = [] {
    std::map<std::string, ConfigKey> k;
    const auto number = [&k](const std::string& name, auto member) {
      k[name] = ConfigKey{
          [name, member](C& c, const std::string& v) {
            auto& field = member(c);
            field = parseNumber<std::remove_reference_t<decltype(field)>>(name, v);
          },
          [member](const C& c) { return show(member(const_cast<C&>(c))); }};
    };
    number("seed", [](C& c) -> auto& { return c.seed; });
    number("edges.threshold", [](C& c) -> auto& { return c.edgeThreshold; });
    number("hough.vote_threshold", [](C& c) -> auto& { return c.hough.voteThreshold; });
    number("hough.min_line_length", [](C& c) -> auto& { return c.hough.minLineLength; });
    number("hough.max_gap", [](C& c) -> auto& { return c.hough.maxGap; });
    number("hough.angle_tolerance", [](C& c) -> auto& { return c.hough.angleTolerance; });
    number("hough.cluster_tolerance", [](C& c) -> auto& { return c.hough.coordinateClusterTolerance; });
    number("text.alpha", [](C& c) -> auto& { return c.text.alpha; });
    number("text.hp_fraction", [](C& c) -> auto& { return c.text.hpThresholdFraction; });
    number("text.vp_fraction", [](C& c) -> auto& { return c.text.vpThresholdFraction; });
    number("text.min_band_height", [](C& c) -> auto& { return c.text.minBandHeight; });
    number("text.min_region_width", [](C& c) -> auto& { return c.text.minRegionWidth; });
    number("text.vp_gap_factor", [](C& c) -> auto& { return c.text.vpGapFactor; });
    number("features.saturation_threshold", [](C& c) -> auto& { return c.featureDefaults.saturationThreshold; });
    number("features.farthest_neighbor_threshold",
           [](C& c) -> auto& { return c.featureDefaults.farthestNeighborThreshold; });
    number("classifier.hidden", [](C& c) -> auto& { return c.hiddenNodes; });
    number("change.cell_size", [](C& c) -> auto& { return c.change.cellSize; });
    number("change.diff_threshold", [](C& c) -> auto& { return c.change.diffThreshold; });
    number("change.dist_threshold", [](C& c) -> auto& { return c.change.distThreshold; });
    number("change.min_static_pairs", [](C& c) -> auto& { return c.change.minStaticPairs; });
    number("reasoning.histogram_threshold", [](C& c) -> auto& { return c.reasoning.histogramThreshold; });
    number("reasoning.edge_threshold", [](C& c) -> auto& { return c.reasoning.edgeThreshold; });
    number("reasoning.overlap_threshold", [](C& c) -> auto& { return c.reasoning.overlapThreshold; });

    k["features.context"] = {[](C& c, const std::string& v) { c.featureContextPath = v; },
                             [](const C& c) { return c.featureContextPath; }};
    k["classifier.model"] = {[](C& c, const std::string& v) { c.modelPath = v; },
                             [](const C& c) { return c.modelPath; }};
    k["classifier.activation"] = {
        [](C& c, const std::string& v) {
          if (v == "sigmoid") c.activation = Activation::sigmoid;
          else if (v == "rbf") c.activation = Activation::rbf;
          else throw ConfigError("classifier.activation: expected sigmoid or rbf, got '" + v + "'");
        },
        [](const C& c) { return std::string(toString(c.activation)); }};
    k["change.method"] = {
        [](C& c, const std::string& v) {
          if (v == "pixel") c.change.method = ChangeMethod::pixel;
          else if (v == "histogram") c.change.method = ChangeMethod::histogram;
          else throw ConfigError("change.method: expected pixel or histogram, got '" + v + "'");
        },
        [](const C& c) { return std::string(c.change.method == ChangeMethod::pixel ? "pixel" : "histogram"); }};
    k["output.overlay"] = {[](C& c, const std::string& v) { c.writeOverlay = parseBool("output.overlay", v); },
                           [](const C& c) { return std::string(c.writeOverlay ? "true" : "false"); }};
    return k;
  }();
  return keys;
}

}  // namespace detail

/// Applies one `key = value` (or `key=value`) assignment.
inline void applySetting(PipelineConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  const std::string key = detail::trim(assignment.substr(0, eq));
  const std::string value = detail::trim(assignment.substr(eq + 1));
  const auto& keys = detail::configKeys();
  const auto it = keys.find(key);
  if (it == keys.end()) throw ConfigError("unknown configuration key '" + key + "'");
  it->second.set(cfg, value);
}

inline PipelineConfig parseConfig(const std::string& text, PipelineConfig cfg = {}) {
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const std::string t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    try {
      applySetting(cfg, t);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineNo) + ": " + e.what());
    }
  }
  return cfg;
}

inline PipelineConfig loadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parseConfig(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

/// Explicit path, else $NEWSFMT_CONFIG, else defaults; then overrides; then
/// validation.
inline PipelineConfig resolveConfig(const std::string& explicitPath, const std::vector<std::string>& overrides) {
  PipelineConfig cfg;
  std::string path = explicitPath;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnvVar)) path = env;
  }
  if (!path.empty()) cfg = loadConfig(path);
  for (const auto& o : overrides) applySetting(cfg, o);
  cfg.validate();
  return cfg;
}

/// Every key with its current value, sorted by key, in the file syntax.
inline std::string dumpConfig(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& [key, entry] : detail::configKeys()) out += key + " = " + entry.get(cfg) + '\n';
  return out;
}

}  // namespace newsfmt
