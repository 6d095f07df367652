#pragma once

// Full frame analysis: grid from Hough lines, text regions, per-cell
// natural/graphics labels, then three-tier reasoning.

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "newsfmt/band_detection.hpp"
#include "newsfmt/change_detection.hpp"
#include "newsfmt/classifier.hpp"
#include "newsfmt/config.hpp"
#include "newsfmt/error.hpp"
#include "newsfmt/features.hpp"
#include "newsfmt/features_io.hpp"
#include "newsfmt/ground_truth.hpp"
#include "newsfmt/image_io.hpp"
#include "newsfmt/reasoning.hpp"
#include "newsfmt/text_detection.hpp"

namespace newsfmt {

/// Trained classifier with the feature context it was trained against.
struct ClassifierBundle {
  ElmModel model;
  FeatureContext context;
};

/// Loads the configured model and context. An empty classifier.model means
/// no classifier: every cell enters reasoning unlabeled.
inline std::optional<ClassifierBundle> loadClassifier(const PipelineConfig& cfg) {
  if (cfg.modelPath.empty()) return std::nullopt;
  require(std::filesystem::is_regular_file(cfg.modelPath), "model file not found: " + cfg.modelPath);
  if (cfg.featureContextPath.empty())
    throw ConfigError("classifier.model is set but features.context is empty");
  require(std::filesystem::is_regular_file(cfg.featureContextPath),
          "feature context file not found: " + cfg.featureContextPath);
  ClassifierBundle bundle{loadModel(cfg.modelPath), loadFeatureContext(cfg.featureContextPath)};
  bundle.context.saturationThreshold = cfg.featureDefaults.saturationThreshold;
  bundle.context.farthestNeighborThreshold = cfg.featureDefaults.farthestNeighborThreshold;
  require(bundle.model.inputDimension() == kFeatureDimension, "model input dimension is not 1320");
  return bundle;
}

/// Smallest crop the feature extractor accepts.
constexpr int kMinFeatureCrop = 3;

inline BandLabel classifyCrop(const FrameImage& crop, const ClassifierBundle& classifier) {
  const FeatureVector fv = assembleFeatureVector(crop, classifier.context);
  return elmPredict(classifier.model, fv.values) == ImageClass::natural ? BandLabel::natural : BandLabel::synthetic;
}

/// One label per grid cell; cells too small for features stay unlabeled.
inline std::vector<BandLabel> classifyCells(const FrameImage& frame, const BandGrid& grid,
                                            const std::optional<ClassifierBundle>& classifier) {
  std::vector<BandLabel> labels(grid.cells.size(), BandLabel::unlabeled);
  if (!classifier) return labels;
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const Band& c = grid.cells[i];
    if (c.w < kMinFeatureCrop || c.h < kMinFeatureCrop) continue;
    labels[i] = classifyCrop(crop(frame, c.x, c.y, c.w, c.h), *classifier);
  }
  return labels;
}

struct PipelineResult {
  BandDetection detection;
  std::vector<TextRegion> text;
  std::vector<BandLabel> cellLabels;
  ReasoningResult reasoning;

  [[nodiscard]] const FormatProfile& profile() const noexcept { return reasoning.profile; }
};

/// Change grid between two consecutive frames with the configured detector.
inline ChangeGrid detectChange(const FrameImage& curr, const FrameImage& prev, const ChangeConfig& cfg) {
  return cfg.method == ChangeMethod::pixel ? pixelChangeDetect(curr, prev, cfg.diffThreshold, cfg.cellSize)
                                           : histogramChangeDetect(curr, prev, cfg.distThreshold, cfg.cellSize);
}

/// `previous` holds earlier frames of the same shot, oldest first. With at
/// least change.min_static_pairs of them, natural cells that never changed
/// are relabeled synthetic before reasoning.
inline PipelineResult runPipeline(const FrameImage& frame, const PipelineConfig& cfg,
                                  const std::optional<ClassifierBundle>& classifier,
                                  const std::vector<FrameImage>& previous = {}) {
  require(!frame.empty(), "runPipeline: empty frame");
  PipelineResult out;
  out.detection = detectBands(frame, cfg.hough, cfg.edgeThreshold, cfg.seed);
  out.text = detectText(frame, cfg.text);
  out.cellLabels = classifyCells(frame, out.detection.grid, classifier);

  if (!previous.empty()) {
    std::vector<ChangeGrid> history;
    for (std::size_t i = 0; i < previous.size(); ++i) {
      const FrameImage& next = i + 1 < previous.size() ? previous[i + 1] : frame;
      history.push_back(detectChange(next, previous[i], cfg.change));
    }
    std::vector<Band> cells = out.detection.grid.cells;
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i].label = out.cellLabels[i];
    applyChangeVotes(cells, history, cfg.change.minStaticPairs);
    for (std::size_t i = 0; i < cells.size(); ++i) out.cellLabels[i] = cells[i].label;
  }

  out.reasoning = runThreeTier(frame, out.detection.grid, out.cellLabels, out.text, cfg.reasoning);
  return out;
}

struct ArtifactPaths {
  std::filesystem::path profile;  // band list text file
  std::filesystem::path json;
  std::filesystem::path overlay;  // empty unless written
};

/// Writes <stem>.txt, <stem>.json and, when enabled, <stem>_overlay.png.
inline ArtifactPaths writeArtifacts(const PipelineResult& result, const FrameImage& frame, const std::string& stem,
                                    const std::filesystem::path& outDir, bool overlay) {
  std::error_code ec;
  std::filesystem::create_directories(outDir, ec);
  require(std::filesystem::is_directory(outDir), "cannot create output directory " + outDir.string());
  ArtifactPaths paths{outDir / (stem + ".txt"), outDir / (stem + ".json"), {}};
  writeGroundTruth(paths.profile, result.profile().bands);
  nlohmann::json j = profileToJson(result.profile());
  j["frame"] = stem;
  j["x_cuts"] = result.detection.grid.xCuts;
  j["y_cuts"] = result.detection.grid.yCuts;
  j["text_regions"] = nlohmann::json::array();
  for (const auto& r : result.text) j["text_regions"].push_back({r.rect.x, r.rect.y, r.rect.w, r.rect.h});
  writeTextFile(paths.json, j.dump(2) + "\n");
  if (overlay) {
    paths.overlay = outDir / (stem + "_overlay.png");
    writeImage(renderOverlay(frame, result.profile().bands), paths.overlay);
  }
  return paths;
}

/// Runs `work(i)` for i in [0, count) on up to hardware_concurrency threads.
/// The first exception is rethrown after all workers finish.
template <typename Work>
void parallelFor(std::size_t count, Work work) {
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failureMutex;
  const auto loop = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        work(i);
      } catch (...) {
        std::lock_guard lock(failureMutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    loop();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(loop);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

/// Hough cells of a frame in labeling order: bottom row first, left to right.
inline std::vector<Band> bottomLeftOrder(std::vector<Band> cells) {
  std::ranges::stable_sort(cells, [](const Band& a, const Band& b) {
    return a.bottom() != b.bottom() ? a.bottom() > b.bottom() : a.x < b.x;
  });
  return cells;
}

inline std::vector<Band> labelingBands(const FrameImage& frame, const PipelineConfig& cfg) {
  return bottomLeftOrder(detectBands(frame, cfg.hough, cfg.edgeThreshold, cfg.seed).grid.cells);
}

/// Majority ground-truth class of a cell: the truth band covering most of it,
/// if that band covers more than half the cell.
inline std::optional<ImageClass> majorityClass(const Band& cell, const std::vector<Band>& truth) {
  const Band* best = nullptr;
  std::int64_t bestArea = 0;
  for (const Band& t : truth) {
    const auto a = intersectionArea(cell, t);
    if (a > bestArea) {
      bestArea = a;
      best = &t;
    }
  }
  if (best == nullptr || 2 * bestArea <= cell.area()) return std::nullopt;
  return best->label == BandLabel::natural ? ImageClass::natural : ImageClass::graphics;
}

inline std::string classDirectory(ImageClass c) { return c == ImageClass::natural ? "natural" : "artificial"; }

inline std::string cropFileName(const std::string& frameStem, std::size_t bandIndex) {
  return frameStem + "_band" + std::to_string(bandIndex) + ".png";
}

struct DatasetSummary {
  std::size_t natural = 0;
  std::size_t artificial = 0;
  std::size_t skipped = 0;
};

/// Non-interactive dataset tool: for every frame with a ground-truth file
/// (<stem>.txt beside it), each Hough cell at least 3x3 is cropped into
/// natural/ or artificial/ by majority truth class. Cells without a majority
/// are skipped.
inline DatasetSummary datasetFromFrames(const std::filesystem::path& framesDir, const std::filesystem::path& outDir,
                                        const PipelineConfig& cfg) {
  DatasetSummary summary;
  for (const char* sub : {"natural", "artificial"}) {
    std::error_code ec;
    std::filesystem::create_directories(outDir / sub, ec);
    require(std::filesystem::is_directory(outDir / sub), "cannot create " + (outDir / sub).string());
  }
  for (const auto& path : listImages(framesDir)) {
    const auto truthPath = std::filesystem::path(path).replace_extension(".txt");
    if (!std::filesystem::is_regular_file(truthPath)) continue;
    const FrameImage frame = readImage(path);
    const auto truth = readGroundTruth(truthPath, frame.width(), frame.height());
    const auto bands = labelingBands(frame, cfg);
    for (std::size_t k = 0; k < bands.size(); ++k) {
      const Band& b = bands[k];
      const auto cls = majorityClass(b, truth);
      if (!cls || b.w < kMinFeatureCrop || b.h < kMinFeatureCrop) {
        ++summary.skipped;
        continue;
      }
      writeImage(crop(frame, b.x, b.y, b.w, b.h),
                 outDir / classDirectory(*cls) / cropFileName(path.stem().string(), k));
      ++(*cls == ImageClass::natural ? summary.natural : summary.artificial);
    }
  }
  return summary;
}

/// Feature rows for every image in a directory, in file-name order.
inline std::vector<std::vector<double>> extractFeatures(const std::filesystem::path& dir, const FeatureContext& ctx) {
  const auto files = listImages(dir);
  std::vector<std::vector<double>> rows(files.size());
  parallelFor(files.size(), [&](std::size_t i) { rows[i] = assembleFeatureVector(readImage(files[i]), ctx).values; });
  return rows;
}

inline TrainingSet trainingSetFromRows(const std::vector<std::vector<double>>& graphics,
                                       const std::vector<std::vector<double>>& natural) {
  TrainingSet set;
  for (const auto& r : graphics) set.samples.push_back({r, ImageClass::graphics});
  for (const auto& r : natural) set.samples.push_back({r, ImageClass::natural});
  return set;
}

}  // namespace newsfmt
