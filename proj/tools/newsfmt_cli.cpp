// newsfmt command line: one subcommand per stage plus the annotation server.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "newsfmt/newsfmt.hpp"
#include "newsfmt/annotation_service.hpp"

namespace fs = std::filesystem;
using namespace newsfmt;

namespace {

struct Common {
  std::string configPath;
  std::vector<std::string> overrides;

  PipelineConfig resolve() const { return resolveConfig(configPath, overrides); }
};

void addCommon(CLI::App* app, Common& common) {
  app->add_option("-c,--config", common.configPath, "Key-value config file (default: $NEWSFMT_CONFIG)");
  app->add_option("--set", common.overrides, "Override a config key, key=value (repeatable)");
}

/// Files given directly plus image files inside given directories.
std::vector<fs::path> expandInputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& p : listImages(in)) out.push_back(p);
    } else {
      require(fs::is_regular_file(in), "no such file: " + in);
      out.emplace_back(in);
    }
  }
  require(!out.empty(), "no input images");
  return out;
}

void writeValues(const fs::path& path, const std::vector<double>& values) {
  std::ofstream out(path);
  require(static_cast<bool>(out), "cannot write " + path.string());
  for (const double v : values) out << v << '\n';
}

int runDetect(const Common& common, const std::vector<std::string>& inputs, const std::string& outDir, bool overlay,
              const std::vector<std::string>& previous) {
  PipelineConfig cfg = common.resolve();
  if (overlay) cfg.writeOverlay = true;
  const auto classifier = loadClassifier(cfg);
  const auto files = expandInputs(inputs);
  std::vector<FrameImage> history;
  if (!previous.empty()) {
    require(files.size() == 1, "--previous needs exactly one input frame");
    for (const auto& p : previous) history.push_back(readImage(p));
  }
  std::vector<std::string> lines(files.size());
  parallelFor(files.size(), [&](std::size_t i) {
    const FrameImage frame = readImage(files[i]);
    const auto result = runPipeline(frame, cfg, classifier, history);
    const auto paths = writeArtifacts(result, frame, files[i].stem().string(), outDir, cfg.writeOverlay);
    lines[i] = files[i].string() + ": " + std::to_string(result.profile().bands.size()) + " bands -> " +
               paths.profile.string();
  });
  for (const auto& l : lines) std::cout << l << '\n';
  return 0;
}

int runText(const Common& common, const std::string& input, const std::string& dumpDir) {
  const PipelineConfig cfg = common.resolve();
  const FrameImage frame = readImage(input);
  const auto regions = detectText(frame, cfg.text);
  for (const auto& r : regions)
    std::cout << "text " << r.rect.x << ' ' << r.rect.y << ' ' << r.rect.w << ' ' << r.rect.h << '\n';
  if (!dumpDir.empty()) {
    fs::create_directories(dumpDir);
    const std::string stem = fs::path(input).stem().string();
    const GrayImage omega = enhancedEdgeMap(frame, cfg.text);
    writeValues(fs::path(dumpDir) / (stem + "_hp.txt"), horizontalProfile(omega));
    const auto rows = horizontalBands(omega, cfg.text);
    for (std::size_t k = 0; k < rows.size(); ++k)
      writeValues(fs::path(dumpDir) / (stem + "_vp" + std::to_string(k) + ".txt"), verticalProfile(omega, rows[k]));
  }
  return 0;
}

int runFeatureContext(const Common& common, const std::string& graphicsDir, const std::string& naturalDir,
                      const std::string& out) {
  const PipelineConfig cfg = common.resolve();
  saveFeatureContext(buildFeatureContext(fs::path(graphicsDir), fs::path(naturalDir), cfg.featureDefaults), out);
  std::cout << "wrote " << out << '\n';
  return 0;
}

int runFeatureExtract(const Common& common, const std::string& contextPath, const std::string& imagesDir,
                      const std::string& out) {
  const PipelineConfig cfg = common.resolve();
  FeatureContext ctx = loadFeatureContext(contextPath);
  ctx.saturationThreshold = cfg.featureDefaults.saturationThreshold;
  ctx.farthestNeighborThreshold = cfg.featureDefaults.farthestNeighborThreshold;
  const auto rows = extractFeatures(imagesDir, ctx);
  writeFeatureCsv(out, rows);
  std::cout << "wrote " << rows.size() << " rows to " << out << '\n';
  return 0;
}

void printMeasures(const std::string& name, const ClassifierMeasures& m) {
  const auto f = [](const std::optional<double>& v) {
    return v ? std::to_string(*v) : std::string("undefined");
  };
  std::cout << name << ": precision " << f(m.precision) << ", recall " << f(m.recall) << ", f-measure "
            << f(m.fMeasure) << ", balanced accuracy " << f(m.balancedAccuracy) << '\n';
}

int runTrain(const Common& common, const std::string& graphicsCsv, const std::string& naturalCsv,
             const std::string& out, int kfold) {
  const PipelineConfig cfg = common.resolve();
  const TrainingSet data = trainingSetFromRows(readFeatureCsv(graphicsCsv), readFeatureCsv(naturalCsv));
  if (kfold > 0) {
    const auto result = kFoldEvaluate(data, kfold, cfg.hiddenNodes, cfg.activation, cfg.seed);
    printMeasures("natural", result.natural);
    printMeasures("graphics", result.graphics);
  }
  const ElmModel model = elmTrain(data, cfg.hiddenNodes, cfg.activation, cfg.seed);
  saveModel(model, out);
  const auto fit = evaluateModel(model, data);
  std::cout << "trained on " << data.samples.size() << " samples, training accuracy "
            << static_cast<double>(fit.tp + fit.tn) / static_cast<double>(fit.total()) << ", wrote " << out << '\n';
  return 0;
}

int runClassify(const Common& common, const std::vector<std::string>& inputs) {
  const PipelineConfig cfg = common.resolve();
  const auto classifier = loadClassifier(cfg);
  if (!classifier) throw ConfigError("classify needs classifier.model and features.context");
  for (const auto& p : expandInputs(inputs))
    std::cout << p.string() << ' ' << toString(classifyCrop(readImage(p), *classifier)) << '\n';
  return 0;
}

int runChange(const Common& common, const std::string& curr, const std::string& prev, const std::string& mask) {
  const PipelineConfig cfg = common.resolve();
  const ChangeGrid grid = detectChange(readImage(curr), readImage(prev), cfg.change);
  std::cout << grid.columns << 'x' << grid.rows << " cells, " << grid.dynamicCount() << " dynamic\n";
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.columns; ++c) std::cout << (grid.at(c, r) == CellState::dynamic_content ? 'D' : '.');
    std::cout << '\n';
  }
  if (!mask.empty()) writeChangeMask(grid, mask);
  return 0;
}

int runEvaluate(const std::string& resultsDir, const std::string& truthDir, const std::string& jsonOut) {
  require(fs::is_directory(resultsDir), "not a directory: " + resultsDir);
  require(fs::is_directory(truthDir), "not a directory: " + truthDir);
  EvaluationReport report;
  std::vector<fs::path> truthFiles;
  for (const auto& e : fs::directory_iterator(truthDir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") truthFiles.push_back(e.path());
  }
  std::ranges::sort(truthFiles);
  for (const auto& t : truthFiles) {
    const fs::path r = fs::path(resultsDir) / t.filename();
    if (!fs::is_regular_file(r)) {
      std::cerr << "warning: no result for " << t.filename().string() << '\n';
      continue;
    }
    report.addFrame(t.stem().string(), readGroundTruth(r), readGroundTruth(t));
  }
  require(!report.frames.empty(), "no result files matched the ground truth");
  std::cout << report.toTable();
  if (!jsonOut.empty()) writeTextFile(jsonOut, report.toJson().dump(2) + "\n");
  return 0;
}

int runGenCorpus(int count, std::uint64_t seed, const std::string& out, int width, int height) {
  const auto frames = generateSyntheticCorpus(count, seed, CorpusOptions{width, height});
  writeCorpus(frames, out);
  std::cout << "wrote " << frames.size() << " frames to " << out << '\n';
  return 0;
}

int runMakeDataset(const Common& common, const std::string& framesDir, const std::string& out) {
  const PipelineConfig cfg = common.resolve();
  const auto s = datasetFromFrames(framesDir, out, cfg);
  std::cout << s.natural << " natural, " << s.artificial << " artificial, " << s.skipped << " skipped\n";
  return 0;
}

httplib::Server* activeServer = nullptr;

int runServe(const Common& common, ServiceOptions opt, const std::string& host, int port) {
  const PipelineConfig cfg = common.resolve();
  AnnotationService service(std::move(opt), cfg);
  httplib::Server server;
  service.registerRoutes(server);
  activeServer = &server;
  std::signal(SIGINT, [](int) {
    if (activeServer) activeServer->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (activeServer) activeServer->stop();
  });
  std::cout << "serving " << service.options().framesDir.string() << " on http://" << host << ':' << port << '\n'
            << std::flush;
  require(server.listen(host, port), "cannot listen on " + host + ":" + std::to_string(port));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"News video frame format detection"};
  app.require_subcommand(1);
  Common common;

  auto* detect = app.add_subcommand("detect", "Detect the band layout of frames");
  std::vector<std::string> detectInputs, previous;
  std::string detectOut = ".";
  bool overlay = false;
  addCommon(detect, common);
  detect->add_option("inputs", detectInputs, "Frame images or directories")->required();
  detect->add_option("-o,--out", detectOut, "Output directory");
  detect->add_flag("--overlay", overlay, "Also write an overlay image");
  detect->add_option("--previous", previous, "Earlier frames of the shot, oldest first (single input only)");

  auto* text = app.add_subcommand("text", "Locate text regions");
  std::string textInput, dumpDir;
  addCommon(text, common);
  text->add_option("input", textInput, "Frame image")->required();
  text->add_option("--dump-profiles", dumpDir, "Directory for projection profiles, one value per line");

  auto* features = app.add_subcommand("features", "Feature context and extraction");
  features->require_subcommand(1);
  auto* context = features->add_subcommand("context", "Build class statistics from example images");
  std::string graphicsDir, naturalDir, contextOut;
  addCommon(context, common);
  context->add_option("--graphics", graphicsDir, "Directory of graphics images")->required();
  context->add_option("--natural", naturalDir, "Directory of natural images")->required();
  context->add_option("-o,--out", contextOut, "Output JSON")->required();
  auto* extract = features->add_subcommand("extract", "Write 1320-value feature rows as CSV");
  std::string contextPath, imagesDir, csvOut;
  addCommon(extract, common);
  extract->add_option("--context", contextPath, "Feature context JSON")->required();
  extract->add_option("--images", imagesDir, "Directory of images")->required();
  extract->add_option("-o,--out", csvOut, "Output CSV")->required();

  auto* train = app.add_subcommand("train", "Train the natural/graphics classifier");
  std::string graphicsCsv, naturalCsv, modelOut;
  int kfold = 0;
  addCommon(train, common);
  train->add_option("--graphics", graphicsCsv, "Graphics feature CSV")->required();
  train->add_option("--natural", naturalCsv, "Natural feature CSV")->required();
  train->add_option("-o,--out", modelOut, "Output model file")->required();
  train->add_option("--kfold", kfold, "Also report k-fold cross-validation");

  auto* classify = app.add_subcommand("classify", "Classify images as natural or synthetic");
  std::vector<std::string> classifyInputs;
  addCommon(classify, common);
  classify->add_option("inputs", classifyInputs, "Images or directories")->required();

  auto* change = app.add_subcommand("change", "Static/dynamic cells between two frames");
  std::string curr, prev, mask;
  addCommon(change, common);
  change->add_option("current", curr, "Current frame")->required();
  change->add_option("previous", prev, "Previous frame")->required();
  change->add_option("--mask", mask, "Write a PGM mask at frame resolution");

  auto* evaluate = app.add_subcommand("evaluate", "Score detected profiles against ground truth");
  std::string resultsDir, truthDir, jsonOut;
  evaluate->add_option("--results", resultsDir, "Directory of detected band files")->required();
  evaluate->add_option("--truth", truthDir, "Directory of ground-truth band files")->required();
  evaluate->add_option("--json", jsonOut, "Also write the report as JSON");

  auto* gen = app.add_subcommand("gen-corpus", "Generate synthetic frames with ground truth");
  int count = 20, width = 480, height = 270;
  std::uint64_t seed = 1;
  std::string genOut;
  gen->add_option("-n,--count", count, "Number of frames");
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--width", width, "Frame width");
  gen->add_option("--height", height, "Frame height");
  gen->add_option("-o,--out", genOut, "Output directory")->required();

  auto* dataset = app.add_subcommand("make-dataset", "Crop Hough bands into natural/ and artificial/");
  std::string datasetFrames, datasetOut;
  addCommon(dataset, common);
  dataset->add_option("--frames", datasetFrames, "Frames with <stem>.txt ground truth")->required();
  dataset->add_option("-o,--out", datasetOut, "Output directory")->required();

  auto* serve = app.add_subcommand("serve", "Run the annotation HTTP service");
  ServiceOptions serviceOpt;
  std::string host = "127.0.0.1";
  int port = 8080;
  addCommon(serve, common);
  serve->add_option("--frames", serviceOpt.framesDir, "Frames directory")->required();
  serve->add_option("--annotations", serviceOpt.annotationsDir, "Ground-truth output directory");
  serve->add_option("--dataset", serviceOpt.datasetDir, "Labeled crop output directory");
  serve->add_option("--ui", serviceOpt.uiDir, "Static front-end directory");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*detect) return runDetect(common, detectInputs, detectOut, overlay, previous);
    if (*text) return runText(common, textInput, dumpDir);
    if (*context) return runFeatureContext(common, graphicsDir, naturalDir, contextOut);
    if (*extract) return runFeatureExtract(common, contextPath, imagesDir, csvOut);
    if (*train) return runTrain(common, graphicsCsv, naturalCsv, modelOut, kfold);
    if (*classify) return runClassify(common, classifyInputs);
    if (*change) return runChange(common, curr, prev, mask);
    if (*evaluate) return runEvaluate(resultsDir, truthDir, jsonOut);
    if (*gen) return runGenCorpus(count, seed, genOut, width, height);
    if (*dataset) return runMakeDataset(common, datasetFrames, datasetOut);
    if (*serve) return runServe(common, serviceOpt, host, port);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
