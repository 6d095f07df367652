#pragma once

// HTTP endpoints for the annotation front-end:
//
//   GET  /frames                          [{"id", "file"}]
//   GET  /frames/{id}/image               PNG
//   GET  /frames/{id}/bands               Hough cells, bottom-left first
//   GET  /frames/{id}/annotations         saved ground truth
//   POST /frames/{id}/annotations         {"bands": [{label,x,y,w,h}]} -> <id>.txt
//   POST /frames/{id}/bands/{k}/label     {"label": natural|artificial} -> crop
//
// Errors are JSON {"error": ...} with 404 (unknown frame), 400 (malformed
// body) or 409 (band index out of range). Source frames are only read.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "newsfmt/config.hpp"
#include "newsfmt/error.hpp"
#include "newsfmt/ground_truth.hpp"
#include "newsfmt/image_io.hpp"
#include "newsfmt/pipeline.hpp"

// After Eigen: httplib pulls in <resolv.h>, whose _res macro collides with
// Eigen parameter names.
#include <httplib.h>

namespace newsfmt {

struct ServiceOptions {
  std::filesystem::path framesDir;
  std::filesystem::path annotationsDir;  // defaults to framesDir
  std::filesystem::path datasetDir;      // defaults to framesDir/dataset
  std::filesystem::path uiDir;           // optional static files served at /
};

class AnnotationService {
 public:
  AnnotationService(ServiceOptions options, PipelineConfig cfg) : opt_(std::move(options)), cfg_(std::move(cfg)) {
    require(std::filesystem::is_directory(opt_.framesDir), "frames directory not found: " + opt_.framesDir.string());
    if (opt_.annotationsDir.empty()) opt_.annotationsDir = opt_.framesDir;
    if (opt_.datasetDir.empty()) opt_.datasetDir = opt_.framesDir / "dataset";
  }

  void registerRoutes(httplib::Server& server) {
    server.Get("/frames", [this](const httplib::Request&, httplib::Response& res) { listFrames(res); });
    server.Get(R"(/frames/([^/]+)/image)", [this](const httplib::Request& req, httplib::Response& res) {
      withFrame(req, res, [&](const std::filesystem::path& file) { image(file, res); });
    });
    server.Get(R"(/frames/([^/]+)/bands)", [this](const httplib::Request& req, httplib::Response& res) {
      withFrame(req, res, [&](const std::filesystem::path& file) { bands(req.matches[1], file, res); });
    });
    server.Get(R"(/frames/([^/]+)/annotations)", [this](const httplib::Request& req, httplib::Response& res) {
      withFrame(req, res, [&](const std::filesystem::path&) { getAnnotations(req.matches[1], res); });
    });
    server.Post(R"(/frames/([^/]+)/annotations)", [this](const httplib::Request& req, httplib::Response& res) {
      withFrame(req, res, [&](const std::filesystem::path& file) { postAnnotations(req.matches[1], file, req, res); });
    });
    server.Post(R"(/frames/([^/]+)/bands/(\d+)/label)", [this](const httplib::Request& req, httplib::Response& res) {
      withFrame(req, res, [&](const std::filesystem::path& file) { postLabel(req.matches[1], file, req, res); });
    });
    if (!opt_.uiDir.empty()) server.set_mount_point("/", opt_.uiDir.string());
  }

  [[nodiscard]] const ServiceOptions& options() const noexcept { return opt_; }

 private:
  static void sendJson(httplib::Response& res, const nlohmann::json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void sendError(httplib::Response& res, int status, const std::string& message) {
    sendJson(res, {{"error", message}}, status);
  }

  /// Frame files keyed by id (file stem).
  std::map<std::string, std::filesystem::path> frames() const {
    std::map<std::string, std::filesystem::path> out;
    for (const auto& p : listImages(opt_.framesDir)) out.emplace(p.stem().string(), p);
    return out;
  }

  template <typename Handler>
  void withFrame(const httplib::Request& req, httplib::Response& res, Handler handler) {
    const std::string id = req.matches[1];
    const auto all = frames();
    const auto it = all.find(id);
    if (it == all.end()) return sendError(res, 404, "unknown frame '" + id + "'");
    try {
      handler(it->second);
    } catch (const std::exception& e) {
      sendError(res, 500, e.what());
    }
  }

  std::mutex& frameMutex(const std::string& id) {
    std::lock_guard lock(registryMutex_);
    auto& m = frameMutexes_[id];
    if (!m) m = std::make_unique<std::mutex>();
    return *m;
  }

  /// Cached Hough cells in labeling order.
  std::vector<Band> frameBands(const std::string& id, const FrameImage& frame) {
    {
      std::lock_guard lock(registryMutex_);
      if (const auto it = bandCache_.find(id); it != bandCache_.end()) return it->second;
    }
    auto bands = labelingBands(frame, cfg_);
    std::lock_guard lock(registryMutex_);
    return bandCache_.emplace(id, std::move(bands)).first->second;
  }

  void listFrames(httplib::Response& res) const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [id, path] : frames()) out.push_back({{"id", id}, {"file", path.filename().string()}});
    sendJson(res, out);
  }

  static void image(const std::filesystem::path& file, httplib::Response& res) {
    const auto bytes = encodePng(readImage(file));
    res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
  }

  void bands(const std::string& id, const std::filesystem::path& file, httplib::Response& res) {
    const FrameImage frame = readImage(file);
    const auto list = frameBands(id, frame);
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t k = 0; k < list.size(); ++k) {
      const Band& b = list[k];
      arr.push_back({{"index", k}, {"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}});
    }
    sendJson(res, {{"frame", id}, {"width", frame.width()}, {"height", frame.height()}, {"bands", arr}});
  }

  static nlohmann::json bandsToJson(const std::vector<Band>& bands) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Band& b : bands)
      arr.push_back({{"label", toString(b.label)}, {"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}});
    return arr;
  }

  std::filesystem::path annotationPath(const std::string& id) const { return opt_.annotationsDir / (id + ".txt"); }

  void getAnnotations(const std::string& id, httplib::Response& res) {
    std::lock_guard lock(frameMutex(id));
    const auto path = annotationPath(id);
    const auto list = std::filesystem::is_regular_file(path) ? readGroundTruth(path) : std::vector<Band>{};
    sendJson(res, {{"frame", id}, {"bands", bandsToJson(list)}});
  }

  /// Validates {"bands": [{"label", "x", "y", "w", "h"}, ...]} against the
  /// frame size. Returns an error message or the parsed bands.
  static std::variant<std::string, std::vector<Band>> parseAnnotationBody(const std::string& body, int width,
                                                                          int height) {
    const auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded()) return std::string("body is not valid JSON");
    if (!j.is_object() || !j.contains("bands") || !j["bands"].is_array())
      return std::string("body must be an object with a 'bands' array");
    std::vector<Band> out;
    for (std::size_t i = 0; i < j["bands"].size(); ++i) {
      const auto& e = j["bands"][i];
      const std::string where = "bands[" + std::to_string(i) + "]";
      if (!e.is_object()) return where + " must be an object";
      for (const char* key : {"x", "y", "w", "h"}) {
        if (!e.contains(key) || !e[key].is_number_integer()) return where + "." + key + " must be an integer";
      }
      if (!e.contains("label") || !e["label"].is_string()) return where + ".label must be a string";
      const auto label = parseBandLabel(e["label"].get<std::string>());
      if (!label || *label == BandLabel::unlabeled) return where + ".label must be natural, synthetic or text";
      Band b{e["x"].get<int>(), e["y"].get<int>(), e["w"].get<int>(), e["h"].get<int>(), *label};
      if (b.w <= 0 || b.h <= 0) return where + " has zero area";
      if (b.x < 0 || b.y < 0 || b.right() > width || b.bottom() > height) return where + " lies outside the frame";
      out.push_back(b);
    }
    return out;
  }

  void postAnnotations(const std::string& id, const std::filesystem::path& file, const httplib::Request& req,
                       httplib::Response& res) {
    const FrameImage frame = readImage(file);
    auto parsed = parseAnnotationBody(req.body, frame.width(), frame.height());
    if (const auto* err = std::get_if<std::string>(&parsed)) return sendError(res, 400, *err);
    auto& list = std::get<std::vector<Band>>(parsed);
    std::ranges::stable_sort(list, rowMajorLess);
    std::lock_guard lock(frameMutex(id));
    std::error_code ec;
    std::filesystem::create_directories(opt_.annotationsDir, ec);
    writeGroundTruth(annotationPath(id), list);
    sendJson(res, {{"frame", id}, {"bands", bandsToJson(list)}});
  }

  void postLabel(const std::string& id, const std::filesystem::path& file, const httplib::Request& req,
                 httplib::Response& res) {
    const auto j = nlohmann::json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("label") || !j["label"].is_string())
      return sendError(res, 400, "body must be {\"label\": \"natural\" | \"artificial\"}");
    const std::string label = j["label"];
    std::optional<ImageClass> cls;
    if (label == "natural") cls = ImageClass::natural;
    if (label == "artificial" || label == "synthetic") cls = ImageClass::graphics;
    if (!cls) return sendError(res, 400, "label must be natural or artificial");

    const FrameImage frame = readImage(file);
    const auto list = frameBands(id, frame);
    std::size_t k = 0;
    try {
      k = std::stoul(req.matches[2]);
    } catch (const std::exception&) {
      return sendError(res, 409, "band index out of range");
    }
    if (k >= list.size())
      return sendError(res, 409, "band index " + std::to_string(k) + " out of range (" +
                                     std::to_string(list.size()) + " bands)");
    const Band& b = list[k];
    const auto dir = opt_.datasetDir / classDirectory(*cls);
    const auto out = dir / cropFileName(id, k);
    std::lock_guard lock(frameMutex(id));
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    writeImage(crop(frame, b.x, b.y, b.w, b.h), out);
    // A relabeled band keeps only its latest crop.
    const ImageClass other = *cls == ImageClass::natural ? ImageClass::graphics : ImageClass::natural;
    std::filesystem::remove(opt_.datasetDir / classDirectory(other) / cropFileName(id, k), ec);
    sendJson(res, {{"frame", id}, {"band", k}, {"class", classDirectory(*cls)},
                   {"file", std::filesystem::relative(out, opt_.datasetDir).generic_string()}});
  }

  ServiceOptions opt_;
  PipelineConfig cfg_;
  std::mutex registryMutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> frameMutexes_;
  std::map<std::string, std::vector<Band>> bandCache_;
};

}  // namespace newsfmt
