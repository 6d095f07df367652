#pragma once

// File and memory codecs. OpenCV is used for PNG/JPEG coding only; pixels
// are converted to the library's own RGB image type at this boundary.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "newsfmt/error.hpp"
#include "newsfmt/image.hpp"

namespace newsfmt {

namespace detail {

inline FrameImage fromBgr(const cv::Mat& bgr) {
  FrameImage out(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) out(x, y) = Rgb{row[x][2], row[x][1], row[x][0]};
  }
  return out;
}

inline cv::Mat toBgr(const FrameImage& img) {
  cv::Mat bgr(img.height(), img.width(), CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.width(); ++x) {
      const Rgb c = img(x, y);
      row[x] = cv::Vec3b(c.b, c.g, c.r);
    }
  }
  return bgr;
}

}  // namespace detail

inline FrameImage readImage(const std::filesystem::path& path) {
  require(std::filesystem::is_regular_file(path), "cannot read image " + path.string() + ": no such file");
  const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  require(!bgr.empty(), "cannot decode image " + path.string());
  return detail::fromBgr(bgr);
}

/// Format follows the extension (.png, .jpg, .ppm, ...).
inline void writeImage(const FrameImage& img, const std::filesystem::path& path) {
  require(!img.empty(), "cannot write an empty image");
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), detail::toBgr(img));
  } catch (const cv::Exception& e) {
    throw Error("cannot write image " + path.string() + ": " + e.what());
  }
  require(ok, "cannot write image " + path.string());
}

inline std::vector<unsigned char> encodePng(const FrameImage& img) {
  require(!img.empty(), "cannot encode an empty image");
  std::vector<unsigned char> bytes;
  require(cv::imencode(".png", detail::toBgr(img), bytes), "PNG encoding failed");
  return bytes;
}

inline FrameImage decodeImage(const std::vector<unsigned char>& bytes) {
  require(!bytes.empty(), "cannot decode empty image data");
  const cv::Mat bgr = cv::imdecode(bytes, cv::IMREAD_COLOR);
  require(!bgr.empty(), "cannot decode image data");
  return detail::fromBgr(bgr);
}

inline bool isImageFile(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" || ext == ".ppm";
}

/// Image files directly inside `dir`, sorted by file name.
inline std::vector<std::filesystem::path> listImages(const std::filesystem::path& dir) {
  require(std::filesystem::is_directory(dir), "not a directory: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && isImageFile(entry.path())) out.push_back(entry.path());
  }
  std::ranges::sort(out);
  return out;
}

}  // namespace newsfmt
