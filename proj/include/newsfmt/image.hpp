#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "newsfmt/error.hpp"

namespace newsfmt {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend constexpr auto operator<=>(const Rgb&, const Rgb&) = default;
};

/// Row-major raster. A default-constructed image is empty; operations that
/// need pixels reject it.
template <typename T>
class Image {
 public:
  using value_type = T;

  Image() = default;

  Image(int width, int height, T fill = T{}) : width_(width), height_(height) {
    require(width >= 0 && height >= 0, "image dimensions must be non-negative");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  [[nodiscard]] bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

  [[nodiscard]] std::span<T> pixels() noexcept { return data_; }
  [[nodiscard]] std::span<const T> pixels() const noexcept { return data_; }

  [[nodiscard]] std::span<T> row(int y) noexcept {
    return std::span<T>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }
  [[nodiscard]] std::span<const T> row(int y) const noexcept {
    return std::span<const T>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  [[nodiscard]] std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using FrameImage = Image<Rgb>;
using GrayImage = Image<std::uint8_t>;
/// Real-valued image, normalized to [0,1] where noted (gradient magnitudes).
using FloatImage = Image<double>;
/// 15-bit packed colour codes, see toMonochrome32().
using CodeImage = Image<std::uint16_t>;

/// Copies the region [x, x+w) x [y, y+h). The region must lie inside the image.
template <typename T>
Image<T> crop(const Image<T>& img, int x, int y, int w, int h) {
  require(w > 0 && h > 0 && x >= 0 && y >= 0 && x + w <= img.width() && y + h <= img.height(),
          "crop region outside image");
  Image<T> out(w, h);
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) out(col, row) = img(x + col, y + row);
  }
  return out;
}

}  // namespace newsfmt
