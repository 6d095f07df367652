#pragma once

// Seeded synthetic news frames with exact ground truth. A frame is a stack of
// full-width rows: a header graphic, a main row (camera content, possibly
// split or with a graphics side panel), an optional lower-third caption and a
// ticker.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "newsfmt/error.hpp"
#include "newsfmt/geometry.hpp"
#include "newsfmt/ground_truth.hpp"
#include "newsfmt/image.hpp"
#include "newsfmt/image_io.hpp"
#include "newsfmt/reasoning.hpp"

namespace newsfmt {

struct CorpusFrame {
  std::string name;
  FrameImage image;
  std::vector<Band> truth;  // row-major
};

struct CorpusOptions {
  int width = 480;
  int height = 270;
};

namespace corpus_detail {

inline std::uint8_t clampByte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

inline int grayOf(Rgb c) { return (c.r + c.g + c.b + 1) / 3; }

inline int uniformInt(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniformReal(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Rgb randomColor(std::mt19937_64& rng, int lo, int hi) {
  return Rgb{static_cast<std::uint8_t>(uniformInt(rng, lo, hi)), static_cast<std::uint8_t>(uniformInt(rng, lo, hi)),
             static_cast<std::uint8_t>(uniformInt(rng, lo, hi))};
}

enum class Fill : std::uint8_t { solid, gradient, natural, text };

struct Region {
  Band rect;
  Fill fill = Fill::solid;
  Rgb color{};
  Rgb second{};      // gradient end / text foreground
  double textCoverage = 1.0;
};

}  // namespace corpus_detail

inline void paintSolid(FrameImage& img, const Band& r, Rgb color) {
  for (int y = r.y; y < r.bottom(); ++y) {
    for (int x = r.x; x < r.right(); ++x) img(x, y) = color;
  }
}

/// Top-to-bottom linear blend from `top` to `bottom`.
inline void paintGradient(FrameImage& img, const Band& r, Rgb top, Rgb bottom) {
  for (int y = r.y; y < r.bottom(); ++y) {
    const double t = r.h > 1 ? static_cast<double>(y - r.y) / (r.h - 1) : 0.0;
    const Rgb c{corpus_detail::clampByte(top.r + t * (bottom.r - top.r)),
                corpus_detail::clampByte(top.g + t * (bottom.g - top.g)),
                corpus_detail::clampByte(top.b + t * (bottom.b - top.b))};
    for (int x = r.x; x < r.right(); ++x) img(x, y) = c;
  }
}

/// Camera-like content around a mean colour: low-frequency shading, a few
/// soft blobs and per-channel sensor noise.
inline void paintNatural(FrameImage& img, const Band& r, Rgb base, std::mt19937_64& rng) {
  using namespace corpus_detail;
  const double fx = uniformReal(rng, 0.5, 2.0) * 2.0 * std::numbers::pi / r.w;
  const double fy = uniformReal(rng, 0.5, 2.0) * 2.0 * std::numbers::pi / r.h;
  const double px = uniformReal(rng, 0.0, 2.0 * std::numbers::pi);
  const double py = uniformReal(rng, 0.0, 2.0 * std::numbers::pi);
  struct Blob {
    double cx, cy, sigma, dr, dg, db;
  };
  std::vector<Blob> blobs(static_cast<std::size_t>(uniformInt(rng, 2, 5)));
  for (auto& b : blobs) {
    b = {uniformReal(rng, r.x, r.right()), uniformReal(rng, r.y, r.bottom()), uniformReal(rng, 12.0, 35.0),
         uniformReal(rng, -18.0, 18.0), uniformReal(rng, -18.0, 18.0), uniformReal(rng, -18.0, 18.0)};
  }
  std::normal_distribution<double> noise(0.0, 5.0);
  for (int y = r.y; y < r.bottom(); ++y) {
    for (int x = r.x; x < r.right(); ++x) {
      const double shade = 6.0 * std::sin(fx * (x - r.x) + px) + 6.0 * std::sin(fy * (y - r.y) + py);
      double dr = shade, dg = shade, db = shade;
      for (const auto& b : blobs) {
        const double d2 = ((x - b.cx) * (x - b.cx) + (y - b.cy) * (y - b.cy)) / (2.0 * b.sigma * b.sigma);
        const double w = std::exp(-d2);
        dr += w * b.dr;
        dg += w * b.dg;
        db += w * b.db;
      }
      img(x, y) = Rgb{clampByte(base.r + dr + noise(rng)), clampByte(base.g + dg + noise(rng)),
                      clampByte(base.b + db + noise(rng))};
    }
  }
}

/// Straight-edged object standing on the bottom of a natural region (a wall
/// or building): shifts the content inside a sub-rectangle by a fixed offset.
inline void paintStructure(FrameImage& img, const Band& r, std::mt19937_64& rng) {
  using namespace corpus_detail;
  const int w = std::min(r.w - 20, uniformInt(rng, 60, 150));
  const int h = std::min(r.h - 20, uniformInt(rng, 60, 160));
  if (w < 30 || h < 30) return;
  const int x0 = uniformInt(rng, r.x + 10, r.right() - 10 - w);
  const int y0 = r.bottom() - h;
  const int shift = uniformInt(rng, 0, 1) == 1 ? uniformInt(rng, 35, 55) : -uniformInt(rng, 35, 55);
  for (int y = y0; y < r.bottom(); ++y) {
    for (int x = x0; x < x0 + w; ++x) {
      Rgb& c = img(x, y);
      c = Rgb{clampByte(c.r + shift), clampByte(c.g + shift), clampByte(c.b + shift)};
    }
  }
}

/// Caption stripe: solid background with a run of dense glyph-like strokes
/// starting at the left, 4 px padding above and below, covering `coverage`
/// of the stripe width.
inline void paintTextStripe(FrameImage& img, const Band& r, Rgb background, Rgb foreground, double coverage,
                            std::mt19937_64& rng) {
  using namespace corpus_detail;
  paintSolid(img, r, background);
  constexpr int kPad = 4;
  const int glyphHeight = r.h - 2 * kPad;
  if (glyphHeight < 4) return;
  const int end = r.x + static_cast<int>(std::lround(r.w * std::clamp(coverage, 0.0, 1.0))) - kPad;
  const auto stroke = [&](int x0, int y0, int w, int h) {
    for (int y = std::max(y0, r.y); y < std::min(y0 + h, r.bottom()); ++y) {
      for (int x = std::max(x0, r.x); x < std::min(x0 + w, end); ++x) img(x, y) = foreground;
    }
  };
  int x = r.x + kPad + uniformInt(rng, 0, 4);
  int wordLeft = uniformInt(rng, 3, 7);
  while (x + 4 < end) {
    const int gw = uniformInt(rng, 5, 9);
    const int top = r.y + kPad + uniformInt(rng, 0, 2);
    const int bottom = r.y + r.h - kPad - uniformInt(rng, 0, 2);
    const int gh = bottom - top;
    // Two stems and one or two bars, positioned at random.
    stroke(x, top + uniformInt(rng, 0, gh / 4), 2, gh - uniformInt(rng, 0, gh / 4));
    if (uniformInt(rng, 0, 1) == 1) stroke(x + gw - 2, top, 2, gh);
    stroke(x, top + uniformInt(rng, 0, gh - 2), gw, 2);
    if (uniformInt(rng, 0, 2) == 0) stroke(x, top + uniformInt(rng, 0, gh - 2), gw, 2);
    x += gw + uniformInt(rng, 2, 3);
    if (--wordLeft == 0) {
      x += uniformInt(rng, 6, 10);
      wordLeft = uniformInt(rng, 3, 7);
    }
  }
}

namespace corpus_detail {

/// Picks colours so that touching regions differ by at least 60 gray levels
/// and 32 red levels, restarting when the greedy choice gets stuck.
inline void assignColors(std::vector<Region>& regions, std::mt19937_64& rng) {
  const auto separated = [](Rgb a, Rgb b) {
    return std::abs(grayOf(a) - grayOf(b)) >= 60 && std::abs(a.r - b.r) >= 32;
  };
  for (int attempt = 0; attempt < 1000; ++attempt) {
    bool ok = true;
    for (std::size_t i = 0; i < regions.size() && ok; ++i) {
      Region& reg = regions[i];
      const int lo = reg.fill == Fill::natural ? 45 : 10;
      const int hi = reg.fill == Fill::natural ? 210 : 245;
      bool placed = false;
      for (int tries = 0; tries < 200 && !placed; ++tries) {
        reg.color = randomColor(rng, lo, hi);
        // Caption backgrounds stay dark or light so the glyphs can contrast.
        const int g = grayOf(reg.color);
        placed = reg.fill != Fill::text || g <= 90 || g >= 165;
        for (std::size_t j = 0; j < i && placed; ++j) {
          if (relation(reg.rect, regions[j].rect) != kNone && !separated(reg.color, regions[j].color)) {
            placed = false;
            break;
          }
        }
      }
      ok = placed;
    }
    if (ok) break;
    require(attempt < 999, "corpus: could not assign region colours");
  }
  for (Region& reg : regions) {
    if (reg.fill == Fill::gradient) {
      const auto shift = [&](std::uint8_t c) { return clampByte(c + uniformInt(rng, -14, 14)); };
      reg.second = Rgb{shift(reg.color.r), shift(reg.color.g), shift(reg.color.b)};
    } else if (reg.fill == Fill::text) {
      reg.second = grayOf(reg.color) <= 90 ? randomColor(rng, 215, 255) : randomColor(rng, 0, 40);
    }
  }
}

inline BandLabel labelOf(Fill f) {
  switch (f) {
    case Fill::natural: return BandLabel::natural;
    case Fill::text: return BandLabel::text;
    case Fill::solid:
    case Fill::gradient: break;
  }
  return BandLabel::synthetic;
}

}  // namespace corpus_detail

/// One frame drawn from `rng`.
inline CorpusFrame generateFrame(std::mt19937_64& rng, const std::string& name, const CorpusOptions& opt = {}) {
  using namespace corpus_detail;
  require(opt.width >= 160 && opt.height >= 150, "corpus: frame too small");
  const int W = opt.width;
  const int H = opt.height;
  std::vector<Region> regions;
  const auto add = [&](int x, int y, int w, int h, Fill f, double coverage = 1.0) {
    regions.push_back(Region{Band{x, y, w, h, labelOf(f)}, f, {}, {}, coverage});
  };

  const int headerH = uniformInt(rng, 28, 44);
  const int tickerH = uniformInt(rng, 22, 30);
  const bool lowerThird = uniformInt(rng, 0, 1) == 1;
  const int lowerH = lowerThird ? uniformInt(rng, 24, 32) : 0;
  const int mainY = headerH;
  const int mainH = H - headerH - tickerH - lowerH;

  const Fill headerFill = uniformInt(rng, 0, 1) == 1 ? Fill::gradient : Fill::solid;
  if (uniformInt(rng, 0, 99) < 35) {
    // Channel logo box at one end of the header. Its vertical edge is shorter
    // than the default minimum line length, as with real logo bugs.
    const int logoW = uniformInt(rng, 50, 90);
    const bool logoLeft = uniformInt(rng, 0, 1) == 1;
    add(logoLeft ? 0 : W - logoW, 0, logoW, headerH, Fill::solid);
    add(logoLeft ? logoW : 0, 0, W - logoW, headerH, headerFill);
  } else {
    add(0, 0, W, headerH, headerFill);
  }

  switch (uniformInt(rng, 0, 2)) {
    case 0:
      add(0, mainY, W, mainH, Fill::natural);
      break;
    case 1: {
      const int split = uniformInt(rng, W * 35 / 100, W * 65 / 100);
      add(0, mainY, split, mainH, Fill::natural);
      add(split, mainY, W - split, mainH, Fill::natural);
      break;
    }
    default: {
      const int panelW = uniformInt(rng, W * 20 / 100, W * 30 / 100);
      const bool panelLeft = uniformInt(rng, 0, 1) == 1;
      const int panelX = panelLeft ? 0 : W - panelW;
      add(panelLeft ? panelW : 0, mainY, W - panelW, mainH, Fill::natural);
      if (uniformInt(rng, 0, 1) == 1) {
        // Stacked panel boxes: their shared edge extends across the natural
        // region when the grid is built.
        const int upperH = uniformInt(rng, mainH * 35 / 100, mainH * 65 / 100);
        add(panelX, mainY, panelW, upperH, Fill::solid);
        add(panelX, mainY + upperH, panelW, mainH - upperH,
            uniformInt(rng, 0, 1) == 1 ? Fill::gradient : Fill::solid);
      } else {
        add(panelX, mainY, panelW, mainH, uniformInt(rng, 0, 1) == 1 ? Fill::gradient : Fill::solid);
      }
      break;
    }
  }

  if (lowerThird) add(0, mainY + mainH, W, lowerH, Fill::text, uniformReal(rng, 0.55, 0.9));
  add(0, H - tickerH, W, tickerH, Fill::text, 1.0);

  assignColors(regions, rng);

  CorpusFrame frame;
  frame.name = name;
  frame.image = FrameImage(W, H);
  for (const Region& reg : regions) {
    switch (reg.fill) {
      case Fill::solid: paintSolid(frame.image, reg.rect, reg.color); break;
      case Fill::gradient: paintGradient(frame.image, reg.rect, reg.color, reg.second); break;
      case Fill::natural:
        paintNatural(frame.image, reg.rect, reg.color, rng);
        if (uniformInt(rng, 0, 99) < 35) paintStructure(frame.image, reg.rect, rng);
        break;
      case Fill::text: paintTextStripe(frame.image, reg.rect, reg.color, reg.second, reg.textCoverage, rng); break;
    }
    frame.truth.push_back(reg.rect);
  }
  std::ranges::stable_sort(frame.truth, rowMajorLess);
  return frame;
}

inline std::string corpusFrameName(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%04d", index);
  return buf;
}

inline std::vector<CorpusFrame> generateSyntheticCorpus(int count, std::uint64_t seed, const CorpusOptions& opt = {}) {
  require(count >= 1, "corpus: count must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<CorpusFrame> frames;
  frames.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) frames.push_back(generateFrame(rng, corpusFrameName(i), opt));
  return frames;
}

/// Writes <name>.png and <name>.txt (ground truth) per frame.
inline void writeCorpus(const std::vector<CorpusFrame>& frames, const std::filesystem::path& outDir) {
  std::error_code ec;
  std::filesystem::create_directories(outDir, ec);
  require(!ec && std::filesystem::is_directory(outDir), "cannot create directory " + outDir.string());
  for (const auto& f : frames) {
    writeImage(f.image, outDir / (f.name + ".png"));
    writeGroundTruth(outDir / (f.name + ".txt"), f.truth);
  }
}

}  // namespace newsfmt
