#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "librarylens/color.hpp"
#include "librarylens/error.hpp"
#include "librarylens/image.hpp"
#include "librarylens/metadata.hpp"

namespace librarylens {

struct QuantizeConfig {
  int palette_size = 4;
  std::size_t max_pixels = 65536;
};

struct PaletteEntry {
  Rgb8 color;
  std::size_t pixel_count = 0;

  friend bool operator==(const PaletteEntry&, const PaletteEntry&) = default;
};

// Entries are ordered by pixel_count descending, then luminance ascending,
// then RGB; the first entry is the dominant color.
struct PaletteResult {
  std::vector<PaletteEntry> entries;
  Rgb8 dominant;
  std::size_t sampled_pixels = 0;

  friend bool operator==(const PaletteResult&, const PaletteResult&) = default;
};

// Deterministic stride sampling: every k-th pixel in raster order, with k the
// smallest stride that keeps the sample at or under max_pixels.
inline std::vector<Rgb8> sample_pixels(const Image& image, std::size_t max_pixels) {
  if (max_pixels == 0) throw ArgumentError("max_pixels must be >= 1");
  const std::size_t n = image.pixels.size();
  if (n <= max_pixels) return image.pixels;
  const std::size_t stride = (n + max_pixels - 1) / max_pixels;
  std::vector<Rgb8> out;
  out.reserve(n / stride + 1);
  for (std::size_t i = 0; i < n; i += stride) out.push_back(image.pixels[i]);
  return out;
}

namespace detail {

inline std::uint8_t channel(Rgb8 c, int ch) { return ch == 0 ? c.r : ch == 1 ? c.g : c.b; }

struct Box {
  std::vector<Rgb8> pixels;

  // (range, channel) of the widest channel; lowest channel index wins ties.
  std::pair<int, int> widest() const {
    std::array<int, 3> lo{255, 255, 255}, hi{0, 0, 0};
    for (auto p : pixels)
      for (int ch = 0; ch < 3; ++ch) {
        lo[ch] = std::min<int>(lo[ch], channel(p, ch));
        hi[ch] = std::max<int>(hi[ch], channel(p, ch));
      }
    std::pair<int, int> best{hi[0] - lo[0], 0};
    for (int ch = 1; ch < 3; ++ch)
      if (hi[ch] - lo[ch] > best.first) best = {hi[ch] - lo[ch], ch};
    return best;
  }

  Rgb8 mean() const {
    std::array<std::uint64_t, 3> sum{};
    for (auto p : pixels) {
      sum[0] += p.r;
      sum[1] += p.g;
      sum[2] += p.b;
    }
    const std::uint64_t n = pixels.size();
    auto rounded = [n](std::uint64_t s) { return static_cast<std::uint8_t>((2 * s + n) / (2 * n)); };
    return {rounded(sum[0]), rounded(sum[1]), rounded(sum[2])};
  }
};

inline bool palette_order(const PaletteEntry& a, const PaletteEntry& b) {
  if (a.pixel_count != b.pixel_count) return a.pixel_count > b.pixel_count;
  const double la = luminance(a.color), lb = luminance(b.color);
  if (la != lb) return la < lb;
  return a.color < b.color;
}

}  // namespace detail

// Median cut. Starting from one box over the sampled pixels, the box with the
// widest channel range is split on that channel at its median value: pixels
// at or below the lower median go low, the rest go high. Equal channel values
// never straddle a cut; when the median is the box maximum the cut moves just
// below it. Stops at palette_size boxes or when every box is a single color.
// Entry colors are rounded box means.
inline PaletteResult quantize(const Image& image, const QuantizeConfig& config = {}) {
  if (config.palette_size < 1 || config.palette_size > 16) throw ArgumentError("palette_size must be in [1, 16]");
  if (image.pixels.empty()) throw ArgumentError("cannot quantize an image with no pixels");

  std::vector<detail::Box> boxes;
  boxes.push_back({sample_pixels(image, config.max_pixels)});
  const std::size_t sampled = boxes.front().pixels.size();

  while (boxes.size() < static_cast<std::size_t>(config.palette_size)) {
    int best_range = 0, best_channel = 0;
    std::size_t best = boxes.size();
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      auto [range, ch] = boxes[i].widest();
      if (range > best_range) {
        best_range = range;
        best_channel = ch;
        best = i;
      }
    }
    if (best == boxes.size()) break;  // nothing splittable

    auto& px = boxes[best].pixels;
    const int ch = best_channel;
    std::sort(px.begin(), px.end(), [ch](Rgb8 a, Rgb8 b) {
      const auto ca = detail::channel(a, ch), cb = detail::channel(b, ch);
      return ca != cb ? ca < cb : a < b;
    });
    auto by_channel = [ch](Rgb8 a, std::uint8_t v) { return detail::channel(a, ch) < v; };
    const auto median = detail::channel(px[(px.size() + 1) / 2 - 1], ch);
    auto cut = std::partition_point(px.begin(), px.end(), [&](Rgb8 a) { return detail::channel(a, ch) <= median; });
    if (cut == px.end()) cut = std::lower_bound(px.begin(), px.end(), median, by_channel);
    detail::Box upper{std::vector<Rgb8>(cut, px.end())};
    px.erase(cut, px.end());
    boxes.push_back(std::move(upper));
  }

  PaletteResult out;
  out.sampled_pixels = sampled;
  for (const auto& box : boxes) out.entries.push_back({box.mean(), box.pixels.size()});
  std::sort(out.entries.begin(), out.entries.end(), detail::palette_order);
  out.dominant = out.entries.front().color;
  return out;
}

struct HistogramConfig {
  int bins = 256;
};

struct RgbHistogram {
  std::vector<std::size_t> r, g, b;

  friend bool operator==(const RgbHistogram&, const RgbHistogram&) = default;
};

// Channel value v lands in bin floor(v * bins / 256).
inline RgbHistogram rgb_histogram(const Image& image, const HistogramConfig& config = {}) {
  if (config.bins < 2 || config.bins > 256) throw ArgumentError("bins must be in [2, 256]");
  const auto bins = static_cast<std::size_t>(config.bins);
  RgbHistogram h{std::vector<std::size_t>(bins), std::vector<std::size_t>(bins), std::vector<std::size_t>(bins)};
  for (auto p : image.pixels) {
    ++h.r[p.r * bins / 256];
    ++h.g[p.g * bins / 256];
    ++h.b[p.b * bins / 256];
  }
  return h;
}

inline Rgb8 spine_color_for(const VolumeMeta& /*meta*/, const std::optional<Image>& cover,
                            const QuantizeConfig& config = {}) {
  if (!cover || cover->pixels.empty()) return kNeutralSpine;
  return quantize(*cover, config).dominant;
}

}  // namespace librarylens
