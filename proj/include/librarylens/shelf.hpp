#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "librarylens/color.hpp"
#include "librarylens/error.hpp"
#include "librarylens/text.hpp"
#include "librarylens/volume.hpp"

namespace librarylens {

struct ShelfSpec {
  int shelf_count = 5;
  double shelf_width_mm = 760.0;
  double shelf_clearance_mm = 300.0;

  void validate() const {
    if (shelf_count < 1) throw ArgumentError("shelf_count must be >= 1");
    if (!(shelf_width_mm >= 50.0) || !std::isfinite(shelf_width_mm)) throw ArgumentError("shelf_width_mm must be >= 50");
    if (!(shelf_clearance_mm >= 100.0) || !std::isfinite(shelf_clearance_mm))
      throw ArgumentError("shelf_clearance_mm must be >= 100");
  }

  friend bool operator==(const ShelfSpec&, const ShelfSpec&) = default;
};

// ---------------------------------------------------------------------------
// Sorting

enum class SortKey { Size, Color, Alpha, AuthorSeries, Rating, Genre, Age };

inline std::string_view to_string(SortKey k) {
  switch (k) {
    case SortKey::Size: return "size";
    case SortKey::Color: return "color";
    case SortKey::Alpha: return "alpha";
    case SortKey::AuthorSeries: return "authorseries";
    case SortKey::Rating: return "rating";
    case SortKey::Genre: return "genre";
    case SortKey::Age: return "age";
  }
  return "alpha";
}

struct SortTerm {
  SortKey key = SortKey::Alpha;
  bool descending = false;

  friend bool operator==(const SortTerm&, const SortTerm&) = default;
};

struct SortStrategy {
  std::vector<SortTerm> terms;

  void validate() const {
    if (terms.empty()) throw ArgumentError("sort strategy has no keys");
    for (std::size_t i = 0; i < terms.size(); ++i)
      for (std::size_t j = i + 1; j < terms.size(); ++j)
        if (terms[i].key == terms[j].key)
          throw ArgumentError("sort key '" + std::string(librarylens::to_string(terms[i].key)) + "' repeated");
  }

  // "genre,-rating,alpha": comma-separated, '-' for descending, case-insensitive.
  static SortStrategy parse(std::string_view s) {
    SortStrategy out;
    for (const auto& raw : text::split(s, ',')) {
      auto token = text::fold(text::trim(raw));
      bool desc = false;
      if (!token.empty() && (token.front() == '-' || token.front() == '+')) {
        desc = token.front() == '-';
        token = std::string(text::trim(std::string_view(token).substr(1)));
      }
      std::optional<SortKey> key;
      for (auto k : {SortKey::Size, SortKey::Color, SortKey::Alpha, SortKey::AuthorSeries, SortKey::Rating,
                     SortKey::Genre, SortKey::Age})
        if (token == librarylens::to_string(k)) key = k;
      if (!key) throw ArgumentError("unknown sort key '" + std::string(text::trim(raw)) + "'");
      out.terms.push_back({*key, desc});
    }
    out.validate();
    return out;
  }

  std::string to_string() const {
    std::string out;
    for (const auto& t : terms) {
      if (!out.empty()) out += ',';
      if (t.descending) out += '-';
      out += librarylens::to_string(t.key);
    }
    return out;
  }

  friend bool operator==(const SortStrategy&, const SortStrategy&) = default;
};

// Title with a leading "a", "an" or "the" removed, ASCII case-folded.
inline std::string alpha_key(std::string_view title) {
  auto folded = text::fold(text::trim(title));
  for (std::string_view article : {"the ", "an ", "a "}) {
    if (folded.size() > article.size() && std::string_view(folded).substr(0, article.size()) == article) {
      folded = std::string(text::trim(std::string_view(folded).substr(article.size())));
      break;
    }
  }
  return folded;
}

// Grays (saturation < 0.10) after chromatic colors; chromatic colors by 30-degree
// hue bucket; lightness descending within a bucket (and among grays).
struct ColorKey {
  int gray = 0;
  int hue_bucket = 0;
  double lightness = 0;
};

inline ColorKey color_key(Rgb8 c) {
  const auto hsl = to_hsl(c);
  ColorKey k;
  k.lightness = hsl.lightness;
  if (hsl.saturation < 0.10) {
    k.gray = 1;
  } else {
    k.hue_bucket = std::min(11, static_cast<int>(hsl.hue / 30.0));
  }
  return k;
}

namespace detail {

template <typename T>
int cmp3(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

struct SortRow {
  const Volume* v = nullptr;
  ColorKey color;
  std::string alpha;
  std::string author;
  std::string series;
};

inline int compare_key(SortKey key, const SortRow& a, const SortRow& b) {
  switch (key) {
    case SortKey::Size: {
      if (int c = cmp3(a.v->height_mm(), b.v->height_mm())) return c;
      return cmp3(a.v->spine_thickness_mm(), b.v->spine_thickness_mm());
    }
    case SortKey::Color: {
      if (int c = cmp3(a.color.gray, b.color.gray)) return c;
      if (int c = cmp3(a.color.hue_bucket, b.color.hue_bucket)) return c;
      return cmp3(b.color.lightness, a.color.lightness);
    }
    case SortKey::Alpha: return cmp3(a.alpha, b.alpha);
    case SortKey::AuthorSeries: {
      if (int c = cmp3(a.author, b.author)) return c;
      if (int c = cmp3(a.series, b.series)) return c;
      const auto& ia = a.v->record.series_index;
      const auto& ib = b.v->record.series_index;
      if (ia.has_value() != ib.has_value()) return ia.has_value() ? 1 : -1;
      if (ia && ib)
        if (int c = cmp3(*ia, *ib)) return c;
      return cmp3(a.alpha, b.alpha);
    }
    case SortKey::Rating: return cmp3(*a.v->rating(), *b.v->rating());
    case SortKey::Genre: return cmp3(static_cast<int>(a.v->facets.genre), static_cast<int>(b.v->facets.genre));
    case SortKey::Age: return cmp3(static_cast<int>(a.v->facets.age_band), static_cast<int>(b.v->facets.age_band));
  }
  return 0;
}

}  // namespace detail

// Lexicographic over the strategy's keys, then ISBN-13 ascending. Unknown
// ratings sort last in either direction.
inline std::vector<std::string> sort_volumes(std::span<const Volume> volumes, const SortStrategy& strategy) {
  strategy.validate();
  std::vector<detail::SortRow> rows;
  rows.reserve(volumes.size());
  for (const auto& v : volumes) {
    rows.push_back({&v, color_key(v.spine_color), alpha_key(v.title()), text::fold(v.record.author_lf),
                    text::fold(v.record.series_name.value_or(""))});
  }
  std::sort(rows.begin(), rows.end(), [&](const detail::SortRow& a, const detail::SortRow& b) {
    for (const auto& term : strategy.terms) {
      if (term.key == SortKey::Rating) {
        const bool ka = a.v->rating().has_value(), kb = b.v->rating().has_value();
        if (ka != kb) return ka;
        if (!ka) continue;
      }
      int c = detail::compare_key(term.key, a, b);
      if (term.descending) c = -c;
      if (c != 0) return c < 0;
    }
    return a.v->isbn13() < b.v->isbn13();
  });
  std::vector<std::string> order;
  order.reserve(rows.size());
  for (const auto& r : rows) order.push_back(r.v->isbn13());
  return order;
}

// ---------------------------------------------------------------------------
// Packing

enum class Orientation { Upright, Flat };

inline std::string_view to_string(Orientation o) { return o == Orientation::Upright ? "upright" : "flat"; }

struct Placement {
  std::string isbn13;
  int shelf_index = 0;
  double x_offset_mm = 0;
  Orientation orientation = Orientation::Upright;
  double width_mm = 0;  // occupied shelf width

  friend bool operator==(const Placement&, const Placement&) = default;
};

// Placements are listed shelf by shelf, left to right.
struct SceneLayout {
  std::vector<std::string> order;
  std::vector<Placement> placements;
  std::vector<std::string> overflow;
  bool manual = false;

  friend bool operator==(const SceneLayout&, const SceneLayout&) = default;
};

// Slack for accumulated rounding in shelf-width sums.
inline constexpr double kWidthEpsilonMm = 1e-9;

// Orientation and occupied width a volume needs under `spec`, or nullopt when
// it is taller than the clearance both ways or wider than a whole shelf.
inline std::optional<std::pair<Orientation, double>> fit(const Volume& v, const ShelfSpec& spec) {
  std::pair<Orientation, double> f;
  if (v.height_mm() <= spec.shelf_clearance_mm)
    f = {Orientation::Upright, v.spine_thickness_mm()};
  else if (v.spine_thickness_mm() <= spec.shelf_clearance_mm)
    f = {Orientation::Flat, v.height_mm()};
  else
    return std::nullopt;
  if (f.second > spec.shelf_width_mm + kWidthEpsilonMm) return std::nullopt;
  return f;
}

// Greedy left-to-right fill in flow order. A volume that does not fit the rest
// of the current shelf moves the cursor to the next shelf; when there is no
// next shelf, or the volume fits no shelf at all, it goes to overflow and the
// cursor stays put.
inline SceneLayout pack(const std::vector<std::string>& order, const VolumeSet& volumes, const ShelfSpec& spec) {
  spec.validate();
  SceneLayout out;
  out.order = order;
  int shelf = 0;
  double used = 0.0;
  for (const auto& isbn : order) {
    const auto& v = volumes.at(isbn);
    auto f = fit(v, spec);
    if (!f) {
      out.overflow.push_back(isbn);
      continue;
    }
    const auto [orientation, width] = *f;
    if (used + width > spec.shelf_width_mm + kWidthEpsilonMm) {
      if (shelf + 1 >= spec.shelf_count) {
        out.overflow.push_back(isbn);
        continue;
      }
      ++shelf;
      used = 0.0;
    }
    out.placements.push_back({isbn, shelf, used, orientation, width});
    used += width;
  }
  return out;
}

// Removes order[from] and reinserts it at `to` (an index into the shortened
// list), then re-packs.
inline SceneLayout move(const SceneLayout& layout, long long from, long long to, const VolumeSet& volumes,
                        const ShelfSpec& spec) {
  const auto n = static_cast<long long>(layout.order.size());
  if (from < 0 || from >= n) throw ArgumentError("move source index " + std::to_string(from) + " out of range");
  if (to < 0 || to >= n) throw ArgumentError("move target index " + std::to_string(to) + " out of range");
  auto order = layout.order;
  auto item = std::move(order[static_cast<std::size_t>(from)]);
  order.erase(order.begin() + from);
  order.insert(order.begin() + to, std::move(item));
  auto out = pack(order, volumes, spec);
  out.manual = true;
  return out;
}

struct ResortResult {
  SceneLayout layout;
  bool discarded_manual_edits = false;
};

inline ResortResult resort(const SceneLayout& layout, const SortStrategy& strategy, const VolumeSet& volumes,
                           const ShelfSpec& spec) {
  return {pack(sort_volumes(volumes.all(), strategy), volumes, spec), layout.manual};
}

}  // namespace librarylens
