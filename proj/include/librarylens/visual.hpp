#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "librarylens/color.hpp"
#include "librarylens/facets.hpp"
#include "librarylens/shelf.hpp"
#include "librarylens/text.hpp"

namespace librarylens {

enum class EncodingMode { Original, Age, Genre, Rating };

inline std::string_view to_string(EncodingMode m) {
  switch (m) {
    case EncodingMode::Original: return "original";
    case EncodingMode::Age: return "age";
    case EncodingMode::Genre: return "genre";
    case EncodingMode::Rating: return "rating";
  }
  return "original";
}

inline EncodingMode parse_encoding(std::string_view s) {
  const auto t = text::fold(text::trim(s));
  for (auto m : {EncodingMode::Original, EncodingMode::Age, EncodingMode::Genre, EncodingMode::Rating})
    if (t == to_string(m)) return m;
  throw ArgumentError("unknown encoding '" + std::string(s) + "'");
}

struct RatingRamp {
  Rgb8 low;   // at 1.0
  Rgb8 high;  // at 5.0

  friend bool operator==(const RatingRamp&, const RatingRamp&) = default;
};

// Palette config is a flat JSON object of key -> "#rrggbb":
//   genre.<token>, age.<token> (tokens lower-cased), rating.low, rating.high, rating.missing
struct PaletteTable {
  std::map<Genre, Rgb8> genre_colors;
  std::map<AgeBand, Rgb8> age_colors;
  RatingRamp rating_ramp;
  Rgb8 missing_rating{128, 128, 128};

  static std::string genre_key(Genre g) { return "genre." + text::fold(to_string(g)); }
  static std::string age_key(AgeBand a) { return "age." + text::fold(to_string(a)); }

  void validate() const {
    std::set<Rgb8> seen;
    for (auto g : kAllGenres) {
      auto it = genre_colors.find(g);
      if (it == genre_colors.end()) throw ConfigError("palette lacks " + genre_key(g));
      if (!seen.insert(it->second).second) throw ConfigError("genre colors must be pairwise distinct");
    }
    seen.clear();
    for (auto a : kAllAgeBands) {
      auto it = age_colors.find(a);
      if (it == age_colors.end()) throw ConfigError("palette lacks " + age_key(a));
      if (!seen.insert(it->second).second) throw ConfigError("age colors must be pairwise distinct");
    }
  }

  static PaletteTable from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("palette config must be a flat object");
    auto color = [&](const std::string& key) {
      auto it = doc.find(key);
      if (it == doc.end() || !it->is_string()) throw ConfigError("palette lacks " + key);
      auto c = parse_hex(it->get<std::string>());
      if (!c) throw ConfigError("palette entry " + key + " is not #rrggbb");
      return *c;
    };
    PaletteTable t;
    for (auto g : kAllGenres) t.genre_colors[g] = color(genre_key(g));
    for (auto a : kAllAgeBands) t.age_colors[a] = color(age_key(a));
    t.rating_ramp = {color("rating.low"), color("rating.high")};
    t.missing_rating = color("rating.missing");
    t.validate();
    return t;
  }

  static PaletteTable load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open palette config " + file.string());
    try {
      return from_json(json::parse(in));
    } catch (const json::exception& e) {
      throw ConfigError("bad palette config " + file.string() + ": " + e.what());
    }
  }

  json to_json() const {
    json j = json::object();
    for (const auto& [g, c] : genre_colors) j[genre_key(g)] = to_hex(c);
    for (const auto& [a, c] : age_colors) j[age_key(a)] = to_hex(c);
    j["rating.low"] = to_hex(rating_ramp.low);
    j["rating.high"] = to_hex(rating_ramp.high);
    j["rating.missing"] = to_hex(missing_rating);
    return j;
  }

  friend bool operator==(const PaletteTable&, const PaletteTable&) = default;
};

// Position of a rating on the ramp: 0 at 1.0, 1 at 5.0, clamped.
inline double rating_ramp_t(double rating) { return std::clamp((rating - 1.0) / 4.0, 0.0, 1.0); }

inline Rgb8 rating_color(std::optional<double> rating, const PaletteTable& p) {
  if (!rating) return p.missing_rating;
  const double t = rating_ramp_t(*rating);
  auto lerp = [t](std::uint8_t lo, std::uint8_t hi) {
    return static_cast<std::uint8_t>(std::clamp(std::round(lo + t * (static_cast<double>(hi) - lo)), 0.0, 255.0));
  };
  const auto& r = p.rating_ramp;
  return {lerp(r.low.r, r.high.r), lerp(r.low.g, r.high.g), lerp(r.low.b, r.high.b)};
}

inline Rgb8 display_color(const Volume& v, EncodingMode mode, const PaletteTable& p) {
  switch (mode) {
    case EncodingMode::Original: return v.spine_color;
    case EncodingMode::Age: return p.age_colors.at(v.facets.age_band);
    case EncodingMode::Genre: return p.genre_colors.at(v.facets.genre);
    case EncodingMode::Rating: return rating_color(v.rating(), p);
  }
  return v.spine_color;
}

// ---------------------------------------------------------------------------
// SVG blueprint

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default:
        // Control characters are not allowed in XML 1.0.
        if (static_cast<unsigned char>(c) >= 0x20 || c == '\t' || c == '\n') out += c;
    }
  }
  return out;
}

}  // namespace detail

struct SvgStyle {
  double caption_band = 24.0;  // space above each shelf for its caption
  double board = 18.0;         // gap below each shelf baseline
  double min_overflow_strip = 40.0;
};

// Layout: 1 mm = 1 user unit. Shelf i is captioned, then a clearance-tall
// band whose bottom edge is its baseline. Books stand on the baseline at
// x = x_offset. Overflow volumes follow in a strip below, wrapped at the shelf
// width. Output is a pure function of its inputs.
inline std::string render_svg(const SceneLayout& layout, const VolumeSet& volumes, const ShelfSpec& spec,
                              EncodingMode mode, const PaletteTable& palettes, bool labels,
                              const SvgStyle& style = {}) {
  using text::fmt_num;
  spec.validate();
  std::ostringstream body;
  std::size_t clip_id = 0;

  auto label = [&](const Volume& v, double x, double y, double w, double h, bool vertical) {
    if (!labels) return;
    const std::string id = "clip" + std::to_string(clip_id++);
    body << "<clipPath id=\"" << id << "\"><path d=\"M" << fmt_num(x) << ' ' << fmt_num(y) << "h" << fmt_num(w)
         << "v" << fmt_num(h) << "h" << fmt_num(-w) << "z\"/></clipPath>";
    const double cx = x + w / 2, cy = y + h / 2;
    const double size = std::clamp((vertical ? w : h) * 0.6, 2.0, 10.0);
    body << "<g clip-path=\"url(#" << id << ")\"><text class=\"label\" x=\"" << fmt_num(cx) << "\" y=\""
         << fmt_num(cy) << "\" font-size=\"" << fmt_num(size)
         << "\" text-anchor=\"middle\" dominant-baseline=\"central\"";
    if (vertical) body << " transform=\"rotate(-90 " << fmt_num(cx) << ' ' << fmt_num(cy) << ")\"";
    body << '>' << detail::xml_escape(v.title()) << "</text></g>\n";
  };

  auto spine = [&](const Volume& v, double x, double y, double w, double h, const char* cls) {
    body << "<rect class=\"" << cls << "\" x=\"" << fmt_num(x) << "\" y=\"" << fmt_num(y) << "\" width=\""
         << fmt_num(w) << "\" height=\"" << fmt_num(h) << "\" fill=\"" << to_hex(display_color(v, mode, palettes))
         << "\" stroke=\"#222222\" stroke-width=\"0.4\" data-isbn=\"" << v.isbn13() << "\"/>\n";
  };

  double y = 0.0;
  std::size_t next = 0;
  for (int shelf = 0; shelf < spec.shelf_count; ++shelf) {
    body << "<text class=\"caption\" x=\"0\" y=\"" << fmt_num(y + style.caption_band - 8)
         << "\" font-size=\"12\">Shelf " << (shelf + 1) << "</text>\n";
    const double top = y + style.caption_band;
    const double baseline = top + spec.shelf_clearance_mm;
    body << "<path class=\"shelf\" d=\"M0 " << fmt_num(top) << "H" << fmt_num(spec.shelf_width_mm) << "V"
         << fmt_num(baseline) << "H0z\" fill=\"none\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
    body << "<line class=\"baseline\" x1=\"0\" y1=\"" << fmt_num(baseline) << "\" x2=\""
         << fmt_num(spec.shelf_width_mm) << "\" y2=\"" << fmt_num(baseline)
         << "\" stroke=\"#5a3e1b\" stroke-width=\"3\"/>\n";
    for (; next < layout.placements.size() && layout.placements[next].shelf_index == shelf; ++next) {
      const auto& p = layout.placements[next];
      const auto& v = volumes.at(p.isbn13);
      const bool upright = p.orientation == Orientation::Upright;
      const double h = upright ? v.height_mm() : v.spine_thickness_mm();
      spine(v, p.x_offset_mm, baseline - h, p.width_mm, h, upright ? "spine upright" : "spine flat");
      label(v, p.x_offset_mm, baseline - h, p.width_mm, h, upright);
    }
    y = baseline + style.board;
  }

  // Overflow strip.
  const double strip_top = y + style.caption_band;
  if (!layout.overflow.empty())
    body << "<text class=\"caption\" x=\"0\" y=\"" << fmt_num(y + style.caption_band - 8)
         << "\" font-size=\"12\">overflow</text>\n";
  double row_top = strip_top, row_x = 0.0, row_h = 0.0, widest = spec.shelf_width_mm;
  for (const auto& isbn : layout.overflow) {
    const auto& v = volumes.at(isbn);
    const double w = v.spine_thickness_mm(), h = v.height_mm();
    if (row_x > 0 && row_x + w > spec.shelf_width_mm) {
      row_top += row_h + 4.0;
      row_x = row_h = 0.0;
    }
    spine(v, row_x, row_top, w, h, "spine overflow");
    label(v, row_x, row_top, w, h, true);
    row_x += w;
    row_h = std::max(row_h, h);
    widest = std::max(widest, row_x);
  }
  const double strip_h = std::max(style.min_overflow_strip, row_top + row_h - strip_top);
  body << "<path class=\"overflow-strip\" d=\"M0 " << fmt_num(strip_top) << "H" << fmt_num(widest) << "V"
       << fmt_num(strip_top + strip_h) << "H0z\" fill=\"none\" stroke=\"#cc3333\" stroke-dasharray=\"6 4\"/>\n";
  const double total_h = strip_top + strip_h + style.board;

  std::ostringstream doc;
  doc << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt_num(widest) << "mm\" height=\""
      << fmt_num(total_h) << "mm\" viewBox=\"0 0 " << fmt_num(widest) << ' ' << fmt_num(total_h)
      << "\" font-family=\"sans-serif\" data-encoding=\"" << to_string(mode) << "\">\n"
      << body.str() << "</svg>\n";
  return doc.str();
}

}  // namespace librarylens
