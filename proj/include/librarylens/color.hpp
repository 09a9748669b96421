#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace librarylens {

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend auto operator<=>(const Rgb8&, const Rgb8&) = default;
};

inline constexpr Rgb8 kNeutralSpine{120, 120, 120};

// Rec. 709 relative luminance on the raw 0-255 channel values.
inline double luminance(Rgb8 c) {
  return 0.2126 * c.r + 0.7152 * c.g + 0.0722 * c.b;
}

inline std::string to_hex(Rgb8 c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

// Accepts "#rrggbb" or "rrggbb", either case.
inline std::optional<Rgb8> parse_hex(std::string_view s) {
  if (!s.empty() && s.front() == '#') s.remove_prefix(1);
  if (s.size() != 6) return std::nullopt;
  auto nibble = [](char ch) -> int {
    if (ch >= '0' && ch <= '9') return ch - '0';
    if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
    if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
    return -1;
  };
  std::uint8_t out[3];
  for (int i = 0; i < 3; ++i) {
    int hi = nibble(s[2 * i]), lo = nibble(s[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return Rgb8{out[0], out[1], out[2]};
}

struct Hsl {
  double hue = 0;         // degrees, [0, 360)
  double saturation = 0;  // [0, 1]
  double lightness = 0;   // [0, 1]
};

inline Hsl to_hsl(Rgb8 c) {
  const double r = c.r / 255.0, g = c.g / 255.0, b = c.b / 255.0;
  const double hi = std::max({r, g, b}), lo = std::min({r, g, b});
  Hsl out;
  out.lightness = (hi + lo) / 2.0;
  const double delta = hi - lo;
  if (delta == 0.0) return out;
  out.saturation = out.lightness > 0.5 ? delta / (2.0 - hi - lo) : delta / (hi + lo);
  double h;
  if (hi == r)
    h = std::fmod((g - b) / delta, 6.0);
  else if (hi == g)
    h = (b - r) / delta + 2.0;
  else
    h = (r - g) / delta + 4.0;
  h *= 60.0;
  if (h < 0) h += 360.0;
  out.hue = h >= 360.0 ? h - 360.0 : h;
  return out;
}

}  // namespace librarylens
