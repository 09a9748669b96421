#include <gtest/gtest.h>

#include "test_support.hpp"

namespace ll = librarylens;
using ll::testing::make_isbn13;
using ll::testing::make_volume;

namespace {

const ll::PaletteTable& palettes() {
  static const auto p = ll::PaletteTable::load(ll::resource_dir() / "palettes.json");
  return p;
}

ll::PaletteTable ramp_table(ll::Rgb8 low, ll::Rgb8 high) {
  auto p = palettes();
  p.rating_ramp = {low, high};
  return p;
}

ll::Volume rated(std::optional<double> rating) {
  auto v = make_volume(make_isbn13(1), "R", 200, 20);
  v.record.average_rating = rating.value_or(0.0);
  return v;
}

constexpr ll::EncodingMode kModes[] = {ll::EncodingMode::Original, ll::EncodingMode::Age, ll::EncodingMode::Genre,
                                       ll::EncodingMode::Rating};

}  // namespace

TEST(DisplayColor, OriginalIsIdentity) {
  auto v = make_volume(make_isbn13(1), "X", 200, 20, {12, 34, 56});
  EXPECT_EQ(ll::display_color(v, ll::EncodingMode::Original, palettes()), (ll::Rgb8{12, 34, 56}));
}

TEST(DisplayColor, RatingRampExamples) {
  const auto p = ramp_table({215, 48, 39}, {26, 152, 80});
  EXPECT_EQ(ll::display_color(rated(5.0), ll::EncodingMode::Rating, p), (ll::Rgb8{26, 152, 80}));
  EXPECT_EQ(ll::display_color(rated(1.0), ll::EncodingMode::Rating, p), (ll::Rgb8{215, 48, 39}));
  // Midpoints: (215+26)/2 = 120.5 -> 121, (48+152)/2 = 100, (39+80)/2 = 59.5 -> 60.
  EXPECT_EQ(ll::display_color(rated(3.0), ll::EncodingMode::Rating, p), (ll::Rgb8{121, 100, 60}));
  EXPECT_EQ(ll::display_color(rated(std::nullopt), ll::EncodingMode::Rating, p), (ll::Rgb8{128, 128, 128}));
  // Clamped outside [1, 5].
  EXPECT_EQ(ll::rating_color(7.0, p), (ll::Rgb8{26, 152, 80}));
  EXPECT_EQ(ll::rating_color(0.2, p), (ll::Rgb8{215, 48, 39}));
}

TEST(DisplayColor, RampParameterStrictlyIncreasing) {
  double prev = -1;
  for (int i = 100; i <= 500; ++i) {
    const double t = ll::rating_ramp_t(i / 100.0);
    EXPECT_GT(t, prev);
    prev = t;
  }
  EXPECT_EQ(ll::rating_ramp_t(1.0), 0.0);
  EXPECT_EQ(ll::rating_ramp_t(5.0), 1.0);
}

TEST(DisplayColor, FacetModesUsePalettes) {
  auto v = make_volume(make_isbn13(1), "X", 200, 20);
  for (auto g : ll::kAllGenres) {
    v.facets.genre = g;
    EXPECT_EQ(ll::display_color(v, ll::EncodingMode::Genre, palettes()), palettes().genre_colors.at(g));
  }
  for (auto a : ll::kAllAgeBands) {
    v.facets.age_band = a;
    EXPECT_EQ(ll::display_color(v, ll::EncodingMode::Age, palettes()), palettes().age_colors.at(a));
  }
  EXPECT_EQ(palettes().genre_colors.at(ll::Genre::Fantasy), *ll::parse_hex("#7b3294"));
}

TEST(DisplayColor, TotalOverRandomVolumes) {
  std::mt19937 rng(2);
  for (const auto& v : ll::testing::random_volumes(rng, 300))
    for (auto mode : kModes) EXPECT_NO_THROW(ll::display_color(v, mode, palettes()));
}

TEST(EncodingMode, Parse) {
  EXPECT_EQ(ll::parse_encoding("Genre"), ll::EncodingMode::Genre);
  EXPECT_EQ(ll::parse_encoding(" rating "), ll::EncodingMode::Rating);
  EXPECT_THROW(ll::parse_encoding("sepia"), ll::ArgumentError);
  for (auto mode : kModes) EXPECT_EQ(ll::parse_encoding(ll::to_string(mode)), mode);
}

TEST(PaletteTable, Validation) {
  auto doc = palettes().to_json();
  EXPECT_EQ(ll::PaletteTable::from_json(doc), palettes());
  auto dup = doc;
  dup["genre.scifi"] = dup["genre.fantasy"];
  EXPECT_THROW(ll::PaletteTable::from_json(dup), ll::ConfigError);
  auto missing = doc;
  missing.erase("age.adult");
  EXPECT_THROW(ll::PaletteTable::from_json(missing), ll::ConfigError);
  auto bad = doc;
  bad["rating.low"] = "red";
  EXPECT_THROW(ll::PaletteTable::from_json(bad), ll::ConfigError);
  EXPECT_THROW(ll::PaletteTable::load("/nonexistent/palettes.json"), ll::ConfigError);
}

TEST(RenderSvg, EmptyLayout) {
  ll::VolumeSet none;
  const ll::ShelfSpec spec{3, 500, 200};
  auto svg = ll::render_svg(ll::pack({}, none, spec), none, spec, ll::EncodingMode::Original, palettes(), true);
  std::string why;
  EXPECT_TRUE(ll::testing::svg_well_formed(svg, &why)) << why;
  EXPECT_TRUE(ll::testing::svg_spines(svg).empty());
  std::size_t outlines = 0;
  for (auto at = svg.find("class=\"shelf\""); at != std::string::npos; at = svg.find("class=\"shelf\"", at + 1)) ++outlines;
  EXPECT_EQ(outlines, 3u);
  EXPECT_EQ(svg.find(">overflow<"), std::string::npos);
}

TEST(RenderSvg, SingleBookGeometry) {
  ll::VolumeSet set({make_volume(make_isbn13(1), "Solo", 210, 20, {1, 2, 3})});
  const ll::ShelfSpec spec{1, 300, 250};
  auto layout = ll::pack({make_isbn13(1)}, set, spec);
  auto svg = ll::render_svg(layout, set, spec, ll::EncodingMode::Original, palettes(), false);
  auto rects = ll::testing::svg_spines(svg);
  ASSERT_EQ(rects.size(), 1u);
  EXPECT_EQ(rects[0].x, 0.0);
  EXPECT_EQ(rects[0].w, 20.0);
  EXPECT_EQ(rects[0].h, 210.0);
  EXPECT_EQ(rects[0].fill, "#010203");
  EXPECT_EQ(rects[0].isbn, make_isbn13(1));
  // Standing on the baseline: bottom edge equals the baseline y.
  const auto line = svg.substr(svg.find("<line class=\"baseline\""));
  EXPECT_DOUBLE_EQ(rects[0].y + rects[0].h, std::stod(ll::testing::attr(line, "y1")));
}

TEST(RenderSvg, LabelsToggle) {
  ll::VolumeSet set({make_volume(make_isbn13(1), "Fish & <Chips>", 210, 20)});
  const ll::ShelfSpec spec{2, 300, 250};
  auto layout = ll::pack({make_isbn13(1)}, set, spec);
  auto plain = ll::render_svg(layout, set, spec, ll::EncodingMode::Original, palettes(), false);
  // Only shelf captions remain without labels.
  std::size_t texts = 0;
  for (auto at = plain.find("<text"); at != std::string::npos; at = plain.find("<text", at + 1)) {
    ++texts;
    EXPECT_EQ(plain.compare(at, 21, "<text class=\"caption\""), 0);
  }
  EXPECT_EQ(texts, 2u);
  EXPECT_NE(plain.find(">Shelf 2<"), std::string::npos);
  auto labeled = ll::render_svg(layout, set, spec, ll::EncodingMode::Original, palettes(), true);
  EXPECT_NE(labeled.find("Fish &amp; &lt;Chips&gt;"), std::string::npos);
  EXPECT_NE(labeled.find(">Shelf 2<"), std::string::npos);
  EXPECT_NE(labeled.find("clip-path"), std::string::npos);
  EXPECT_TRUE(ll::testing::svg_well_formed(labeled));
}

TEST(RenderSvg, OverflowStripAndCaption) {
  ll::VolumeSet set({make_volume(make_isbn13(1), "Fits", 200, 100), make_volume(make_isbn13(2), "Spills", 200, 90)});
  const ll::ShelfSpec spec{1, 150, 250};
  auto layout = ll::pack({make_isbn13(1), make_isbn13(2)}, set, spec);
  ASSERT_EQ(layout.overflow.size(), 1u);
  auto svg = ll::render_svg(layout, set, spec, ll::EncodingMode::Original, palettes(), false);
  EXPECT_NE(svg.find(">overflow<"), std::string::npos);
  auto rects = ll::testing::svg_spines(svg);
  ASSERT_EQ(rects.size(), 2u);
  EXPECT_EQ(rects[1].cls, "spine overflow");
  EXPECT_GT(rects[1].y, rects[0].y + rects[0].h);
}

TEST(RenderSvg, ParseBackAndDeterminism) {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const auto spec = ll::testing::random_spec(rng);
    ll::VolumeSet set(ll::testing::random_volumes(rng, rng() % 50));
    auto layout = ll::pack(ll::sort_volumes(set.all(), ll::SortStrategy::parse("color")), set, spec);
    for (auto mode : kModes) {
      const bool labels = trial % 2 == 0;
      auto svg = ll::render_svg(layout, set, spec, mode, palettes(), labels);
      EXPECT_EQ(svg, ll::render_svg(layout, set, spec, mode, palettes(), labels));
      std::string why;
      ASSERT_TRUE(ll::testing::svg_well_formed(svg, &why)) << why;
      auto rects = ll::testing::svg_spines(svg);
      EXPECT_EQ(rects.size(), layout.placements.size() + layout.overflow.size());
      EXPECT_FALSE(ll::testing::spines_overlap(rects));
      for (const auto& r : rects) EXPECT_EQ(r.fill, ll::to_hex(ll::display_color(set.at(r.isbn), mode, palettes())));
    }
  }
}
