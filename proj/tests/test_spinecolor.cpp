#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace ll = librarylens;

namespace {

ll::Image from_pixels(std::vector<ll::Rgb8> px) {
  ll::Image img(px.size(), 1);
  img.pixels = std::move(px);
  return img;
}

std::vector<ll::Rgb8> repeat(ll::Rgb8 c, std::size_t n) { return std::vector<ll::Rgb8>(n, c); }

std::vector<ll::Rgb8> concat(std::vector<ll::Rgb8> a, const std::vector<ll::Rgb8>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

constexpr ll::Rgb8 kBlue{0, 0, 255}, kYellow{255, 255, 0}, kRed{255, 0, 0};

}  // namespace

TEST(Quantize, UniformImage) {
  auto r = ll::quantize(ll::Image(7, 5, {200, 30, 40}));
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0], (ll::PaletteEntry{{200, 30, 40}, 35}));
  EXPECT_EQ(r.dominant, (ll::Rgb8{200, 30, 40}));
}

TEST(Quantize, MajorityCluster) {
  auto r = ll::quantize(from_pixels(concat(repeat(kBlue, 6), repeat(kYellow, 4))));
  EXPECT_EQ(r.dominant, kBlue);
  // Two separable colors come back exactly.
  ASSERT_EQ(r.entries.size(), 2u);
  EXPECT_EQ(r.entries[1], (ll::PaletteEntry{kYellow, 4}));
}

TEST(Quantize, EqualCountsPreferDarker) {
  // Luminance oracle: blue 0.0722*255 = 18.4, red 0.2126*255 = 54.2.
  ASSERT_LT(0.0722 * 255, 0.2126 * 255);
  for (auto px : {concat(repeat(kRed, 4), repeat(kBlue, 4)), concat(repeat(kBlue, 4), repeat(kRed, 4))}) {
    auto r = ll::quantize(from_pixels(px), {4, 65536});
    EXPECT_EQ(r.dominant, kBlue);
  }
}

TEST(Quantize, ExactRecoveryWhenFewDistinctColors) {
  // Oracle: with k <= n distinct colors every color becomes its own entry
  // with its exact count.
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<ll::Rgb8, std::size_t> counts;
    const int k = 1 + static_cast<int>(rng() % 4);
    std::vector<ll::Rgb8> colors;
    while (static_cast<int>(colors.size()) < k) {
      ll::Rgb8 c{static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng())};
      if (std::find(colors.begin(), colors.end(), c) == colors.end()) colors.push_back(c);
    }
    std::vector<ll::Rgb8> px;
    for (int i = 0; i < 50 + static_cast<int>(rng() % 100); ++i) {
      auto c = colors[rng() % colors.size()];
      px.push_back(c);
      ++counts[c];
    }
    auto r = ll::quantize(from_pixels(px));
    std::map<ll::Rgb8, std::size_t> got;
    for (const auto& e : r.entries) got[e.color] += e.pixel_count;
    EXPECT_EQ(got, counts);
    EXPECT_EQ(r.entries.size(), counts.size());
  }
}

TEST(Quantize, PaletteSizeOneIsRoundedMean) {
  // (0 + 1) / 2 = 0.5 rounds up; (10 + 13) / 2 = 11.5 rounds up.
  auto r = ll::quantize(from_pixels({{0, 10, 255}, {1, 13, 255}}), {1, 65536});
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.dominant, (ll::Rgb8{1, 12, 255}));
}

TEST(Quantize, Errors) {
  EXPECT_THROW(ll::quantize(ll::Image{}), ll::ArgumentError);
  EXPECT_THROW(ll::quantize(ll::Image(1, 1), {0, 10}), ll::ArgumentError);
  EXPECT_THROW(ll::quantize(ll::Image(1, 1), {17, 10}), ll::ArgumentError);
  EXPECT_THROW(ll::sample_pixels(ll::Image(1, 1), 0), ll::ArgumentError);
}

TEST(Quantize, StrideSampling) {
  ll::Image img(10, 10);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = {static_cast<std::uint8_t>(i), 0, 0};
  // 100 pixels, cap 30 -> stride ceil(100/30) = 4 -> indices 0,4,...,96.
  auto s = ll::sample_pixels(img, 30);
  ASSERT_EQ(s.size(), 25u);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s[i].r, 4 * i);
  EXPECT_EQ(ll::quantize(img, {4, 30}).sampled_pixels, 25u);
  EXPECT_EQ(ll::sample_pixels(img, 100).size(), 100u);
}

TEST(Quantize, RandomImageProperties) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<std::size_t> dim(1, 96);
  for (int trial = 0; trial < 150; ++trial) {
    auto img = ll::testing::random_image(rng, dim(rng), dim(rng));
    const ll::QuantizeConfig cfg{4, 2000};
    auto r = ll::quantize(img, cfg);
    const auto sampled = ll::sample_pixels(img, cfg.max_pixels);
    ASSERT_LE(r.entries.size(), 4u);
    std::size_t total = 0;
    bool member = false;
    for (const auto& e : r.entries) {
      total += e.pixel_count;
      member = member || e.color == r.dominant;
    }
    EXPECT_EQ(total, sampled.size());
    EXPECT_EQ(r.sampled_pixels, sampled.size());
    EXPECT_TRUE(member);
    EXPECT_EQ(r.dominant, r.entries.front().color);
    EXPECT_EQ(r, ll::quantize(img, cfg));
    EXPECT_LE(ll::testing::palette_mse(sampled, r), ll::testing::palette_mse(sampled, ll::quantize(img, {1, 2000})));
    for (std::size_t i = 1; i < r.entries.size(); ++i) EXPECT_GE(r.entries[i - 1].pixel_count, r.entries[i].pixel_count);
  }
}

TEST(Histogram, WorkedExamples) {
  auto white = ll::Image(1, 1, {255, 255, 255});
  auto h256 = ll::rgb_histogram(white, {256});
  EXPECT_EQ(h256.r[255], 1u);
  EXPECT_EQ(std::accumulate(h256.r.begin(), h256.r.end(), std::size_t{0}), 1u);
  auto h24 = ll::rgb_histogram(white, {24});
  ASSERT_EQ(h24.g.size(), 24u);
  EXPECT_EQ(h24.g[23], 1u);  // floor(255 * 24 / 256) = 23
  auto black = ll::rgb_histogram(ll::Image(2, 1), {24});
  EXPECT_EQ(black.b[0], 2u);
  EXPECT_THROW(ll::rgb_histogram(white, {1}), ll::ArgumentError);
  EXPECT_THROW(ll::rgb_histogram(white, {257}), ll::ArgumentError);
}

TEST(Histogram, BinOracleAndConservation) {
  std::mt19937 rng(5);
  for (int bins : {2, 3, 24, 100, 256}) {
    auto img = ll::testing::random_image(rng, 17, 9);
    auto h = ll::rgb_histogram(img, {bins});
    std::vector<std::size_t> expect(static_cast<std::size_t>(bins));
    for (auto p : img.pixels) {
      // Oracle: the bin whose [lo, hi) interval in scaled space holds v.
      for (int b = 0; b < bins; ++b)
        if (b * 256 <= p.r * bins && p.r * bins < (b + 1) * 256) ++expect[static_cast<std::size_t>(b)];
    }
    EXPECT_EQ(h.r, expect);
    for (const auto* ch : {&h.r, &h.g, &h.b}) EXPECT_EQ(std::accumulate(ch->begin(), ch->end(), std::size_t{0}), img.size());
  }
}

TEST(SpineColor, Examples) {
  ll::VolumeMeta meta;
  EXPECT_EQ(ll::spine_color_for(meta, std::nullopt), (ll::Rgb8{120, 120, 120}));
  EXPECT_EQ(ll::spine_color_for(meta, ll::Image(3, 3, {10, 10, 10})), (ll::Rgb8{10, 10, 10}));
  EXPECT_EQ(ll::spine_color_for(meta, from_pixels(concat(repeat(kBlue, 6), repeat(kYellow, 4)))), kBlue);
}
