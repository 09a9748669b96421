#include <atomic>
#include <thread>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace ll = librarylens;
using ll::testing::TempDir;
using ll::testing::test_data;

TEST(EstimateDimensions, WorkedExamples) {
  // 4.0 + 0.06 * 300 = 22.0
  EXPECT_EQ(ll::estimate_dimensions(300, ll::Binding::Paperback), (ll::Dimensions{210.0, 22.0, ll::DimensionSource::Estimated}));
  EXPECT_EQ(ll::estimate_dimensions(0, ll::Binding::Hardcover), (ll::Dimensions{235.0, 18.0, ll::DimensionSource::Estimated}));
  // 4 + 240 = 244 -> clamped to 120
  EXPECT_EQ(ll::estimate_dimensions(4000, ll::Binding::Hardcover), (ll::Dimensions{235.0, 120.0, ll::DimensionSource::Estimated}));
}

TEST(EstimateDimensions, HeightsByBinding) {
  EXPECT_EQ(ll::estimate_dimensions(100, ll::Binding::MassMarket).height_mm, 175.0);
  EXPECT_EQ(ll::estimate_dimensions(100, ll::Binding::Ebook).height_mm, 203.0);
  EXPECT_EQ(ll::estimate_dimensions(100, ll::Binding::Unknown).height_mm, 203.0);
  EXPECT_DOUBLE_EQ(ll::estimate_dimensions(1, ll::Binding::Unknown).spine_thickness_mm, 4.1);
  EXPECT_THROW(ll::estimate_dimensions(-1, ll::Binding::Unknown), ll::ArgumentError);
}

TEST(EstimateDimensions, AlwaysInRange) {
  for (int pages = 0; pages < 5000; pages += 7) {
    auto d = ll::estimate_dimensions(pages, ll::Binding::Paperback);
    EXPECT_GE(d.spine_thickness_mm, 3.0);
    EXPECT_LE(d.spine_thickness_mm, 120.0);
    EXPECT_DOUBLE_EQ(d.spine_thickness_mm, std::round(d.spine_thickness_mm * 10) / 10);
  }
}

TEST(FixtureProvider, PresentIsbn) {
  ll::FixtureProvider provider(test_data() / "fixture_small.json");
  auto result = ll::fetch_metadata({"9780000000002"}, provider);
  ASSERT_EQ(result.size(), 1u);
  ll::VolumeMeta expected;
  expected.isbn13 = "9780000000002";
  expected.title = "Fixture Book One";
  expected.authors = {"Ada Ashford"};
  expected.binding = ll::Binding::Paperback;
  expected.page_count = 300;
  expected.height_mm = 198.5;
  expected.spine_thickness_mm = 21.0;
  expected.cover_image = "cover_red.png";
  expected.average_rating = 4.25;
  expected.subjects = {"Epic fantasy", "Magic"};
  expected.dimension_source = ll::DimensionSource::Provider;
  EXPECT_EQ(std::get<ll::VolumeMeta>(result.at("9780000000002")), expected);
}

TEST(FixtureProvider, AbsentIsNotFound) {
  ll::FixtureProvider provider(test_data() / "fixture_small.json");
  auto result = ll::fetch_metadata({"9781999000028"}, provider);
  EXPECT_EQ(std::get<ll::FetchFailure>(result.at("9781999000028")).kind, ll::FetchFailureKind::NotFound);
}

TEST(FixtureProvider, EmptyInput) {
  ll::FixtureProvider provider(test_data() / "fixture_small.json");
  EXPECT_TRUE(ll::fetch_metadata({}, provider).empty());
}

TEST(FixtureProvider, MissingFileIsConfigError) {
  EXPECT_THROW(ll::FixtureProvider("/nonexistent/fixture.json"), ll::ConfigError);
}

TEST(ProviderRecords, EstimatesWhenNoDimensions) {
  ll::FixtureProvider provider(test_data() / "fixture_small.json");
  auto m = std::get<ll::VolumeMeta>(provider.lookup("9780306406157"));
  EXPECT_EQ(m.dimension_source, ll::DimensionSource::Estimated);
  EXPECT_EQ(m.height_mm, 235.0);
  EXPECT_EQ(m.spine_thickness_mm, 22.0);
  EXPECT_EQ(m.authors.size(), 2u);
}

TEST(ProviderRecords, GarbageDimensionsClamped) {
  ll::FixtureProvider provider(test_data() / "fixture_small.json");
  auto m = std::get<ll::VolumeMeta>(provider.lookup("9780804429573"));
  EXPECT_EQ(m.dimension_source, ll::DimensionSource::Provider);
  EXPECT_EQ(m.height_mm, 400.0);
  EXPECT_EQ(m.spine_thickness_mm, 3.0);
}

TEST(ProviderRecords, InchStringParsed) {
  ll::FixtureProvider provider(test_data() / "fixture_small.json");
  auto m = std::get<ll::VolumeMeta>(provider.lookup("9781999000011"));
  EXPECT_EQ(m.page_count, 412);
  EXPECT_DOUBLE_EQ(m.height_mm, 9.0 * 25.4);
  EXPECT_DOUBLE_EQ(m.spine_thickness_mm, 25.4);
}

TEST(ProviderRecords, StructuredAndWrapped) {
  auto body = ll::json::parse(R"({"book": {"title": "T", "pages": 200,
      "dimensions_structured": {"length": {"unit": "cm", "value": 24}, "width": {"unit": "cm", "value": 16},
                                "height": {"unit": "cm", "value": 2.5}, "weight": {"unit": "pounds", "value": 1}}}})");
  auto m = ll::meta_from_provider("9780306406157", body);
  EXPECT_EQ(m.title, "T");
  EXPECT_DOUBLE_EQ(m.height_mm, 240.0);
  EXPECT_DOUBLE_EQ(m.spine_thickness_mm, 25.0);
}

TEST(ProviderRecords, RandomGarbageStaysInRange) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> any(-1e4, 1e5);
  for (int i = 0; i < 500; ++i) {
    ll::json body{{"pages", static_cast<int>(any(rng))},
                  {"dimensions", {{"height_mm", any(rng)}, {"thickness_mm", any(rng)}}}};
    auto m = ll::meta_from_provider("9780306406157", body);
    EXPECT_GE(m.height_mm, 100.0);
    EXPECT_LE(m.height_mm, 400.0);
    EXPECT_GE(m.spine_thickness_mm, 3.0);
    EXPECT_LE(m.spine_thickness_mm, 120.0);
    EXPECT_GE(m.page_count, 0);
  }
}

namespace {

// Instrumented provider: counts calls, tracks peak concurrency, and can be
// scripted to answer rate-limited a number of times first.
class FakeProvider : public ll::MetadataProvider {
 public:
  std::atomic<int> calls{0}, in_flight{0}, peak{0};
  int rate_limit_first = 0;
  std::atomic<int> rate_limited_served{0};

  ll::FetchResult lookup(const std::string& isbn) override {
    ++calls;
    const int now = ++in_flight;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(3));
    --in_flight;
    if (rate_limited_served < rate_limit_first) {
      ++rate_limited_served;
      return ll::FetchFailure{ll::FetchFailureKind::RateLimited, "429"};
    }
    if (isbn.back() == '0') return ll::FetchFailure{ll::FetchFailureKind::NotFound, "nope"};
    return ll::meta_from_provider(isbn, ll::json{{"title", "Book " + isbn}, {"pages", 100}});
  }
  std::optional<std::vector<std::uint8_t>> fetch_cover(const std::string&) override { return std::nullopt; }
};

std::vector<std::string> isbns(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(ll::testing::make_isbn13(i));
  return out;
}

}  // namespace

TEST(FetchMetadata, InFlightNeverExceedsLimit) {
  for (int limit : {1, 3, 8}) {
    FakeProvider provider;
    auto result = ll::fetch_metadata(isbns(40), provider, {limit, 0, 1});
    EXPECT_EQ(result.size(), 40u);
    EXPECT_LE(provider.peak.load(), limit);
    EXPECT_GE(provider.peak.load(), 1);
  }
  FakeProvider provider;
  EXPECT_THROW(ll::fetch_metadata(isbns(2), provider, {0, 0, 1}), ll::ArgumentError);
}

TEST(FetchMetadata, DuplicateInputsCollapse) {
  FakeProvider provider;
  auto result = ll::fetch_metadata({"9780306406157", "9780306406157"}, provider);
  EXPECT_EQ(result.size(), 1u);
  EXPECT_EQ(provider.calls.load(), 1);
}

TEST(FetchMetadata, RateLimitRetriesWithinBudget) {
  FakeProvider provider;
  provider.rate_limit_first = 2;
  auto ok = ll::fetch_metadata({"9780306406157"}, provider, {1, 3, 1});
  EXPECT_TRUE(std::holds_alternative<ll::VolumeMeta>(ok.at("9780306406157")));
  EXPECT_EQ(provider.calls.load(), 3);

  FakeProvider stingy;
  stingy.rate_limit_first = 5;
  auto fail = ll::fetch_metadata({"9780306406157"}, stingy, {1, 1, 1});
  EXPECT_EQ(std::get<ll::FetchFailure>(fail.at("9780306406157")).kind, ll::FetchFailureKind::RateLimited);
  EXPECT_EQ(stingy.calls.load(), 2);
}

TEST(MetadataCache, ColdThenWarmIdentical) {
  TempDir dir;
  FakeProvider provider;
  auto ids = isbns(30);
  std::map<std::string, ll::FetchResult> cold, warm;
  {
    ll::MetadataCache cache(dir.path());
    cold = ll::fetch_metadata(ids, provider, {4, 0, 1}, &cache);
  }
  const int calls_after_cold = provider.calls.load();
  EXPECT_EQ(calls_after_cold, 30);
  {
    ll::MetadataCache cache(dir.path());  // reload from disk
    warm = ll::fetch_metadata(ids, provider, {4, 0, 1}, &cache);
  }
  EXPECT_EQ(provider.calls.load(), calls_after_cold);
  ASSERT_EQ(cold.size(), warm.size());
  for (const auto& [isbn, result] : cold) {
    if (const auto* m = std::get_if<ll::VolumeMeta>(&result))
      EXPECT_EQ(*m, std::get<ll::VolumeMeta>(warm.at(isbn)));
    else
      EXPECT_EQ(std::get<ll::FetchFailure>(warm.at(isbn)).kind, ll::FetchFailureKind::NotFound);
  }
}

TEST(MetadataCache, TransientFailuresNotCached) {
  TempDir dir;
  ll::MetadataCache cache(dir.path());
  cache.put("9780306406157", ll::FetchFailure{ll::FetchFailureKind::Network, "down"});
  EXPECT_FALSE(cache.get("9780306406157").has_value());
}

TEST(MetadataCache, CorruptLinesSkipped) {
  TempDir dir;
  {
    ll::MetadataCache cache(dir.path());
    cache.put("9780306406157", ll::meta_from_provider("9780306406157", ll::json{{"title", "Kept"}}));
  }
  {
    std::ofstream out(dir.path() / "metadata.jsonl", std::ios::app);
    out << "{not json\n" << R"({"isbn13": "x", "status": "weird"})" << "\n";
  }
  ll::MetadataCache cache(dir.path());
  auto hit = cache.get("9780306406157");
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(std::get<ll::VolumeMeta>(*hit).title, "Kept");
  EXPECT_FALSE(cache.get("x").has_value());
}

TEST(LoadCover, DecodesOnePixelPng) {
  ll::FixtureProvider provider(test_data() / "fixture_small.json");
  auto meta = std::get<ll::VolumeMeta>(provider.lookup("9780000000002"));
  auto image = ll::load_cover(meta, provider);
  ASSERT_TRUE(image.has_value());
  EXPECT_EQ(image->width, 1u);
  EXPECT_EQ(image->height, 1u);
  EXPECT_EQ(image->pixels[0], (ll::Rgb8{200, 30, 40}));
}

TEST(LoadCover, AbsentReference) {
  ll::FixtureProvider provider(test_data() / "fixture_small.json");
  auto meta = std::get<ll::VolumeMeta>(provider.lookup("9780306406157"));
  EXPECT_FALSE(ll::load_cover(meta, provider).has_value());
}

TEST(LoadCover, TruncatedOrMissingBytes) {
  ll::FixtureProvider provider(test_data() / "fixture_small.json");
  EXPECT_FALSE(ll::load_cover(std::get<ll::VolumeMeta>(provider.lookup("9780804429573")), provider).has_value());
  EXPECT_FALSE(ll::load_cover(std::get<ll::VolumeMeta>(provider.lookup("9781999000011")), provider).has_value());
}

TEST(ImageCodec, PngRoundTripAndJpeg) {
  ll::Image img(3, 2);
  img.at(0, 0) = {1, 2, 3};
  img.at(2, 1) = {250, 128, 7};
  auto bytes = ll::encode_png(img);
  auto back = ll::decode_image(bytes);
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(*back, img);

  std::string error;
  const std::vector<std::uint8_t> junk{0xFF, 0xD8, 0xFF, 0xE0, 0x00};
  EXPECT_FALSE(ll::decode_image(junk, &error).has_value());
  EXPECT_FALSE(error.empty());
  EXPECT_FALSE(ll::decode_image(std::vector<std::uint8_t>{1, 2, 3}).has_value());
}

// ---------------------------------------------------------------------------
// Remote provider against a local server

namespace {

struct LocalServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LocalServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

}  // namespace

TEST(HttpProvider, RequiresKey) {
  ll::ProviderConfig config;
  EXPECT_THROW(ll::HttpMetadataProvider{config}, ll::ConfigError);
}

TEST(HttpProvider, StatusMapping) {
  LocalServer srv;
  std::atomic<int> unauthorized{0};
  const auto png = ll::encode_png(ll::Image(2, 2, {9, 8, 7}));
  srv.server.Get(R"(/v2/book/(\d+))", [&](const httplib::Request& req, httplib::Response& res) {
    if (req.get_header_value("Authorization") != "Bearer secret") {
      ++unauthorized;
      res.status = 401;
      return;
    }
    const auto isbn = req.matches[1].str();
    if (isbn == "9780306406157") {
      res.set_content(R"({"book": {"title": "Remote", "authors": ["R"], "pages": 300, "binding": "Hardcover",
                      "image": "IMG", "subjects": ["Mystery"]}})", "application/json");
    } else if (isbn == "9780804429573") {
      res.status = 429;
    } else {
      res.status = 404;
    }
  });
  srv.server.Get("/covers/x.png", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(std::string(png.begin(), png.end()), "image/png");
  });
  srv.start();

  ll::ProviderConfig config;
  config.base_url = srv.url() + "/v2";
  config.api_key = "secret";
  config.timeout_ms = 2000;
  ll::HttpMetadataProvider provider(config);

  auto ok = provider.lookup("9780306406157");
  ASSERT_TRUE(std::holds_alternative<ll::VolumeMeta>(ok));
  EXPECT_EQ(std::get<ll::VolumeMeta>(ok).title, "Remote");
  EXPECT_EQ(std::get<ll::VolumeMeta>(ok).height_mm, 235.0);
  EXPECT_EQ(std::get<ll::FetchFailure>(provider.lookup("9780804429573")).kind, ll::FetchFailureKind::RateLimited);
  EXPECT_EQ(std::get<ll::FetchFailure>(provider.lookup("9781999000011")).kind, ll::FetchFailureKind::NotFound);
  EXPECT_EQ(unauthorized.load(), 0);

  auto meta = std::get<ll::VolumeMeta>(ok);
  meta.cover_image = srv.url() + "/covers/x.png";
  TempDir cache_dir;
  ll::MetadataCache cache(cache_dir.path());
  auto cover = ll::load_cover(meta, provider, &cache);
  ASSERT_TRUE(cover.has_value());
  EXPECT_EQ(cover->pixels[0], (ll::Rgb8{9, 8, 7}));
  EXPECT_TRUE(cache.get_cover(meta.isbn13).has_value());
}

TEST(HttpProvider, UnreachableIsNetworkFailure) {
  ll::ProviderConfig config;
  config.base_url = "http://127.0.0.1:1";
  config.api_key = "k";
  config.timeout_ms = 500;
  ll::HttpMetadataProvider provider(config);
  EXPECT_EQ(std::get<ll::FetchFailure>(provider.lookup("9780306406157")).kind, ll::FetchFailureKind::Network);
}
