#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <unordered_map>

#include <httplib.h>
#include <json.hpp>

#include "librarylens/metadata.hpp"

namespace librarylens {

// Offline provider backed by a bundled JSON file:
//   {"books": [{"isbn13": "...", "title": ..., "authors": [...], "pages": ...,
//               "binding": ..., "dimensions": {...}, "image": "covers/x.png",
//               "subjects": [...]}, ...]}
// Image references resolve relative to the fixture file.
class FixtureProvider : public MetadataProvider {
 public:
  explicit FixtureProvider(const std::filesystem::path& file) : root_(file.parent_path()) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open metadata fixture " + file.string());
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("metadata fixture " + file.string() + " is not valid JSON: " + e.what());
    }
    for (const auto& book : doc.at("books")) books_.emplace(book.at("isbn13").get<std::string>(), book);
  }

  FetchResult lookup(const std::string& isbn13) override {
    auto it = books_.find(isbn13);
    if (it == books_.end()) return FetchFailure{FetchFailureKind::NotFound, "not in fixture"};
    return meta_from_provider(isbn13, it->second);
  }

  std::optional<std::vector<std::uint8_t>> fetch_cover(const std::string& reference) override {
    std::ifstream in(root_ / reference, std::ios::binary);
    if (!in) return std::nullopt;
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
  }

  std::size_t size() const { return books_.size(); }

 private:
  std::filesystem::path root_;
  std::unordered_map<std::string, json> books_;
};

namespace detail {

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline UrlParts split_url(std::string_view url) {
  auto scheme_end = url.find("://");
  auto path_start = url.find('/', scheme_end == std::string_view::npos ? 0 : scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

}  // namespace detail

// ISBNdb-shaped HTTP provider: GET {base_url}/book/{isbn13} with a bearer key.
class HttpMetadataProvider : public MetadataProvider {
 public:
  explicit HttpMetadataProvider(ProviderConfig config) : config_(std::move(config)) {
    if (config_.api_key.empty()) throw ConfigError("remote metadata provider requires an API key (ISBNDB_API_KEY)");
    if (config_.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
    while (!config_.base_url.empty() && config_.base_url.back() == '/') config_.base_url.pop_back();
  }

  FetchResult lookup(const std::string& isbn13) override {
    auto url = detail::split_url(config_.base_url);
    httplib::Client client(url.origin);
    configure(client);
    httplib::Headers headers{{"Authorization", "Bearer " + config_.api_key}, {"Accept", "application/json"}};
    auto path = (url.path == "/" ? std::string{} : url.path) + "/book/" + isbn13;
    auto res = client.Get(path, headers);
    if (!res) return FetchFailure{FetchFailureKind::Network, httplib::to_string(res.error())};
    if (res->status == 404) return FetchFailure{FetchFailureKind::NotFound, "404"};
    if (res->status == 429) return FetchFailure{FetchFailureKind::RateLimited, "429"};
    if (res->status != 200) return FetchFailure{FetchFailureKind::Network, "HTTP " + std::to_string(res->status)};
    try {
      return meta_from_provider(isbn13, json::parse(res->body));
    } catch (const json::exception& e) {
      return FetchFailure{FetchFailureKind::Network, std::string("bad body: ") + e.what()};
    }
  }

  std::optional<std::vector<std::uint8_t>> fetch_cover(const std::string& reference) override {
    auto url = detail::split_url(reference);
    if (url.origin.find("://") == std::string::npos) return std::nullopt;
    httplib::Client client(url.origin);
    configure(client);
    client.set_follow_location(true);
    auto res = client.Get(url.path);
    if (!res || res->status != 200) return std::nullopt;
    return std::vector<std::uint8_t>(res->body.begin(), res->body.end());
  }

  bool remote() const override { return true; }
  const ProviderConfig& config() const { return config_; }

 private:
  void configure(httplib::Client& client) const {
    const auto sec = config_.timeout_ms / 1000, usec = (config_.timeout_ms % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
  }

  ProviderConfig config_;
};

}  // namespace librarylens
