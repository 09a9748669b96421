#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <variant>
#include <vector>

#include <json.hpp>

#include "librarylens/image.hpp"
#include "librarylens/ingest.hpp"
#include "librarylens/log.hpp"
#include "librarylens/text.hpp"
#include "librarylens/workers.hpp"

namespace librarylens {

using json = nlohmann::json;

enum class DimensionSource { Provider, Estimated };

inline std::string_view to_string(DimensionSource s) {
  return s == DimensionSource::Provider ? "Provider" : "Estimated";
}

struct VolumeMeta {
  std::string isbn13;
  std::string title;
  std::vector<std::string> authors;
  Binding binding = Binding::Unknown;
  int page_count = 0;
  double height_mm = 0;
  double spine_thickness_mm = 0;
  std::optional<std::string> cover_image;  // URL or fixture-relative path
  std::optional<double> average_rating;
  std::vector<std::string> subjects;  // raw, as the provider sent them
  DimensionSource dimension_source = DimensionSource::Estimated;

  friend bool operator==(const VolumeMeta&, const VolumeMeta&) = default;
};

inline constexpr double kMinHeightMm = 100, kMaxHeightMm = 400;
inline constexpr double kMinThicknessMm = 3, kMaxThicknessMm = 120;

struct Dimensions {
  double height_mm = 0;
  double spine_thickness_mm = 0;
  DimensionSource source = DimensionSource::Estimated;

  friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

inline double round_tenth(double v) { return std::round(v * 10.0) / 10.0; }

inline double default_height_mm(Binding b) {
  switch (b) {
    case Binding::Hardcover: return 235.0;
    case Binding::Paperback: return 210.0;
    case Binding::MassMarket: return 175.0;
    default: return 203.0;
  }
}

// Thickness model: 4.0 mm of covers plus 0.06 mm per page, clamped to
// [3, 120]. Unknown page counts get the median paperback, 18.0 mm.
inline Dimensions estimate_dimensions(int page_count, Binding binding) {
  if (page_count < 0) throw ArgumentError("page_count must be >= 0");
  const double thickness =
      page_count == 0 ? 18.0 : round_tenth(std::clamp(4.0 + 0.06 * page_count, kMinThicknessMm, kMaxThicknessMm));
  return {default_height_mm(binding), thickness, DimensionSource::Estimated};
}

// ---------------------------------------------------------------------------
// JSON forms

inline void to_json(json& j, const VolumeMeta& m) {
  j = json{{"isbn13", m.isbn13},
           {"title", m.title},
           {"authors", m.authors},
           {"binding", to_string(m.binding)},
           {"page_count", m.page_count},
           {"height_mm", m.height_mm},
           {"spine_thickness_mm", m.spine_thickness_mm},
           {"cover_image", m.cover_image ? json(*m.cover_image) : json(nullptr)},
           {"average_rating", m.average_rating ? json(*m.average_rating) : json(nullptr)},
           {"subjects", m.subjects},
           {"dimension_source", to_string(m.dimension_source)}};
}

inline void from_json(const json& j, VolumeMeta& m) {
  m.isbn13 = j.at("isbn13").get<std::string>();
  m.title = j.at("title").get<std::string>();
  m.authors = j.at("authors").get<std::vector<std::string>>();
  m.binding = parse_binding(j.at("binding").get<std::string>());
  m.page_count = j.at("page_count").get<int>();
  m.height_mm = j.at("height_mm").get<double>();
  m.spine_thickness_mm = j.at("spine_thickness_mm").get<double>();
  m.cover_image = j.at("cover_image").is_null() ? std::nullopt
                                                : std::optional<std::string>(j["cover_image"].get<std::string>());
  m.average_rating =
      j.at("average_rating").is_null() ? std::nullopt : std::optional<double>(j["average_rating"].get<double>());
  m.subjects = j.at("subjects").get<std::vector<std::string>>();
  m.dimension_source = j.at("dimension_source").get<std::string>() == "Provider" ? DimensionSource::Provider
                                                                                 : DimensionSource::Estimated;
}

// ---------------------------------------------------------------------------
// Provider records

namespace detail {

inline std::optional<double> length_to_mm(double value, std::string_view unit) {
  const auto u = text::fold(text::trim(unit));
  if (u.empty() || u == "mm" || u == "millimeters" || u == "millimetres") return value;
  if (u == "cm" || u == "centimeters" || u == "centimetres") return value * 10.0;
  if (u == "in" || u == "inch" || u == "inches") return value * 25.4;
  return std::nullopt;
}

// Collects length measurements (in mm) from the shapes providers use:
//   {"height_mm": 235, "thickness_mm": 22}
//   {"height": {"value": 9.2, "unit": "inches"}, "width": {...}, ...}
//   "Height: 9.21 Inches, Length: 6.14 Inches, Weight: 1.2 Pounds, Width: 0.94 Inches"
struct Measured {
  std::optional<double> height, thickness;
  std::vector<double> unlabeled;
};

inline bool is_length_key(std::string_view k) {
  return k == "height" || k == "length" || k == "width" || k == "thickness" || k == "depth";
}

inline Measured measure(const json& dims) {
  Measured out;
  auto add = [&](std::string key, double mm) {
    key = text::fold(key);
    if (!(mm > 0) || !std::isfinite(mm)) return;
    if (key == "height_mm") out.height = mm;
    else if (key == "thickness_mm" || key == "spine_mm") out.thickness = mm;
    else if (is_length_key(key)) out.unlabeled.push_back(mm);
  };
  if (dims.is_object()) {
    for (const auto& [key, value] : dims.items()) {
      if (value.is_number()) {
        add(key, value.get<double>());
      } else if (value.is_object() && value.contains("value") && value["value"].is_number()) {
        auto unit = value.value("unit", std::string{});
        if (auto mm = length_to_mm(value["value"].get<double>(), unit)) add(key, *mm);
      }
    }
  } else if (dims.is_string()) {
    for (const auto& part : text::split(dims.get<std::string>(), ',')) {
      auto colon = part.find(':');
      if (colon == std::string::npos) continue;
      auto key = std::string(text::trim(std::string_view(part).substr(0, colon)));
      auto rest = text::trim(std::string_view(part).substr(colon + 1));
      auto space = rest.find(' ');
      auto number = text::to_double(rest.substr(0, space));
      if (!number) continue;
      auto unit = space == std::string_view::npos ? std::string_view{} : rest.substr(space + 1);
      if (auto mm = length_to_mm(*number, unit)) add(key, *mm);
    }
  }
  return out;
}

inline std::vector<std::string> string_list(const json& v) {
  std::vector<std::string> out;
  if (v.is_array()) {
    for (const auto& e : v)
      if (e.is_string()) out.push_back(e.get<std::string>());
  } else if (v.is_string()) {
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace detail

// Builds a VolumeMeta from a provider body (optionally wrapped in {"book": ...}).
// Absent fields are tolerated; provider dimensions win over estimation and are
// clamped into range.
inline VolumeMeta meta_from_provider(const std::string& isbn13, const json& body) {
  const json& book = body.contains("book") && body["book"].is_object() ? body["book"] : body;
  VolumeMeta m;
  m.isbn13 = isbn13;
  if (auto it = book.find("title"); it != book.end() && it->is_string()) m.title = it->get<std::string>();
  if (auto it = book.find("authors"); it != book.end()) m.authors = detail::string_list(*it);
  if (auto it = book.find("binding"); it != book.end() && it->is_string()) m.binding = parse_binding(it->get<std::string>());
  if (auto it = book.find("pages"); it != book.end()) {
    if (it->is_number()) m.page_count = std::max(0, it->get<int>());
    else if (it->is_string()) m.page_count = static_cast<int>(std::max(0LL, text::to_int(it->get<std::string>()).value_or(0)));
  }
  if (auto it = book.find("image"); it != book.end() && it->is_string() && !it->get<std::string>().empty())
    m.cover_image = it->get<std::string>();
  if (auto it = book.find("subjects"); it != book.end()) m.subjects = detail::string_list(*it);
  if (auto it = book.find("average_rating"); it != book.end() && it->is_number())
    m.average_rating = std::clamp(it->get<double>(), 0.0, 5.0);

  const auto estimate = estimate_dimensions(m.page_count, m.binding);
  detail::Measured measured;
  for (const char* key : {"dimensions_structured", "dimensions"}) {
    if (auto it = book.find(key); it != book.end()) {
      measured = detail::measure(*it);
      if (measured.height || measured.thickness || !measured.unlabeled.empty()) break;
    }
  }
  // Unlabeled measurements: tallest is the book's height, thinnest its spine.
  auto& u = measured.unlabeled;
  std::sort(u.begin(), u.end());
  if (!measured.height && u.size() >= 2) measured.height = u.back();
  if (!measured.thickness && u.size() >= 2) measured.thickness = u.front();
  if (u.size() == 1 && !measured.height && !measured.thickness) {
    (u.front() >= kMinHeightMm ? measured.height : measured.thickness) = u.front();
  }

  if (measured.height || measured.thickness) {
    m.dimension_source = DimensionSource::Provider;
    m.height_mm = std::clamp(measured.height.value_or(estimate.height_mm), kMinHeightMm, kMaxHeightMm);
    m.spine_thickness_mm =
        std::clamp(measured.thickness.value_or(estimate.spine_thickness_mm), kMinThicknessMm, kMaxThicknessMm);
  } else {
    m.dimension_source = DimensionSource::Estimated;
    m.height_mm = estimate.height_mm;
    m.spine_thickness_mm = estimate.spine_thickness_mm;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Providers

enum class FetchFailureKind { NotFound, Network, RateLimited };

inline std::string_view to_string(FetchFailureKind k) {
  switch (k) {
    case FetchFailureKind::NotFound: return "not-found";
    case FetchFailureKind::Network: return "network";
    case FetchFailureKind::RateLimited: return "rate-limited";
  }
  return "network";
}

struct FetchFailure {
  FetchFailureKind kind = FetchFailureKind::Network;
  std::string detail;

  friend bool operator==(const FetchFailure&, const FetchFailure&) = default;
};

using FetchResult = std::variant<VolumeMeta, FetchFailure>;

struct ProviderConfig {
  std::string base_url = "https://api2.isbndb.com";
  std::string api_key;
  int max_in_flight = 4;
  int retry_budget = 3;
  int backoff_base_ms = 250;
  int timeout_ms = 10000;
};

class MetadataProvider {
 public:
  virtual ~MetadataProvider() = default;
  // One request for one ISBN; no retries here.
  virtual FetchResult lookup(const std::string& isbn13) = 0;
  virtual std::optional<std::vector<std::uint8_t>> fetch_cover(const std::string& reference) = 0;
  virtual bool remote() const { return false; }
};

// ---------------------------------------------------------------------------
// Cache: <dir>/metadata.jsonl, one JSON object per line, last line per ISBN wins.

class MetadataCache {
 public:
  explicit MetadataCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    std::ifstream in(file());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (text::trim(line).empty()) continue;
      try {
        auto j = json::parse(line);
        auto isbn = j.at("isbn13").get<std::string>();
        if (j.at("status") == "ok")
          entries_[isbn] = j.at("meta").get<VolumeMeta>();
        else if (j.at("status") == "not-found")
          entries_[isbn] = FetchFailure{FetchFailureKind::NotFound, "cached"};
        else
          throw std::runtime_error("unknown status");
      } catch (const std::exception& e) {
        log::warn("skipping corrupt cache line " + std::to_string(lineno) + " in " + file().string() + ": " + e.what());
      }
    }
  }

  std::filesystem::path file() const { return dir_ / "metadata.jsonl"; }
  const std::filesystem::path& dir() const { return dir_; }

  std::optional<FetchResult> get(const std::string& isbn13) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(isbn13);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  // Only definitive answers are cached; transient failures are not.
  void put(const std::string& isbn13, const FetchResult& result) {
    json line;
    if (const auto* meta = std::get_if<VolumeMeta>(&result)) {
      line = {{"isbn13", isbn13}, {"status", "ok"}, {"meta", *meta}};
    } else if (std::get<FetchFailure>(result).kind == FetchFailureKind::NotFound) {
      line = {{"isbn13", isbn13}, {"status", "not-found"}};
    } else {
      return;
    }
    std::unique_lock lock(mutex_);
    entries_[isbn13] = std::holds_alternative<VolumeMeta>(result)
                           ? result
                           : FetchResult{FetchFailure{FetchFailureKind::NotFound, "cached"}};
    std::ofstream out(file(), std::ios::app);
    out << line.dump() << '\n';
    out.flush();
  }

  std::optional<std::vector<std::uint8_t>> get_cover(const std::string& isbn13) const {
    std::ifstream in(dir_ / "covers" / (isbn13 + ".img"), std::ios::binary);
    if (!in) return std::nullopt;
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
  }

  void put_cover(const std::string& isbn13, std::span<const std::uint8_t> bytes) {
    std::unique_lock lock(mutex_);
    std::filesystem::create_directories(dir_ / "covers");
    auto tmp = dir_ / "covers" / (isbn13 + ".img.tmp");
    {
      std::ofstream out(tmp, std::ios::binary);
      out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    std::filesystem::rename(tmp, dir_ / "covers" / (isbn13 + ".img"));
  }

 private:
  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, FetchResult> entries_;
};

struct FetchOptions {
  int max_in_flight = 4;
  int retry_budget = 3;
  int backoff_base_ms = 250;

  static FetchOptions from(const ProviderConfig& c) { return {c.max_in_flight, c.retry_budget, c.backoff_base_ms}; }
};

// One entry per distinct input ISBN. Cached answers are served without touching
// the provider; rate-limited lookups back off exponentially up to retry_budget.
inline std::map<std::string, FetchResult> fetch_metadata(const std::vector<std::string>& isbns,
                                                         MetadataProvider& provider, const FetchOptions& options = {},
                                                         MetadataCache* cache = nullptr) {
  if (options.max_in_flight < 1) throw ArgumentError("max_in_flight must be >= 1");
  std::map<std::string, FetchResult> out;
  std::vector<std::string> todo;
  for (const auto& isbn : isbns) {
    if (out.contains(isbn)) continue;
    if (cache) {
      if (auto hit = cache->get(isbn)) {
        out.emplace(isbn, std::move(*hit));
        continue;
      }
    }
    out.emplace(isbn, FetchFailure{});
    todo.push_back(isbn);
  }
  std::vector<FetchResult> results(todo.size());
  parallel_for(todo.size(), static_cast<std::size_t>(options.max_in_flight), [&](std::size_t i) {
    FetchResult r = provider.lookup(todo[i]);
    for (int attempt = 0; attempt < options.retry_budget; ++attempt) {
      auto* f = std::get_if<FetchFailure>(&r);
      if (!f || f->kind != FetchFailureKind::RateLimited) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<long long>(options.backoff_base_ms) << attempt));
      r = provider.lookup(todo[i]);
    }
    results[i] = std::move(r);
  });
  for (std::size_t i = 0; i < todo.size(); ++i) {
    if (cache) cache->put(todo[i], results[i]);
    out[todo[i]] = std::move(results[i]);
  }
  return out;
}

// Absent when there is no cover reference or the bytes do not decode.
inline std::optional<Image> load_cover(const VolumeMeta& meta, MetadataProvider& provider,
                                       MetadataCache* cache = nullptr) {
  if (!meta.cover_image || meta.cover_image->empty()) return std::nullopt;
  std::optional<std::vector<std::uint8_t>> bytes;
  if (cache) bytes = cache->get_cover(meta.isbn13);
  const bool from_cache = bytes.has_value();
  if (!bytes) bytes = provider.fetch_cover(*meta.cover_image);
  if (!bytes) {
    log::warn("cover fetch failed for " + meta.isbn13);
    return std::nullopt;
  }
  std::string error;
  auto image = decode_image(*bytes, &error);
  if (!image) {
    log::warn("cover decode failed for " + meta.isbn13 + ": " + error);
    return std::nullopt;
  }
  if (cache && !from_cache && provider.remote()) cache->put_cover(meta.isbn13, *bytes);
  return image;
}

}  // namespace librarylens
