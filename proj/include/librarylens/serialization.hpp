#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "librarylens/color.hpp"
#include "librarylens/facets.hpp"
#include "librarylens/ingest.hpp"
#include "librarylens/metadata.hpp"
#include "librarylens/shelf.hpp"
#include "librarylens/volume.hpp"

// JSON forms for the persisted library files. Field names are stable; they are
// the on-disk format.
namespace librarylens {

namespace detail {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_get(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace detail

inline void to_json(json& j, const RawRecord& r) {
  j = json{{"title", r.title},
           {"author_display", r.author_display},
           {"author_lf", r.author_lf},
           {"isbn13", r.isbn13},
           {"my_rating", r.my_rating},
           {"average_rating", r.average_rating},
           {"publisher", r.publisher},
           {"binding", to_string(r.binding)},
           {"page_count", r.page_count},
           {"year_published", detail::opt(r.year_published)},
           {"series_name", detail::opt(r.series_name)},
           {"series_index", detail::opt(r.series_index)}};
}

inline void from_json(const json& j, RawRecord& r) {
  r.title = j.at("title").get<std::string>();
  r.author_display = j.at("author_display").get<std::string>();
  r.author_lf = j.at("author_lf").get<std::string>();
  r.isbn13 = j.at("isbn13").get<std::string>();
  r.my_rating = j.at("my_rating").get<int>();
  r.average_rating = j.at("average_rating").get<double>();
  r.publisher = j.at("publisher").get<std::string>();
  r.binding = parse_binding(j.at("binding").get<std::string>());
  r.page_count = j.at("page_count").get<int>();
  r.year_published = detail::opt_get<int>(j, "year_published");
  r.series_name = detail::opt_get<std::string>(j, "series_name");
  r.series_index = detail::opt_get<double>(j, "series_index");
}

inline void to_json(json& j, const Rejection& r) { j = json{{"row_number", r.row_number}, {"reason", r.reason}}; }
inline void from_json(const json& j, Rejection& r) {
  r.row_number = j.at("row_number").get<std::size_t>();
  r.reason = j.at("reason").get<std::string>();
}

inline void to_json(json& j, const IngestReport& r) {
  j = json{{"accepted", r.accepted}, {"rejected", r.rejected}, {"deduplicated", r.deduplicated}};
}
inline void from_json(const json& j, IngestReport& r) {
  r.accepted = j.at("accepted").get<std::size_t>();
  r.rejected = j.at("rejected").get<std::vector<Rejection>>();
  r.deduplicated = j.at("deduplicated").get<std::size_t>();
}

inline void to_json(json& j, const Facets& f) {
  j = json{{"genre", to_string(f.genre)}, {"age_band", to_string(f.age_band)}, {"facet_source", to_string(f.facet_source)}};
}
inline void from_json(const json& j, Facets& f) {
  auto g = genre_from_token(j.at("genre").get<std::string>());
  auto a = age_band_from_token(j.at("age_band").get<std::string>());
  if (!g || !a) throw ConfigError("persisted facets outside the enumerations");
  f.genre = *g;
  f.age_band = *a;
  f.facet_source = j.at("facet_source").get<std::string>() == "LLM" ? FacetSource::LLM : FacetSource::Rules;
}

inline void to_json(json& j, const Volume& v) {
  j = json{{"record", v.record},
           {"meta", v.meta},
           {"facets", v.facets},
           {"spine_color", to_hex(v.spine_color)},
           {"metadata_found", v.metadata_found}};
}
inline void from_json(const json& j, Volume& v) {
  v.record = j.at("record").get<RawRecord>();
  v.meta = j.at("meta").get<VolumeMeta>();
  v.facets = j.at("facets").get<Facets>();
  auto c = parse_hex(j.at("spine_color").get<std::string>());
  if (!c) throw ConfigError("persisted spine color is not #rrggbb");
  v.spine_color = *c;
  v.metadata_found = j.at("metadata_found").get<bool>();
}

inline void to_json(json& j, const ShelfSpec& s) {
  j = json{{"shelves", s.shelf_count}, {"width_mm", s.shelf_width_mm}, {"clearance_mm", s.shelf_clearance_mm}};
}
inline void from_json(const json& j, ShelfSpec& s) {
  s.shelf_count = j.at("shelves").get<int>();
  s.shelf_width_mm = j.at("width_mm").get<double>();
  s.shelf_clearance_mm = j.at("clearance_mm").get<double>();
}

inline void to_json(json& j, const FetchFailure& f) {
  j = json{{"kind", to_string(f.kind)}, {"detail", f.detail}};
}
inline void from_json(const json& j, FetchFailure& f) {
  const auto kind = j.at("kind").get<std::string>();
  f.kind = kind == "not-found" ? FetchFailureKind::NotFound
           : kind == "rate-limited" ? FetchFailureKind::RateLimited
                                    : FetchFailureKind::Network;
  f.detail = j.at("detail").get<std::string>();
}

}  // namespace librarylens
