#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "librarylens/error.hpp"
#include "librarylens/log.hpp"
#include "librarylens/metadata.hpp"
#include "librarylens/text.hpp"
#include "librarylens/workers.hpp"

namespace librarylens {

enum class Genre { Fantasy, SciFi, Dystopian, Mystery, Horror, Historical, Romance, Classics, Other, Nonfiction };
enum class AgeBand { Children, MiddleGrade, YoungAdult, Adult };
enum class FacetSource { LLM, Rules };

inline constexpr std::array<Genre, 10> kAllGenres{Genre::Fantasy,    Genre::SciFi,   Genre::Dystopian, Genre::Mystery,
                                                  Genre::Horror,     Genre::Historical, Genre::Romance, Genre::Classics,
                                                  Genre::Other,      Genre::Nonfiction};
inline constexpr std::array<AgeBand, 4> kAllAgeBands{AgeBand::Children, AgeBand::MiddleGrade, AgeBand::YoungAdult,
                                                     AgeBand::Adult};

inline std::string_view to_string(Genre g) {
  static constexpr std::array<std::string_view, 10> names{"Fantasy",    "SciFi",   "Dystopian", "Mystery",
                                                          "Horror",     "Historical", "Romance", "Classics",
                                                          "Other",      "Nonfiction"};
  return names[static_cast<std::size_t>(g)];
}

inline std::string_view to_string(AgeBand a) {
  static constexpr std::array<std::string_view, 4> names{"Children", "MiddleGrade", "YoungAdult", "Adult"};
  return names[static_cast<std::size_t>(a)];
}

inline std::string_view to_string(FacetSource s) { return s == FacetSource::LLM ? "LLM" : "Rules"; }

// Exact token match only; anything else is outside the closed vocabulary.
inline std::optional<Genre> genre_from_token(std::string_view s) {
  for (auto g : kAllGenres)
    if (to_string(g) == s) return g;
  return std::nullopt;
}

inline std::optional<AgeBand> age_band_from_token(std::string_view s) {
  for (auto a : kAllAgeBands)
    if (to_string(a) == s) return a;
  return std::nullopt;
}

struct Facets {
  Genre genre = Genre::Other;
  AgeBand age_band = AgeBand::Adult;
  FacetSource facet_source = FacetSource::Rules;

  friend bool operator==(const Facets&, const Facets&) = default;
};

// ---------------------------------------------------------------------------
// Rules fallback

// Trigger substrings per facet, loaded from data/facet_keywords.json.
struct KeywordTable {
  int version = 0;
  std::map<Genre, std::vector<std::string>> genres;
  std::map<AgeBand, std::vector<std::string>> age_bands;

  static KeywordTable from_json(const json& doc) {
    KeywordTable t;
    t.version = doc.value("version", 0);
    for (const auto& [name, words] : doc.at("genres").items()) {
      auto g = genre_from_token(name);
      if (!g) throw ConfigError("keyword table names unknown genre '" + name + "'");
      for (const auto& w : words) t.genres[*g].push_back(text::fold(w.get<std::string>()));
    }
    for (const auto& [name, words] : doc.at("age_bands").items()) {
      auto a = age_band_from_token(name);
      if (!a) throw ConfigError("keyword table names unknown age band '" + name + "'");
      for (const auto& w : words) t.age_bands[*a].push_back(text::fold(w.get<std::string>()));
    }
    return t;
  }

  static KeywordTable load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open keyword table " + file.string());
    try {
      return from_json(json::parse(in));
    } catch (const json::exception& e) {
      throw ConfigError("bad keyword table " + file.string() + ": " + e.what());
    }
  }
};

namespace detail {

inline bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || static_cast<unsigned char>(c) >= 0x80;
}

// Keywords must start on a word boundary. Keywords of three characters or
// fewer ("ya", "ww2") must also end on one.
inline bool keyword_hit(std::string_view haystack, std::string_view keyword) {
  if (keyword.empty()) return false;
  const bool whole_word = keyword.size() <= 3;
  for (auto pos = haystack.find(keyword); pos != std::string_view::npos; pos = haystack.find(keyword, pos + 1)) {
    if (pos > 0 && is_word_char(haystack[pos - 1])) continue;
    const auto end = pos + keyword.size();
    if (whole_word && end < haystack.size() && is_word_char(haystack[end])) continue;
    return true;
  }
  return false;
}

}  // namespace detail

inline Facets rules_normalize(const VolumeMeta& meta, const KeywordTable& table) {
  std::string haystack;
  for (const auto& s : meta.subjects) haystack += text::fold(s) + " | ";
  haystack += text::fold(meta.title);

  auto first_match = [&](const std::vector<std::string>& words) {
    for (const auto& w : words)
      if (detail::keyword_hit(haystack, w)) return true;
    return false;
  };

  Facets f{Genre::Other, AgeBand::Adult, FacetSource::Rules};
  static constexpr std::array<Genre, 9> genre_scan{Genre::Fantasy,    Genre::SciFi,   Genre::Dystopian,
                                                   Genre::Mystery,    Genre::Horror,  Genre::Historical,
                                                   Genre::Romance,    Genre::Classics, Genre::Nonfiction};
  for (auto g : genre_scan) {
    if (auto it = table.genres.find(g); it != table.genres.end() && first_match(it->second)) {
      f.genre = g;
      break;
    }
  }
  for (auto a : {AgeBand::Children, AgeBand::MiddleGrade, AgeBand::YoungAdult}) {
    if (auto it = table.age_bands.find(a); it != table.age_bands.end() && first_match(it->second)) {
      f.age_band = a;
      break;
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// LLM normalization

class LlmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Chat-style completion. Implementations throw LlmError on transport failure
// or timeout.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string complete(const std::string& system_prompt, const std::string& user_prompt) = 0;
};

struct NormalizerConfig {
  int batch_size = 25;
  std::string api_key;
  std::string model_id = "claude-3-haiku-20240307";
  int timeout_ms = 30000;
  std::string endpoint;
  int max_concurrent_batches = 2;
};

inline std::string facet_system_prompt() {
  std::string genres, bands;
  for (auto g : kAllGenres) genres += (genres.empty() ? "" : ", ") + std::string(to_string(g));
  for (auto a : kAllAgeBands) bands += (bands.empty() ? "" : ", ") + std::string(to_string(a));
  return "You assign library facets to books. For every book in the input, choose exactly one genre from ["
         + genres + "] and exactly one reading-age band from [" + bands +
         "]. Use only these tokens, spelled exactly as given. If a book's data is incomplete, infer the most likely "
         "values from its title and authors. Respond with JSON only, no prose, in the form "
         "{\"results\": [{\"isbn13\": \"...\", \"genre\": \"...\", \"age_band\": \"...\"}]}.";
}

inline std::string facet_user_prompt(std::span<const VolumeMeta* const> batch) {
  json books = json::array();
  for (const auto* m : batch)
    books.push_back({{"isbn13", m->isbn13}, {"title", m->title}, {"authors", m->authors}, {"subjects", m->subjects}});
  return json{{"books", books}}.dump();
}

// Strict reading of a model reply. Entries whose tokens fall outside the
// enumerations are left out so the caller falls back to rules for them.
// Throws LlmError when the reply is not usable at all.
inline std::map<std::string, Facets> parse_facet_reply(std::string_view reply) {
  const auto open = reply.find_first_of("{[");
  const auto close = reply.find_last_of("}]");
  if (open == std::string_view::npos || close == std::string_view::npos || close < open)
    throw LlmError("reply contains no JSON");
  json doc;
  try {
    doc = json::parse(reply.substr(open, close - open + 1));
  } catch (const json::exception& e) {
    throw LlmError(std::string("reply is not JSON: ") + e.what());
  }
  const json* results = &doc;
  if (doc.is_object()) {
    auto it = doc.find("results");
    if (it == doc.end()) throw LlmError("reply lacks 'results'");
    results = &*it;
  }
  if (!results->is_array()) throw LlmError("'results' is not an array");
  std::map<std::string, Facets> out;
  for (const auto& r : *results) {
    if (!r.is_object()) continue;
    auto isbn = r.find("isbn13"), genre = r.find("genre"), age = r.find("age_band");
    if (isbn == r.end() || genre == r.end() || age == r.end()) continue;
    if (!isbn->is_string() || !genre->is_string() || !age->is_string()) continue;
    auto g = genre_from_token(genre->get<std::string>());
    auto a = age_band_from_token(age->get<std::string>());
    if (!g || !a) continue;
    out.emplace(isbn->get<std::string>(), Facets{*g, *a, FacetSource::LLM});
  }
  return out;
}

// Exactly one Facets per input volume. `llm` may be null (rules only).
inline std::map<std::string, Facets> normalize_batch(const std::vector<VolumeMeta>& volumes,
                                                     const NormalizerConfig& config, const KeywordTable& table,
                                                     LlmClient* llm) {
  if (config.batch_size < 1) throw ArgumentError("batch_size must be >= 1");
  std::map<std::string, Facets> out;
  if (volumes.empty()) return out;
  if (!llm) {
    for (const auto& v : volumes) out.emplace(v.isbn13, rules_normalize(v, table));
    return out;
  }

  std::vector<const VolumeMeta*> ptrs;
  ptrs.reserve(volumes.size());
  for (const auto& v : volumes) ptrs.push_back(&v);
  const std::size_t size = static_cast<std::size_t>(config.batch_size);
  const std::size_t batches = (ptrs.size() + size - 1) / size;
  std::vector<std::map<std::string, Facets>> replies(batches);
  const auto system = facet_system_prompt();

  parallel_for(batches, static_cast<std::size_t>(std::max(1, config.max_concurrent_batches)), [&](std::size_t b) {
    const auto begin = b * size;
    std::span<const VolumeMeta* const> batch(ptrs.data() + begin, std::min(size, ptrs.size() - begin));
    try {
      replies[b] = parse_facet_reply(llm->complete(system, facet_user_prompt(batch)));
    } catch (const std::exception& e) {
      log::warn("facet batch " + std::to_string(b) + " fell back to rules: " + e.what());
    }
  });

  for (std::size_t i = 0; i < ptrs.size(); ++i) {
    const auto& reply = replies[i / size];
    auto it = reply.find(ptrs[i]->isbn13);
    out.emplace(ptrs[i]->isbn13, it != reply.end() ? it->second : rules_normalize(*ptrs[i], table));
  }
  return out;
}

}  // namespace librarylens
