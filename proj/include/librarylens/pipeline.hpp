#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "librarylens/facets.hpp"
#include "librarylens/ingest.hpp"
#include "librarylens/llm_http.hpp"
#include "librarylens/log.hpp"
#include "librarylens/metadata.hpp"
#include "librarylens/providers.hpp"
#include "librarylens/resources.hpp"
#include "librarylens/spinecolor.hpp"
#include "librarylens/volume.hpp"
#include "librarylens/workers.hpp"

namespace librarylens {

// The remote provider could not be reached for any ISBN.
class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  bool offline = true;
  std::filesystem::path fixture_file = resource_dir() / "fixture" / "metadata.json";
  ProviderConfig provider;
  std::optional<std::filesystem::path> cache_dir;
  bool llm_disabled = true;
  NormalizerConfig normalizer;
  std::filesystem::path keyword_file = resource_dir() / "facet_keywords.json";
  QuantizeConfig quantize;
  std::size_t cover_workers = 4;
  std::size_t row_cap = 10000;

  // ISBNDB_API_KEY, LIBRARYLENS_ISBNDB_URL, LIBRARYLENS_CACHE_DIR, LIBRARYLENS_OFFLINE,
  // LIBRARYLENS_FIXTURE, LLM_API_KEY, LIBRARYLENS_LLM_ENDPOINT, LIBRARYLENS_LLM_MODEL,
  // LIBRARYLENS_LLM_DISABLED.
  static PipelineConfig from_env() {
    PipelineConfig c;
    c.offline = env_flag("LIBRARYLENS_OFFLINE");
    c.fixture_file = env_or("LIBRARYLENS_FIXTURE", c.fixture_file.string());
    c.provider.api_key = env_or("ISBNDB_API_KEY", "");
    c.provider.base_url = env_or("LIBRARYLENS_ISBNDB_URL", c.provider.base_url);
    if (auto dir = env_or("LIBRARYLENS_CACHE_DIR", ""); !dir.empty()) c.cache_dir = dir;
    c.normalizer.api_key = env_or("LLM_API_KEY", "");
    c.normalizer.endpoint = env_or("LIBRARYLENS_LLM_ENDPOINT", "");
    c.normalizer.model_id = env_or("LIBRARYLENS_LLM_MODEL", c.normalizer.model_id);
    c.llm_disabled = env_flag("LIBRARYLENS_LLM_DISABLED") || c.normalizer.api_key.empty() ||
                     c.normalizer.endpoint.empty();
    return c;
  }
};

// Long-lived collaborators shared by every upload.
class PipelineContext {
 public:
  explicit PipelineContext(PipelineConfig config) : config_(std::move(config)) {
    if (config_.offline)
      provider_ = std::make_unique<FixtureProvider>(config_.fixture_file);
    else
      provider_ = std::make_unique<HttpMetadataProvider>(config_.provider);
    if (config_.cache_dir) cache_ = std::make_unique<MetadataCache>(*config_.cache_dir);
    if (!config_.llm_disabled) llm_ = std::make_unique<ChatCompletionClient>(config_.normalizer);
    keywords_ = KeywordTable::load(config_.keyword_file);
  }

  PipelineContext(PipelineConfig config, std::unique_ptr<MetadataProvider> provider,
                  std::unique_ptr<LlmClient> llm = nullptr)
      : config_(std::move(config)), provider_(std::move(provider)), llm_(std::move(llm)) {
    if (config_.cache_dir) cache_ = std::make_unique<MetadataCache>(*config_.cache_dir);
    keywords_ = KeywordTable::load(config_.keyword_file);
  }

  const PipelineConfig& config() const { return config_; }
  MetadataProvider& provider() { return *provider_; }
  MetadataCache* cache() { return cache_.get(); }
  LlmClient* llm() { return llm_.get(); }
  const KeywordTable& keywords() const { return keywords_; }

 private:
  PipelineConfig config_;
  std::unique_ptr<MetadataProvider> provider_;
  std::unique_ptr<MetadataCache> cache_;
  std::unique_ptr<LlmClient> llm_;
  KeywordTable keywords_;
};

struct BuildResult {
  std::vector<RawRecord> records;
  IngestReport report;
  std::vector<Volume> volumes;  // CSV order
  std::map<std::string, FetchFailure> fetch_failures;
};

// CSV bytes -> enriched volumes: ingest, fetch, facets, spine colors.
// Rows the provider cannot resolve keep their CSV data with estimated
// dimensions and a neutral spine, and are listed in fetch_failures.
inline BuildResult build_volumes(std::string_view csv_bytes, PipelineContext& ctx) {
  BuildResult out;
  auto ingest = parse_goodreads_csv(csv_bytes, {ctx.config().row_cap});
  out.records = std::move(ingest.records);
  out.report = std::move(ingest.report);

  std::vector<std::string> isbns;
  isbns.reserve(out.records.size());
  for (const auto& r : out.records) isbns.push_back(r.isbn13);
  auto fetched = fetch_metadata(isbns, ctx.provider(), FetchOptions::from(ctx.config().provider), ctx.cache());

  if (ctx.provider().remote() && !fetched.empty()) {
    const bool all_network = std::all_of(fetched.begin(), fetched.end(), [](const auto& kv) {
      const auto* f = std::get_if<FetchFailure>(&kv.second);
      return f && f->kind == FetchFailureKind::Network;
    });
    if (all_network) throw ProviderError("metadata provider unreachable: " + std::get<FetchFailure>(fetched.begin()->second).detail);
  }

  out.volumes.resize(out.records.size());
  std::vector<VolumeMeta> metas(out.records.size());
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    auto& v = out.volumes[i];
    v.record = out.records[i];
    const auto& result = fetched.at(v.record.isbn13);
    if (const auto* meta = std::get_if<VolumeMeta>(&result)) {
      v.meta = *meta;
    } else {
      out.fetch_failures.emplace(v.record.isbn13, std::get<FetchFailure>(result));
      v.meta = meta_from_record(v.record);
      v.metadata_found = false;
    }
    metas[i] = v.meta;
  }

  auto facets = normalize_batch(metas, ctx.config().normalizer, ctx.keywords(), ctx.llm());
  for (auto& v : out.volumes) v.facets = facets.at(v.record.isbn13);

  parallel_for(out.volumes.size(), ctx.config().cover_workers, [&](std::size_t i) {
    auto& v = out.volumes[i];
    v.spine_color = spine_color_for(v.meta, load_cover(v.meta, ctx.provider(), ctx.cache()), ctx.config().quantize);
  });
  return out;
}

}  // namespace librarylens
