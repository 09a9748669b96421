#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>

#include <json.hpp>

#include "librarylens/log.hpp"
#include "librarylens/pipeline.hpp"
#include "librarylens/serialization.hpp"
#include "librarylens/shelf.hpp"
#include "librarylens/visual.hpp"

namespace librarylens {

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StaleRevisionError : public std::runtime_error {
 public:
  StaleRevisionError(std::uint64_t expected, std::uint64_t actual)
      : std::runtime_error("stale revision " + std::to_string(expected) + " (current " + std::to_string(actual) + ")") {}
};

struct LibraryState {
  std::string library_id;
  std::shared_ptr<const VolumeSet> volumes;
  std::vector<RawRecord> records;
  SceneLayout current_layout;
  SortStrategy current_strategy;
  EncodingMode current_mode = EncodingMode::Original;
  ShelfSpec spec;
  IngestReport ingest_report;
  std::map<std::string, FetchFailure> fetch_failures;
  std::uint64_t revision = 1;
};

inline SortStrategy default_strategy() { return SortStrategy::parse("authorseries"); }

struct SceneParams {
  std::optional<SortStrategy> sort;
  std::optional<EncodingMode> encoding;
  std::optional<int> shelves;
  std::optional<double> width_mm;
  std::optional<double> clearance_mm;
};

// Applies scene parameters in place. Throws ArgumentError (state untouched)
// when the resulting spec is invalid. Returns true when manual edits were
// discarded by a re-sort.
inline bool apply_scene_params(LibraryState& s, const SceneParams& p) {
  ShelfSpec spec = s.spec;
  if (p.shelves) spec.shelf_count = *p.shelves;
  if (p.width_mm) spec.shelf_width_mm = *p.width_mm;
  if (p.clearance_mm) spec.shelf_clearance_mm = *p.clearance_mm;
  spec.validate();

  bool changed = false, discarded = false;
  if (p.sort) {
    auto r = resort(s.current_layout, *p.sort, *s.volumes, spec);
    discarded = r.discarded_manual_edits;
    s.current_layout = std::move(r.layout);
    s.current_strategy = *p.sort;
    s.spec = spec;
    changed = true;
  } else if (!(spec == s.spec)) {
    const bool manual = s.current_layout.manual;
    s.current_layout = pack(s.current_layout.order, *s.volumes, spec);
    s.current_layout.manual = manual;
    s.spec = spec;
    changed = true;
  }
  if (p.encoding && *p.encoding != s.current_mode) {
    s.current_mode = *p.encoding;
    changed = true;
  }
  if (changed) ++s.revision;
  return discarded;
}

inline void apply_move(LibraryState& s, long long from, long long to, std::optional<std::uint64_t> expected_revision) {
  if (expected_revision && *expected_revision != s.revision) throw StaleRevisionError(*expected_revision, s.revision);
  s.current_layout = move(s.current_layout, from, to, *s.volumes, s.spec);
  ++s.revision;
}

inline json scene_json(const LibraryState& s, const PaletteTable& palettes, bool discarded_manual_edits = false) {
  const auto& layout = s.current_layout;
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < layout.order.size(); ++i) position.emplace(layout.order[i], i);
  json placements = json::array();
  for (const auto& p : layout.placements) {
    const auto& v = s.volumes->at(p.isbn13);
    const bool upright = p.orientation == Orientation::Upright;
    placements.push_back({{"isbn13", p.isbn13},
                          {"index", position.at(p.isbn13)},
                          {"title", v.title()},
                          {"shelf", p.shelf_index},
                          {"x_mm", p.x_offset_mm},
                          {"width_mm", p.width_mm},
                          {"height_mm", upright ? v.height_mm() : v.spine_thickness_mm()},
                          {"orientation", to_string(p.orientation)},
                          {"color", to_hex(display_color(v, s.current_mode, palettes))}});
  }
  json overflow = json::array();
  for (const auto& isbn : layout.overflow) {
    const auto& v = s.volumes->at(isbn);
    overflow.push_back({{"isbn13", isbn},
                        {"index", position.at(isbn)},
                        {"title", v.title()},
                        {"width_mm", v.spine_thickness_mm()},
                        {"height_mm", v.height_mm()},
                        {"color", to_hex(display_color(v, s.current_mode, palettes))}});
  }
  return json{{"library_id", s.library_id},
              {"revision", s.revision},
              {"sort", s.current_strategy.to_string()},
              {"encoding", to_string(s.current_mode)},
              {"spec", s.spec},
              {"order", layout.order},
              {"placements", placements},
              {"overflow", overflow},
              {"manual", layout.manual},
              {"manual_edits_discarded", discarded_manual_edits}};
}

inline json book_json(const LibraryState& s, const std::string& isbn13, const PaletteTable& palettes) {
  const auto* v = s.volumes->find(isbn13);
  if (!v) throw NotFoundError("no volume " + isbn13 + " in library " + s.library_id);
  json where = "overflow";
  for (const auto& p : s.current_layout.placements)
    if (p.isbn13 == isbn13) where = json{{"shelf", p.shelf_index}, {"x_mm", p.x_offset_mm}, {"orientation", to_string(p.orientation)}};
  return json{{"isbn13", isbn13},
              {"title", v->title()},
              {"authors", v->meta.authors.empty() ? std::vector<std::string>{v->record.author_display} : v->meta.authors},
              {"series_name", detail::opt(v->record.series_name)},
              {"series_index", detail::opt(v->record.series_index)},
              {"record", v->record},
              {"meta", v->meta},
              {"facets", v->facets},
              {"rating", detail::opt(v->rating())},
              {"spine_color", to_hex(v->spine_color)},
              {"display_color", to_hex(display_color(*v, s.current_mode, palettes))},
              {"metadata_found", v->metadata_found},
              {"placement", where}};
}

// Libraries live under <data_dir>/libraries/<id>/ as records.json,
// volumes.json and state.json. Mutations on one library are serialized by
// its own mutex; the registry lock is only held to look entries up.
class LibraryStore {
 public:
  explicit LibraryStore(std::filesystem::path data_dir) : root_(std::move(data_dir) / "libraries") {
    std::filesystem::create_directories(root_);
    for (const auto& entry : std::filesystem::directory_iterator(root_)) {
      if (!entry.is_directory()) continue;
      try {
        auto state = load(entry.path());
        auto id = state.library_id;
        libraries_.emplace(id, std::make_shared<Entry>(std::move(state)));
      } catch (const std::exception& e) {
        log::warn("skipping library " + entry.path().string() + ": " + e.what());
      }
    }
  }

  std::string create(BuildResult build, const ShelfSpec& spec = {}, const SortStrategy& strategy = default_strategy()) {
    LibraryState s;
    s.library_id = new_id();
    s.records = std::move(build.records);
    s.ingest_report = std::move(build.report);
    s.fetch_failures = std::move(build.fetch_failures);
    s.volumes = std::make_shared<const VolumeSet>(std::move(build.volumes));
    s.spec = spec;
    s.current_strategy = strategy;
    s.current_layout = pack(sort_volumes(s.volumes->all(), strategy), *s.volumes, spec);
    auto dir = root_ / s.library_id;
    std::filesystem::create_directories(dir);
    write_file(dir / "records.json", json(s.records).dump(1));
    write_file(dir / "volumes.json", json(std::vector<Volume>(s.volumes->all().begin(), s.volumes->all().end())).dump(1));
    save_state(s);
    auto id = s.library_id;
    std::unique_lock lock(registry_mutex_);
    libraries_.emplace(id, std::make_shared<Entry>(std::move(s)));
    return id;
  }

  bool contains(const std::string& id) const {
    std::shared_lock lock(registry_mutex_);
    return libraries_.contains(id);
  }

  // Read-only access under the library lock.
  template <typename Fn>
  auto read(const std::string& id, Fn&& fn) const {
    auto e = entry(id);
    std::lock_guard lock(e->mutex);
    return fn(static_cast<const LibraryState&>(e->state));
  }

  // Mutation on a copy; committed and persisted only if fn returns normally,
  // so readers never see a half-applied change.
  template <typename Fn>
  auto mutate(const std::string& id, Fn&& fn) {
    auto e = entry(id);
    std::lock_guard lock(e->mutex);
    LibraryState draft = e->state;
    if constexpr (std::is_void_v<decltype(fn(draft))>) {
      fn(draft);
      commit(*e, std::move(draft));
    } else {
      auto result = fn(draft);
      commit(*e, std::move(draft));
      return result;
    }
  }

  const std::filesystem::path& root() const { return root_; }

  static LibraryState load(const std::filesystem::path& dir) {
    LibraryState s;
    auto state = json::parse(read_file(dir / "state.json"));
    s.library_id = state.at("library_id").get<std::string>();
    s.records = json::parse(read_file(dir / "records.json")).get<std::vector<RawRecord>>();
    s.volumes = std::make_shared<const VolumeSet>(json::parse(read_file(dir / "volumes.json")).get<std::vector<Volume>>());
    s.revision = state.at("revision").get<std::uint64_t>();
    s.current_strategy = SortStrategy::parse(state.at("sort").get<std::string>());
    s.current_mode = parse_encoding(state.at("encoding").get<std::string>());
    s.spec = state.at("spec").get<ShelfSpec>();
    s.ingest_report = state.at("ingest_report").get<IngestReport>();
    s.fetch_failures = state.at("fetch_failures").get<std::map<std::string, FetchFailure>>();
    s.current_layout = pack(state.at("order").get<std::vector<std::string>>(), *s.volumes, s.spec);
    s.current_layout.manual = state.at("manual").get<bool>();
    return s;
  }

 private:
  struct Entry {
    explicit Entry(LibraryState s) : state(std::move(s)) {}
    mutable std::mutex mutex;
    LibraryState state;
  };

  std::shared_ptr<Entry> entry(const std::string& id) const {
    std::shared_lock lock(registry_mutex_);
    auto it = libraries_.find(id);
    if (it == libraries_.end()) throw NotFoundError("no library " + id);
    return it->second;
  }

  void commit(Entry& e, LibraryState&& draft) {
    if (draft.revision != e.state.revision) save_state(draft);
    e.state = std::move(draft);
  }

  void save_state(const LibraryState& s) const {
    json state{{"library_id", s.library_id},
               {"revision", s.revision},
               {"sort", s.current_strategy.to_string()},
               {"encoding", to_string(s.current_mode)},
               {"spec", s.spec},
               {"order", s.current_layout.order},
               {"manual", s.current_layout.manual},
               {"ingest_report", s.ingest_report},
               {"fetch_failures", s.fetch_failures}};
    write_file(root_ / s.library_id / "state.json", state.dump(1));
  }

  static std::string new_id() {
    static std::mutex m;
    static std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lock(m);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
    return buf;
  }

  static void write_file(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
      out << contents;
    }
    std::filesystem::rename(tmp, path);
  }

  static std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::filesystem::path root_;
  mutable std::shared_mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> libraries_;
};

}  // namespace librarylens
