#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "librarylens/color.hpp"
#include "librarylens/facets.hpp"
#include "librarylens/ingest.hpp"
#include "librarylens/metadata.hpp"

namespace librarylens {

// A fully enriched book: the CSV row, provider metadata, facets and spine color.
struct Volume {
  RawRecord record;
  VolumeMeta meta;
  Facets facets;
  Rgb8 spine_color = kNeutralSpine;
  bool metadata_found = true;

  const std::string& isbn13() const { return record.isbn13; }
  const std::string& title() const { return record.title.empty() ? meta.title : record.title; }
  double height_mm() const { return meta.height_mm; }
  double spine_thickness_mm() const { return meta.spine_thickness_mm; }

  // Goodreads average when it has one (0.00 means unrated), else the provider's.
  std::optional<double> rating() const {
    if (record.average_rating > 0.0) return record.average_rating;
    return meta.average_rating;
  }

  friend bool operator==(const Volume&, const Volume&) = default;
};

// Stand-in metadata for a row the provider could not resolve.
inline VolumeMeta meta_from_record(const RawRecord& r) {
  VolumeMeta m;
  m.isbn13 = r.isbn13;
  m.title = r.title;
  if (!r.author_display.empty()) m.authors.push_back(r.author_display);
  m.binding = r.binding;
  m.page_count = r.page_count;
  const auto d = estimate_dimensions(r.page_count, r.binding);
  m.height_mm = d.height_mm;
  m.spine_thickness_mm = d.spine_thickness_mm;
  m.dimension_source = d.source;
  return m;
}

// Volumes plus an ISBN index. Immutable after construction.
class VolumeSet {
 public:
  VolumeSet() = default;
  explicit VolumeSet(std::vector<Volume> volumes) : volumes_(std::move(volumes)) {
    for (std::size_t i = 0; i < volumes_.size(); ++i)
      if (!index_.emplace(volumes_[i].isbn13(), i).second)
        throw ArgumentError("duplicate volume " + volumes_[i].isbn13());
  }

  const Volume* find(const std::string& isbn13) const {
    auto it = index_.find(isbn13);
    return it == index_.end() ? nullptr : &volumes_[it->second];
  }

  const Volume& at(const std::string& isbn13) const {
    if (const auto* v = find(isbn13)) return *v;
    throw ArgumentError("unknown volume " + isbn13);
  }

  std::span<const Volume> all() const { return volumes_; }
  std::size_t size() const { return volumes_.size(); }
  bool empty() const { return volumes_.empty(); }

 private:
  std::vector<Volume> volumes_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace librarylens
