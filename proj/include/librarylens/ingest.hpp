#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "librarylens/csv.hpp"
#include "librarylens/error.hpp"
#include "librarylens/isbn.hpp"
#include "librarylens/text.hpp"

namespace librarylens {

enum class Binding { Hardcover, Paperback, MassMarket, Ebook, Audio, Unknown };

inline std::string_view to_string(Binding b) {
  switch (b) {
    case Binding::Hardcover: return "Hardcover";
    case Binding::Paperback: return "Paperback";
    case Binding::MassMarket: return "MassMarket";
    case Binding::Ebook: return "Ebook";
    case Binding::Audio: return "Audio";
    case Binding::Unknown: break;
  }
  return "Unknown";
}

inline Binding parse_binding(std::string_view s) {
  static const std::array<std::pair<std::string_view, Binding>, 16> names{{
      {"hardcover", Binding::Hardcover},
      {"hardback", Binding::Hardcover},
      {"paperback", Binding::Paperback},
      {"trade paperback", Binding::Paperback},
      {"mass market paperback", Binding::MassMarket},
      {"mass market", Binding::MassMarket},
      {"massmarket", Binding::MassMarket},
      {"ebook", Binding::Ebook},
      {"kindle edition", Binding::Ebook},
      {"nook", Binding::Ebook},
      {"audio", Binding::Audio},
      {"audiobook", Binding::Audio},
      {"audio cd", Binding::Audio},
      {"audible audio", Binding::Audio},
      {"audio cassette", Binding::Audio},
      {"unknown", Binding::Unknown},
  }};
  s = text::trim(s);
  for (const auto& [name, value] : names)
    if (text::iequals(s, name)) return value;
  return Binding::Unknown;
}

// One accepted row of a Goodreads export. `title` has any trailing series
// marker removed; the marker lands in series_name/series_index.
struct RawRecord {
  std::string title;
  std::string author_display;
  std::string author_lf;
  std::string isbn13;
  int my_rating = 0;
  double average_rating = 0.0;
  std::string publisher;
  Binding binding = Binding::Unknown;
  int page_count = 0;
  std::optional<int> year_published;
  std::optional<std::string> series_name;
  std::optional<double> series_index;

  friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

struct Rejection {
  std::size_t row_number = 0;  // 1-based data row, header excluded
  std::string reason;

  friend bool operator==(const Rejection&, const Rejection&) = default;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::vector<Rejection> rejected;
  std::size_t deduplicated = 0;

  std::size_t total() const { return accepted + rejected.size() + deduplicated; }
  friend bool operator==(const IngestReport&, const IngestReport&) = default;
};

struct IngestResult {
  std::vector<RawRecord> records;
  IngestReport report;
};

struct IngestOptions {
  std::size_t max_rows = 0;  // 0 = unlimited
};

struct SeriesSplit {
  std::string clean_title;
  std::optional<std::string> series_name;
  std::optional<double> series_index;

  friend bool operator==(const SeriesSplit&, const SeriesSplit&) = default;
};

// Recognizes a trailing "(Series, #n)" or "(Series #n)"; n may be decimal.
inline SeriesSplit parse_series_from_title(std::string_view title) {
  SeriesSplit unchanged{std::string(title), std::nullopt, std::nullopt};
  const auto t = text::trim(title);
  if (t.empty() || t.back() != ')') return unchanged;
  const auto open = t.rfind('(');
  if (open == std::string_view::npos) return unchanged;
  const auto inner = t.substr(open + 1, t.size() - open - 2);
  const auto hash = inner.rfind('#');
  if (hash == std::string_view::npos || hash == 0) return unchanged;
  const auto number = inner.substr(hash + 1);
  if (number.empty() || !std::isdigit(static_cast<unsigned char>(number.front()))) return unchanged;
  const auto index = text::to_double(number);
  if (!index) return unchanged;
  if (!std::isspace(static_cast<unsigned char>(inner[hash - 1]))) return unchanged;
  auto name = text::trim(inner.substr(0, hash));
  if (!name.empty() && name.back() == ',') name = text::trim(name.substr(0, name.size() - 1));
  const auto clean = text::trim(t.substr(0, open));
  if (name.empty() || clean.empty()) return unchanged;
  return {std::string(clean), std::string(name), *index};
}

namespace detail {

struct Columns {
  std::unordered_map<std::string, std::size_t> index;

  std::optional<std::size_t> find(std::string_view name) const {
    auto it = index.find(text::fold(name));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

inline std::string_view cell(const csv::Row& row, std::optional<std::size_t> col) {
  if (!col || *col >= row.size()) return {};
  return row[*col];
}

// Returns the canonical ISBN-13 or the failure reason.
struct IsbnOutcome {
  std::string isbn13;
  std::string reason;
};

inline IsbnOutcome resolve_isbn(std::string_view isbn13_cell, std::string_view isbn10_cell) {
  const auto i13 = isbn::strip_spreadsheet_wrapper(isbn13_cell);
  const auto i10 = isbn::strip_spreadsheet_wrapper(isbn10_cell);
  std::string reason;
  if (!i13.empty()) {
    if (isbn::validate_isbn13(i13)) return {std::string(i13), {}};
    reason = (i13.size() == 13 && isbn::all_digits(i13)) ? "checksum" : "shape";
  }
  if (!i10.empty()) {
    try {
      return {isbn::isbn10_to_isbn13(i10), {}};
    } catch (const ConversionError&) {
      if (reason.empty())
        reason = (i10.size() == 10 && isbn::all_digits(i10.substr(0, 9))) ? "checksum" : "shape";
    }
  }
  if (reason.empty()) reason = "missing-isbn";
  return {{}, reason};
}

}  // namespace detail

// Rows with no usable ISBN are rejected; later duplicates of an ISBN-13 are
// counted and dropped. Blank lines are not rows.
inline IngestResult parse_goodreads_csv(std::string_view bytes, const IngestOptions& options = {}) {
  if (!csv::valid_utf8(bytes)) throw ParseError("input is not valid UTF-8");
  csv::Reader reader(bytes);
  csv::Row row;
  if (!reader.next(row)) throw ParseError("missing header row");

  detail::Columns cols;
  for (std::size_t i = 0; i < row.size(); ++i)
    cols.index.emplace(text::fold(text::trim(row[i])), i);
  const auto c_title = cols.find("Title");
  const auto c_isbn13 = cols.find("ISBN13");
  const auto c_isbn = cols.find("ISBN");
  if (!c_title) throw ParseError("header lacks a Title column");
  if (!c_isbn13 && !c_isbn) throw ParseError("header lacks both ISBN and ISBN13 columns");
  const auto c_author = cols.find("Author");
  const auto c_author_lf = cols.find("Author l-f");
  const auto c_my_rating = cols.find("My Rating");
  const auto c_avg_rating = cols.find("Average Rating");
  const auto c_publisher = cols.find("Publisher");
  const auto c_binding = cols.find("Binding");
  const auto c_pages = cols.find("Number of Pages");
  const auto c_year = cols.find("Year Published");

  IngestResult out;
  std::unordered_set<std::string> seen;
  std::size_t row_number = 0;
  while (reader.next(row)) {
    if (row.size() == 1 && text::trim(row[0]).empty()) continue;
    ++row_number;
    if (options.max_rows && row_number > options.max_rows) throw RowLimitError(options.max_rows);

    auto resolved = detail::resolve_isbn(detail::cell(row, c_isbn13), detail::cell(row, c_isbn));
    if (resolved.isbn13.empty()) {
      out.report.rejected.push_back({row_number, resolved.reason});
      continue;
    }
    if (!seen.insert(resolved.isbn13).second) {
      ++out.report.deduplicated;
      continue;
    }

    RawRecord rec;
    rec.isbn13 = std::move(resolved.isbn13);
    auto split = parse_series_from_title(text::trim(detail::cell(row, c_title)));
    rec.title = std::move(split.clean_title);
    rec.series_name = std::move(split.series_name);
    rec.series_index = split.series_index;
    rec.author_display = std::string(text::trim(detail::cell(row, c_author)));
    rec.author_lf = std::string(text::trim(detail::cell(row, c_author_lf)));
    if (rec.author_lf.empty()) rec.author_lf = rec.author_display;
    rec.my_rating = static_cast<int>(std::clamp(text::to_int(detail::cell(row, c_my_rating)).value_or(0), 0LL, 5LL));
    rec.average_rating = std::clamp(text::to_double(detail::cell(row, c_avg_rating)).value_or(0.0), 0.0, 5.0);
    rec.publisher = std::string(text::trim(detail::cell(row, c_publisher)));
    rec.binding = parse_binding(detail::cell(row, c_binding));
    rec.page_count = static_cast<int>(std::clamp(text::to_int(detail::cell(row, c_pages)).value_or(0), 0LL, 1000000LL));
    if (auto y = text::to_int(detail::cell(row, c_year))) rec.year_published = static_cast<int>(*y);
    out.records.push_back(std::move(rec));
    ++out.report.accepted;
  }
  return out;
}

}  // namespace librarylens
