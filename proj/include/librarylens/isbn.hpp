#pragma once

#include <string>
#include <string_view>

#include "librarylens/error.hpp"

namespace librarylens::isbn {

inline bool all_digits(std::string_view s) {
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return !s.empty();
}

// Check digit for the first 12 digits of an ISBN-13 (weights 1,3,1,3,...).
inline char isbn13_check_digit(std::string_view first12) {
  int sum = 0;
  for (std::size_t i = 0; i < 12; ++i) sum += (first12[i] - '0') * (i % 2 ? 3 : 1);
  return static_cast<char>('0' + (10 - sum % 10) % 10);
}

inline bool validate_isbn13(std::string_view s) {
  return s.size() == 13 && all_digits(s) && isbn13_check_digit(s) == s[12];
}

// Weights 10..1, sum divisible by 11; 'X' (or 'x') is 10 and only valid last.
inline bool validate_isbn10(std::string_view s) {
  if (s.size() != 10 || !all_digits(s.substr(0, 9))) return false;
  int sum = 0;
  for (std::size_t i = 0; i < 9; ++i) sum += (s[i] - '0') * static_cast<int>(10 - i);
  const char last = s[9];
  if (last == 'X' || last == 'x')
    sum += 10;
  else if (last >= '0' && last <= '9')
    sum += last - '0';
  else
    return false;
  return sum % 11 == 0;
}

inline std::string isbn10_to_isbn13(std::string_view s) {
  if (s.size() != 10 || !all_digits(s.substr(0, 9)))
    throw ConversionError("not an ISBN-10: '" + std::string(s) + "'");
  if (!validate_isbn10(s))
    throw ConversionError("ISBN-10 checksum fails: '" + std::string(s) + "'");
  std::string out = "978";
  out.append(s.substr(0, 9));
  out.push_back(isbn13_check_digit(out));
  return out;
}

// Goodreads writes identifiers as ="0306406152" so spreadsheets keep the zeros.
inline std::string_view strip_spreadsheet_wrapper(std::string_view cell) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
  if (cell.size() >= 3 && cell.substr(0, 2) == "=\"" && cell.back() == '"')
    cell = cell.substr(2, cell.size() - 3);
  return cell;
}

}  // namespace librarylens::isbn
