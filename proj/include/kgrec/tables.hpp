#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace kgrec {

// Report table with cells already formatted as strings, so emit/parse is an
// exact identity.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // each row matches columns

  bool operator==(const Table&) const = default;
};

std::string to_csv(const Table& t);
Table parse_csv(const std::string& csv, const std::string& name);

// Which cells compete for the '*' marker in the text rendering.
struct StarRule {
  enum Kind { None, RowMax, ColMax } kind = None;
  std::size_t first_col = 0;  // competing column range [first_col, last_col)
  std::size_t last_col = 0;
};

// Fixed-width text table; the winning cell of each row (RowMax) or column
// (ColMax) gets a '*' suffix. Non-numeric cells never win.
std::string render_text(const Table& t, const StarRule& rule);

}  // namespace kgrec
