#include "kgrec/tables.hpp"

#include <algorithm>
#include <cstdlib>
#include <optional>

#include "kgrec/error.hpp"

namespace kgrec {

namespace {

bool needs_quoting(const std::string& cell) {
  return cell.find_first_of(",\"\n\r") != std::string::npos;
}

void append_cell(std::string& out, const std::string& cell) {
  if (!needs_quoting(cell)) {
    out += cell;
    return;
  }
  out.push_back('"');
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

std::optional<double> as_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  char* end = nullptr;
  double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out.push_back(',');
    append_cell(out, t.columns[i]);
  }
  out.push_back('\n');
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size())
      throw DomainError("table row width mismatch in '" + t.name + "'");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      append_cell(out, row[i]);
    }
    out.push_back('\n');
  }
  return out;
}

Table parse_csv(const std::string& csv, const std::string& name) {
  Table t;
  t.name = name;
  std::vector<std::string> row;
  std::string cell;
  bool in_quotes = false;
  bool row_has_data = false;

  auto end_cell = [&] {
    row.push_back(cell);
    cell.clear();
  };
  auto end_row = [&] {
    end_cell();
    if (t.columns.empty())
      t.columns = std::move(row);
    else
      t.rows.push_back(std::move(row));
    row = {};
    row_has_data = false;
  };

  for (std::size_t i = 0; i < csv.size(); ++i) {
    char c = csv[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < csv.size() && csv[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cell.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"': in_quotes = true; row_has_data = true; break;
      case ',': end_cell(); row_has_data = true; break;
      case '\r': break;
      case '\n': end_row(); break;
      default: cell.push_back(c); row_has_data = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quote in CSV '" + name + "'");
  if (row_has_data || !cell.empty() || !row.empty()) end_row();

  for (const auto& r : t.rows)
    if (r.size() != t.columns.size())
      throw ParseError("ragged CSV row in '" + name + "'");
  return t;
}

std::string render_text(const Table& t, const StarRule& rule) {
  // mark winners first; the star is part of the cell for width purposes
  std::vector<std::vector<std::string>> cells = t.rows;
  if (rule.kind == StarRule::RowMax) {
    for (auto& row : cells) {
      std::size_t best = row.size();
      double best_v = 0;
      for (std::size_t c = rule.first_col; c < rule.last_col && c < row.size();
           ++c) {
        auto v = as_number(row[c]);
        if (v && (best == row.size() || *v > best_v)) {
          best = c;
          best_v = *v;
        }
      }
      if (best < row.size()) row[best] += "*";
    }
  } else if (rule.kind == StarRule::ColMax) {
    for (std::size_t c = rule.first_col; c < rule.last_col; ++c) {
      std::size_t best = cells.size();
      double best_v = 0;
      for (std::size_t r = 0; r < cells.size(); ++r) {
        if (c >= cells[r].size()) continue;
        auto v = as_number(cells[r][c]);
        if (v && (best == cells.size() || *v > best_v)) {
          best = r;
          best_v = *v;
        }
      }
      if (best < cells.size()) cells[best][c] += "*";
    }
  }

  std::vector<std::size_t> width(t.columns.size(), 0);
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    width[c] = t.columns[c].size();
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c)
      width[c] = std::max(width[c], row[c].size());

  std::string out;
  if (!t.name.empty()) {
    out += t.name;
    out.push_back('\n');
  }
  auto emit_row = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += "  ";
      out += row[c];
      if (c + 1 < row.size())
        out.append(width[c] - std::min(width[c], row[c].size()), ' ');
    }
    out.push_back('\n');
  };
  emit_row(t.columns);
  std::string rule_line;
  for (std::size_t c = 0; c < width.size(); ++c) {
    if (c) rule_line += "  ";
    rule_line.append(width[c], '-');
  }
  out += rule_line;
  out.push_back('\n');
  for (const auto& row : cells) emit_row(row);
  return out;
}

}  // namespace kgrec
