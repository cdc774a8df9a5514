#include "kgrec/alignment.hpp"

#include <charconv>

#include "kgrec/error.hpp"
#include "kgrec/gzio.hpp"

namespace kgrec {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == '\t') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::int64_t parse_id(std::string_view s, std::size_t line) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ParseError("bad item id '" + std::string(s) + "'", line);
  return v;
}

}  // namespace

const std::string* AlignmentMap::find(std::int64_t item,
                                      const std::string& kg) const {
  auto it = entries.find(item);
  if (it == entries.end()) return nullptr;
  auto jt = it->second.find(kg);
  if (jt == it->second.end()) return nullptr;
  return &jt->second;
}

std::vector<std::int64_t> AlignmentMap::complete_items(
    const std::vector<std::string>& kgs) const {
  std::vector<std::int64_t> out;
  for (const auto& [item, by_kg] : entries) {
    bool all = true;
    for (const auto& kg : kgs)
      if (!by_kg.count(kg)) {
        all = false;
        break;
      }
    if (all) out.push_back(item);
  }
  return out;
}

std::vector<std::int64_t> AlignmentMap::incomplete_items(
    const std::vector<std::string>& kgs) const {
  std::vector<std::int64_t> out;
  for (const auto& [item, by_kg] : entries) {
    for (const auto& kg : kgs)
      if (!by_kg.count(kg)) {
        out.push_back(item);
        break;
      }
  }
  return out;
}

AlignmentMap load_alignment(const std::string& path) {
  LineSource src(path);
  std::string line;
  if (!src.next(line))
    throw ParseError(path + ": empty link file (header required)", 0);
  auto header = split_tabs(line);
  if (header.size() != 3 || header[0] != "item_id" || header[1] != "kg_label" ||
      header[2] != "entity_iri")
    throw ParseError(
        path + ":1: expected header 'item_id\tkg_label\tentity_iri'", 1);

  AlignmentMap map;
  while (src.next(line)) {
    if (line.empty()) continue;
    std::size_t ln = src.line_number();
    auto cols = split_tabs(line);
    if (cols.size() != 3)
      throw ParseError(path + ":" + std::to_string(ln) + ": expected 3 columns",
                       ln);
    std::int64_t item = parse_id(cols[0], ln);
    std::string kg(cols[1]);
    std::string iri(cols[2]);
    if (iri.size() >= 2 && iri.front() == '<' && iri.back() == '>')
      iri = iri.substr(1, iri.size() - 2);
    if (kg.empty() || iri.empty())
      throw ParseError(path + ":" + std::to_string(ln) + ": empty field", ln);
    auto [it, inserted] = map.entries[item].emplace(kg, iri);
    if (!inserted && it->second != iri)
      throw ParseError(path + ":" + std::to_string(ln) +
                           ": conflicting entity for item " +
                           std::to_string(item) + " in KG '" + kg + "'",
                       ln);
  }
  return map;
}

}  // namespace kgrec
