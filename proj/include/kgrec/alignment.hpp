#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace kgrec {

// item id -> (kg label -> entity token). At most one entity per (item, kg).
struct AlignmentMap {
  std::map<std::int64_t, std::map<std::string, std::string>> entries;

  // Entity token for (item, kg), or nullptr.
  const std::string* find(std::int64_t item, const std::string& kg) const;

  // Items that have an entity in every one of the given KGs, ascending.
  std::vector<std::int64_t> complete_items(const std::vector<std::string>& kgs) const;

  // Items that are present but lack an entity in at least one given KG.
  std::vector<std::int64_t> incomplete_items(const std::vector<std::string>& kgs) const;
};

// TSV with a required "item_id<TAB>kg_label<TAB>entity_iri" header. Entity
// IRIs may be written with or without angle brackets. A repeated (item, kg)
// row with the same IRI is tolerated; with a different IRI it is an error.
AlignmentMap load_alignment(const std::string& path);

}  // namespace kgrec
