#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "kgrec/gzio.hpp"

namespace kgrec {

enum class TermKind { Iri, Blank, Literal };

struct Term {
  TermKind kind = TermKind::Iri;
  std::string value;     // IRI text (no angle brackets), blank label, or lexical form
  std::string lang;      // language tag, literals only
  std::string datatype;  // datatype IRI, literals only

  static Term iri(std::string v);
  static Term blank(std::string label);
  static Term literal(std::string lex, std::string lang = "",
                      std::string datatype = "");
  bool operator==(const Term&) const = default;
};

struct Triple {
  Term subject;           // Iri or Blank
  std::string predicate;  // IRI text
  Term object;
  bool operator==(const Triple&) const = default;
};

enum class ParseMode { Strict, Lenient };

struct ParseIssue {
  std::size_t line;
  std::string reason;
};

struct ParseStats {
  std::size_t lines = 0;    // non-blank, non-comment lines seen
  std::size_t triples = 0;  // statements accepted
  std::size_t skipped = 0;  // malformed lines skipped (lenient mode)
  std::vector<ParseIssue> issues;  // capped at kMaxIssues; skipped keeps the count
  static constexpr std::size_t kMaxIssues = 32;
};

// Parses one statement. Returns false for blank / comment-only lines.
// Throws ParseError (without a line number; drivers attach it) on bad syntax.
bool parse_ntriples_line(std::string_view line, Triple& out);

using TripleHandler = std::function<void(Triple&&)>;

// Streaming parse. Lenient mode skips malformed lines and counts them;
// strict mode aborts on the first malformed line with its line number.
ParseStats parse_ntriples(LineSource& src, ParseMode mode,
                          const TripleHandler& sink);
ParseStats parse_ntriples_file(const std::string& path, ParseMode mode,
                               const TripleHandler& sink);

// One statement, terminated with " ." and no newline. Escapes whatever the
// grammar cannot carry raw; parse(to_ntriples(t)) == t.
std::string to_ntriples(const Triple& t);

}  // namespace kgrec
