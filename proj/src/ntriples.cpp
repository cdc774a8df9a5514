#include "kgrec/ntriples.hpp"

#include <cctype>
#include <cstdint>

#include "kgrec/error.hpp"

namespace kgrec {

Term Term::iri(std::string v) {
  Term t;
  t.kind = TermKind::Iri;
  t.value = std::move(v);
  return t;
}

Term Term::blank(std::string label) {
  Term t;
  t.kind = TermKind::Blank;
  t.value = std::move(label);
  return t;
}

Term Term::literal(std::string lex, std::string lang, std::string datatype) {
  Term t;
  t.kind = TermKind::Literal;
  t.value = std::move(lex);
  t.lang = std::move(lang);
  t.datatype = std::move(datatype);
  return t;
}

namespace {

struct Cursor {
  const char* p;
  const char* end;
  bool eof() const { return p == end; }
};

[[noreturn]] void fail(const std::string& why) { throw ParseError(why); }

bool is_ws(char c) { return c == ' ' || c == '\t'; }

void skip_ws(Cursor& c) {
  while (!c.eof() && is_ws(*c.p)) ++c.p;
}

void require_ws(Cursor& c) {
  if (c.eof() || !is_ws(*c.p)) fail("expected whitespace between terms");
  skip_ws(c);
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp >= 0xD800 && cp <= 0xDFFF) fail("surrogate code point in \\u escape");
  if (cp > 0x10FFFF) fail("code point out of range in \\U escape");
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::uint32_t parse_hex(Cursor& c, int digits) {
  std::uint32_t v = 0;
  for (int i = 0; i < digits; ++i) {
    if (c.eof()) fail("truncated \\u escape");
    char ch = *c.p++;
    v <<= 4;
    if (ch >= '0' && ch <= '9') v |= static_cast<std::uint32_t>(ch - '0');
    else if (ch >= 'a' && ch <= 'f') v |= static_cast<std::uint32_t>(ch - 'a' + 10);
    else if (ch >= 'A' && ch <= 'F') v |= static_cast<std::uint32_t>(ch - 'A' + 10);
    else fail("bad hex digit in \\u escape");
  }
  return v;
}

// Cursor is positioned at '<'.
std::string parse_iri(Cursor& c) {
  ++c.p;
  std::string out;
  for (;;) {
    if (c.eof()) fail("unterminated IRI");
    char ch = *c.p;
    if (ch == '>') {
      ++c.p;
      return out;
    }
    if (ch == '\\') {
      ++c.p;
      if (c.eof()) fail("dangling escape in IRI");
      char e = *c.p++;
      if (e == 'u') append_utf8(out, parse_hex(c, 4));
      else if (e == 'U') append_utf8(out, parse_hex(c, 8));
      else fail("invalid escape in IRI (only \\u and \\U are allowed)");
      continue;
    }
    unsigned char u = static_cast<unsigned char>(ch);
    if (u <= 0x20 || ch == '<' || ch == '"' || ch == '{' || ch == '}' ||
        ch == '|' || ch == '^' || ch == '`')
      fail("character not allowed in IRI");
    out.push_back(ch);
    ++c.p;
  }
}

bool is_blank_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '.';
}

// Cursor is positioned at '_'.
std::string parse_blank(Cursor& c) {
  c.p += 2;  // "_:"
  std::string out;
  while (!c.eof() && is_blank_char(*c.p)) out.push_back(*c.p++);
  // a label cannot end with '.'; give trailing dots back (statement terminator)
  while (!out.empty() && out.back() == '.') {
    out.pop_back();
    --c.p;
  }
  if (out.empty()) fail("empty blank node label");
  return out;
}

// Cursor is positioned at '"'.
Term parse_literal(Cursor& c) {
  ++c.p;
  std::string lex;
  for (;;) {
    if (c.eof()) fail("unterminated string literal");
    char ch = *c.p;
    if (ch == '"') {
      ++c.p;
      break;
    }
    if (ch == '\\') {
      ++c.p;
      if (c.eof()) fail("dangling escape in literal");
      char e = *c.p++;
      switch (e) {
        case 't': lex.push_back('\t'); break;
        case 'b': lex.push_back('\b'); break;
        case 'n': lex.push_back('\n'); break;
        case 'r': lex.push_back('\r'); break;
        case 'f': lex.push_back('\f'); break;
        case '"': lex.push_back('"'); break;
        case '\'': lex.push_back('\''); break;
        case '\\': lex.push_back('\\'); break;
        case 'u': append_utf8(lex, parse_hex(c, 4)); break;
        case 'U': append_utf8(lex, parse_hex(c, 8)); break;
        default: fail("invalid escape in literal");
      }
      continue;
    }
    lex.push_back(ch);
    ++c.p;
  }
  std::string lang, datatype;
  if (!c.eof() && *c.p == '@') {
    ++c.p;
    while (!c.eof() && (std::isalnum(static_cast<unsigned char>(*c.p)) || *c.p == '-'))
      lang.push_back(*c.p++);
    if (lang.empty() || !std::isalpha(static_cast<unsigned char>(lang[0])))
      fail("malformed language tag");
  } else if (!c.eof() && *c.p == '^') {
    ++c.p;
    if (c.eof() || *c.p != '^') fail("malformed datatype marker (expected ^^)");
    ++c.p;
    if (c.eof() || *c.p != '<') fail("datatype must be an IRI");
    datatype = parse_iri(c);
  }
  return Term::literal(std::move(lex), std::move(lang), std::move(datatype));
}

void append_escaped_iri(std::string& out, const std::string& iri) {
  static const char* hex = "0123456789ABCDEF";
  for (char ch : iri) {
    unsigned char u = static_cast<unsigned char>(ch);
    if (u <= 0x20 || ch == '<' || ch == '>' || ch == '"' || ch == '{' ||
        ch == '}' || ch == '|' || ch == '^' || ch == '`' || ch == '\\') {
      out += "\\u00";
      out.push_back(hex[u >> 4]);
      out.push_back(hex[u & 0xF]);
    } else {
      out.push_back(ch);
    }
  }
}

void append_escaped_literal(std::string& out, const std::string& lex) {
  static const char* hex = "0123456789ABCDEF";
  for (char ch : lex) {
    switch (ch) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default: {
        unsigned char u = static_cast<unsigned char>(ch);
        if (u < 0x20) {
          out += "\\u00";
          out.push_back(hex[u >> 4]);
          out.push_back(hex[u & 0xF]);
        } else {
          out.push_back(ch);
        }
      }
    }
  }
}

void append_term(std::string& out, const Term& t) {
  switch (t.kind) {
    case TermKind::Iri:
      out.push_back('<');
      append_escaped_iri(out, t.value);
      out.push_back('>');
      break;
    case TermKind::Blank:
      out += "_:";
      out += t.value;
      break;
    case TermKind::Literal:
      out.push_back('"');
      append_escaped_literal(out, t.value);
      out.push_back('"');
      if (!t.lang.empty()) {
        out.push_back('@');
        out += t.lang;
      } else if (!t.datatype.empty()) {
        out += "^^<";
        append_escaped_iri(out, t.datatype);
        out.push_back('>');
      }
      break;
  }
}

}  // namespace

bool parse_ntriples_line(std::string_view line, Triple& out) {
  Cursor c{line.data(), line.data() + line.size()};
  skip_ws(c);
  if (c.eof() || *c.p == '#') return false;

  if (*c.p == '<') {
    out.subject = Term::iri(parse_iri(c));
  } else if (*c.p == '_' && c.end - c.p >= 2 && c.p[1] == ':') {
    out.subject = Term::blank(parse_blank(c));
  } else if (*c.p == '"') {
    fail("literal subject is not allowed");
  } else {
    fail("expected IRI or blank node subject");
  }
  require_ws(c);

  if (c.eof()) fail("missing predicate");
  if (*c.p != '<') fail("predicate must be an IRI");
  out.predicate = parse_iri(c);
  require_ws(c);

  if (c.eof() || *c.p == '.') fail("missing object");
  if (*c.p == '<') {
    out.object = Term::iri(parse_iri(c));
  } else if (*c.p == '_' && c.end - c.p >= 2 && c.p[1] == ':') {
    out.object = Term::blank(parse_blank(c));
  } else if (*c.p == '"') {
    out.object = parse_literal(c);
  } else {
    fail("expected IRI, blank node, or literal object");
  }

  skip_ws(c);
  if (c.eof() || *c.p != '.') fail("missing terminating '.'");
  ++c.p;
  skip_ws(c);
  if (!c.eof() && *c.p != '#') fail("trailing characters after '.'");
  return true;
}

ParseStats parse_ntriples(LineSource& src, ParseMode mode,
                          const TripleHandler& sink) {
  ParseStats st;
  std::string line;
  Triple t;
  while (src.next(line)) {
    try {
      if (!parse_ntriples_line(line, t)) continue;
      ++st.lines;
      ++st.triples;
      sink(std::move(t));
      t = Triple{};
    } catch (const ParseError& e) {
      ++st.lines;
      if (mode == ParseMode::Strict) {
        throw ParseError(src.path() + ":" + std::to_string(src.line_number()) +
                             ": " + e.what(),
                         src.line_number());
      }
      ++st.skipped;
      if (st.issues.size() < ParseStats::kMaxIssues)
        st.issues.push_back({src.line_number(), e.what()});
    }
  }
  return st;
}

ParseStats parse_ntriples_file(const std::string& path, ParseMode mode,
                               const TripleHandler& sink) {
  LineSource src(path);
  return parse_ntriples(src, mode, sink);
}

std::string to_ntriples(const Triple& t) {
  std::string out;
  append_term(out, t.subject);
  out.push_back(' ');
  out.push_back('<');
  append_escaped_iri(out, t.predicate);
  out.push_back('>');
  out.push_back(' ');
  append_term(out, t.object);
  out += " .";
  return out;
}

}  // namespace kgrec
