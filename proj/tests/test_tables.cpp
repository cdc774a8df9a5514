#include "kgrec/tables.hpp"

#include <doctest.h>

#include <string>
#include <vector>

#include "kgrec/error.hpp"

using namespace kgrec;

TEST_CASE("csv round-trips plain and awkward cells") {
  Table t;
  t.name = "demo";
  t.columns = {"kg", "note", "score"};
  t.rows = {
      {"en", "plain", "0.5"},
      {"de", "has, comma", "0.25"},
      {"fr", "says \"hi\"", "0.125"},
      {"it", "two\nlines", "1"},
      {"es", "", "0"},
  };
  Table back = parse_csv(to_csv(t), "demo");
  CHECK(back == t);
}

TEST_CASE("csv quoting is applied only where needed") {
  Table t;
  t.columns = {"a", "b"};
  t.rows = {{"x,y", "plain"}};
  std::string csv = to_csv(t);
  CHECK(csv == "a,b\n\"x,y\",plain\n");
}

TEST_CASE("quotes inside cells are doubled") {
  Table t;
  t.columns = {"c"};
  t.rows = {{"a\"b"}};
  CHECK(to_csv(t) == "c\n\"a\"\"b\"\n");
  CHECK(parse_csv("c\n\"a\"\"b\"\n", "t").rows[0][0] == "a\"b");
}

TEST_CASE("mismatched row width cannot be serialized") {
  Table t;
  t.columns = {"a", "b"};
  t.rows = {{"only-one"}};
  CHECK_THROWS_AS(to_csv(t), DomainError);
}

TEST_CASE("ragged and unterminated csv input is rejected") {
  CHECK_THROWS_AS(parse_csv("a,b\n1\n", "t"), ParseError);
  CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n", "t"), ParseError);
  CHECK_THROWS_AS(parse_csv("a\n\"open\n", "t"), ParseError);
}

TEST_CASE("csv without a trailing newline still parses") {
  Table t = parse_csv("a,b\n1,2", "t");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0] == std::vector<std::string>{"1", "2"});
}

TEST_CASE("carriage returns are tolerated on input") {
  Table t = parse_csv("a,b\r\n1,2\r\n", "t");
  CHECK(t.columns == std::vector<std::string>{"a", "b"});
  CHECK(t.rows[0] == std::vector<std::string>{"1", "2"});
}

TEST_CASE("row-max stars the larger numeric cell") {
  Table t;
  t.name = "eval";
  t.columns = {"metric", "de", "fr"};
  t.rows = {{"f1", "0.047", "0.044"}};
  StarRule rule{StarRule::RowMax, 1, 3};
  std::string text = render_text(t, rule);
  CHECK(text.find("0.047*") != std::string::npos);
  CHECK(text.find("0.044*") == std::string::npos);
  CHECK(text.find("eval\n") == 0);
  CHECK(text.find("metric") != std::string::npos);
  CHECK(text.find("---") != std::string::npos);
}

TEST_CASE("columns outside the competing range never star") {
  Table t;
  t.columns = {"label", "x", "y"};
  t.rows = {{"9.9", "1.0", "2.0"}};
  std::string text = render_text(t, {StarRule::RowMax, 1, 3});
  CHECK(text.find("9.9*") == std::string::npos);
  CHECK(text.find("2.0*") != std::string::npos);
}

TEST_CASE("column-max stars the best row per column") {
  Table t;
  t.columns = {"kg", "precision", "recall"};
  t.rows = {{"en", "0.3", "0.1"}, {"de", "0.2", "0.4"}};
  std::string text = render_text(t, {StarRule::ColMax, 1, 3});
  CHECK(text.find("0.3*") != std::string::npos);
  CHECK(text.find("0.4*") != std::string::npos);
  CHECK(text.find("0.2*") == std::string::npos);
  CHECK(text.find("0.1*") == std::string::npos);
}

TEST_CASE("non-numeric cells never win the star") {
  Table t;
  t.columns = {"kg", "a", "b"};
  t.rows = {{"en", "n/a", "0.1"}};
  std::string text = render_text(t, {StarRule::RowMax, 1, 3});
  CHECK(text.find("n/a*") == std::string::npos);
  CHECK(text.find("0.1*") != std::string::npos);

  Table none;
  none.columns = {"kg", "a"};
  none.rows = {{"en", "n/a"}};
  CHECK(render_text(none, {StarRule::RowMax, 1, 2}).find('*') ==
        std::string::npos);
}

TEST_CASE("no rule renders no stars") {
  Table t;
  t.columns = {"a", "b"};
  t.rows = {{"1", "2"}};
  CHECK(render_text(t, {}).find('*') == std::string::npos);
}

TEST_CASE("rendered columns stay aligned") {
  Table t;
  t.name = "align";
  t.columns = {"kg", "value"};
  t.rows = {{"longlabel", "1"}, {"x", "22"}};
  CHECK(render_text(t, {}) ==
        "align\n"
        "kg         value\n"
        "---------  -----\n"
        "longlabel  1\n"
        "x          22\n");
}
