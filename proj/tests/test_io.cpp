#include <sstream>

#include "doctest.h"
#include "tichain/io.hpp"

using namespace tichain;

TEST_CASE("parse rational") {
  CHECK(parse_rational("3") == 3);
  CHECK(parse_rational("-7/2") == Rational(-7, 2));
  CHECK(parse_rational("+4/6") == Rational(2, 3));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK(parse_rational("-1.5e-3") == Rational(-3, 2000));
  CHECK(parse_rational("2E2") == 200);
  CHECK(parse_rational(".5") == Rational(1, 2));
  CHECK(parse_rational("-0") == 0);
  for (const char* bad : {"", "-", "1/0", "abc", "1.2.3", "1e", "1/2/3", "1e1000000", "0x10", "1 "}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_rational(bad), std::invalid_argument);
  }
  CHECK(to_string(Rational(-49, 9)) == "-49/9");
  CHECK(to_string(Rational(4)) == "4");
}

TEST_CASE("inequality files") {
  std::istringstream in(
      "# two rows\n"
      "-2 -4 -2 2 2 2 1 0 0 1 -4\n"
      "\n"
      "-4 -6 -3 2 3 2 2 0 1 1 -6   # I_G\n"
      "1/2 0 0 0 0 0 0 0 0 0 -0.5\n");
  auto v = read_inequalities(in);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == table1_inequality(2));
  CHECK(v[1] == table1_inequality(4));
  CHECK(v[2].coeffs(kE0) == Rational(1, 2));
  CHECK(v[2].bound == Rational(-1, 2));
  CHECK(v[1].name == "line-4");

  std::istringstream round(format_inequality(table1_inequality(7)));
  CHECK(read_inequalities(round).at(0) == table1_inequality(7));

  std::istringstream short_line("1 2 3\n");
  CHECK_THROWS_WITH_AS(read_inequalities(short_line), doctest::Contains("line 1"), std::invalid_argument);
  std::istringstream bad_number("# header\n1 2 3 4 5 6 7 8 9 x 1\n");
  CHECK_THROWS_WITH_AS(read_inequalities(bad_number), doctest::Contains("line 2"), std::invalid_argument);
  std::istringstream zero("0 0 0 0 0 0 0 0 0 0 1\n");
  CHECK_THROWS_AS(read_inequalities(zero), std::invalid_argument);
  std::istringstream empty("# nothing\n\n");
  CHECK(read_inequalities(empty).empty());
}

TEST_CASE("distribution json") {
  auto p = distribution_from_json(nlohmann::json::parse(R"({"d": 2, "n": 2, "probs": [0, 0.5, 0.5, 0]})"));
  CHECK(p.d() == 2);
  CHECK(p[1] == 0.5);
  CHECK(distribution_from_json(to_json(p)).probs() == p.probs());
  for (const char* bad : {R"({"d": 2, "n": 2, "probs": [0, 0.5, 0.5, 0], "x": 1})", R"({"d": 2, "n": 2})",
                          R"({"d": 2, "n": 2, "probs": [0.5, 0.5]})", R"({"d": "2", "n": 2, "probs": [1, 0]})",
                          R"({"d": 2, "n": 1, "probs": [1.5, -0.5]})", R"([1, 2])",
                          R"({"d": 2, "n": 1, "probs": ["a", 1]})"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(distribution_from_json(nlohmann::json::parse(bad)), std::invalid_argument);
  }
}

TEST_CASE("json records") {
  auto j = to_json(table1_inequality(2));
  CHECK(j["bound"] == "-4");
  CHECK(j["coefficients"].size() == 10);
  CHECK(j["name"] == "I_T");
  auto loop = to_json(DominoLoop::from_symbols(2, {{0, 1}, {1, 0}}));
  CHECK(loop["length"] == 2);
  CHECK(loop["text"] == "[(0,1),(1,0)]");
  FacetCheck f{true, true, 9, 10};
  CHECK(to_json(f)["facet"] == true);
  WitnessReport r;
  CHECK(to_json(r)["ti_bound"].is_null());
  GroundResult g;
  g.ring_sizes = {6, 8};
  CHECK(to_json(g)["rings"].size() == 2);
}
