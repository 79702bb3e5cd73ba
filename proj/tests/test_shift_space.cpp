#include "doctest.h"

#include <algorithm>
#include <set>
#include <string>

#include "kmslab/critical_temperature.hpp"
#include "kmslab/errors.hpp"
#include "kmslab/shift_space.hpp"

using namespace kmslab;

TEST_CASE("parse_word transcribes binary strings") {
  CHECK(parse_word("").length() == 0);
  const Word w = parse_word("110");
  CHECK(w.length() == 3);
  CHECK(w.at(1) == 1);
  CHECK(w.at(2) == 1);
  CHECK(w.at(3) == 0);
  CHECK(w.str() == "110");
}

TEST_CASE("parse_word rejects foreign symbols with a position") {
  CHECK_THROWS_WITH_AS(parse_word("2"), "invalid symbol at position 1",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_word("10x1"), "invalid symbol at position 3",
                       std::invalid_argument);
}

TEST_CASE("tail points demand canonical stems") {
  CHECK_NOTHROW(TailPoint{parse_word("10")});
  CHECK_NOTHROW(TailPoint{});
  CHECK_THROWS_AS(TailPoint{parse_word("11")}, std::invalid_argument);
}

TEST_CASE("shift drops the head and fixes the fixed point") {
  CHECK(shift(TailPoint{}) == TailPoint{});
  CHECK(shift(TailPoint{parse_word("10")}) == TailPoint{parse_word("0")});
  CHECK(shift(TailPoint{parse_word("0")}) == TailPoint{});
}

TEST_CASE("shift lowers the level by one and stays canonical") {
  for (std::size_t n = 0; n <= 9; ++n) {
    for (const TailPoint& y : enumerate_level_set(n)) {
      const TailPoint s = shift(y);
      CHECK(s.level() == (n == 0 ? 0 : n - 1));
      CHECK((s.stem().empty() || s.stem().last() == 0));
    }
  }
}

TEST_CASE("potential values") {
  CHECK(potential(TailPoint{}) == 0.0);
  CHECK(potential(TailPoint{parse_word("0")}) == 1.0);
  CHECK(potential(TailPoint{parse_word("110")}) == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
}

TEST_CASE("potential range and vanishing") {
  for (std::size_t n = 0; n <= 10; ++n) {
    for (const TailPoint& y : enumerate_level_set(n)) {
      const double f = potential(y);
      if (n == 0) {
        CHECK(f == 0.0);
      } else {
        bool in_range = false;
        for (std::size_t i = 1; i <= n; ++i) {
          if (f == 1.0 / static_cast<double>(i)) in_range = true;
        }
        CHECK(in_range);
        CHECK(f > 0.0);
      }
    }
  }
}

TEST_CASE("potential_on_cylinder") {
  CHECK(potential_on_cylinder(parse_word("01")) == 1.0);
  CHECK(potential_on_cylinder(parse_word("10")) == 0.5);
  CHECK_THROWS_AS(potential_on_cylinder(parse_word("111")), std::invalid_argument);
}

TEST_CASE("birkhoff sums: worked values") {
  CHECK(birkhoff_sum(TailPoint{}, 5) == 0.0);
  CHECK(birkhoff_sum(TailPoint{parse_word("10")}, 2) == doctest::Approx(1.5).epsilon(1e-16));
  CHECK(birkhoff_sum(TailPoint{parse_word("1110")}, 4) ==
        doctest::Approx(25.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("birkhoff sums are stable beyond the level") {
  for (std::size_t n = 1; n <= 8; ++n) {
    for (const TailPoint& y : enumerate_level_set(n)) {
      CHECK(birkhoff_sum(y, n) == birkhoff_sum(y, n + 7));
    }
  }
}

TEST_CASE("birkhoff sum of a head run equals the harmonic number") {
  for (std::size_t k = 1; k <= 30; ++k) {
    const TailPoint y{parse_word(std::string(k - 1, '1') + "0")};
    CHECK(birkhoff_sum(y, k) ==
          doctest::Approx(harmonic(k)).epsilon(1e-15));
  }
}

TEST_CASE("level sets: base cases and counts") {
  const auto y0 = enumerate_level_set(0);
  REQUIRE(y0.size() == 1);
  CHECK(y0[0] == TailPoint{});

  const auto y2 = enumerate_level_set(2);
  REQUIRE(y2.size() == 2);
  CHECK(y2[0].stem().str() == "00");
  CHECK(y2[1].stem().str() == "10");

  CHECK(enumerate_level_set(5).size() == 16);
}

TEST_CASE("level sets agree with brute force over all words") {
  // Oracle: canonicalize every w.1^inf of word length n and keep level == n.
  for (std::size_t n = 1; n <= 12; ++n) {
    std::set<std::string> expected;
    for (const Word& w : all_words(n)) {
      std::string s = w.str();
      while (!s.empty() && s.back() == '1') s.pop_back();
      if (s.size() == n) expected.insert(s);
    }
    const auto got = enumerate_level_set(n);
    CHECK(got.size() == expected.size());
    CHECK(got.size() == (std::size_t{1} << (n - 1)));
    for (const TailPoint& y : got) CHECK(expected.count(y.stem().str()) == 1);
    CHECK(std::is_sorted(got.begin(), got.end(),
                         [](const TailPoint& a, const TailPoint& b) {
                           return a.stem().str() < b.stem().str();
                         }));
  }
}

TEST_CASE("level sets split along the head run") {
  // Y_n is the disjoint union of 1^{j-1}0 . Y_{n-j}, j = 1..n.
  for (std::size_t n = 1; n <= 12; ++n) {
    std::set<std::string> assembled;
    for (std::size_t j = 1; j <= n; ++j) {
      const std::string prefix = std::string(j - 1, '1') + "0";
      for (const TailPoint& y : enumerate_level_set(n - j)) {
        const auto [it, fresh] = assembled.insert(prefix + y.stem().str());
        CHECK(fresh);  // disjointness
      }
    }
    std::set<std::string> direct;
    for (const TailPoint& y : enumerate_level_set(n)) direct.insert(y.stem().str());
    CHECK(assembled == direct);
  }
}

TEST_CASE("level set cap") {
  CHECK_THROWS_AS(enumerate_level_set(27), ResourceLimit);
  CHECK_THROWS_AS(enumerate_level_set(7, 6), ResourceLimit);
}

TEST_CASE("cylinder membership") {
  const Word empty = parse_word("");
  const Word one = parse_word("1");
  const Word u110 = parse_word("110");
  CHECK(in_cylinder(TailPoint{}, empty));
  CHECK(in_cylinder(TailPoint{}, one));
  CHECK(in_cylinder(TailPoint{}, parse_word("1111")));
  CHECK(!in_cylinder(TailPoint{}, parse_word("10")));
  CHECK(in_cylinder(TailPoint{parse_word("110")}, u110));
  CHECK(in_cylinder(TailPoint{parse_word("110")}, parse_word("1")));
  CHECK(!in_cylinder(TailPoint{parse_word("0")}, one));
  // stem shorter than the word: the padding must match
  CHECK(in_cylinder(TailPoint{parse_word("10")}, parse_word("1011")));
  CHECK(!in_cylinder(TailPoint{parse_word("10")}, parse_word("1010")));
}
