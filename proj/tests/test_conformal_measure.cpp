#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "kmslab/conformal_measure.hpp"
#include "kmslab/critical_temperature.hpp"
#include "kmslab/errors.hpp"
#include "kmslab/numeric.hpp"
#include "kmslab/shift_space.hpp"

using namespace kmslab;

namespace {
const std::vector<double> kBetas{1.0, 1.42, 2.0, 4.0};
}

TEST_CASE("base level masses") {
  for (const double beta : kBetas) {
    const CylinderTable t = conformal_table(beta, 1);
    CHECK(t.mass(parse_word("0")) == std::exp(-beta));
    CHECK(t.mass(parse_word("1")) == doctest::Approx(1.0 - std::exp(-beta)).epsilon(1e-15));
  }
}

TEST_CASE("head-run cylinder masses follow the harmonic weights") {
  for (const double beta : kBetas) {
    const CylinderTable t = conformal_table(beta, 3);
    CHECK(t.mass(parse_word("10")) ==
          doctest::Approx(std::exp(-beta * 1.5)).epsilon(1e-14));
    CHECK(t.mass(parse_word("110")) ==
          doctest::Approx(std::exp(-beta * harmonic(3))).epsilon(1e-14));
  }
}

TEST_CASE("table invariants: normalization, additivity, conformality, residual identity") {
  for (const double beta : kBetas) {
    const CylinderTable t = conformal_table(beta, 10);

    for (std::size_t m = 1; m <= t.depth(); ++m) {
      KahanSum total;
      for (const double x : t.level(m)) total.add(x);
      CHECK(std::abs(total.value() - 1.0) <= 1e-12);
    }

    CHECK(t.max_additivity_defect() <= 1e-12);

    // conformality: prepend-0 and prepend-1 relations between levels
    for (std::size_t m = 1; m < t.depth(); ++m) {
      for (const Word& w : all_words(m)) {
        const double mw = t.mass(w);
        const Word zero_w = concat(parse_word("0"), w);
        CHECK(std::abs(t.mass(zero_w) - std::exp(-beta) * mw) <=
              1e-12 * std::max(1.0, std::abs(mw)));
        const std::size_t j = w.first_zero();
        if (j != 0) {
          const Word one_w = concat(parse_word("1"), w);
          CHECK(std::abs(t.mass(one_w) -
                         std::exp(-beta / static_cast<double>(j + 1)) * mw) <=
                1e-12 * std::max(1.0, std::abs(mw)));
        }
      }
    }

    // residual identity R_n = 1 - sum_{k<=n} exp(-beta*s_k)
    KahanSum ladder;
    for (std::size_t n = 1; n <= t.depth(); ++n) {
      ladder.add(std::exp(-beta * harmonic(n)));
      CHECK(std::abs(t.residual_trace()[n - 1] - (1.0 - ladder.value())) <= 1e-12);
    }

    // residuals only ever decrease (each step subtracts a nonnegative mass)
    for (std::size_t n = 1; n < t.depth(); ++n) {
      CHECK(t.residual_trace()[n] <= t.residual_trace()[n - 1] + 1e-15);
    }
  }
}

TEST_CASE("closed form equals the recursion on terminal-0 words") {
  for (const double beta : kBetas) {
    const CylinderTable t = conformal_table(beta, 10);
    for (std::size_t n = 1; n <= 10; ++n) {
      for (const Word& u : all_words(n)) {
        if (u.last() != 0) continue;
        const double a = t.mass(u);
        const double b = cylinder_mass_closed_form(beta, u);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)));
      }
    }
  }
}

TEST_CASE("closed form: worked values and rejections") {
  const double beta = 1.3;
  CHECK(cylinder_mass_closed_form(beta, parse_word("0")) == std::exp(-beta));
  CHECK(cylinder_mass_closed_form(beta, parse_word("1110")) ==
        doctest::Approx(std::exp(-beta * 25.0 / 12.0)).epsilon(1e-14));
  CHECK(cylinder_mass_closed_form(beta, parse_word("010")) ==
        doctest::Approx(std::exp(-beta * 2.5)).epsilon(1e-14));
  CHECK_THROWS_AS(cylinder_mass_closed_form(beta, parse_word("")), std::invalid_argument);
  CHECK_THROWS_AS(cylinder_mass_closed_form(beta, parse_word("01")), std::invalid_argument);
}

TEST_CASE("depth cap") {
  CHECK_THROWS_AS(conformal_table(2.0, 17), ResourceLimit);
  CHECK_THROWS_AS(conformal_table(2.0, 0), ResourceLimit);
}

TEST_CASE("nonexistence detector at beta = 1") {
  // Oracle: first depth where the ladder partial sum crosses 1.
  KahanSum p;
  std::size_t expected = 0;
  for (std::size_t n = 1; n <= 100; ++n) {
    p.add(std::exp(-harmonic(n)));
    if (1.0 - p.value() < -1e-12) {
      expected = n;
      break;
    }
  }
  REQUIRE(expected > 0);
  const NonexistenceReport rep = detect_nonexistence(1.0, 1'000'000);
  REQUIRE(rep.first_negative_depth.has_value());
  CHECK(*rep.first_negative_depth == expected);

  // the depth-10 table shows the same sign flip in its residual trace
  const CylinderTable t = conformal_table(1.0, 10);
  CHECK(t.residual_trace()[*rep.first_negative_depth - 1] < -1e-12);
  CHECK(t.residual_trace()[*rep.first_negative_depth - 2] >= -1e-12);
}

TEST_CASE("nonexistence detector stays quiet above the critical point") {
  const CriticalBeta b0 = solve_beta0(1e-8);
  const NonexistenceReport rep = detect_nonexistence(b0.midpoint + 0.1, 1'000'000);
  CHECK(!rep.first_negative_depth.has_value());
}

TEST_CASE("nonexistence detector handles extreme beta") {
  const NonexistenceReport rep = detect_nonexistence(1e6, 10);
  CHECK(!rep.first_negative_depth.has_value());
  CHECK_THROWS_AS(detect_nonexistence(1.0, 0), std::invalid_argument);
}

TEST_CASE("CSV round trip") {
  const CylinderTable t = conformal_table(1.7, 5);
  std::ostringstream os;
  write_csv(t, os);
  std::istringstream is(os.str());
  const CsvCylinderRows rows = read_csv(is);
  REQUIRE(rows.rows.size() == (std::size_t{1} << 5));
  CHECK(rows.residual == t.residual_trace().back());
  for (const auto& [word, mass] : rows.rows) {
    CHECK(mass == t.mass(parse_word(word)));
  }
}

TEST_CASE("JSON export carries the full field set") {
  const CylinderTable t = conformal_table(2.0, 3);
  const std::string j = to_json(t);
  CHECK(j.find("\"beta\"") != std::string::npos);
  CHECK(j.find("\"masses\"") != std::string::npos);
  CHECK(j.find("\"residual_trace\"") != std::string::npos);
  CHECK(j.find("\"110\"") != std::string::npos);
}
