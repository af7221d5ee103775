#include <cmath>
#include <cstring>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "qst/error.hpp"
#include "qst/weights.hpp"

using namespace qst;

namespace {

const HypothesisCheck& find(const ValidationReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  FAIL("no check named " << name);
  return r.checks.front();
}

}  // namespace

TEST_CASE("power weights evaluate the closed form") {
  const WeightFamily w = WeightFamily::power(1.0, 1.0, 2.0);
  CHECK(w(0, 0) == 1.0);
  CHECK(w(1, 0) == 2.0);
  CHECK(w(0, 1) == 4.0);
  CHECK(w(3, 4) == doctest::Approx(4.0 * 25.0));
  const WeightFamily v = WeightFamily::power(0.5, 1.5, 2.5);
  CHECK(v(2, 3) == doctest::Approx(0.5 * std::pow(3.0, 1.5) * std::pow(4.0, 2.5)).epsilon(1e-15));
}

TEST_CASE("s(0) matches the Basel sum") {
  const WeightFamily w = WeightFamily::power(1.0, 1.0, 2.0);
  const SeriesValue s0 = eval_s(w, 0);
  const long double direct = oracle::basel();
  CHECK(std::abs(s0.value - static_cast<double>(direct)) <= 1e-15);
  CHECK(std::abs(s0.value - std::numbers::pi * std::numbers::pi / 6) <= 1e-15);
  CHECK(s0.tail_bound <= 1e-12);
}

TEST_CASE("s(n) scales as (n+1)^-p") {
  const WeightFamily w = WeightFamily::power(1.0, 1.0, 2.0);
  CHECK(eval_s(w, 9).value == doctest::Approx(eval_s(w, 0).value / 10).epsilon(1e-15));
  for (double p : {1.0, 1.5, 3.0}) {
    const WeightFamily v = WeightFamily::power(2.0, p, 3.0);
    for (int n = 0; n < 12; ++n) {
      const double ratio = eval_s(v, n + 1).value / eval_s(v, n).value;
      CHECK(ratio == doctest::Approx(std::pow((n + 1.0) / (n + 2.0), p)).epsilon(1e-14));
    }
  }
}

TEST_CASE("s(n) rejects a harmonic tail") {
  const WeightFamily w = WeightFamily::power(1.0, 1.0, 1.0);
  try {
    eval_s(w, 0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HypothesisViolation);
    CHECK(std::string(e.what()).find("divergent") != std::string::npos);
  }
  const WeightFamily t = WeightFamily::tabulated({{1.0, 2.0, 3.0}}, PowerLaw{1.0, 1.0, 0.5});
  CHECK_THROWS_AS(eval_s(t, 0), Error);
}

TEST_CASE("tabulated weights override the tail law") {
  const WeightFamily t = WeightFamily::tabulated({{5.0, 6.0}, {7.0}}, PowerLaw{1.0, 1.0, 2.0});
  CHECK(t(0, 0) == 5.0);
  CHECK(t(0, 1) == 6.0);
  CHECK(t(0, 2) == 9.0);
  CHECK(t(1, 0) == 7.0);
  CHECK(t(1, 1) == 8.0);
  CHECK(t(2, 0) == 3.0);
  // head differs from the power law by 1/5 + 1/6 - 1 - 1/4
  const double expect = std::numbers::pi * std::numbers::pi / 6 + 0.2 + 1.0 / 6 - 1.0 - 0.25;
  CHECK(eval_s(t, 0).value == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("J for the geometric gap t = 1/2") {
  const CoefficientFamily c = CoefficientFamily::geometric_gap(0.5, 0.5, 2.0);
  const long double direct = oracle::q_pochhammer(0.5L);
  for (int i : {1, 2}) {
    const SeriesValue J = eval_J(c, i, 0);
    CHECK(std::abs(J.value - static_cast<double>(direct)) <= 1e-12);
    CHECK(J.value == doctest::Approx(0.2887880951).epsilon(1e-10));
    // the bracket [value - tail_bound, value] holds every longer truncation
    long double longer = 1;
    long double tk = 0.5L;
    for (std::int64_t k = 0; k <= J.truncation_index + 40; ++k, tk *= 0.5L) longer *= 1 - tk;
    CHECK(static_cast<double>(longer) <= J.value * (1 + 1e-15));
    CHECK(static_cast<double>(longer) >= (J.value - J.tail_bound) * (1 - 1e-15));
  }
  const CoefficientFamily u = CoefficientFamily::unit();
  CHECK(eval_J(u, 1, 3).value == 1.0);
  CHECK(eval_J(u, 2, 0).value == 1.0);
}

TEST_CASE("coefficient values") {
  const CoefficientFamily c = CoefficientFamily::geometric_gap(0.5, 0.25, 2.0);
  CHECK(c.c1(0, 0) == 0.5);
  CHECK(c.c2(0, 0) == 0.75);
  CHECK(c.c1(4, 2) == 1 - 0.125);
  CHECK(c.c2(0, 200) == 1.0);
  const CoefficientFamily t =
      CoefficientFamily::tabulated({{0.6}}, {{0.9, 0.8}}, GapLaw{0.5, 0.5}, 2.0);
  CHECK(t.c1(0, 0) == 0.6);
  CHECK(t.c1(0, 1) == 0.75);
  CHECK(t.c2(0, 1) == 0.8);
  CHECK(t.c2(1, 0) == 0.5);
}

TEST_CASE("tail helpers bound the omitted parts") {
  const Families f;
  for (int n : {0, 3}) {
    for (std::int64_t K : {4, 64, 500}) {
      long double tail = 0;
      for (std::int64_t k = 400000; k > K; --k) tail += 1.0L / f.w(n, k);
      CHECK(weight_tail_sum(f.w, n, K) >= static_cast<double>(tail));
      long double prod = 1;
      for (std::int64_t k = K; k < K + 200; ++k) prod *= f.c.c1(n, k);
      CHECK(coefficient_tail_product(f.c, 1, n, K) <= static_cast<double>(prod));
    }
  }
}

TEST_CASE("validate_hypotheses") {
  SUBCASE("defaults pass") {
    const Families f;
    const ValidationReport r = validate_hypotheses(f.w, f.c);
    CHECK(r.all_passed());
  }
  SUBCASE("q = 1 is flagged") {
    const ValidationReport r =
        validate_hypotheses(WeightFamily::power(1, 1, 1), CoefficientFamily::geometric_gap(0.5, 0.5, 2));
    CHECK_FALSE(r.all_passed());
    const HypothesisCheck& c = find(r, "weights.s_finite");
    CHECK_FALSE(c.passed);
    CHECK(c.witness.find("divergent") != std::string::npos);
  }
  SUBCASE("kappa = 1 with t = 1/2 fails the bracket") {
    const ValidationReport r =
        validate_hypotheses(WeightFamily::power(1, 1, 2), CoefficientFamily::geometric_gap(0.5, 0.5, 1));
    CHECK_FALSE(find(r, "coeffs.kappa_bracket").passed);
  }
  SUBCASE("p = 0 weights do not decay in n") {
    const ValidationReport r =
        validate_hypotheses(WeightFamily::power(1, 0, 2), CoefficientFamily::unit());
    CHECK_FALSE(find(r, "weights.s_decreasing_to_zero").passed);
  }
}

TEST_CASE("evaluations are deterministic") {
  const Families f;
  const double a = eval_s(f.w, 5).value, b = eval_s(f.w, 5).value;
  CHECK(std::memcmp(&a, &b, sizeof a) == 0);
  const double j1 = eval_J(f.c, 1, 2).value, j2 = eval_J(f.c, 1, 2).value;
  CHECK(std::memcmp(&j1, &j2, sizeof j1) == 0);
}
