#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qst/error.hpp"
#include "qst/parametrix.hpp"
#include "qst/solutions.hpp"

using namespace qst;

namespace {

// tau from the brute-force limit product: K(0) = L^{-1} K(inf) paired with I(0).
long double oracle_tau(const Families& f, int m, int n) {
  const oracle::LMat L = oracle::limit_product(f, m, n);
  const long double det = L[0] * L[3] - L[1] * L[2];
  const long double sg = m > 0 ? 1 : (m < 0 ? -1 : 0);
  const long double kx = sg / (1.0L + (long double)m * m), ky = 1;
  const long double K1 = (L[3] * kx - L[1] * ky) / det, K2 = (-L[2] * kx + L[0] * ky) / det;
  return K1 * m / f.w(n, 0) + K2;
}

}  // namespace

TEST_CASE("default boundary values") {
  CHECK(choose_K_infinity({2, 0}).k_inf.x == doctest::Approx(0.2));
  CHECK(choose_K_infinity({2, 5}).k_inf.y == 1.0);
  CHECK(choose_K_infinity({-2, 0}).k_inf.x == doctest::Approx(-0.2));
  CHECK(choose_K_infinity({0, 3}).k_inf.x == 0.0);
  CHECK(choose_K_infinity({0, 3}).k_inf.y == 1.0);
  const auto checks = validate_boundary_rule({}, {0, 1, -1, 2, 8, -32});
  for (const auto& c : checks) CHECK(c.passed);
}

TEST_CASE("custom boundary rules are checked against the sign conditions") {
  BoundaryRule r;
  r.kind = BoundaryRule::Kind::Custom;
  r.custom[1] = {-0.5, 1.0};
  try {
    choose_K_infinity({1, 0}, r);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BoundaryRule);
    CHECK(std::string(e.what()).find("condition") != std::string::npos);
  }
  CHECK_THROWS_AS(choose_K_infinity({2, 0}, r), Error);  // no entry
  r.custom[1] = {0.5, 1.0};
  r.custom[2] = {0.9, 1.0};
  CHECK(choose_K_infinity({1, 0}, r).k_inf.x == 0.5);
  const auto checks = validate_boundary_rule(r, {1, 2});
  CHECK(checks[0].passed);
  CHECK_FALSE(checks[1].passed);
}

TEST_CASE("I from the forward recursion") {
  const Families f;
  const auto I = compute_I({1, 0}, f, 4);
  CHECK(I[0].x == -1.0);
  CHECK(I[0].y == 1.0);
  CHECK(I[1].x == doctest::Approx(-3.0).epsilon(1e-15));
  CHECK(I[1].y == doctest::Approx(1.25).epsilon(1e-15));
  // m = 0: I1(k) = -1/prod c1, I2 = 0
  const auto I0 = compute_I({0, 2}, f, 20);
  long double p = 1;
  for (int k = 0; k <= 20; ++k) {
    CHECK(I0[k].y == 0.0);
    CHECK(I0[k].x == doctest::Approx((double)(-1 / p)).epsilon(1e-14));
    p *= f.c.c1(2, k);
  }
}

TEST_CASE("K for m = 0 and unit coefficients") {
  const Families u{WeightFamily::power(1, 1, 2), CoefficientFamily::unit()};
  const KernelSolution s = solve_kernel({0, 1}, u, 32);
  for (const Vec2& k : s.K) {
    CHECK(k.x == 0.0);
    CHECK(k.y == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(s.tau == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("tau") {
  const Families f;
  SUBCASE("m = 0 pairs to K2(0) = 1/J2") {
    const KernelSolution s = solve_kernel({0, 0}, f, 64);
    CHECK(s.tau == doctest::Approx(s.K[0].y).epsilon(1e-15));
    CHECK(s.tau == doctest::Approx(1 / (double)oracle::q_pochhammer(0.5L)).epsilon(1e-11));
    CHECK(s.tau == doctest::Approx(3.462746619).epsilon(1e-9));
  }
  SUBCASE("against the brute-force limit") {
    for (auto [m, n] : {std::pair{1, 0}, {-3, 1}, {8, 2}}) {
      const KernelSolution s = solve_kernel({m, n}, f, 64);
      CHECK(s.tau == doctest::Approx((double)oracle_tau(f, m, n)).epsilon(1e-8));
      CHECK(s.tau > 0);
    }
  }
  SUBCASE("frozen values") {
    CHECK(solve_kernel({1, 0}, f, 128).tau == doctest::Approx(7.134636772).epsilon(1e-9));
    CHECK(solve_kernel({32, 0}, f, 128).tau == doctest::Approx(155887231.8).epsilon(1e-9));
  }
  SUBCASE("independent of the truncation") {
    const double a = solve_kernel({4, 1}, f, 16).tau, b = solve_kernel({4, 1}, f, 256).tau;
    CHECK(a == doctest::Approx(b).epsilon(1e-11));
  }
}

TEST_CASE("K solutions are positive and K2 decreases") {
  const Families f;
  for (int m : {1, 5, 32}) {
    const KernelSolution s = solve_kernel({m, 0}, f, 128);
    for (std::size_t k = 0; k < s.K.size(); ++k) {
      CHECK(s.K[k].x > 0);
      CHECK(s.K[k].y > 0);
      if (k > 0) CHECK(s.K[k].y < s.K[k - 1].y);
    }
  }
}

TEST_CASE("Wronskian identity") {
  const Families f;
  for (int m : {-7, -1, 0, 1, 3, 16}) {
    const KernelSolution s = solve_kernel({m, 1}, f, 128);
    // direct pairing K1 I2 - K2 I1 against tau prod c2/c1
    long double ratio = 1;
    for (int k = 0; k <= 5; ++k) {
      const double direct = s.K[k].x * s.I[k].y - s.K[k].y * s.I[k].x;
      CHECK(direct == doctest::Approx((double)(s.tau * ratio)).epsilon(1e-12));
      ratio *= (long double)f.c.c2(1, k) / f.c.c1(1, k);
    }
    for (double r : wronskian_residuals(s)) CHECK(r <= 1e-12);
  }
}

TEST_CASE("epsilon") {
  const Families f;
  for (auto [m, n] : {std::pair{1, 0}, {2, 3}, {-5, 1}}) {
    const SeriesValue e = epsilon({m, n}, f);
    CHECK(e.value == doctest::Approx((double)oracle::epsilon_power(f, m, n)).epsilon(1e-9));
    CHECK(e.value < eval_s(f.w, n).value);
  }
  CHECK(epsilon({1, 0}, f).value == doctest::Approx(1.303170422).epsilon(1e-9));
  for (int n : {0, 4}) CHECK(epsilon({0, n}, f).value == eval_s(f.w, n).value);
  CHECK(epsilon({32, 0}, f).value < epsilon({1, 0}, f).value);
  CHECK(epsilon({-3, 2}, f).value == epsilon({3, 2}, f).value);
}

TEST_CASE("lemma suite holds on a grid") {
  const Families f;
  for (int m = -8; m <= 8; ++m) {
    if (m == 0) continue;
    for (int n = 0; n <= 4; ++n) {
      const KernelSolution s = solve_kernel({m, n}, f, 128);
      const LemmaReport r = verify_lemma_suite(s, f);
      CHECK_MESSAGE(r.total_violations() == 0, "mode " << m << "," << n);
      CHECK(r.clauses.size() >= 16);
    }
  }
}

TEST_CASE("apply_A annihilates I and maps K to the regularity datum") {
  const Families f;
  for (int m : {-2, 0, 3}) {
    const KernelSolution s = solve_kernel({m, 1}, f, 24);
    // rounding scale of A(k+1) [h(k+1) - C(k) h(k)]
    auto scale = [&](std::size_t k, const std::vector<Vec2>& v) {
      const double a = f.w(2, k) + f.w(1, k + 1) + std::abs(m);
      return 1e-14 * a * (norm2(v[k]) + norm2(v[k + 1])) * 4;
    };
    std::vector<double> g, h;
    for (const Vec2& v : s.I) g.push_back(v.x), h.push_back(v.y);
    const RhsPair rI = apply_A(s.mode, f, make_pair(s.mode, g, h));
    CHECK(rI.q0 == doctest::Approx(0.0));
    for (std::size_t k = 0; k < rI.r1.values.size(); ++k) {
      const double sc = scale(k, s.I);
      CHECK(std::abs(rI.r1.values[k]) <= sc);
      CHECK(std::abs(rI.r2.values[k]) <= sc);
    }
    g.clear(), h.clear();
    for (const Vec2& v : s.K) g.push_back(v.x), h.push_back(v.y);
    const RhsPair rK = apply_A(s.mode, f, make_pair(s.mode, g, h));
    CHECK(rK.q0 == doctest::Approx(f.w(1, 0) * s.K[0].y + m * s.K[0].x).epsilon(1e-15));
    CHECK(rK.q0 != 0.0);
    for (std::size_t k = 0; k < rK.r1.values.size(); ++k) {
      const double sc = scale(k, s.K);
      CHECK(std::abs(rK.r1.values[k]) <= sc);
      CHECK(std::abs(rK.r2.values[k]) <= sc);
    }
  }
}
