#include <random>

#include "doctest.h"
#include "spacinglab/contfrac.hpp"
#include "spacinglab/numtheory.hpp"

using namespace spacinglab;
using namespace spacinglab::contfrac;

namespace {

AlphaSpec sqrt2() { return AlphaSpec::parse("pcf:[1|2]"); }

// 50-digit enclosure of sqrt(2): S/10^50 <= sqrt(2) < (S+1)/10^50.
std::pair<Rational, Rational> sqrt2_enclosure() {
  Integer pow10_100;
  mpz_ui_pow_ui(pow10_100.get_mpz_t(), 10, 100);
  Integer s = numtheory::isqrt(2 * pow10_100);
  Integer pow10_50;
  mpz_ui_pow_ui(pow10_50.get_mpz_t(), 10, 50);
  return {make_rational(s, pow10_50), make_rational(s + 1, pow10_50)};
}

}  // namespace

TEST_SUITE_BEGIN("contfrac");

TEST_CASE("sqrt2 expansion matches the bottom-up oracle") {
  ContinuedFraction cf = expand(sqrt2(), 4);
  REQUIRE(cf.depth() == 5);
  const long want_p[] = {1, 3, 7, 17, 41};
  const long want_q[] = {1, 2, 5, 12, 29};
  for (size_t m = 0; m < 5; ++m) {
    CHECK(cf.convergents[m].p == want_p[m]);
    CHECK(cf.convergents[m].q == want_q[m]);
    // independent oracle: evaluate the truncated quotient list exactly
    Rational direct = evaluate_finite_cf(std::span(cf.quotients.data(), m + 1));
    CHECK(direct == cf.convergents[m].value());
  }
}

TEST_CASE("rational alpha terminates at its exact expansion") {
  ContinuedFraction cf = expand(AlphaSpec::rational(Rational(7, 3)), 10);
  REQUIRE(cf.exact_terminated);
  REQUIRE(cf.depth() == 2);
  CHECK(cf.quotients[0] == 2);
  CHECK(cf.quotients[1] == 3);
  CHECK(cf.convergents[0].p == 2);
  CHECK(cf.convergents[0].q == 1);
  CHECK(cf.convergents[1].value() == Rational(7, 3));
}

TEST_CASE("explicit cf [1;1,3,6] has q_3 = 25") {
  ContinuedFraction cf = expand(AlphaSpec::parse("cf:[1;1,3,6]"), 10);
  REQUIRE(cf.depth() == 4);
  CHECK(cf.convergents[3].q == 25);
}

TEST_CASE("error bounds") {
  SUBCASE("sqrt2 at m=1: (1/20, 1/10) brackets the true error") {
    ContinuedFraction cf = expand(sqrt2(), 3);
    auto [lo, hi] = approx_error_bounds(cf, 1);
    CHECK(lo == Rational(1, 20));
    CHECK(hi == Rational(1, 10));
    auto [slo, shi] = sqrt2_enclosure();
    // |sqrt2 - 3/2| = 3/2 - sqrt2, bracketed with 10^-50 slack
    Rational err_lo = Rational(3, 2) - shi;
    Rational err_hi = Rational(3, 2) - slo;
    CHECK(err_lo > lo);
    CHECK(err_hi < hi);
  }
  SUBCASE("q_0=1, q_1=2 gives the formal pair (1/4, 1/2)") {
    ContinuedFraction cf = expand(AlphaSpec::parse("cf:[0;2,5]"), 10);
    CHECK(evaluate_finite_cf(cf.quotients) == Rational(5, 11));
    auto [lo, hi] = approx_error_bounds(cf, 0);
    CHECK(lo == Rational(1, 4));
    CHECK(hi == Rational(1, 2));
  }
  SUBCASE("last index is rejected") {
    ContinuedFraction cf = expand(sqrt2(), 3);
    CHECK_THROWS_WITH_AS(approx_error_bounds(cf, 3),
                         "approx_error_bounds: need one more convergent", std::out_of_range);
  }
}

TEST_CASE("estimate_type") {
  SUBCASE("sqrt2 to depth 10 lands in (2.0, 2.2)") {
    TypeEstimate t = estimate_type(expand(sqrt2(), 10));
    CHECK(t.k_hat > 2.0);
    CHECK(t.k_hat < 2.2);
    CHECK(t.c_hat > 0);
    CHECK(t.c_hat <= 0.5);
  }
  SUBCASE("square-denominator alpha to depth 6 lands in (2.9, 3.3)") {
    TypeEstimate t = estimate_type(expand(AlphaSpec::parse("gen:thm2a"), 6));
    CHECK(t.k_hat > 2.9);
    CHECK(t.k_hat < 3.3);
  }
  SUBCASE("type-3 alpha (sigma=3) to depth 6 lands in (2.9, 3.3)") {
    TypeEstimate t = estimate_type(expand(AlphaSpec::parse("gen:thm2b(sigma=3)"), 6));
    CHECK(t.k_hat > 2.9);
    CHECK(t.k_hat < 3.3);
  }
  SUBCASE("invariant: lower error bound >= c_hat q^-k for every convergent") {
    for (const char* spec : {"pcf:[1|2]", "pcf:[2|1,3]", "gen:thm2a", "cf:[0;2,7,1,1,9,3,2]"}) {
      ContinuedFraction cf = expand(AlphaSpec::parse(spec), 8);
      TypeEstimate t = estimate_type(cf);
      for (size_t m = 0; m + 1 < cf.convergents.size(); ++m) {
        auto [lo, hi] = approx_error_bounds(cf, m);
        double lhs = to_double(lo);
        double rhs = t.c_hat * std::pow(to_double(Rational(cf.convergents[m].q)), -t.k_hat);
        CHECK(lhs >= rhs * (1 - 1e-9));
      }
    }
  }
}

TEST_CASE("determinant identities hold exactly for random expansions") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Integer> a;
    a.emplace_back(static_cast<long>(rng() % 7));
    size_t len = 3 + rng() % 10;
    for (size_t i = 0; i < len; ++i) a.emplace_back(static_cast<long>(1 + rng() % 50));
    ContinuedFraction cf = expand(AlphaSpec::explicit_cf(a), a.size());
    for (size_t m = 1; m < cf.depth(); ++m) {
      Integer det = cf.convergents[m].p * cf.convergents[m - 1].q -
                    cf.convergents[m - 1].p * cf.convergents[m].q;
      CHECK(det == (m % 2 ? Integer(1) : Integer(-1)));
    }
    for (size_t m = 2; m < cf.depth(); ++m) {
      Integer det2 = cf.convergents[m].p * cf.convergents[m - 2].q -
                     cf.convergents[m - 2].p * cf.convergents[m].q;
      Integer want = cf.quotients[m];
      if (m % 2) want = -want;
      CHECK(det2 == want);
    }
    // q_0 <= q_1 < q_2 < ...
    for (size_t m = 2; m < cf.depth(); ++m)
      CHECK(cf.convergents[m].q > cf.convergents[m - 1].q);
    CHECK(cf.convergents[0].q <= cf.convergents[1].q);
  }
}

TEST_CASE("re-evaluating the truncated cf reproduces every convergent") {
  ContinuedFraction cf = expand(AlphaSpec::parse("pcf:[0|1,2,3]"), 12);
  for (size_t m = 0; m < cf.depth(); ++m) {
    CHECK(evaluate_finite_cf(std::span(cf.quotients.data(), m + 1)) ==
          cf.convergents[m].value());
  }
}

TEST_CASE("best approximations below 1/(2q^2) are convergents (brute scan q <= 200)") {
  ContinuedFraction cf = expand(sqrt2(), 20);
  const auto& deep = cf.convergents.back();
  Rational proxy = deep.value();
  // certified |sqrt2 - proxy| < slack
  Rational slack = make_rational(1, deep.q * deep.q);
  for (long q = 1; q <= 200; ++q) {
    // only the nearest p can pass the threshold
    Integer p = floor_to_integer(proxy * Rational(q) + Rational(1, 2));
    Rational diff = proxy - make_rational(p, Integer(q));
    if (diff < 0) diff = -diff;
    Rational threshold(1, 2 * q * q);
    if (diff + slack < threshold) {
      Rational cand = make_rational(p, Integer(q));
      bool is_convergent = false;
      for (const auto& c : cf.convergents)
        if (c.value() == cand) {
          is_convergent = true;
          break;
        }
      CHECK(is_convergent);
    }
  }
}

TEST_CASE("alpha spec grammar round-trips") {
  for (const char* s :
       {"rat:7/3", "rat:-22/7", "cf:[1;1,3,6]", "pcf:[1|2]", "pcf:[0|1,2,3]", "gen:thm2a",
        "gen:thm2b(sigma=3)", "gen:thm1primes(seed=[0;2])"}) {
    AlphaSpec a = AlphaSpec::parse(s);
    AlphaSpec b = AlphaSpec::parse(a.text());
    CHECK(a.text() == b.text());
  }
  CHECK_THROWS(AlphaSpec::parse("nonsense:[1]"));
  CHECK_THROWS(AlphaSpec::parse("cf:[1;0,3]"));  // a_m >= 1 violated
  CHECK_THROWS(AlphaSpec::parse("pcf:[1|]"));
}

TEST_CASE("interval cf prefix is certified") {
  // [lo, hi] around sqrt2 with width 1e-8 pins the first several quotients
  auto [lo, hi] = sqrt2_enclosure();
  auto quot = cf_common_prefix(lo, hi, 10);
  REQUIRE(quot.size() == 10);
  CHECK(quot[0] == 1);
  for (size_t i = 1; i < quot.size(); ++i) CHECK(quot[i] == 2);
  // degenerate: exact rational endpoint stops the certification
  auto q2 = cf_common_prefix(Rational(1, 2), Rational(1, 2), 10);
  CHECK(q2.size() <= 3);
}

TEST_SUITE_END();
