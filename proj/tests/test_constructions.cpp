#include <random>

#include "doctest.h"
#include "spacinglab/constructions.hpp"
#include "spacinglab/contfrac.hpp"
#include "spacinglab/numtheory.hpp"

using namespace spacinglab;
using namespace spacinglab::constructions;

TEST_SUITE_BEGIN("constructions");

TEST_CASE("square-denominator construction") {
  Thm2aState st = thm2a_extend(thm2a_init(), 7);  // subscripts up to m = 8

  SUBCASE("printed expansion prefix is [1;1,3,6]") {
    REQUIRE(st.quotients.size() >= 4);
    CHECK(st.quotients[0] == 1);
    CHECK(st.quotients[1] == 1);
    CHECK(st.quotients[2] == 3);
    CHECK(st.quotients[3] == 6);
  }
  SUBCASE("v sequence begins 1, 1, 2, 5, 27, 2192") {
    const long want[] = {1, 1, 2, 5, 27, 2192};
    for (long m = 0; m <= 5; ++m) CHECK(st.v_at(m) == want[m]);
  }
  SUBCASE("q_m = v_m^2 exactly, cross-checked against an independent expansion") {
    contfrac::ContinuedFraction cf =
        contfrac::expand(contfrac::AlphaSpec::explicit_cf(st.quotients), st.quotients.size());
    for (size_t m = 0; m < cf.convergents.size(); ++m) {
      const Integer& v = st.v_at(static_cast<long>(m));
      CHECK(cf.convergents[m].q == v * v);
      CHECK(cf.convergents[m].q == st.convergents[m].q);
    }
    CHECK(st.convergents[3].q == 25);
    CHECK(st.convergents[4].q == 729);
  }
  SUBCASE("growth: q_{m+1} / (q_m^2 ln^2 q_m) is bounded for 4 <= m <= 7") {
    // The ratio tends to (floor(ln v_m)/ln q_m)^2 which sits just below 1/4
    // because of the floor in the r recursion; [1/9, 4] brackets it safely.
    for (long m = 4; m + 1 <= st.max_index(); ++m) {
      double qm = mpz_get_d(st.convergents[static_cast<size_t>(m)].q.get_mpz_t());
      double qn = mpz_get_d(st.convergents[static_cast<size_t>(m + 1)].q.get_mpz_t());
      double lq = log_integer(st.convergents[static_cast<size_t>(m)].q);
      double ratio = qn / (qm * qm * lq * lq);
      CHECK(ratio >= 1.0 / 9.0);
      CHECK(ratio <= 4.0);
    }
  }
}

TEST_CASE("prime-square construction (sigma = 3, seed [0;2])") {
  Thm2bState st = thm2b_extend(thm2b_init(Rational(3)), 4);
  REQUIRE(st.steps.size() == 4);

  SUBCASE("frozen transcript of the first steps") {
    // step to q_2: L = ceil(sqrt(2)) = 2; 2 | q_1, so ell = 3; a in [9,18)
    // solving a*2 + 1 == 0 mod 9 is 13; q_2 = 27.
    CHECK(st.steps[0].ell == 3);
    CHECK(st.steps[0].a == 13);
    CHECK(st.steps[0].q == 27);
    CHECK(st.steps[0].u == 3);
    // step to q_3: L = ceil(sqrt(27)) = 6; smallest admissible prime 7;
    // a in [49, 98) with a*27 + 2 == 0 mod 49 is 58; q_3 = 58*27+2 = 1568.
    CHECK(st.steps[1].ell == 7);
    CHECK(st.steps[1].a == 58);
    CHECK(st.steps[1].q == 1568);
    CHECK(st.steps[1].u == 32);
  }
  SUBCASE("every step: ell prime, coprime to previous q, ell^2 | q_m, a in [ell^2, 2 ell^2)") {
    for (size_t i = 0; i < st.steps.size(); ++i) {
      const auto& s = st.steps[i];
      CHECK(numtheory::is_probable_prime(s.ell));
      const Integer& q_prev = st.convergents[st.seed_len + i - 1].q;
      Integer g;
      mpz_gcd(g.get_mpz_t(), s.ell.get_mpz_t(), q_prev.get_mpz_t());
      CHECK(g == 1);
      Integer ell2 = s.ell * s.ell;
      CHECK(s.q % ell2 == 0);
      CHECK(s.a >= ell2);
      CHECK(s.a < 2 * ell2);
      CHECK(s.u * ell2 == s.q);
    }
  }
  SUBCASE("a_m is the unique solution in [ell^2, 2 ell^2): exhaustive scan for small ell") {
    for (size_t i = 0; i < st.steps.size(); ++i) {
      const auto& s = st.steps[i];
      if (s.ell > 50) continue;
      const Integer& q1 = st.convergents[st.seed_len + i - 1].q;
      const Integer& q2 = st.convergents[st.seed_len + i - 2].q;
      Integer ell2 = s.ell * s.ell;
      int hits = 0;
      for (Integer t = ell2; t < 2 * ell2; t += 1) {
        if ((t * q1 + q2) % ell2 == 0) {
          ++hits;
          CHECK(t == s.a);
        }
      }
      CHECK(hits == 1);
    }
  }
  SUBCASE("v_m tracks q_m^((sigma-2)/(2 sigma-2)) within [1/4, 4]") {
    for (const auto& s : st.steps) {
      double expo = (3.0 - 2.0) / (2.0 * 3.0 - 2.0);  // 1/4 for sigma = 3
      double ratio = mpz_get_d(s.ell.get_mpz_t()) / std::pow(mpz_get_d(s.q.get_mpz_t()), expo);
      CHECK(ratio >= 0.25);
      CHECK(ratio <= 4.0);
    }
  }
  SUBCASE("sigma <= 23/8 is rejected") {
    CHECK_THROWS(thm2b_init(Rational(23, 8)));
    CHECK_NOTHROW(thm2b_init(Rational(3)));
  }
}

TEST_CASE("prime-denominator approximants") {
  auto pairs = thm1_prime_denominators({Integer(0), Integer(2)}, 3);
  REQUIRE(pairs.size() == 3);

  SUBCASE("first extension: a_2 = 5, q_2 = 11") {
    // a >= q_1^2 = 4: a=4 gives 9 = 3^2 (composite), a=5 gives 11 (prime)
    CHECK(pairs[0].q == 11);
  }
  SUBCASE("every returned denominator is prime and reduced") {
    for (const auto& c : pairs) {
      CHECK(numtheory::is_probable_prime(c.q));
      Integer g;
      mpz_gcd(g.get_mpz_t(), c.p.get_mpz_t(), c.q.get_mpz_t());
      CHECK(g == 1);
    }
  }
  SUBCASE("q^3 |alpha - p/q| < 1 via a deeper convergent proxy") {
    contfrac::ContinuedFraction cf =
        contfrac::expand(contfrac::AlphaSpec::parse("gen:thm1primes(seed=[0;2])"), 6);
    Rational proxy = cf.convergents.back().value();
    for (const auto& c : pairs) {
      Rational diff = proxy - c.value();
      if (diff < 0) diff = -diff;
      CHECK(Rational(c.q * c.q * c.q) * diff < 1);
    }
  }
}

TEST_CASE("coprime square modulus configuration") {
  std::mt19937_64 rng(5);
  SUBCASE("Bezout identity exact on 100 random (q, N)") {
    int built = 0;
    while (built < 100) {
      Integer q(static_cast<unsigned long>(1000 + rng() % 1000000));
      auto N = static_cast<int64_t>(50 + rng() % 2000);
      Thm4Config cfg;
      try {
        cfg = thm4_config(q, N, 3, 0.05);
      } catch (const std::invalid_argument&) {
        continue;  // interval too small for this draw
      }
      ++built;
      CHECK(cfg.b * cfg.q_prime - cfg.b_prime * cfg.q == 1);
      CHECK(cfg.b > 0);
      CHECK(cfg.b < cfg.q);
      CHECK(cfg.b_prime > 0);
      CHECK(cfg.b_prime < cfg.q_prime);
      Integer g;
      mpz_gcd(g.get_mpz_t(), cfg.q_prime.get_mpz_t(), cfg.q.get_mpz_t());
      CHECK(g == 1);
      // |b/q - b'/q'| = 1/(q q') exactly
      Rational diff = make_rational(cfg.b, cfg.q) - make_rational(cfg.b_prime, cfg.q_prime);
      if (diff < 0) diff = -diff;
      CHECK(diff == make_rational(Integer(1), cfg.q * cfg.q_prime));
    }
  }
  SUBCASE("q q' lands in [N^3 ln^3 N, 4 N^3 ln^3 N]") {
    for (long qv : {100003L, 400009L, 999983L}) {
      const int64_t N = 2000;
      Thm4Config cfg = thm4_config(Integer(qv), N, 3, 0.05);
      double x = std::pow(static_cast<double>(N), 3.0) * std::pow(std::log(N), 3.0);
      double qq = mpz_get_d(Integer(cfg.q * cfg.q_prime).get_mpz_t());
      CHECK(qq >= x * 0.999);
      CHECK(qq <= 4.0 * x * 1.001);
    }
  }
}

TEST_CASE("constructed alphas land near their nominal diophantine types") {
  using contfrac::AlphaSpec;
  using contfrac::estimate_type;
  using contfrac::expand;
  CHECK(std::abs(estimate_type(expand(AlphaSpec::parse("gen:thm2a"), 6)).k_hat - 3.0) <= 0.3);
  CHECK(std::abs(estimate_type(expand(AlphaSpec::parse("gen:thm2b(sigma=3)"), 6)).k_hat - 3.0) <=
        0.3);
  auto t = estimate_type(expand(AlphaSpec::parse("gen:thm2b(sigma=13/4)"), 6));
  CHECK(std::abs(t.k_hat - 3.25) <= 0.3);
}

TEST_SUITE_END();
