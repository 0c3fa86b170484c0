#include <cmath>

#include "doctest.h"
#include "spacinglab/metric.hpp"
#include "spacinglab/numtheory.hpp"

using namespace spacinglab;
using namespace spacinglab::metric;

TEST_SUITE_BEGIN("metric");

TEST_CASE("kernel decomposition") {
  SUBCASE("12 = 3 * 2^2") {
    KernelDecomposition k = kernel_decompose(Integer(12));
    CHECK(k.q_tilde == 3);
    CHECK(k.s == 2);
    CHECK(k.rad == 6);
  }
  SUBCASE("720 = 5 * 12^2") {
    KernelDecomposition k = kernel_decompose(Integer(720));
    CHECK(k.q_tilde == 5);
    CHECK(k.s == 12);
    CHECK(k.rad == 30);
  }
  SUBCASE("primes are their own kernel") {
    KernelDecomposition k = kernel_decompose(Integer(100003));
    CHECK(k.q_tilde == 100003);
    CHECK(k.s == 1);
    CHECK(k.rad == 100003);
  }
  SUBCASE("q = 1") {
    KernelDecomposition k = kernel_decompose(Integer(1));
    CHECK(k.q_tilde == 1);
    CHECK(k.s == 1);
    CHECK(k.rad == 1);
  }
  SUBCASE("naive largest-square-divisor oracle, q <= 10^4") {
    for (long q = 1; q <= 10000; ++q) {
      KernelDecomposition k = kernel_decompose(Integer(q));
      CHECK(k.q_tilde * k.s * k.s == q);
      // naive: largest s with s^2 | q
      long s = 1;
      for (long t = 1; t * t <= q; ++t)
        if (q % (t * t) == 0) s = t;
      CHECK(k.s == s);
      // q_tilde square-free
      for (long t = 2; t * t <= 10000; ++t)
        CHECK(k.q_tilde % (t * t) != 0);
    }
  }
}

TEST_CASE("F membership") {
  SUBCASE("720: s=12 > ln^2(5) ~ 2.59, not in F") {
    FMembership f = f_membership(Integer(720));
    CHECK(!f.in_f);
    CHECK(f.threshold == doctest::Approx(std::pow(std::log(5.0), 2)).epsilon(1e-9));
  }
  SUBCASE("101: s=1 <= ln^2(101) ~ 21.3, in F") {
    CHECK(f_membership(Integer(101)).in_f);
  }
  SUBCASE("2: s=1 > ln^2(2) ~ 0.48, not in F (small-q artifact)") {
    CHECK(!f_membership(Integer(2)).in_f);
  }
}

TEST_CASE("harmonic tail over the complement of F") {
  SUBCASE("X=1: q=1 has s=1 > ln^2(1)=0, so the sum is 1") {
    CHECK(tail_sum_not_in_F(1) == doctest::Approx(1.0));
  }
  SUBCASE("X=100: direct and kernel-grouped scans agree") {
    TailSums t = tail_sum_both(100);
    CHECK(t.direct == doctest::Approx(t.grouped).epsilon(1e-14));
  }
  SUBCASE("monotone nondecreasing in X") {
    double prev = 0;
    for (int64_t x : {1, 10, 100, 1000, 10000}) {
      double v = tail_sum_not_in_F(x);
      CHECK(v >= prev);
      prev = v;
    }
  }
  SUBCASE("dual agreement at X = 10^4 within 1e-12") {
    TailSums t = tail_sum_both(10000);
    CHECK(std::abs(t.direct - t.grouped) <= 1e-12);
  }
}

TEST_CASE("Monte Carlo over random reals' convergents") {
  PropA1Report rep = prop_a1_montecarlo(40, 128, 12, 2026);
  SUBCASE("deterministic given the seed") {
    PropA1Report rep2 = prop_a1_montecarlo(40, 128, 12, 2026);
    REQUIRE(rep.rows.size() == rep2.rows.size());
    CHECK(rep.to_csv() == rep2.to_csv());
    for (size_t i = 0; i < rep.rows.size(); ++i) CHECK(rep.rows[i].q == rep2.rows[i].q);
  }
  SUBCASE("rows carry exact square parts when resolved") {
    for (const auto& r : rep.rows) {
      if (r.cofactor_unresolved) continue;
      CHECK(r.q_tilde * r.s * r.s == r.q);
      Integer s4 = r.s * r.s;
      s4 *= s4;
      CHECK(r.s_gt_q_quarter == (s4 > r.q));
    }
  }
  SUBCASE("large square parts above q > 10^6 are rare") {
    CHECK(rep.frac_big_s_above(Integer(1000000)) <= 0.05);
  }
  SUBCASE("bits < 128 rejected") { CHECK_THROWS(prop_a1_montecarlo(10, 64, 5, 1)); }
}

TEST_CASE("homogeneous-form radical checks") {
  SUBCASE("x^2 - 2 over [1, 2]: |F(p, q)| = 1 for every convergent") {
    std::vector<Integer> poly{Integer(-2), Integer(0), Integer(1)};
    AbcReport rep = abc_corollary_check(poly, Rational(1), Rational(2), 10);
    REQUIRE(rep.rows.size() == 10);
    for (const auto& row : rep.rows) {
      CHECK(row.F_abs == 1);
      CHECK(row.bound_ok);
      // p/q are the sqrt2 convergents 3/2, 7/5, 17/12, ...
    }
    CHECK(rep.rows[0].p == 3);
    CHECK(rep.rows[0].q == 2);
    CHECK(rep.rows[1].p == 7);
    CHECK(rep.rows[1].q == 5);
  }
  SUBCASE("x^3 - 2 to depth 15: |F(p,q)| <= C q and the radical ratio is reported") {
    std::vector<Integer> poly{Integer(-2), Integer(0), Integer(0), Integer(1)};
    AbcReport rep = abc_corollary_check(poly, Rational(1), Rational(2), 15);
    REQUIRE(rep.rows.size() == 15);
    int with_ratio = 0;
    for (const auto& row : rep.rows) {
      CHECK(row.bound_ok);
      if (!row.skipped) {
        ++with_ratio;
        CHECK(row.rad_ratio > 0.0);
        CHECK(row.rad_ratio < 2.5);
      }
    }
    CHECK(with_ratio >= 12);  // budget may skip at most a few deep rows
  }
  SUBCASE("rejects a non-isolating interval") {
    std::vector<Integer> poly{Integer(-2), Integer(0), Integer(1)};
    CHECK_THROWS(abc_corollary_check(poly, Rational(2), Rational(3), 5));
  }
}

TEST_SUITE_END();
