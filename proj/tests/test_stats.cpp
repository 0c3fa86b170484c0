#include <cmath>
#include <random>

#include "doctest.h"
#include "spacinglab/stats.hpp"

using namespace spacinglab;
using namespace spacinglab::stats;
using seqgen::FracSequence;
using seqgen::make_sequence;

namespace {

SortedPoints uniform_points(int64_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Integer den = Integer(1) << 53;
  std::vector<Integer> nums;
  nums.reserve(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i)
    nums.emplace_back(static_cast<unsigned long>(rng() >> 11));  // 53 random bits
  return sort_points(den, std::move(nums));
}

SortedPoints equally_spaced(int64_t n) {
  std::vector<Integer> nums;
  for (int64_t i = 0; i < n; ++i) nums.emplace_back(static_cast<long>(i));
  return sort_points(Integer(static_cast<long>(n)), std::move(nums));
}

TestFunction unit_box(int m) { return TestFunction::box_uniform(m, Rational(0), Rational(1)); }

}  // namespace

TEST_SUITE_BEGIN("stats");

TEST_CASE("sort_points keeps ties and sorts exactly") {
  FracSequence s = make_sequence(Integer(10), {Integer(3), Integer(1), Integer(1)});
  SortedPoints p = sort_points(s);
  CHECK(p.value(0) == Rational(1, 10));
  CHECK(p.value(1) == Rational(1, 10));
  CHECK(p.value(2) == Rational(3, 10));

  FracSequence r = seqgen::generate(contfrac::AlphaSpec::rational(Rational(1, 5)), 5);
  SortedPoints rp = sort_points(r);
  CHECK(rp.value(0) == 0);
  CHECK(rp.value(1) == Rational(1, 5));
  CHECK(rp.value(2) == Rational(1, 5));
  CHECK(rp.value(3) == Rational(4, 5));
  CHECK(rp.value(4) == Rational(4, 5));

  SortedPoints u = uniform_points(10000, 1);
  for (size_t i = 1; i < 10000; ++i) CHECK(u.nums64[i - 1] <= u.nums64[i]);
}

TEST_CASE("spacing measure") {
  SUBCASE("equally spaced points: k-th gaps are exactly k") {
    SortedPoints p = equally_spaced(40);
    for (int k : {1, 3}) {
      SpacingHistogram h = spacing_measure(p, k);
      REQUIRE(h.samples.size() == 40);
      for (double s : h.samples) CHECK(s == doctest::Approx(k).epsilon(1e-12));
    }
  }
  SUBCASE("k out of range throws") {
    SortedPoints p = equally_spaced(5);
    CHECK_THROWS(spacing_measure(p, 0));
    CHECK_THROWS(spacing_measure(p, 5));
  }
  SUBCASE("bin counts account for every sample") {
    SortedPoints p = uniform_points(5000, 3);
    SpacingHistogram h = spacing_measure(p, 2);
    int64_t sum = h.overflow;
    for (int64_t c : h.bin_counts) sum += c;
    CHECK(sum == 5000);
  }
  SUBCASE("uniform sample k=1 gaps are within KS 0.01 of 1 - e^-x") {
    SortedPoints p = uniform_points(1000000, 12345);
    SpacingHistogram h = spacing_measure(p, 1);
    CHECK(h.ks_to_poisson <= 0.01);
    // independent re-simulation
    SortedPoints p2 = uniform_points(1000000, 98765);
    CHECK(spacing_measure(p2, 1).ks_to_poisson <= 0.01);
  }
}

TEST_CASE("poisson spacing cdf") {
  CHECK(poisson_spacing_cdf(0, 1e9) == doctest::Approx(1.0));
  CHECK(poisson_spacing_cdf(0, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(poisson_spacing_cdf(1, 1.0) ==
        doctest::Approx(1.0 - 2.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(poisson_spacing_cdf(2, -1.0) == 0.0);
}

TEST_CASE("ks distance") {
  SUBCASE("all samples at 1, k=1: sup is 2/e") {
    std::vector<double> s(100, 1.0);
    CHECK(ks_distance_sorted(s, 1) == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-12));
  }
  SUBCASE("exact Poisson quantiles give distance <= 1/(N+1)") {
    const int n = 200;
    std::vector<double> s;
    for (int j = 1; j <= n; ++j) {
      // invert the k=0 cdf 1 - e^-x at j/(n+1)
      s.push_back(-std::log(1.0 - static_cast<double>(j) / (n + 1)));
    }
    CHECK(ks_distance_sorted(s, 0) <= 1.0 / (n + 1) + 1e-12);
  }
}

TEST_CASE("brute-force correlation examples") {
  SUBCASE("5 equally spaced points, circle mode, |diff| in [0.75, 1.25]") {
    SortedPoints p = equally_spaced(5);
    TestFunction f = TestFunction::box_uniform(2, Rational(3, 4), Rational(5, 4));
    auto r = correlation_bruteforce(p, f, Mode::circle, TupleConvention::index_ordered);
    CHECK(r.value_exact == 1);
    // distinct-ordered counts the same five pairs once each (only the
    // positive direction lands in the box)
    auto rd = correlation_bruteforce(p, f, Mode::circle, TupleConvention::distinct_ordered);
    CHECK(rd.value_exact == 1);
  }
  SUBCASE("two points {0, 1/2}, line mode, I=[0.5,1.5]") {
    SortedPoints p = sort_points(Integer(2), {Integer(0), Integer(1)});
    TestFunction f = TestFunction::box_uniform(2, Rational(1, 2), Rational(3, 2));
    auto r = correlation_bruteforce(p, f, Mode::line, TupleConvention::index_ordered);
    CHECK(r.value_exact == Rational(1, 2));
  }
  SUBCASE("cap exceeded points to the windowed path") {
    SortedPoints p = uniform_points(600, 2);
    CHECK_THROWS_WITH_AS(
        correlation_bruteforce(p, unit_box(2), Mode::line, TupleConvention::index_ordered),
        doctest::Contains("correlation_fast"), std::runtime_error);
  }
}

TEST_CASE("windowed correlation matches brute force exactly") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 2);
    const int64_t n = 20 + static_cast<int64_t>(rng() % 180);
    // dyadic points, some with forced ties
    const Integer den(1 << 20);
    std::vector<Integer> nums;
    for (int64_t i = 0; i < n; ++i)
      nums.emplace_back(static_cast<unsigned long>(rng() % (1 << 20)));
    for (int64_t i = 0; i + 1 < n / 8; ++i) nums[static_cast<size_t>(i + 1)] = nums[0];
    SortedPoints p = sort_points(den, std::move(nums));

    BoxWindow box;
    for (int d = 0; d + 1 < m; ++d) {
      long lo_num = (m == 2) ? static_cast<long>(rng() % 9) - 4 : static_cast<long>(rng() % 5);
      long wid = 1 + static_cast<long>(rng() % 6);
      box.lo.push_back(Rational(lo_num, 2));
      box.hi.push_back(Rational(lo_num + wid, 2));
    }
    TestFunction f = TestFunction::box_indicator(m, box);

    for (Mode mode : {Mode::line, Mode::circle}) {
      for (TupleConvention conv :
           {TupleConvention::index_ordered, TupleConvention::distinct_ordered}) {
        auto fast = correlation_fast(p, f, mode, conv);
        auto brute = correlation_bruteforce(p, f, mode, conv);
        REQUIRE(!fast.lower_bound);
        CHECK(fast.value_exact == brute.value_exact);
        CHECK(fast.matched == brute.matched);
      }
    }
  }
}

TEST_CASE("smooth correlation: windowed tracks brute force to 1e-10 relative") {
  for (int trial = 0; trial < 5; ++trial) {
    SortedPoints p = uniform_points(150, static_cast<uint64_t>(100 + trial));
    TestFunction f = TestFunction::smooth_bump(2, 1.5);
    for (Mode mode : {Mode::line, Mode::circle}) {
      auto fast = correlation_fast(p, f, mode, TupleConvention::index_ordered);
      auto brute = correlation_bruteforce(p, f, mode, TupleConvention::index_ordered);
      CHECK(fast.value == doctest::Approx(brute.value).epsilon(1e-10));
    }
  }
}

TEST_CASE("poisson references") {
  CHECK(poisson_reference(unit_box(2), TupleConvention::index_ordered) == 1.0);
  CHECK(poisson_reference(unit_box(2), TupleConvention::distinct_ordered) == 1.0);
  BoxWindow b3;
  b3.lo = {Rational(0), Rational(0)};
  b3.hi = {Rational(1), Rational(2)};
  TestFunction f3 = TestFunction::box_indicator(3, b3);
  CHECK(poisson_reference(f3, TupleConvention::distinct_ordered) == 2.0);
  CHECK(poisson_reference(f3, TupleConvention::index_ordered) == 2.0);
  // m=2 symmetrized interval [-1/2, 1]: forward [0,1], mirrored [0,1/2],
  // union length 1
  TestFunction fneg = TestFunction::box_uniform(2, Rational(-1, 2), Rational(1));
  CHECK(poisson_reference(fneg, TupleConvention::index_ordered) == 1.0);
  CHECK(poisson_reference(fneg, TupleConvention::distinct_ordered) == 1.5);

  SUBCASE("smooth reference cross-checked by midpoint rule at two resolutions") {
    TestFunction fs = TestFunction::smooth_bump(2, 1.0);
    double ref = poisson_reference(fs, TupleConvention::index_ordered);
    for (int res : {20000, 40000}) {
      double acc = 0;
      for (int i = 0; i < res; ++i) acc += seqgen::bump_value((i + 0.5) / res, 1.0) / res;
      CHECK(ref == doctest::Approx(acc).epsilon(1e-6));
    }
    CHECK(poisson_reference(fs, TupleConvention::distinct_ordered) ==
          doctest::Approx(2.0 * ref).epsilon(1e-12));
  }
}

TEST_CASE("translation invariance is bit-exact in circle mode") {
  std::mt19937_64 rng(11);
  const Integer den(10007);
  std::vector<Integer> nums;
  for (int i = 0; i < 120; ++i) nums.emplace_back(static_cast<unsigned long>(rng() % 10007));
  SortedPoints p = sort_points(den, std::vector<Integer>(nums));

  const long shift = 4242;
  std::vector<Integer> shifted;
  for (const Integer& v : nums) shifted.push_back((v + shift) % den);
  SortedPoints ps = sort_points(den, std::move(shifted));

  TestFunction f = TestFunction::box_uniform(3, Rational(0), Rational(3, 2));
  for (TupleConvention conv :
       {TupleConvention::index_ordered, TupleConvention::distinct_ordered}) {
    auto a = correlation_fast(p, f, Mode::circle, conv);
    auto b = correlation_fast(ps, f, Mode::circle, conv);
    CHECK(a.value_exact == b.value_exact);
  }
  SpacingHistogram ha = spacing_measure(p, 1);
  SpacingHistogram hb = spacing_measure(ps, 1);
  CHECK(ha.samples == hb.samples);
}

TEST_CASE("uniform points: pair correlation concentrates near 1") {
  for (uint64_t seed : {1u, 2u, 3u}) {
    SortedPoints p = uniform_points(100000, seed);
    auto r = correlation_fast(p, unit_box(2), Mode::line, TupleConvention::distinct_ordered);
    CHECK(r.value == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("ties are counted per index") {
  // six identical points: m=2 index counts C(6,2)=15 pairs, distinct 30
  std::vector<Integer> nums(6, Integer(17));
  SortedPoints p = sort_points(Integer(100), std::move(nums));
  TestFunction f = TestFunction::box_uniform(2, Rational(0), Rational(1));
  auto ri = correlation_fast(p, f, Mode::line, TupleConvention::index_ordered);
  CHECK(ri.matched == 15);
  auto rd = correlation_fast(p, f, Mode::line, TupleConvention::distinct_ordered);
  CHECK(rd.matched == 30);
}

TEST_CASE("work cap produces the certified tie lower bound") {
  // q = 36 = 1*6^2, b = 1, N = 36: multiples of 6 give six exact zeros and
  // the odd multiples of 3 a second six-fold tie at 9/36.
  FracSequence s = seqgen::generate(contfrac::AlphaSpec::rational(Rational(1, 36)), 36);
  SortedPoints p = sort_points(s);
  TestFunction f = TestFunction::box_uniform(5, Rational(-1), Rational(1));
  auto r = correlation_fast(p, f, Mode::line, TupleConvention::distinct_ordered, /*work_cap=*/10);
  CHECK(r.lower_bound);
  CHECK(r.value_exact >= Rational(720, 36));
  // the fully enumerated value dominates the bound
  auto full = correlation_fast(p, f, Mode::line, TupleConvention::distinct_ordered);
  CHECK(!full.lower_bound);
  CHECK(full.value_exact >= r.value_exact);
}

TEST_CASE("divergence lower bound on a small grid") {
  TestFunction f = TestFunction::box_uniform(5, Rational(-1), Rational(1));
  for (long u : {1L, 2L}) {
    for (long v : {3L, 5L}) {
      for (int64_t N : {60, 240}) {
        const long q = u * v * v;
        FracSequence s = seqgen::generate(
            contfrac::AlphaSpec::rational(make_rational(Integer(7), Integer(q))), N);
        SortedPoints p = sort_points(s);
        auto r = correlation_fast(p, f, Mode::line, TupleConvention::distinct_ordered);
        Integer z(N / (u * v));
        Rational bound = make_rational(z * (z - 1) * (z - 2) * (z - 3) * (z - 4),
                                       Integer(static_cast<long>(N)));
        CHECK(r.value_exact >= bound);
      }
    }
  }
}

TEST_SUITE_END();
