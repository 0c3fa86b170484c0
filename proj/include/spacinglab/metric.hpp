// Square-free kernel machinery: q = q_tilde * s^2 with q_tilde square-free,
// the set F = { q : s <= ln^2(q_tilde) }, the convergence of the harmonic sum
// over the complement of F (computed two independent ways), a Monte Carlo
// over random reals' convergent denominators, and the homogeneous-form
// radical checks for algebraic alphas.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spacinglab/contfrac.hpp"
#include "spacinglab/rational.hpp"

namespace spacinglab::metric {

struct KernelDecomposition {
  Integer q;
  Integer q_tilde;  // square-free kernel
  Integer s;        // q = q_tilde * s^2
  Integer rad;      // product of the distinct primes of q
};

// Exact decomposition via full factorization; throws when the rho budget is
// exhausted before the factorization completes.
KernelDecomposition kernel_decompose(const Integer& q, uint64_t rho_budget = 50000000ull);

struct FMembership {
  Integer q;
  bool in_f = false;
  double threshold = 0;  // ln^2(q_tilde)
};

FMembership f_membership(const Integer& q);

// Sum of 1/q over q <= X not in F, computed by a direct scan and by grouping
// q = f m^2 over square-free kernels f (the complement condition becomes
// m > ln^2 f).  Both use compensated summation.
struct TailSums {
  double direct = 0;
  double grouped = 0;
};
TailSums tail_sum_both(int64_t X);

// The checked value: asserts the two routes agree to 1e-12 and returns the
// direct scan.
double tail_sum_not_in_F(int64_t X);

// ---------------------------------------------------------------------------
// Monte Carlo over convergents of random reals.
//
// A real is sampled as a uniform `bits`-bit dyadic interval; the continued
// fraction quotients certified by the interval are exactly those of every
// real inside it.  For each convergent denominator q the square part s is
// computed by budgeted factorization; an unfactored rough cofactor (no
// factor below ~10^6, probabilistically square-free) leaves s as a lower
// bound and flags the row.
// ---------------------------------------------------------------------------

struct PropA1Row {
  int sample_id = 0;
  int m = 0;  // convergent index
  Integer q;
  Integer s;  // square part (exact unless cofactor_unresolved)
  Integer q_tilde;
  bool in_f = false;
  bool s_gt_q_quarter = false;  // s^4 > q
  bool cofactor_unresolved = false;
};

struct PropA1Band {
  int bits_lo = 0;  // band: 2^bits_lo <= q < 2^(bits_lo + band_width)
  int64_t rows = 0;
  int64_t not_in_f = 0;
  int64_t big_s = 0;  // s^4 > q
};

struct PropA1Report {
  uint64_t seed = 0;
  int samples = 0, bits = 0, depth = 0;
  int truncated_samples = 0;  // expansions that ran out before `depth`
  std::vector<PropA1Row> rows;

  int64_t count_q_above(const Integer& q_min) const;
  int64_t count_big_s_above(const Integer& q_min) const;  // s^4 > q among those
  double frac_big_s_above(const Integer& q_min) const;
  // Dyadic-band aggregation of the two reported fractions.
  std::vector<PropA1Band> band_summary(int band_width = 8) const;
  std::string to_csv() const;
};

PropA1Report prop_a1_montecarlo(int samples, int bits, int depth, uint64_t seed);

// ---------------------------------------------------------------------------
// Radical checks for an algebraic alpha given by an integer polynomial
// (ascending coefficients) and an isolating interval [lo, hi] of an
// irrational root.  For each convergent p/q of the root:
//   F(p,q) = q^deg * f(p/q)  must satisfy |F(p,q)| <= C q^(deg-2)
// with C = 2 * (bound on |f'| over the interval); and the conjectural
// radical ratio  ln rad(p q F(p,q)) / ((deg - 0.1) ln q)  is reported
// without assertion.
// ---------------------------------------------------------------------------

struct AbcRow {
  int m = 0;
  Integer p, q;
  Integer F_abs;
  double bound = 0;  // C q^(deg-2)
  bool bound_ok = false;
  double rad_ratio = 0;  // 0 when skipped
  bool skipped = false;  // radical factorization budget exhausted
};

struct AbcReport {
  std::vector<Integer> poly;
  Rational C;  // mean-value constant used in the bound
  std::vector<AbcRow> rows;
  std::string to_csv() const;
};

AbcReport abc_corollary_check(const std::vector<Integer>& poly, const Rational& lo,
                              const Rational& hi, int depth);

}  // namespace spacinglab::metric
