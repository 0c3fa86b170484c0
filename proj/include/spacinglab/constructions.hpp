// Constructions of special irrationals and moduli:
//
//  * thm2a: an alpha whose convergent denominators are perfect squares
//    (q_m = v_m^2), driving 5-level correlation blowup at every N.
//  * thm2b: for rational sigma > 23/8, an alpha of diophantine type ~sigma
//    whose q_m pick up a prime-square factor ell_m^2 at every step.
//  * thm1primes: greedy extension making every new convergent denominator
//    prime with |alpha - p/q| << 1/q^3.
//  * thm4_config: given (q, N), a coprime square modulus q' = v^2 with
//    q q' ~= N^3 log^3 N and the Bezout pair b q' - b' q = 1.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "spacinglab/contfrac.hpp"
#include "spacinglab/rational.hpp"

namespace spacinglab::constructions {

// ---------------------------------------------------------------------------
// Square-denominator alpha.  Recursion (subscripts stored with offset +1 so
// index 0 holds subscript -1):
//   r_{-1}=v_{-1}=0, r_0=v_0=1, r_1=v_1=1,
//   v_{m+1} = r_m v_m^2 + v_{m-1},  r_{m+1} = max(1, floor(ln v_{m+1})),
//   a_0 = 1,  a_{m+1} = r_m^2 v_m^2 + 2 r_m v_{m-1}.
// Then q_m = v_m^2 exactly; this is asserted at every step.
struct Thm2aState {
  std::vector<Integer> r, v;  // entries for subscripts -1, 0, 1, ..., at offset +1
  std::vector<Integer> quotients;
  std::vector<contfrac::Convergent> convergents;

  const Integer& r_at(long m) const { return r.at(static_cast<size_t>(m + 1)); }
  const Integer& v_at(long m) const { return v.at(static_cast<size_t>(m + 1)); }
  // Largest subscript m with a_m (equivalently q_m) known.
  long max_index() const { return static_cast<long>(quotients.size()) - 1; }
};

Thm2aState thm2a_init();
Thm2aState thm2a_extend(Thm2aState state, size_t steps);

// ---------------------------------------------------------------------------
// Type-sigma alpha with prime-square factors.  Per step, with L =
// ceil(q_{m-1}^{(sigma-2)/2}): take the smallest prime ell in [L, 2L] not
// dividing q_{m-1} (doubling the interval with a warning if none), and the
// unique a_m in [ell^2, 2 ell^2) solving a_m q_{m-1} + q_{m-2} == 0 mod ell^2.
struct Thm2bStep {
  Integer ell;  // = v_m
  Integer a;
  Integer u;  // q_m = u * ell^2
  Integer q;
};

struct Thm2bState {
  Rational sigma;  // > 23/8
  size_t seed_len = 0;
  std::vector<Integer> quotients;
  std::vector<contfrac::Convergent> convergents;
  std::vector<Thm2bStep> steps;  // one per quotient beyond the seed
};

Thm2bState thm2b_init(const Rational& sigma, std::vector<Integer> seed = {Integer(0), Integer(2)});
Thm2bState thm2b_extend(Thm2bState state, size_t steps);

// ---------------------------------------------------------------------------
// Prime-denominator approximants.  Starting from a >=2-term seed, repeatedly
// append the smallest a >= q_last^2 making the new denominator a*q_last +
// q_prev prime.  Returns the `count` new convergents (p, q), each with q
// prime and |alpha - p/q| < 1/q^3 for every continuation alpha.
std::vector<contfrac::Convergent> thm1_prime_denominators(const std::vector<Integer>& seed,
                                                          size_t count);

// ---------------------------------------------------------------------------
struct Thm4Config {
  Integer q;
  int64_t N = 0;
  int m = 0;
  double delta = 0;
  Integer v;        // coprime to q, in [sqrt(x), 2 sqrt(x)] for x = N^3 ln^3 N / q
  Integer q_prime;  // v^2
  Integer b;        // 0 < b < q
  Integer b_prime;  // 0 < b' < q', with b q' - b' q = 1
};

Thm4Config thm4_config(const Integer& q, int64_t N, int m, double delta);

// Factory for gen:<name> alpha specs ("thm2a", "thm2b", "thm1primes").
std::unique_ptr<contfrac::QuotientGenerator> make_named_generator(
    const std::string& name, const std::map<std::string, std::string>& params);

}  // namespace spacinglab::constructions
