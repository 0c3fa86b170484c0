// Shared integer-arithmetic plumbing: primality, factorization, integer roots,
// smallest-prime-factor sieves.
#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "spacinglab/rational.hpp"

namespace spacinglab::numtheory {

bool is_prime_u64(uint64_t n);
bool is_probable_prime(const Integer& n);  // BPSW-backed (mpz_probab_prime_p)

// Factor n completely with trial division + Brent-Pollard rho.
// rho_budget caps the rho iterations per composite; when exhausted the
// remaining cofactor is reported via `unresolved` (factors found so far are
// still exact divisors).  Result is sorted by prime.
struct Factorization {
  std::vector<std::pair<Integer, int>> factors;
  Integer unresolved{1};  // composite cofactor left unfactored (1 = complete)
  bool complete() const { return unresolved == 1; }
};
Factorization factor(const Integer& n, uint64_t rho_budget = UINT64_MAX);

std::vector<std::pair<uint64_t, int>> factor_u64(uint64_t n);

// Smallest prime p in [lo, hi] with p not dividing `avoid`; nullopt if none.
std::optional<Integer> smallest_prime_in_range(const Integer& lo, const Integer& hi,
                                               const Integer& avoid);

Integer isqrt(const Integer& x);                 // floor
Integer iroot_ceil(const Integer& x, unsigned k);  // smallest r with r^k >= x

Integer powmod(const Integer& base, const Integer& exp, const Integer& mod);
Integer invmod(const Integer& a, const Integer& mod);  // throws if not invertible

// Smallest-prime-factor sieve for [0, n].
struct SpfSieve {
  explicit SpfSieve(uint32_t n);
  uint32_t limit() const { return static_cast<uint32_t>(spf.size() - 1); }
  std::vector<std::pair<uint32_t, int>> factor(uint32_t n) const;
  bool is_prime(uint32_t n) const { return n >= 2 && spf[n] == n; }
  std::vector<uint32_t> spf;
};

}  // namespace spacinglab::numtheory
