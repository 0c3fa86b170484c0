#include "spacinglab/numtheory.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace spacinglab::numtheory {

namespace {

using u64 = uint64_t;
using u128 = unsigned __int128;

u64 mulmod_u64(u64 a, u64 b, u64 m) { return static_cast<u64>(u128(a) * b % m); }

u64 powmod_u64(u64 a, u64 e, u64 m) {
  u64 r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  // Deterministic Miller-Rabin base set for 64-bit inputs.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

bool is_probable_prime(const Integer& n) {
  if (n < 2) return false;
  if (fits_int64(n)) return is_prime_u64(static_cast<u64>(to_int64(n)));
  return mpz_probab_prime_p(n.get_mpz_t(), 32) != 0;
}

namespace {

// Brent's cycle variant of Pollard rho; returns a nontrivial factor or 1 on
// budget exhaustion.  n must be odd composite, not a prime power check here.
Integer pollard_rho(const Integer& n, uint64_t budget, unsigned long seed) {
  if (mpz_divisible_ui_p(n.get_mpz_t(), 2)) return Integer(2);
  gmp_randclass rng(gmp_randinit_mt);
  rng.seed(seed);
  while (budget > 0) {
    Integer y = rng.get_z_range(n - 3) + 2;
    Integer c = rng.get_z_range(n - 1) + 1;
    Integer x = y, d = 1, q = 1, ys = y;
    const unsigned step = 128;
    u64 r = 1;
    while (d == 1 && budget > 0) {
      x = y;
      for (u64 i = 0; i < r && budget > 0; ++i) {
        y = (y * y + c) % n;
        --budget;
      }
      u64 k = 0;
      while (k < r && d == 1 && budget > 0) {
        ys = y;
        u64 lim = std::min<u64>(step, r - k);
        for (u64 i = 0; i < lim && budget > 0; ++i) {
          y = (y * y + c) % n;
          Integer diff = x - y;
          if (diff < 0) diff = -diff;
          q = q * diff % n;
          --budget;
        }
        mpz_gcd(d.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += lim;
      }
      r <<= 1;
    }
    if (d == n) {
      // backtrack
      do {
        ys = (ys * ys + c) % n;
        Integer diff = x - ys;
        if (diff < 0) diff = -diff;
        mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
      } while (d == 1);
    }
    if (d > 1 && d < n) return d;
  }
  return Integer(1);
}

void factor_rec(const Integer& n, uint64_t& budget, Factorization& out) {
  if (n == 1) return;
  if (is_probable_prime(n)) {
    out.factors.emplace_back(n, 1);
    return;
  }
  // perfect power?
  if (mpz_perfect_power_p(n.get_mpz_t())) {
    for (unsigned k = 2; k <= mpz_sizeinbase(n.get_mpz_t(), 2); ++k) {
      Integer root;
      if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k)) {
        Factorization sub;
        factor_rec(root, budget, sub);
        if (sub.unresolved != 1) {
          Integer pw;
          mpz_pow_ui(pw.get_mpz_t(), sub.unresolved.get_mpz_t(), k);
          out.unresolved *= pw;
        }
        for (auto& [p, e] : sub.factors) out.factors.emplace_back(p, e * static_cast<int>(k));
        return;
      }
    }
  }
  Integer d = pollard_rho(n, budget, 0x9e3779b97f4a7c15ull ^ mpz_get_ui(n.get_mpz_t()));
  if (d == 1) {
    out.unresolved *= n;
    return;
  }
  factor_rec(d, budget, out);
  factor_rec(n / d, budget, out);
}

}  // namespace

Factorization factor(const Integer& n, uint64_t rho_budget) {
  if (n < 1) throw std::invalid_argument("factor: n must be positive");
  Factorization out;
  Integer rest = n;
  // trial division by small primes
  static const std::vector<uint32_t> small = [] {
    std::vector<uint32_t> ps;
    SpfSieve sieve(100000);
    for (uint32_t i = 2; i <= 100000; ++i)
      if (sieve.is_prime(i)) ps.push_back(i);
    return ps;
  }();
  for (uint32_t p : small) {
    if (rest == 1) break;
    if (Integer(p) * p > rest) break;
    int e = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      rest /= p;
      ++e;
    }
    if (e) out.factors.emplace_back(Integer(p), e);
  }
  if (rest > 1) {
    uint64_t budget = rho_budget;
    factor_rec(rest, budget, out);
  }
  // merge duplicates
  std::sort(out.factors.begin(), out.factors.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<Integer, int>> merged;
  for (auto& [p, e] : out.factors) {
    if (!merged.empty() && merged.back().first == p)
      merged.back().second += e;
    else
      merged.emplace_back(p, e);
  }
  out.factors = std::move(merged);
  return out;
}

std::vector<std::pair<u64, int>> factor_u64(u64 n) {
  Factorization f = factor(Integer(static_cast<unsigned long>(n)));
  std::vector<std::pair<u64, int>> out;
  for (auto& [p, e] : f.factors) out.emplace_back(static_cast<u64>(mpz_get_ui(p.get_mpz_t())), e);
  return out;
}

std::optional<Integer> smallest_prime_in_range(const Integer& lo, const Integer& hi,
                                               const Integer& avoid) {
  Integer p = lo > 2 ? lo : Integer(2);
  if (p > 2 && mpz_even_p(p.get_mpz_t())) ++p;
  while (p <= hi) {
    if (is_probable_prime(p) && !mpz_divisible_p(avoid.get_mpz_t(), p.get_mpz_t())) return p;
    p += (p == 2) ? 1 : 2;
  }
  return std::nullopt;
}

Integer isqrt(const Integer& x) {
  Integer r;
  mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
  return r;
}

Integer iroot_ceil(const Integer& x, unsigned k) {
  if (x <= 0) return Integer(0);
  Integer r;
  int exact = mpz_root(r.get_mpz_t(), x.get_mpz_t(), k);
  if (!exact) ++r;
  return r;
}

Integer powmod(const Integer& base, const Integer& exp, const Integer& mod) {
  Integer r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return r;
}

Integer invmod(const Integer& a, const Integer& mod) {
  Integer r;
  if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t()))
    throw std::domain_error("invmod: not invertible");
  return r;
}

SpfSieve::SpfSieve(uint32_t n) : spf(n + 1, 0) {
  for (uint32_t i = 2; i <= n; ++i) {
    if (spf[i] == 0) {
      for (uint64_t j = i; j <= n; j += i)
        if (spf[j] == 0) spf[j] = i;
    }
  }
}

std::vector<std::pair<uint32_t, int>> SpfSieve::factor(uint32_t n) const {
  std::vector<std::pair<uint32_t, int>> out;
  while (n > 1) {
    uint32_t p = spf[n];
    int e = 0;
    while (n % p == 0) n /= p, ++e;
    out.emplace_back(p, e);
  }
  return out;
}

}  // namespace spacinglab::numtheory
