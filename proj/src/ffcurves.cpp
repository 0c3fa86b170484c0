#include "spacinglab/ffcurves.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spacinglab/numtheory.hpp"

namespace spacinglab::ffcurves {

namespace {

using u64 = uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(u128(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

int64_t mod_pos(int64_t x, int64_t q) {
  int64_t r = x % q;
  return r < 0 ? r + q : r;
}

void validate(const CurveSpec& spec) {
  if (spec.m < 2) throw std::invalid_argument("curve: m >= 2");
  if (spec.a.size() != static_cast<size_t>(spec.m - 1))
    throw std::invalid_argument("curve: need m-1 residues a_i");
  if (spec.q == 2) throw std::invalid_argument("curve: q = 2 not supported");
  if (!numtheory::is_prime_u64(static_cast<u64>(spec.q)))
    throw std::invalid_argument("curve: q must be an odd prime");
  if (mod_pos(spec.b, spec.q) == 0) throw std::invalid_argument("curve: q | b");
}

// chi table for fiber counting; worth building from q ~ a few dozen up.
std::vector<int8_t> chi_table(int64_t q) {
  std::vector<int8_t> t(static_cast<size_t>(q), -1);
  t[0] = 0;
  for (int64_t x = 1; x <= (q - 1) / 2; ++x) t[static_cast<size_t>(mulmod(x, x, q))] = 1;
  return t;
}

}  // namespace

int legendre(int64_t x, int64_t q) {
  if (q <= 2 || !numtheory::is_prime_u64(static_cast<u64>(q)))
    throw std::invalid_argument("legendre: q must be an odd prime");
  u64 xm = static_cast<u64>(mod_pos(x, q));
  if (xm == 0) return 0;
  u64 e = powmod(xm, static_cast<u64>((q - 1) / 2), static_cast<u64>(q));
  return e == 1 ? 1 : -1;
}

int64_t sqrt_mod(int64_t x, int64_t q) {
  u64 n = static_cast<u64>(mod_pos(x, q));
  u64 p = static_cast<u64>(q);
  if (n == 0) return 0;
  if (legendre(static_cast<int64_t>(n), q) != 1) throw std::domain_error("sqrt_mod: non-residue");
  if (p % 4 == 3) return static_cast<int64_t>(powmod(n, (p + 1) / 4, p));
  // Tonelli-Shanks
  u64 s = 0, d = p - 1;
  while ((d & 1) == 0) d >>= 1, ++s;
  u64 z = 2;
  while (legendre(static_cast<int64_t>(z), q) != -1) ++z;
  u64 c = powmod(z, d, p);
  u64 t = powmod(n, d, p);
  u64 r = powmod(n, (d + 1) / 2, p);
  u64 m = s;
  while (t != 1) {
    u64 i = 0, tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, p);
      ++i;
    }
    u64 b = c;
    for (u64 j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
    r = mulmod(r, b, p);
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    m = i;
  }
  return static_cast<int64_t>(r);
}

int64_t lift_centered(int64_t x, int64_t q) {
  int64_t r = mod_pos(x, q);
  return 2 * r > q ? r - q : r;
}

std::vector<std::vector<Integer>> sigma_roots(std::span<const int64_t> a, int64_t q) {
  const size_t m = a.size() + 1;
  std::vector<int64_t> lift(a.size());
  for (size_t k = 0; k < a.size(); ++k) lift[k] = lift_centered(a[k], q);
  std::vector<std::vector<Integer>> sigma(m - 1);
  for (size_t i = 1; i < m; ++i) {
    Integer run(0);
    for (size_t j = i + 1; j <= m; ++j) {
      run += lift[j - 2];
      sigma[i - 1].push_back(run);
    }
  }
  return sigma;
}

std::pair<int, Integer> r_eff_and_D(std::span<const int64_t> a, int64_t q) {
  const size_t m = a.size() + 1;
  // Partial sums A_i = sum_{k>=i} a_k (A_m = 0), distinct count mod q.
  std::vector<int64_t> A(m, 0);
  for (size_t i = m - 1; i-- > 0;) A[i] = mod_pos(A[i + 1] + a[i], q);
  int distinct = 0;
  for (size_t i = 0; i < m; ++i) {
    bool seen = false;
    for (size_t j = 0; j < i; ++j)
      if (A[j] == A[i]) {
        seen = true;
        break;
      }
    if (!seen) ++distinct;
  }
  Integer D(1);
  auto sig = sigma_roots(a, q);
  for (const auto& row : sig)
    for (const Integer& s : row) D *= s;
  return {distinct, D};
}

CurveCount nu_points(const CurveSpec& spec) {
  validate(spec);
  const int64_t q = spec.q;
  const u64 qq = static_cast<u64>(q);
  const u64 binv = powmod(static_cast<u64>(mod_pos(spec.b, q)), qq - 2, qq);

  // Shifts S_i = (a_1 + ... + a_{i-1}) * b^{-1}, i = 2..m.
  std::vector<u64> shift;
  u64 run = 0;
  for (int i = 2; i <= spec.m; ++i) {
    run = (run + static_cast<u64>(mod_pos(spec.a[static_cast<size_t>(i - 2)], q))) % qq;
    shift.push_back(mulmod(run, binv, qq));
  }

  std::vector<int8_t> chi;
  const bool use_table = q <= (int64_t(1) << 24);
  if (use_table) chi = chi_table(q);
  auto chi_of = [&](u64 x) -> int {
    if (use_table) return chi[static_cast<size_t>(x)];
    if (x == 0) return 0;
    return powmod(x, qq / 2, qq) == 1 ? 1 : -1;
  };

  int64_t nu = 0;
  for (u64 x = 0; x < qq; ++x) {
    u64 x2 = mulmod(x, x, qq);
    int64_t fiber = 1;
    for (u64 s : shift) {
      u64 c = (x2 + qq - s) % qq;
      fiber *= 1 + chi_of(c);
      if (fiber == 0) break;
    }
    nu += fiber;
  }

  CurveCount out;
  out.nu = nu;
  auto [reff, D] = r_eff_and_D(spec.a, q);
  out.r_eff = reff;
  out.D = D;
  out.B = nu - (int64_t(1) << (spec.m - reff)) * q;
  return out;
}

int64_t nu_points_exhaustive(const CurveSpec& spec) {
  validate(spec);
  const int64_t q = spec.q;
  const u64 qq = static_cast<u64>(q);
  const u64 b = static_cast<u64>(mod_pos(spec.b, q));
  std::vector<u64> x(static_cast<size_t>(spec.m), 0);
  int64_t count = 0;
  // odometer over q^m tuples
  while (true) {
    bool ok = true;
    for (int i = 0; i + 1 < spec.m && ok; ++i) {
      u64 lhs = mulmod(b, (mulmod(x[i], x[i], qq) + qq - mulmod(x[i + 1], x[i + 1], qq)) % qq, qq);
      if (lhs != static_cast<u64>(mod_pos(spec.a[static_cast<size_t>(i)], q))) ok = false;
    }
    if (ok) ++count;
    int pos = 0;
    while (pos < spec.m) {
      if (++x[static_cast<size_t>(pos)] < qq) break;
      x[static_cast<size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == spec.m) break;
  }
  return count;
}

std::complex<double> curve_exp_sum(const CurveSpec& spec, std::span<const int64_t> r) {
  validate(spec);
  if (r.size() != static_cast<size_t>(spec.m))
    throw std::invalid_argument("curve_exp_sum: r needs m components");
  const int64_t q = spec.q;
  const u64 qq = static_cast<u64>(q);
  const u64 binv = powmod(static_cast<u64>(mod_pos(spec.b, q)), qq - 2, qq);
  std::vector<u64> shift;
  u64 run = 0;
  for (int i = 2; i <= spec.m; ++i) {
    run = (run + static_cast<u64>(mod_pos(spec.a[static_cast<size_t>(i - 2)], q))) % qq;
    shift.push_back(mulmod(run, binv, qq));
  }
  std::vector<int8_t> chi;
  const bool use_table = q <= (int64_t(1) << 22);
  if (use_table) chi = chi_table(q);
  auto chi_of = [&](u64 x) -> int {
    if (use_table) return chi[static_cast<size_t>(x)];
    if (x == 0) return 0;
    return powmod(x, qq / 2, qq) == 1 ? 1 : -1;
  };

  const double tau = 2.0 * std::numbers::pi_v<double>;
  std::complex<double> total(0, 0);
  for (u64 x = 0; x < qq; ++x) {
    u64 x2 = mulmod(x, x, qq);
    // e(-r_1 x / q) * prod over i>=2 of (sum over the fiber roots of e(-r_i y/q))
    std::complex<double> contrib =
        std::polar(1.0, -tau * static_cast<double>(mulmod(static_cast<u64>(mod_pos(r[0], q)), x, qq)) /
                            static_cast<double>(q));
    bool dead = false;
    for (size_t i = 0; i < shift.size(); ++i) {
      u64 c = (x2 + qq - shift[i]) % qq;
      int ch = chi_of(c);
      if (ch == -1) {
        dead = true;
        break;
      }
      u64 ri = static_cast<u64>(mod_pos(r[i + 1], q));
      if (ch == 0) {
        // single root y = 0: factor e(0) = 1
        continue;
      }
      u64 t = static_cast<u64>(sqrt_mod(static_cast<int64_t>(c), q));
      double ang = tau * static_cast<double>(mulmod(ri, t, qq)) / static_cast<double>(q);
      contrib *= std::complex<double>(2.0 * std::cos(ang), 0.0);
    }
    if (!dead) total += contrib;
  }
  return total;
}

std::complex<double> geometric_sum_F(int64_t N, int64_t r, int64_t q) {
  if (N < 1 || q < 1) throw std::invalid_argument("geometric_sum_F: N, q >= 1");
  if (mod_pos(r, q) == 0) return {static_cast<double>(N), 0.0};
  const double tau = 2.0 * std::numbers::pi_v<double>;
  const double theta = tau * static_cast<double>(r) / static_cast<double>(q);
  std::complex<double> w = std::polar(1.0, theta);
  std::complex<double> wn = std::polar(1.0, theta * static_cast<double>(N));
  return w * (wn - 1.0) / (w - 1.0);
}

}  // namespace spacinglab::ffcurves
