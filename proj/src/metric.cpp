#include "spacinglab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "spacinglab/numtheory.hpp"

namespace spacinglab::metric {

namespace {

struct PartialKernel {
  Integer s{1};        // square part of the resolved portion
  Integer q_tilde{1};  // q / s^2 (absorbs any unresolved cofactor)
  Integer rad{1};      // radical of the resolved portion
  bool unresolved = false;
};

PartialKernel kernel_partial(const Integer& q, uint64_t rho_budget) {
  PartialKernel out;
  auto f = numtheory::factor(q, rho_budget);
  for (const auto& [p, e] : f.factors) {
    out.rad *= p;
    for (int i = 0; i < e / 2; ++i) out.s *= p;
    if (e % 2) out.q_tilde *= p;
  }
  if (!f.complete()) {
    // A rough composite cofactor: if it is a perfect square its root joins s
    // (the root itself is almost surely square-free at these sizes);
    // otherwise treat it as square-free and flag.
    Integer c = f.unresolved;
    if (mpz_perfect_square_p(c.get_mpz_t())) {
      Integer r = numtheory::isqrt(c);
      out.s *= r;
      out.rad *= r;
      out.unresolved = true;
    } else {
      out.q_tilde *= c;
      out.rad *= c;
      out.unresolved = true;
    }
  }
  return out;
}

// Compensated (Neumaier) accumulator.
struct Kahan {
  double sum = 0, c = 0;
  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

double ln2sq(const Integer& v) {
  double l = log_integer(v);
  return l * l;
}

}  // namespace

KernelDecomposition kernel_decompose(const Integer& q, uint64_t rho_budget) {
  if (q < 1) throw std::invalid_argument("kernel_decompose: q >= 1");
  auto f = numtheory::factor(q, rho_budget);
  if (!f.complete())
    throw std::runtime_error("kernel_decompose: factorization budget exhausted for q = " +
                             q.get_str());
  KernelDecomposition out;
  out.q = q;
  out.q_tilde = 1;
  out.s = 1;
  out.rad = 1;
  for (const auto& [p, e] : f.factors) {
    out.rad *= p;
    for (int i = 0; i < e / 2; ++i) out.s *= p;
    if (e % 2) out.q_tilde *= p;
  }
  if (out.q_tilde * out.s * out.s != q) throw std::logic_error("kernel_decompose: q != q~ s^2");
  return out;
}

FMembership f_membership(const Integer& q) {
  KernelDecomposition k = kernel_decompose(q);
  FMembership out;
  out.q = q;
  out.threshold = ln2sq(k.q_tilde);
  out.in_f = mpz_get_d(k.s.get_mpz_t()) <= out.threshold;
  return out;
}

TailSums tail_sum_both(int64_t X) {
  if (X < 1) throw std::invalid_argument("tail_sum: X >= 1");
  if (X > 100000000) throw std::invalid_argument("tail_sum: X <= 1e8");
  numtheory::SpfSieve sieve(static_cast<uint32_t>(X));

  TailSums out;
  // Direct scan.
  {
    Kahan acc;
    for (int64_t q = 1; q <= X; ++q) {
      uint64_t s = 1;
      uint64_t qt = 1;
      for (auto [p, e] : sieve.factor(static_cast<uint32_t>(q))) {
        for (int i = 0; i < e / 2; ++i) s *= p;
        if (e % 2) qt *= p;
      }
      double lt = std::log(static_cast<double>(qt));
      if (static_cast<double>(s) > lt * lt) acc.add(1.0 / static_cast<double>(q));
    }
    out.direct = acc.value();
  }
  // Grouped by square-free kernel f: q = f m^2 not in F <=> m > ln^2 f.
  {
    Kahan acc;
    for (int64_t f = 1; f <= X; ++f) {
      bool squarefree = true;
      for (auto [p, e] : sieve.factor(static_cast<uint32_t>(f)))
        if (e > 1) {
          squarefree = false;
          break;
        }
      if (!squarefree) continue;
      double lf = std::log(static_cast<double>(f));
      auto m_min = static_cast<int64_t>(std::floor(lf * lf)) + 1;
      if (m_min < 1) m_min = 1;
      for (int64_t m = m_min; f * m * m <= X; ++m)
        acc.add(1.0 / (static_cast<double>(f) * static_cast<double>(m) * static_cast<double>(m)));
    }
    out.grouped = acc.value();
  }
  return out;
}

double tail_sum_not_in_F(int64_t X) {
  TailSums t = tail_sum_both(X);
  if (std::abs(t.direct - t.grouped) > 1e-12)
    throw std::logic_error("tail_sum: direct and kernel-grouped scans disagree: " +
                           std::to_string(t.direct) + " vs " + std::to_string(t.grouped));
  return t.direct;
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

int64_t PropA1Report::count_q_above(const Integer& q_min) const {
  int64_t n = 0;
  for (const auto& r : rows)
    if (r.q > q_min) ++n;
  return n;
}

int64_t PropA1Report::count_big_s_above(const Integer& q_min) const {
  int64_t n = 0;
  for (const auto& r : rows)
    if (r.q > q_min && r.s_gt_q_quarter) ++n;
  return n;
}

double PropA1Report::frac_big_s_above(const Integer& q_min) const {
  int64_t total = count_q_above(q_min);
  return total == 0 ? 0.0 : static_cast<double>(count_big_s_above(q_min)) /
                                static_cast<double>(total);
}

std::string PropA1Report::to_csv() const {
  std::ostringstream out;
  out << "sample_id,m,q_digits,s,q_tilde_digits,in_F,s_gt_q_quarter,cofactor_unresolved\n";
  for (const auto& r : rows) {
    out << r.sample_id << "," << r.m << "," << mpz_sizeinbase(r.q.get_mpz_t(), 10) << "," << r.s
        << "," << mpz_sizeinbase(r.q_tilde.get_mpz_t(), 10) << "," << (r.in_f ? 1 : 0) << ","
        << (r.s_gt_q_quarter ? 1 : 0) << "," << (r.cofactor_unresolved ? 1 : 0) << "\n";
  }
  return out.str();
}

PropA1Report prop_a1_montecarlo(int samples, int bits, int depth, uint64_t seed) {
  if (bits < 128) throw std::invalid_argument("prop_a1_montecarlo: bits >= 128");
  if (samples < 1 || depth < 1) throw std::invalid_argument("prop_a1_montecarlo: bad sizes");
  PropA1Report rep;
  rep.seed = seed;
  rep.samples = samples;
  rep.bits = bits;
  rep.depth = depth;

  gmp_randclass rng(gmp_randinit_mt);
  rng.seed(static_cast<unsigned long>(seed));
  Integer two_bits;
  mpz_ui_pow_ui(two_bits.get_mpz_t(), 2, static_cast<unsigned long>(bits));

  for (int sid = 0; sid < samples; ++sid) {
    Integer k = rng.get_z_range(two_bits - 1) + 1;  // in [1, 2^bits - 1]
    Rational lo = make_rational(k, two_bits);
    Rational hi = make_rational(k + 1, two_bits);
    auto quot = contfrac::cf_common_prefix(lo, hi, static_cast<size_t>(depth) + 1);
    if (quot.size() < static_cast<size_t>(depth) + 1) ++rep.truncated_samples;
    // convergent denominators
    Integer qm2(0), qm1(1);
    for (size_t m = 0; m < quot.size(); ++m) {
      Integer q = m == 0 ? Integer(1) : Integer(quot[m] * qm1 + qm2);
      if (m > 0) {
        qm2 = qm1;
        qm1 = q;
      }
      if (m == 0) continue;  // q_0 = 1 carries no information
      PartialKernel pk = kernel_partial(q, 200000);
      PropA1Row row;
      row.sample_id = sid;
      row.m = static_cast<int>(m);
      row.q = q;
      row.s = pk.s;
      row.q_tilde = pk.q_tilde;
      row.cofactor_unresolved = pk.unresolved;
      row.in_f = mpz_get_d(pk.s.get_mpz_t()) <= ln2sq(pk.q_tilde);
      Integer s4 = pk.s * pk.s;
      s4 *= s4;
      row.s_gt_q_quarter = s4 > q;
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Radical checks
// ---------------------------------------------------------------------------

namespace {

Rational eval_poly(const std::vector<Integer>& poly, const Rational& x) {
  Rational acc(0);
  for (size_t i = poly.size(); i-- > 0;) acc = acc * x + Rational(poly[i]);
  return acc;
}

Integer eval_homogeneous(const std::vector<Integer>& poly, const Integer& p, const Integer& q) {
  // F(p, q) = sum_i c_i p^i q^(d-i)
  const size_t d = poly.size() - 1;
  Integer acc(0);
  Integer ppow(1);
  std::vector<Integer> pp(d + 1);
  for (size_t i = 0; i <= d; ++i) {
    pp[i] = ppow;
    ppow *= p;
  }
  Integer qpow(1);
  for (size_t i = d + 1; i-- > 0;) {
    acc += poly[i] * pp[i] * qpow;
    qpow *= q;
  }
  return acc;
}

// Radical of |n| with budgeted factorization; nullopt when incomplete.
std::optional<Integer> radical(const Integer& n, uint64_t budget) {
  Integer a = n < 0 ? Integer(-n) : n;
  if (a == 0) return std::nullopt;
  if (a == 1) return Integer(1);
  auto f = numtheory::factor(a, budget);
  if (!f.complete()) return std::nullopt;
  Integer r(1);
  for (const auto& [p, e] : f.factors) r *= p;
  return r;
}

}  // namespace

std::string AbcReport::to_csv() const {
  std::ostringstream out;
  out << "m,p_digits,q_digits,F_abs,bound,rad_ratio,skipped,bound_ok\n";
  for (const auto& r : rows) {
    out << r.m << "," << mpz_sizeinbase(r.p.get_mpz_t(), 10) << ","
        << mpz_sizeinbase(r.q.get_mpz_t(), 10) << "," << r.F_abs << "," << r.bound << ","
        << r.rad_ratio << "," << (r.skipped ? 1 : 0) << "," << (r.bound_ok ? 1 : 0) << "\n";
  }
  return out.str();
}

AbcReport abc_corollary_check(const std::vector<Integer>& poly, const Rational& lo,
                              const Rational& hi, int depth) {
  if (poly.size() < 3) throw std::invalid_argument("abc check: polynomial degree >= 2");
  if (poly.back() == 0) throw std::invalid_argument("abc check: leading coefficient zero");
  if (depth < 1) throw std::invalid_argument("abc check: depth >= 1");
  const size_t d = poly.size() - 1;

  Rational flo = eval_poly(poly, lo);
  Rational fhi = eval_poly(poly, hi);
  if (flo == 0 || fhi == 0 || (flo < 0) == (fhi < 0))
    throw std::invalid_argument("abc check: [lo, hi] must strictly isolate a root (sign change)");

  // Mean-value constant: C = 2 * sum |i c_i| M^(i-1) >= 2 * max |f'| on [lo, hi].
  Rational M = std::max(lo < 0 ? -lo : lo, hi < 0 ? -hi : hi);
  Rational deriv_bound(0);
  Rational mp(1);
  for (size_t i = 1; i <= d; ++i) {
    Integer ci = poly[i] < 0 ? Integer(-poly[i]) : poly[i];
    deriv_bound += Rational(Integer(static_cast<long>(i)) * ci) * mp;
    mp *= M;
  }
  Rational C = 2 * deriv_bound;

  // Bisect (exact rational arithmetic) until the interval certifies depth+1
  // quotients.
  Rational a = lo, b = hi;
  Rational fa = flo;
  std::vector<Integer> quot;
  for (int rounds = 0; rounds < 64 && quot.size() < static_cast<size_t>(depth) + 2; ++rounds) {
    for (int i = 0; i < 64; ++i) {
      Rational mid = (a + b) / 2;
      Rational fm = eval_poly(poly, mid);
      if (fm == 0) throw std::invalid_argument("abc check: root is rational");
      if ((fm < 0) == (fa < 0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    quot = contfrac::cf_common_prefix(a, b, static_cast<size_t>(depth) + 2);
  }
  if (quot.size() < static_cast<size_t>(depth) + 1)
    throw std::runtime_error("abc check: could not certify enough convergents");

  AbcReport rep;
  rep.poly = poly;
  rep.C = C;

  Integer pm2(1), qm2(0), pm1(0), qm1(1);
  for (size_t m = 0; m < std::min(quot.size(), static_cast<size_t>(depth) + 1); ++m) {
    Integer p, q;
    if (m == 0) {
      p = quot[0];
      q = 1;
      pm2 = 1;
      qm2 = 0;
    } else {
      p = quot[m] * pm1 + pm2;
      q = quot[m] * qm1 + qm2;
      pm2 = pm1;
      qm2 = qm1;
    }
    pm1 = p;
    qm1 = q;
    if (m == 0) continue;  // q = 1 rows are degenerate for the q^(d-2) bound

    AbcRow row;
    row.m = static_cast<int>(m);
    row.p = p;
    row.q = q;
    Integer F = eval_homogeneous(poly, p, q);
    row.F_abs = F < 0 ? Integer(-F) : F;
    // |F| <= C q^(d-2), exact comparison.
    Integer qd(1);
    for (size_t i = 0; i < d - 2; ++i) qd *= q;
    row.bound = to_double(C * Rational(qd));
    row.bound_ok = Rational(row.F_abs) <= C * Rational(qd);
    auto rad = radical(p * q * row.F_abs, 5000000);
    if (!rad) {
      row.skipped = true;
    } else {
      row.rad_ratio =
          log_integer(*rad) / ((static_cast<double>(d) - 0.1) * log_integer(q));
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace spacinglab::metric
