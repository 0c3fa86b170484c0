#include "spacinglab/constructions.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "spacinglab/numtheory.hpp"

namespace spacinglab::constructions {

namespace {

Integer floor_ln(const Integer& v) {
  // v >= 1; floor of the natural log.  Convergent v's double in digit count
  // every step, so the log never sits at an integer boundary here; still,
  // nudge across the representable gap to be safe.
  double l = log_integer(v);
  auto f = static_cast<long>(std::floor(l + 1e-12));
  return Integer(f);
}

void append_convergent(std::vector<contfrac::Convergent>& conv, const Integer& a) {
  if (conv.empty()) {
    conv.push_back({a, Integer(1)});
  } else if (conv.size() == 1) {
    conv.push_back({a * conv[0].p + 1, a});
  } else {
    const auto& c1 = conv[conv.size() - 1];
    const auto& c2 = conv[conv.size() - 2];
    conv.push_back({a * c1.p + c2.p, a * c1.q + c2.q});
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// thm2a
// ---------------------------------------------------------------------------

Thm2aState thm2a_init() {
  Thm2aState st;
  st.r = {Integer(0), Integer(1), Integer(1)};  // r_{-1}, r_0, r_1
  st.v = {Integer(0), Integer(1), Integer(1)};  // v_{-1}, v_0, v_1
  st.quotients = {Integer(1), Integer(1)};      // a_0 = 1, a_1 = r_0^2 v_0^2 + 2 r_0 v_{-1} = 1
  append_convergent(st.convergents, st.quotients[0]);
  append_convergent(st.convergents, st.quotients[1]);
  return st;
}

Thm2aState thm2a_extend(Thm2aState st, size_t steps) {
  if (st.quotients.empty()) st = thm2a_init();
  for (size_t s = 0; s < steps; ++s) {
    const long m = st.max_index();  // emit a_{m+1}
    const Integer& rm = st.r_at(m);
    const Integer& vm = st.v_at(m);
    const Integer& vm1 = st.v_at(m - 1);
    Integer a_next = rm * rm * vm * vm + 2 * rm * vm1;
    Integer v_next = rm * vm * vm + vm1;
    st.quotients.push_back(a_next);
    append_convergent(st.convergents, a_next);
    st.v.push_back(v_next);
    st.r.push_back(v_next == 1 ? Integer(1) : std::max(Integer(1), floor_ln(v_next)));
    if (st.convergents.back().q != v_next * v_next)
      throw std::logic_error("thm2a: q_m != v_m^2 at m=" + std::to_string(m + 1));
  }
  return st;
}

// ---------------------------------------------------------------------------
// thm2b
// ---------------------------------------------------------------------------

Thm2bState thm2b_init(const Rational& sigma, std::vector<Integer> seed) {
  if (sigma <= Rational(23, 8)) throw std::invalid_argument("thm2b: sigma must exceed 23/8");
  if (seed.size() < 2) throw std::invalid_argument("thm2b: seed needs at least two quotients");
  Thm2bState st;
  st.sigma = sigma;
  st.seed_len = seed.size();
  for (const Integer& a : seed) {
    st.quotients.push_back(a);
    append_convergent(st.convergents, a);
  }
  return st;
}

Thm2bState thm2b_extend(Thm2bState st, size_t steps) {
  using numtheory::invmod;
  using numtheory::iroot_ceil;
  using numtheory::smallest_prime_in_range;
  // exponent (sigma-2)/2 as an exact fraction
  Rational expo = (st.sigma - 2) / 2;
  for (size_t s = 0; s < steps; ++s) {
    const Integer& q1 = st.convergents[st.convergents.size() - 1].q;  // q_{m-1}
    const Integer& q2 = st.convergents[st.convergents.size() - 2].q;  // q_{m-2}
    // L = ceil(q_{m-1} ^ ((sigma-2)/2)), evaluated exactly via integer roots.
    Integer pow;
    mpz_pow_ui(pow.get_mpz_t(), q1.get_mpz_t(), expo.get_num().get_ui());
    Integer L = iroot_ceil(pow, static_cast<unsigned>(expo.get_den().get_ui()));
    if (L < 2) L = 2;
    Integer lo = L, hi = 2 * L;
    auto ell = smallest_prime_in_range(lo, hi, q1);
    while (!ell) {
      std::cerr << "[thm2b] no admissible prime in [" << lo << ", " << hi
                << "]; doubling the interval\n";
      lo = hi + 1;
      hi = 2 * hi;
      ell = smallest_prime_in_range(lo, hi, q1);
    }
    Integer ell2 = (*ell) * (*ell);
    // unique t in [ell^2, 2 ell^2) with t q_{m-1} + q_{m-2} == 0 mod ell^2
    Integer t0 = (-q2 * invmod(q1, ell2)) % ell2;
    if (t0 < 0) t0 += ell2;
    Integer a = t0 + ell2;
    st.quotients.push_back(a);
    append_convergent(st.convergents, a);
    const Integer& qm = st.convergents.back().q;
    if (qm % ell2 != 0) throw std::logic_error("thm2b: ell^2 does not divide q_m");
    st.steps.push_back(Thm2bStep{*ell, a, qm / ell2, qm});
  }
  return st;
}

// ---------------------------------------------------------------------------
// thm1primes
// ---------------------------------------------------------------------------

namespace {

// Smallest a >= q_last^2 with a*q_last + q_prev prime; throws after the scan cap.
Integer next_prime_quotient(const Integer& q_last, const Integer& q_prev) {
  Integer a = q_last * q_last;
  if (a < 1) a = 1;
  Integer candidate = a * q_last + q_prev;
  for (int64_t tries = 0; tries < 1000000; ++tries) {
    if (numtheory::is_probable_prime(candidate)) return a;
    a += 1;
    candidate += q_last;
  }
  throw std::runtime_error("thm1primes: no prime denominator within 10^6 candidates");
}

}  // namespace

std::vector<contfrac::Convergent> thm1_prime_denominators(const std::vector<Integer>& seed,
                                                          size_t count) {
  if (seed.size() < 2) throw std::invalid_argument("thm1primes: seed needs at least two quotients");
  std::vector<contfrac::Convergent> conv;
  for (const Integer& a : seed) append_convergent(conv, a);
  std::vector<contfrac::Convergent> out;
  for (size_t j = 0; j < count; ++j) {
    Integer a = next_prime_quotient(conv[conv.size() - 1].q, conv[conv.size() - 2].q);
    append_convergent(conv, a);
    out.push_back(conv.back());
  }
  return out;
}

// ---------------------------------------------------------------------------
// thm4
// ---------------------------------------------------------------------------

Thm4Config thm4_config(const Integer& q, int64_t N, int m, double delta) {
  if (q < 2 || N < 2 || m < 2) throw std::invalid_argument("thm4_config: need q,N >= 2, m >= 2");
  Thm4Config cfg;
  cfg.q = q;
  cfg.N = N;
  cfg.m = m;
  cfg.delta = delta;
  const double lnN = std::log(static_cast<double>(N));
  const double x = std::pow(static_cast<double>(N), 3.0) * lnN * lnN * lnN /
                   mpz_get_d(q.get_mpz_t());
  if (x < 4.0)
    throw std::invalid_argument("thm4_config: interval [sqrt(x), 2 sqrt(x)] too small (x = " +
                                std::to_string(x) + "); increase N or decrease q");
  const double sx = std::sqrt(x);
  Integer lo(static_cast<unsigned long>(std::ceil(sx)));
  Integer hi(static_cast<unsigned long>(std::floor(2.0 * sx)));
  Integer v = lo;
  while (v <= hi) {
    Integer g;
    mpz_gcd(g.get_mpz_t(), v.get_mpz_t(), q.get_mpz_t());
    if (g == 1) break;
    v += 1;
  }
  if (v > hi)
    throw std::runtime_error("thm4_config: no v coprime to q in [" + lo.get_str() + ", " +
                             hi.get_str() + "]");
  cfg.v = v;
  cfg.q_prime = v * v;
  cfg.b = numtheory::invmod(cfg.q_prime, q);  // in (0, q)
  cfg.b_prime = (cfg.b * cfg.q_prime - 1) / q;
  if (cfg.b * cfg.q_prime - cfg.b_prime * q != 1)
    throw std::logic_error("thm4_config: Bezout identity failed");
  if (cfg.b_prime <= 0 || cfg.b_prime >= cfg.q_prime)
    throw std::runtime_error("thm4_config: degenerate b' (v too small)");
  return cfg;
}

// ---------------------------------------------------------------------------
// gen: factory
// ---------------------------------------------------------------------------

namespace {

class Thm2aGenerator : public contfrac::QuotientGenerator {
 public:
  Thm2aGenerator() : st_(thm2a_init()) {}
  std::optional<Integer> next() override {
    if (cursor_ >= st_.quotients.size()) st_ = thm2a_extend(std::move(st_), 4);
    return st_.quotients[cursor_++];
  }

 private:
  Thm2aState st_;
  size_t cursor_ = 0;
};

class Thm2bGenerator : public contfrac::QuotientGenerator {
 public:
  Thm2bGenerator(const Rational& sigma, std::vector<Integer> seed)
      : st_(thm2b_init(sigma, std::move(seed))) {}
  std::optional<Integer> next() override {
    if (cursor_ >= st_.quotients.size()) st_ = thm2b_extend(std::move(st_), 2);
    return st_.quotients[cursor_++];
  }

 private:
  Thm2bState st_;
  size_t cursor_ = 0;
};

class Thm1PrimesGenerator : public contfrac::QuotientGenerator {
 public:
  explicit Thm1PrimesGenerator(std::vector<Integer> seed) : quotients_(std::move(seed)) {
    if (quotients_.size() < 2)
      throw std::invalid_argument("thm1primes: seed needs at least two quotients");
    for (const Integer& a : quotients_) append_convergent(conv_, a);
  }
  std::optional<Integer> next() override {
    if (cursor_ >= quotients_.size()) {
      Integer a = next_prime_quotient(conv_[conv_.size() - 1].q, conv_[conv_.size() - 2].q);
      quotients_.push_back(a);
      append_convergent(conv_, a);
    }
    return quotients_[cursor_++];
  }

 private:
  std::vector<Integer> quotients_;
  std::vector<contfrac::Convergent> conv_;
  size_t cursor_ = 0;
};

}  // namespace

std::unique_ptr<contfrac::QuotientGenerator> make_named_generator(
    const std::string& name, const std::map<std::string, std::string>& params) {
  if (name == "thm2a") return std::make_unique<Thm2aGenerator>();
  if (name == "thm2b") {
    auto it = params.find("sigma");
    if (it == params.end()) throw std::invalid_argument("gen:thm2b requires sigma=<rational>");
    Rational sigma(it->second);
    sigma.canonicalize();
    std::vector<Integer> seed = {Integer(0), Integer(2)};
    if (auto s = params.find("seed"); s != params.end())
      seed = contfrac::parse_quotient_list(s->second);
    return std::make_unique<Thm2bGenerator>(sigma, std::move(seed));
  }
  if (name == "thm1primes") {
    auto it = params.find("seed");
    if (it == params.end()) throw std::invalid_argument("gen:thm1primes requires seed=[a0;a1]");
    return std::make_unique<Thm1PrimesGenerator>(contfrac::parse_quotient_list(it->second));
  }
  throw std::invalid_argument("unknown generator '" + name + "'");
}

}  // namespace spacinglab::constructions
