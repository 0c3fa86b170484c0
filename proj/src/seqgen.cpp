#include "spacinglab/seqgen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spacinglab::seqgen {

namespace {

using u64 = uint64_t;
using u128 = unsigned __int128;

// numerators of {b n^2 / q} for n = 1..N
std::vector<Integer> square_multiples_mod(const Integer& b, const Integer& q, int64_t N) {
  std::vector<Integer> out;
  out.reserve(static_cast<size_t>(N));
  Integer bm = b % q;
  if (bm < 0) bm += q;
  if (q.fits_ulong_p() && bm.fits_ulong_p() && q.get_ui() < (1ull << 62)) {
    const u64 qq = q.get_ui();
    const u64 bb = bm.get_ui();
    for (int64_t n = 1; n <= N; ++n) {
      u64 nm = static_cast<u64>(n) % qq;
      u64 n2 = static_cast<u64>(u128(nm) * nm % qq);
      u64 r = static_cast<u64>(u128(bb) * n2 % qq);
      out.emplace_back(static_cast<unsigned long>(r));
    }
  } else {
    for (int64_t n = 1; n <= N; ++n) {
      Integer nn(static_cast<long>(n));
      Integer r = bm * ((nn * nn) % q) % q;
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace

Rational FracSequence::value(int64_t n) const {
  if (n < 1 || n > count) throw std::out_of_range("FracSequence::value: index");
  return make_rational(numerators[static_cast<size_t>(n - 1)], den);
}

FracSequence make_sequence(Integer den, std::vector<Integer> numerators, std::string source) {
  FracSequence s;
  if (den < 1) throw std::invalid_argument("make_sequence: den >= 1");
  for (const Integer& v : numerators)
    if (v < 0 || v >= den) throw std::invalid_argument("make_sequence: numerator out of [0, den)");
  s.count = static_cast<int64_t>(numerators.size());
  s.den = std::move(den);
  s.numerators = std::move(numerators);
  s.source_text = std::move(source);
  return s;
}

FracSequence generate(const contfrac::AlphaSpec& alpha, int64_t N,
                      const Rational& target_scaled_error) {
  if (N < 1) throw std::invalid_argument("generate: N >= 1");
  if (N > 100000000) throw std::invalid_argument("generate: N above the in-memory limit 10^8");
  if (target_scaled_error <= 0) throw std::invalid_argument("generate: target must be positive");
  FracSequence s;
  s.count = N;
  s.source_text = alpha.text();

  if (alpha.is_rational()) {
    const Rational& x = std::get<contfrac::AlphaSpec::RationalAlpha>(alpha.v).value;
    s.den = x.get_den();
    s.numerators = square_multiples_mod(x.get_num(), x.get_den(), N);
    s.scaled_error = 0;
    return s;
  }

  // Find the first convergent with N^3/(q_M q_{M+1}) <= target, i.e.
  // q_M q_{M+1} * target_num >= N^3 * target_den.
  Integer n3 = Integer(static_cast<long>(N));
  n3 = n3 * n3 * n3;
  Integer need_lhs = n3 * target_scaled_error.get_den();
  auto gen = alpha.make_generator();
  std::vector<contfrac::Convergent> conv;
  Integer pm2(1), qm2(0), pm1(0), qm1(1);
  size_t m = 0;
  std::optional<size_t> chosen;
  while (true) {
    auto a = gen->next();
    if (!a) break;
    Integer p, q;
    if (m == 0) {
      p = *a;
      q = 1;
      pm2 = 1;
      qm2 = 0;
    } else {
      p = *a * pm1 + pm2;
      q = *a * qm1 + qm2;
      pm2 = pm1;
      qm2 = qm1;
    }
    pm1 = p;
    qm1 = q;
    conv.push_back({p, q});
    if (m >= 1) {
      const Integer& qM = conv[m - 1].q;
      const Integer& qM1 = conv[m].q;
      if (qM * qM1 * target_scaled_error.get_num() >= need_lhs) {
        chosen = m - 1;
        break;
      }
    }
    ++m;
  }
  if (!chosen) {
    std::ostringstream msg;
    msg << "generate: expansion of " << alpha.text() << " exhausted before reaching "
        << "q_M*q_{M+1} >= " << (n3 * target_scaled_error.get_den()) << "/"
        << target_scaled_error.get_num() << " (deepest product ";
    if (conv.size() >= 2)
      msg << conv[conv.size() - 2].q * conv[conv.size() - 1].q;
    else
      msg << "none";
    msg << ")";
    throw std::runtime_error(msg.str());
  }
  const Integer& qM = conv[*chosen].q;
  const Integer& qM1 = conv[*chosen + 1].q;
  s.den = qM;
  s.numerators = square_multiples_mod(conv[*chosen].p, qM, N);
  s.scaled_error = make_rational(n3, qM * qM1);
  s.convergent_index = *chosen;
  return s;
}

FracSequence generate_with_convergent(const contfrac::AlphaSpec& alpha, int64_t N, size_t M) {
  if (N < 1) throw std::invalid_argument("generate_with_convergent: N >= 1");
  contfrac::ContinuedFraction cf = contfrac::expand(alpha, M + 1);
  if (cf.convergents.size() <= M + 1)
    throw std::invalid_argument("generate_with_convergent: expansion too short for M=" +
                                std::to_string(M));
  FracSequence s;
  s.count = N;
  s.source_text = alpha.text();
  const Integer& qM = cf.convergents[M].q;
  s.den = qM;
  s.numerators = square_multiples_mod(cf.convergents[M].p, qM, N);
  Integer n3 = Integer(static_cast<long>(N));
  n3 = n3 * n3 * n3;
  s.scaled_error = make_rational(n3, qM * cf.convergents[M + 1].q);
  s.convergent_index = M;
  return s;
}

Rational scaled_distance_exact(const FracSequence& a, const FracSequence& b) {
  if (a.count != b.count) throw std::invalid_argument("scaled_distance: length mismatch");
  const Integer D = a.den * b.den;
  Integer best(0);
  for (size_t i = 0; i < a.numerators.size(); ++i) {
    Integer d = a.numerators[i] * b.den - b.numerators[i] * a.den;
    if (d < 0) d = -d;
    Integer wrapped = D - d;
    if (wrapped < d) d = std::move(wrapped);
    if (d > best) best = d;
  }
  return make_rational(Integer(static_cast<long>(a.count)) * best, D);
}

double scaled_distance(const FracSequence& a, const FracSequence& b) {
  return upper_double(scaled_distance_exact(a, b));
}

MajorantSpec build_majorant(double rho, double sup_deriv) {
  if (!(rho > 0)) throw std::invalid_argument("build_majorant: rho must be positive");
  if (sup_deriv < 0) throw std::invalid_argument("build_majorant: sup_deriv must be >= 0");
  return MajorantSpec{rho, sup_deriv, sup_deriv};
}

double bump_value(double x, double rho) {
  double t = x / rho;
  double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t2));
}

double bump_sup_deriv(double rho) {
  // sup |g'| for rho = 1, found once by dense scan + local refinement.
  static const double kSup1 = [] {
    double best = 0;
    auto deriv = [](double x) {
      double t2 = x * x;
      if (t2 >= 1.0) return 0.0;
      double u = 1.0 - t2;
      return std::abs(std::exp(1.0 - 1.0 / u) * (-2.0 * x / (u * u)));
    };
    double bx = 0;
    for (int i = 0; i <= 100000; ++i) {
      double x = i / 100000.0;
      double d = deriv(x);
      if (d > best) {
        best = d;
        bx = x;
      }
    }
    for (double step = 1e-5; step > 1e-12; step /= 2) {
      if (deriv(bx + step) > best) {
        bx += step;
        best = deriv(bx);
      } else if (deriv(bx - step) > best) {
        bx -= step;
        best = deriv(bx);
      }
    }
    return best;
  }();
  return kSup1 / rho * 1.01;  // 1% safety factor
}

}  // namespace spacinglab::seqgen
