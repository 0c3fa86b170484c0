// Exact arbitrary-precision number types shared by every module.
//
// Integer  = GMP mpz_class.
// Rational = GMP mpq_class, always kept canonical (lowest terms, den > 0).
#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

namespace spacinglab {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(const Integer& num, const Integer& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Integer floor_to_integer(const Rational& x) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return q;
}

// x - floor(x), in [0,1).
inline Rational fractional_part(const Rational& x) {
  Rational f = x - Rational(floor_to_integer(x));
  return f;
}

inline double to_double(const Rational& x) { return mpq_get_d(x.get_mpq_t()); }

// Smallest double known to be >= x (for certified upper rounding of bounds).
inline double upper_double(const Rational& x) {
  double d = mpq_get_d(x.get_mpq_t());  // rounds toward zero
  while (Rational(d) < x) d = std::nextafter(d, std::numeric_limits<double>::infinity());
  return d;
}

// Natural log of a positive Integer, stable for thousands of digits.
inline double log_integer(const Integer& v) {
  signed long exp2;
  double d = mpz_get_d_2exp(&exp2, v.get_mpz_t());
  return std::log(d) + static_cast<double>(exp2) * std::numbers::ln2_v<double>;
}

inline bool fits_int64(const Integer& v) {
  return v.fits_slong_p() || (sizeof(long) == 8 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 63);
}

inline int64_t to_int64(const Integer& v) { return static_cast<int64_t>(mpz_get_si(v.get_mpz_t())); }

}  // namespace spacinglab
