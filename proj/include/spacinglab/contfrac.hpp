// Arbitrary-precision continued fractions: expansion, convergents,
// certified approximation error enclosures, diophantine-type estimation.
//
// Conventions.  A continued fraction [a0; a1, a2, ...] has integer a0 and
// a_m >= 1 for m >= 1.  Convergents p_m/q_m follow
//   p_m = a_m p_{m-1} + p_{m-2},   q_m = a_m q_{m-1} + q_{m-2}
// with seeds p_{-1}=1, p_0=a0, q_{-1}=0, q_0=1, and satisfy
//   p_m q_{m-1} - p_{m-1} q_m = (-1)^{m-1}.
// For irrational targets the error is enclosed two-sided:
//   1/(2 q_m q_{m+1}) < |alpha - p_m/q_m| < 1/(q_m q_{m+1}).
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spacinglab/rational.hpp"

namespace spacinglab::contfrac {

struct Convergent {
  Integer p;
  Integer q;
  Rational value() const { return make_rational(p, q); }
};

struct ContinuedFraction {
  std::vector<Integer> quotients;       // a_0, a_1, ..., a_M
  std::vector<Convergent> convergents;  // same length as quotients
  bool exact_terminated = false;        // finite expansion of a rational, complete

  size_t depth() const { return quotients.size(); }
};

// Lazily pulls partial quotients; nullopt means the expansion is finite and
// exhausted (rational alpha or a fixed finite quotient list).
class QuotientGenerator {
 public:
  virtual ~QuotientGenerator() = default;
  virtual std::optional<Integer> next() = 0;
};

// The ways an alpha can be specified.  CLI grammar:
//   rat:<num>/<den>          exact rational
//   cf:[a0;a1,a2,...]        finite quotient list
//   pcf:[pre|period]         eventually periodic quotients, e.g. pcf:[1|2]
//   gen:<name>(k=v,...)      named generator (see constructions module)
struct AlphaSpec {
  struct RationalAlpha {
    Rational value;
  };
  struct ExplicitCf {
    std::vector<Integer> quotients;
  };
  struct PeriodicCf {
    std::vector<Integer> preperiod;
    std::vector<Integer> period;  // nonempty
  };
  struct GeneratedCf {
    std::string name;
    std::map<std::string, std::string> params;
  };

  std::variant<RationalAlpha, ExplicitCf, PeriodicCf, GeneratedCf> v;

  static AlphaSpec rational(const Rational& x) { return AlphaSpec{RationalAlpha{x}}; }
  static AlphaSpec explicit_cf(std::vector<Integer> a) { return AlphaSpec{ExplicitCf{std::move(a)}}; }
  static AlphaSpec periodic_cf(std::vector<Integer> pre, std::vector<Integer> per) {
    return AlphaSpec{PeriodicCf{std::move(pre), std::move(per)}};
  }
  static AlphaSpec generated(std::string name, std::map<std::string, std::string> params = {}) {
    return AlphaSpec{GeneratedCf{std::move(name), std::move(params)}};
  }

  static AlphaSpec parse(const std::string& text);
  std::string text() const;

  bool is_rational() const { return std::holds_alternative<RationalAlpha>(v); }
  // Rational and ExplicitCf expansions are finite; the others extend forever.
  bool is_finite() const {
    return is_rational() || std::holds_alternative<ExplicitCf>(v);
  }
  std::unique_ptr<QuotientGenerator> make_generator() const;
};

// Diophantine-type estimate from finitely many convergents: for every
// convergent with a successor, |alpha - p_m/q_m| >= c_hat * q_m^(-k_hat).
// k_hat is read off at the deepest available index (a finite-depth estimate
// of the limiting exponent); c_hat is then the largest constant, capped at
// 1/2, for which the certified lower error bounds validate the inequality at
// every available index.
struct TypeEstimate {
  double k_hat = 0;
  double c_hat = 0;
  int depth = 0;  // number of convergents used
};

// Expand alpha.  Irrational-style specs yield M+1 quotients a_0..a_M; a
// rational (or finite-list) alpha terminates at its exact finite expansion,
// possibly earlier.
ContinuedFraction expand(const AlphaSpec& alpha, size_t M);

// Certified enclosure (1/(2 q_m q_{m+1}), 1/(q_m q_{m+1})) of |alpha - p_m/q_m|.
// Requires the (m+1)-st convergent; throws "need one more convergent" otherwise.
std::pair<Rational, Rational> approx_error_bounds(const ContinuedFraction& cf, size_t m);

TypeEstimate estimate_type(const ContinuedFraction& cf);

// Bottom-up exact evaluation of a finite quotient list (test oracle for the
// convergent recursion).
Rational evaluate_finite_cf(std::span<const Integer> a);

// Euclid expansion of an exact rational (canonical form, last quotient >= 2
// unless the expansion has a single term).
std::vector<Integer> cf_of_rational(const Rational& x);

// Parse "[a0;a1,a2,...]" into a quotient list (also accepts a bare "[a0]").
std::vector<Integer> parse_quotient_list(const std::string& text);

// Quotients certified to be shared by every real in [lo, hi]; stops early
// when the enclosure can no longer decide the next quotient.  Used for
// dyadic-interval proxies of sampled reals and for algebraic roots.
std::vector<Integer> cf_common_prefix(const Rational& lo, const Rational& hi, size_t max_terms);

}  // namespace spacinglab::contfrac
