// Fractional-part sequences {alpha n^2}, n = 1..N, with a certified scaled
// error bound, plus the scaled distance between sequence families and the
// plateau-majorant construction used by comparison arguments.
//
// Precision contract: for irrational alpha the first convergent p_M/q_M with
// N^3/(q_M q_{M+1}) <= target is substituted, and the values {p_M n^2 / q_M}
// are exact rationals over the common denominator q_M.  Then
//   N * |{alpha n^2} - {p_M n^2/q_M}| <= N * n^2 * |alpha - p_M/q_M|
//                                     <= N^3 / (q_M q_{M+1}),
// which is the recorded scaled_error.  Rational alphas are exact
// (scaled_error = 0).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spacinglab/contfrac.hpp"
#include "spacinglab/rational.hpp"

namespace spacinglab::seqgen {

struct FracSequence {
  int64_t count = 0;                // N
  Integer den{1};                   // common denominator of every value
  std::vector<Integer> numerators;  // x_n = numerators[n-1] / den, in [0, den)
  Rational scaled_error{0};         // certified bound on N * max_n |x_n - x_n^true|
  std::string source_text;
  std::optional<size_t> convergent_index;  // M when a convergent was substituted

  Rational value(int64_t n) const;  // 1-based
};

// Default target for the certified scaled error.
inline Rational default_target_scaled_error() { return Rational(1, 1000000); }

FracSequence generate(const contfrac::AlphaSpec& alpha, int64_t N,
                      const Rational& target_scaled_error = default_target_scaled_error());

// Force substitution of the convergent with index M (used by the divergence
// experiments to select a specific square denominator).
FracSequence generate_with_convergent(const contfrac::AlphaSpec& alpha, int64_t N, size_t M);

// Wrap explicitly given numerators (testing and perturbation experiments).
FracSequence make_sequence(Integer den, std::vector<Integer> numerators, std::string source = "");

// N * max_n dist(x_n, x'_n), exact, with dist the circle metric on R/Z
// (values live mod 1, so a pair straddling 0 is close, not ~1 apart).
Rational scaled_distance_exact(const FracSequence& a, const FracSequence& b);
// Same, rounded up to the nearest representable double.
double scaled_distance(const FracSequence& a, const FracSequence& b);

// Plateau majorant: g_plus >= 0, constant on [-2 rho, 2 rho] where it equals
// sup|g'|; the induced pair majorant is f_plus(x1, x2) = 2 g_plus(x1 - x2),
// and for m >= 3 a plateau box over consecutive differences.
struct MajorantSpec {
  double rho = 0;
  double sup_deriv = 0;
  double plateau = 0;  // == sup_deriv
};

MajorantSpec build_majorant(double rho, double sup_deriv);

// Smooth bump profile g(x) = e * exp(-1/(1-(x/rho)^2)) on (-rho, rho), so
// g(0) = 1; and the cached sup|g'| with a 1% safety factor.
double bump_value(double x, double rho);
double bump_sup_deriv(double rho);

}  // namespace spacinglab::seqgen
