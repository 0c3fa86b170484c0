// Point counts and exponential sums on the mod-q curves cut out by
//   b x_i^2 - b x_{i+1}^2 = a_i (mod q),   i = 1..m-1,   q an odd prime.
//
// The count nu is computed fiberwise over x_1 in O(q m): each coordinate
// x_i (i >= 2) satisfies x_i^2 = x_1^2 - (a_1 + ... + a_{i-1}) b^{-1}, a
// quadratic with 1 + chi(c) roots (chi the quadratic character, chi(0) = 0
// counting the double root once).
//
// r_eff counts the distinct shifts y_i solving y_i - y_{i+1} = a_i; it equals
// m exactly when q does not divide D = prod_{i<j} sigma_ij, where sigma_ij =
// a_i + ... + a_{j-1} is formed over the integer lifts of the a_k into
// (-q/2, q/2].
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "spacinglab/rational.hpp"

namespace spacinglab::ffcurves {

struct CurveSpec {
  int64_t q = 3;               // odd prime
  int64_t b = 1;               // 0 < b < q
  std::vector<int64_t> a;      // m-1 residues
  int m = 2;
};

struct CurveCount {
  int64_t nu = 0;
  int r_eff = 1;      // in [1, m]
  Integer D{0};       // product of sigma_ij over integer lifts
  int64_t B = 0;      // nu - 2^{m - r_eff} * q
};

// Quadratic character by Euler's criterion; chi(0) = 0.
int legendre(int64_t x, int64_t q);

// One square root of x mod q when chi(x) >= 0 (Tonelli-Shanks).
int64_t sqrt_mod(int64_t x, int64_t q);

// Lift a residue to the representative in (-q/2, q/2].
int64_t lift_centered(int64_t x, int64_t q);

std::pair<int, Integer> r_eff_and_D(std::span<const int64_t> a, int64_t q);

// sigma_ij = sum of lifted a_k, k in [i, j); returned indexed [i-1][j-i-1]
// for 1 <= i < j <= m.
std::vector<std::vector<Integer>> sigma_roots(std::span<const int64_t> a, int64_t q);

CurveCount nu_points(const CurveSpec& spec);

// Exhaustive O(q^m) oracle (tests and small q only).
int64_t nu_points_exhaustive(const CurveSpec& spec);

// Exact sum of e(-r.y/q) over the points y of the curve.
std::complex<double> curve_exp_sum(const CurveSpec& spec, std::span<const int64_t> r);

// F_N(r) = sum_{x=1..N} e(r x / q), closed form.
std::complex<double> geometric_sum_F(int64_t N, int64_t r, int64_t q);

}  // namespace spacinglab::ffcurves
