// Local spacing statistics: consecutive spacing measures, m-level
// correlations, Poisson references and Kolmogorov-Smirnov distances.
//
// Definitions.  Points beta_1 <= ... <= beta_N in [0,1) (circularly extended
// by beta_{N+j} = 1 + beta_j).
//
//   spacing measure, order k:  the N scaled gaps N(beta_{j+k} - beta_j),
//     whose mean is exactly k in the circular convention.
//
//   m-level correlation:  (1/N) * sum over m-tuples of f(N(beta_{j_1}, ...,
//     beta_{j_m})), where f depends only on consecutive differences.
//
// Two tuple conventions are implemented and cross-tested:
//   index_ordered    sums over index combinations j_1 < ... < j_m; box test
//                    functions are evaluated symmetrized (a tuple counts if
//                    ANY arrangement puts its difference vector in the box),
//                    smooth ones as the average over arrangements.
//   distinct_ordered sums over ordered tuples of distinct indices and
//                    evaluates the difference vector literally.
//
// Two difference modes:
//   line    raw differences of the scaled values;
//   circle  each consecutive difference is replaced by its representative in
//           (-1/2, 1/2] before scaling.
//
// For i.i.d. uniform points the correlations converge to Vol(I) under
// distinct_ordered and to the corresponding symmetrized volume under
// index_ordered; poisson_reference() returns the right constant per
// convention.
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "spacinglab/rational.hpp"
#include "spacinglab/seqgen.hpp"

namespace spacinglab::stats {

enum class Mode { line, circle };
enum class TupleConvention { index_ordered, distinct_ordered };

const char* to_string(Mode m);
const char* to_string(TupleConvention c);

// Product box over the m-1 consecutive-difference coordinates.
struct BoxWindow {
  std::vector<Rational> lo, hi;
  size_t dims() const { return lo.size(); }
};

struct TestFunction {
  enum class Kind { box, smooth };

  int m = 2;
  Kind kind = Kind::box;
  BoxWindow box;          // box: f = amplitude * 1_box(differences)
  Rational amplitude{1};  // box scaling (plateau majorants)
  double rho = 0;         // smooth: bump radius of g, f = prod g(diffs)

  static TestFunction box_indicator(int m, BoxWindow box);
  // Interval [lo, hi] applied to every consecutive difference.
  static TestFunction box_uniform(int m, const Rational& lo, const Rational& hi);
  static TestFunction smooth_bump(int m, double rho);
  // Plateau majorant from a MajorantSpec: support [-2 rho, 2 rho] per
  // difference; amplitude 2*plateau for m = 2 (pair form 2 g_+(x1-x2)),
  // plateau for m >= 3.
  static TestFunction plateau_majorant(int m, const seqgen::MajorantSpec& spec);

  Rational support_radius() const;  // f = 0 when max_i |x_i - x_{i+1}| > R_s
  bool exact() const { return kind == Kind::box; }
  bool contains_zero() const;  // f(0, ..., 0) != 0
};

// Sorted exact points over a common denominator.
struct SortedPoints {
  int64_t count = 0;
  Integer den{1};
  bool fits64 = false;
  std::vector<int64_t> nums64;   // when fits64
  std::vector<Integer> numsBig;  // otherwise

  Rational value(size_t i) const;
  Integer numerator(size_t i) const;
};

SortedPoints sort_points(const seqgen::FracSequence& seq);
SortedPoints sort_points(Integer den, std::vector<Integer> numerators);

struct SpacingHistogram {
  int k = 1;
  int64_t count = 0;            // N (= number of samples)
  std::vector<double> samples;  // scaled gaps, sorted ascending
  std::vector<double> bin_edges;
  std::vector<int64_t> bin_counts;  // one per [edge_i, edge_{i+1})
  int64_t overflow = 0;             // samples beyond the last edge
  double ks_to_poisson = 0;
};

// Circular k-th spacing measure; asserts the exact mean-k identity.  The
// ks_to_poisson field compares against the k-th spacing's limit law for
// i.i.d. uniforms, Gamma(k) (a sum of k unit-mean exponential gaps), which
// is poisson_spacing_cdf at order k-1.
SpacingHistogram spacing_measure(const SortedPoints& pts, int k, int bins = 60);

// CDF of the density x^order e^{-x} / order! dx, i.e. the regularized lower
// incomplete gamma P(order+1, x); 0 for x < 0.  order = 0 is 1 - e^{-x}.
double poisson_spacing_cdf(int order, double x);

// sup |empirical CDF - Poisson CDF(order)| over the sample points.
double ks_distance(const SpacingHistogram& hist);  // order = hist.k - 1
double ks_distance_sorted(std::span<const double> sorted_samples, int order);

struct CorrelationResult {
  int m = 2;
  int64_t count = 0;  // N
  Mode mode = Mode::line;
  TupleConvention convention = TupleConvention::index_ordered;
  bool exact = false;       // box path: value_exact is meaningful
  Rational value_exact{0};  // amplitude * matched / N
  Integer matched{0};       // raw tuple count (box path)
  double value = 0;         // double view of the correlation value
  double reference = 0;     // Poisson limit for this f and convention
  bool lower_bound = false;  // work cap hit: value is a certified lower bound
  double error_budget = 0;   // scaled-error carried from sequence generation
};

// Literal evaluation of the correlation sum.  Caps (default 500 for m = 2,3
// and 80 for m >= 4) protect against accidental O(N^m) blowups; beyond them
// an exception points at correlation_fast.
CorrelationResult correlation_bruteforce(const SortedPoints& pts, const TestFunction& f, Mode mode,
                                         TupleConvention conv, int64_t cap_override = 0,
                                         double error_budget = 0);

// Windowed evaluation: identical value to brute force (exactly for boxes,
// <= 1e-10 relative for smooth).  If the enumeration work estimate exceeds
// work_cap, returns the certified lower bound contributed by exact ties with
// lower_bound = true.
CorrelationResult correlation_fast(const SortedPoints& pts, const TestFunction& f, Mode mode,
                                   TupleConvention conv, uint64_t work_cap = 200000000ull,
                                   double error_budget = 0);

double poisson_reference(const TestFunction& f, TupleConvention conv);

}  // namespace spacinglab::stats
