#include "spacinglab/stats.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace spacinglab::stats {

const char* to_string(Mode m) { return m == Mode::line ? "line" : "circle"; }
const char* to_string(TupleConvention c) {
  return c == TupleConvention::index_ordered ? "i3" : "distinct";
}

// ---------------------------------------------------------------------------
// TestFunction
// ---------------------------------------------------------------------------

TestFunction TestFunction::box_indicator(int m, BoxWindow box) {
  if (m < 2) throw std::invalid_argument("TestFunction: m >= 2");
  if (box.lo.size() != static_cast<size_t>(m - 1) || box.hi.size() != box.lo.size())
    throw std::invalid_argument("TestFunction: box needs m-1 interval pairs");
  TestFunction f;
  f.m = m;
  f.kind = Kind::box;
  f.box = std::move(box);
  return f;
}

TestFunction TestFunction::box_uniform(int m, const Rational& lo, const Rational& hi) {
  BoxWindow b;
  b.lo.assign(static_cast<size_t>(m - 1), lo);
  b.hi.assign(static_cast<size_t>(m - 1), hi);
  return box_indicator(m, std::move(b));
}

TestFunction TestFunction::smooth_bump(int m, double rho) {
  if (m < 2) throw std::invalid_argument("TestFunction: m >= 2");
  if (!(rho > 0)) throw std::invalid_argument("TestFunction: rho > 0");
  TestFunction f;
  f.m = m;
  f.kind = Kind::smooth;
  f.rho = rho;
  return f;
}

TestFunction TestFunction::plateau_majorant(int m, const seqgen::MajorantSpec& spec) {
  Rational r2(2 * spec.rho);  // exact double -> rational
  TestFunction f = box_uniform(m, -r2, r2);
  f.amplitude = Rational(spec.plateau) * (m == 2 ? 2 : 1);
  return f;
}

Rational TestFunction::support_radius() const {
  if (kind == Kind::smooth) return Rational(rho);
  Rational r(0);
  for (size_t i = 0; i < box.dims(); ++i) {
    Rational lo = box.lo[i] < 0 ? Rational(-box.lo[i]) : box.lo[i];
    Rational hi = box.hi[i] < 0 ? Rational(-box.hi[i]) : box.hi[i];
    r = std::max(r, std::max(lo, hi));
  }
  return r;
}

bool TestFunction::contains_zero() const {
  if (kind == Kind::smooth) return true;  // g(0) = 1
  if (amplitude == 0) return false;
  for (size_t i = 0; i < box.dims(); ++i)
    if (box.lo[i] > 0 || box.hi[i] < 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// SortedPoints
// ---------------------------------------------------------------------------

Rational SortedPoints::value(size_t i) const { return make_rational(numerator(i), den); }

Integer SortedPoints::numerator(size_t i) const {
  if (fits64) return Integer(static_cast<long>(nums64.at(i)));
  return numsBig.at(i);
}

SortedPoints sort_points(Integer den, std::vector<Integer> numerators) {
  SortedPoints p;
  p.count = static_cast<int64_t>(numerators.size());
  p.den = std::move(den);
  p.fits64 = mpz_sizeinbase(p.den.get_mpz_t(), 2) <= 61;
  if (p.fits64) {
    p.nums64.reserve(numerators.size());
    for (const Integer& v : numerators) p.nums64.push_back(mpz_get_si(v.get_mpz_t()));
    std::stable_sort(p.nums64.begin(), p.nums64.end());
  } else {
    p.numsBig = std::move(numerators);
    std::stable_sort(p.numsBig.begin(), p.numsBig.end());
  }
  return p;
}

SortedPoints sort_points(const seqgen::FracSequence& seq) {
  return sort_points(seq.den, seq.numerators);
}

// ---------------------------------------------------------------------------
// Spacing measures, Poisson CDF, KS distance
// ---------------------------------------------------------------------------

double poisson_spacing_cdf(int k, double x) {
  if (k < 0) throw std::invalid_argument("poisson_spacing_cdf: k >= 0");
  if (!(x > 0)) return 0.0;
  long double lx = x;
  if (lx > 11000.0L) return 1.0;
  long double term = 1.0L, sum = 1.0L;
  for (int i = 1; i <= k; ++i) {
    term *= lx / i;
    sum += term;
  }
  long double v = 1.0L - std::exp(-lx) * sum;
  if (v < 0) v = 0;
  if (v > 1) v = 1;
  return static_cast<double>(v);
}

double ks_distance_sorted(std::span<const double> s, int k) {
  if (s.empty()) throw std::invalid_argument("ks_distance: need at least one sample");
  const double n = static_cast<double>(s.size());
  double d = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    double f = poisson_spacing_cdf(k, s[i]);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::abs(static_cast<double>(i) / n - f));
  }
  return d;
}

double ks_distance(const SpacingHistogram& hist) {
  return ks_distance_sorted(hist.samples, hist.k - 1);
}

SpacingHistogram spacing_measure(const SortedPoints& pts, int k, int bins) {
  const int64_t n = pts.count;
  if (k < 1 || k >= n) throw std::invalid_argument("spacing_measure: need 1 <= k < N");
  SpacingHistogram h;
  h.k = k;
  h.count = n;
  h.samples.reserve(static_cast<size_t>(n));
  const double nd = static_cast<double>(n);

  // Circular gaps beta_{j+k} - beta_j; their raw sum must be exactly k.
  if (pts.fits64) {
    const auto& v = pts.nums64;
    const int64_t den = v.empty() ? 1 : static_cast<int64_t>(mpz_get_si(pts.den.get_mpz_t()));
    Integer sum(0);
    for (int64_t j = 0; j < n; ++j) {
      int64_t jk = j + k;
      int64_t gap = jk < n ? v[jk] - v[j] : v[jk - n] + den - v[j];
      sum += gap;
      h.samples.push_back(nd * static_cast<double>(gap) / static_cast<double>(den));
    }
    if (sum != Integer(static_cast<long>(k)) * pts.den)
      throw std::logic_error("spacing_measure: circular mean identity failed");
  } else {
    Integer sum(0);
    const double dend = mpz_get_d(pts.den.get_mpz_t());
    for (int64_t j = 0; j < n; ++j) {
      int64_t jk = j + k;
      Integer gap =
          jk < n ? Integer(pts.numsBig[jk] - pts.numsBig[j])
                 : Integer(pts.numsBig[jk - n] + pts.den - pts.numsBig[j]);
      sum += gap;
      h.samples.push_back(nd * mpz_get_d(gap.get_mpz_t()) / dend);
    }
    if (sum != Integer(static_cast<long>(k)) * pts.den)
      throw std::logic_error("spacing_measure: circular mean identity failed");
  }
  std::sort(h.samples.begin(), h.samples.end());

  const double hi_edge = 6.0 + k;
  h.bin_edges.resize(static_cast<size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.bin_edges[i] = hi_edge * i / bins;
  h.bin_counts.assign(static_cast<size_t>(bins), 0);
  for (double s : h.samples) {
    auto b = static_cast<int64_t>(std::floor(s / hi_edge * bins));
    if (b >= bins)
      ++h.overflow;
    else
      ++h.bin_counts[static_cast<size_t>(std::max<int64_t>(b, 0))];
  }
  // The k-th spacing of i.i.d. uniforms is a sum of k unit-mean gaps, so its
  // limit law is Gamma(k): CDF order k-1 in the poisson_spacing_cdf indexing.
  h.ks_to_poisson = ks_distance_sorted(h.samples, k - 1);
  return h;
}

// ---------------------------------------------------------------------------
// Correlations
// ---------------------------------------------------------------------------

namespace {

using i128 = __int128;

struct Tr64 {
  using Val = int64_t;
  using Wide = i128;
  static Wide widen(Val v) { return v; }
};

struct TrBig {
  using Val = Integer;
  using Wide = Integer;
  static const Wide& widen(const Val& v) { return v; }
};

template <class T>
struct BoxDims {
  typename T::Wide A;  // lo_num * den
  typename T::Val ld;  // lo_den
  typename T::Wide B;  // hi_num * den
  typename T::Val hd;  // hi_den
};

// Sorted values (numerators over den), optionally extended by +den copies of
// the leading run for circle-mode windows.
template <class T>
struct ValStore {
  int m = 2;
  int64_t N = 0;
  bool circle = false;
  typename T::Val den{};
  std::vector<typename T::Val> vals;
  size_t n_orig = 0;
  bool infinite_window = true;
  typename T::Val window{};  // numerator units, valid when !infinite_window

  typename T::Val diff(size_t a, size_t b) const {  // vals[a] - vals[b], wrapped if circle
    typename T::Val d = vals[a] - vals[b];
    if (circle) {
      while (2 * d > den) d -= den;
      while (2 * d <= -den) d += den;
    }
    return d;
  }
};

template <class T>
struct BoxEngine {
  static constexpr bool kExact = true;
  ValStore<T> store;
  std::vector<BoxDims<T>> dims;

  bool arrangement_ok(const size_t* combo, const int8_t* perm) const {
    for (int i = 0; i + 1 < store.m; ++i) {
      typename T::Val d = store.diff(combo[perm[i]], combo[perm[i + 1]]);
      typename T::Wide t = T::widen(store.N) * T::widen(d);
      const auto& dim = dims[static_cast<size_t>(i)];
      if (t * T::widen(dim.ld) < dim.A) return false;
      if (t * T::widen(dim.hd) > dim.B) return false;
    }
    return true;
  }
};

template <class T>
struct SmoothEngine {
  static constexpr bool kExact = false;
  ValStore<T> store;
  double rho = 1;
  double den_d = 1;

  double arrangement_value(const size_t* combo, const int8_t* perm) const {
    double prod = 1;
    for (int i = 0; i + 1 < store.m; ++i) {
      typename T::Val d = store.diff(combo[perm[i]], combo[perm[i + 1]]);
      double t;
      if constexpr (std::is_same_v<T, Tr64>) {
        t = static_cast<double>(store.N) * static_cast<double>(d) / den_d;
      } else {
        t = to_double(make_rational(Integer(store.N) * d, store.den));
      }
      prod *= seqgen::bump_value(t, rho);
      if (prod == 0) return 0;
    }
    return prod;
  }
};

std::vector<std::array<int8_t, 8>> all_perms(int m) {
  std::array<int8_t, 8> base{};
  for (int i = 0; i < m; ++i) base[static_cast<size_t>(i)] = static_cast<int8_t>(i);
  std::vector<std::array<int8_t, 8>> out;
  std::vector<int8_t> idx(base.begin(), base.begin() + m);
  do {
    std::array<int8_t, 8> p{};
    std::copy(idx.begin(), idx.end(), p.begin());
    out.push_back(p);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return out;
}

double approx_binomial(double occ, int pick) {
  double c = 1;
  for (int i = 0; i < pick; ++i) c *= std::max(occ - i, 0.0) / (i + 1);
  return c;
}

// Window end per anchor (two-pointer); hi[j] = last extended index with
// val <= val[j] + W.  With an infinite window this is just the last original.
template <class T>
std::vector<size_t> window_ends(const ValStore<T>& st) {
  std::vector<size_t> hi(st.n_orig);
  if (st.infinite_window) {
    std::fill(hi.begin(), hi.end(), st.n_orig - 1);
    return hi;
  }
  size_t h = 0;
  for (size_t j = 0; j < st.n_orig; ++j) {
    if (h < j) h = j;
    while (h + 1 < st.vals.size() && st.vals[h + 1] - st.vals[j] <= st.window) ++h;
    hi[j] = h;
  }
  return hi;
}

struct TupleCounts {
  Integer matched{0};   // box
  double smooth_sum = 0;  // smooth
};

template <class Engine>
void enumerate_tuples(const Engine& eng, const std::vector<size_t>& hi, TupleConvention conv,
                      const std::vector<std::array<int8_t, 8>>& perms, TupleCounts& out) {
  const int m = eng.store.m;
  std::array<size_t, 8> combo{};
  const double inv_mfact = 1.0 / static_cast<double>(perms.size());

  auto eval_combo = [&]() {
    if constexpr (Engine::kExact) {
      if (conv == TupleConvention::index_ordered) {
        for (const auto& p : perms)
          if (eng.arrangement_ok(combo.data(), p.data())) {
            out.matched += 1;
            break;
          }
      } else {
        long q = 0;
        for (const auto& p : perms)
          if (eng.arrangement_ok(combo.data(), p.data())) ++q;
        out.matched += q;
      }
    } else {
      double acc = 0;
      for (const auto& p : perms) acc += eng.arrangement_value(combo.data(), p.data());
      out.smooth_sum += (conv == TupleConvention::index_ordered) ? acc * inv_mfact : acc;
    }
  };

  auto rec = [&](auto&& self, int level, size_t start, size_t stop) -> void {
    if (level == m) {
      eval_combo();
      return;
    }
    for (size_t p = start; p + static_cast<size_t>(m - 1 - level) <= stop; ++p) {
      combo[static_cast<size_t>(level)] = p;
      self(self, level + 1, p + 1, stop);
    }
  };

  for (size_t j = 0; j < eng.store.n_orig; ++j) {
    combo[0] = j;
    if (hi[j] < j + static_cast<size_t>(m - 1)) continue;
    rec(rec, 1, j + 1, hi[j]);
  }
}

// Exact-tie clusters (runs of equal original values); the certified lower
// bound used when the enumeration work cap is hit.
template <class T>
void tie_lower_bound(const ValStore<T>& st, bool f_contains_zero, double f_at_zero_smooth,
                     bool exact, TupleConvention conv, TupleCounts& out) {
  if (!f_contains_zero) return;
  const int m = st.m;
  size_t i = 0;
  while (i < st.n_orig) {
    size_t j = i;
    while (j + 1 < st.n_orig && st.vals[j + 1] == st.vals[i]) ++j;
    const int64_t z = static_cast<int64_t>(j - i + 1);
    if (z >= m) {
      Integer contrib(1);
      if (conv == TupleConvention::index_ordered) {
        // C(z, m)
        for (int t = 0; t < m; ++t) contrib *= Integer(static_cast<long>(z - t));
        for (int t = 2; t <= m; ++t) contrib /= t;
      } else {
        for (int t = 0; t < m; ++t) contrib *= Integer(static_cast<long>(z - t));
      }
      if (exact)
        out.matched += contrib;
      else
        out.smooth_sum += mpz_get_d(contrib.get_mpz_t()) * f_at_zero_smooth;
    }
    i = j + 1;
  }
}

struct Plan {
  bool use64 = false;
  Integer window_num;  // numerator window width (ceil), or infinite
  bool infinite = false;
};

bool box_fits64(const TestFunction& f) {
  if (f.kind != TestFunction::Kind::box) return true;
  for (size_t i = 0; i < f.box.dims(); ++i) {
    for (const Rational* r : {&f.box.lo[i], &f.box.hi[i]}) {
      if (mpz_sizeinbase(r->get_num().get_mpz_t(), 2) > 31) return false;
      if (mpz_sizeinbase(r->get_den().get_mpz_t(), 2) > 31) return false;
    }
  }
  return true;
}

template <class T>
ValStore<T> build_store(const SortedPoints& pts, int m, Mode mode, const Plan& plan);

template <>
ValStore<Tr64> build_store<Tr64>(const SortedPoints& pts, int m, Mode mode, const Plan& plan) {
  ValStore<Tr64> st;
  st.m = m;
  st.N = pts.count;
  st.circle = mode == Mode::circle;
  st.den = mpz_get_si(pts.den.get_mpz_t());
  st.vals = pts.nums64;
  st.n_orig = st.vals.size();
  st.infinite_window = plan.infinite;
  if (!plan.infinite) {
    st.window = mpz_get_si(plan.window_num.get_mpz_t());
    if (st.circle && st.n_orig > 0) {
      const int64_t last = st.vals.back();
      for (size_t i = 0; i < st.n_orig; ++i) {
        if (st.vals[i] + st.den <= last + st.window)
          st.vals.push_back(st.vals[i] + st.den);
        else
          break;
      }
    }
  }
  return st;
}

template <>
ValStore<TrBig> build_store<TrBig>(const SortedPoints& pts, int m, Mode mode, const Plan& plan) {
  ValStore<TrBig> st;
  st.m = m;
  st.N = pts.count;
  st.circle = mode == Mode::circle;
  st.den = pts.den;
  if (pts.fits64) {
    st.vals.reserve(pts.nums64.size());
    for (int64_t v : pts.nums64) st.vals.emplace_back(static_cast<long>(v));
  } else {
    st.vals = pts.numsBig;
  }
  st.n_orig = st.vals.size();
  st.infinite_window = plan.infinite;
  if (!plan.infinite) {
    st.window = plan.window_num;
    if (st.circle && st.n_orig > 0) {
      const Integer last = st.vals.back();
      for (size_t i = 0; i < st.n_orig; ++i) {
        if (st.vals[i] + st.den <= last + st.window)
          st.vals.push_back(st.vals[i] + st.den);
        else
          break;
      }
    }
  }
  return st;
}

template <class T>
std::vector<BoxDims<T>> build_dims(const TestFunction& f, const typename T::Val& den);

template <>
std::vector<BoxDims<Tr64>> build_dims<Tr64>(const TestFunction& f, const int64_t& den) {
  std::vector<BoxDims<Tr64>> dims;
  for (size_t i = 0; i < f.box.dims(); ++i) {
    BoxDims<Tr64> d;
    d.ld = mpz_get_si(f.box.lo[i].get_den().get_mpz_t());
    d.hd = mpz_get_si(f.box.hi[i].get_den().get_mpz_t());
    d.A = i128(mpz_get_si(f.box.lo[i].get_num().get_mpz_t())) * den;
    d.B = i128(mpz_get_si(f.box.hi[i].get_num().get_mpz_t())) * den;
    dims.push_back(d);
  }
  return dims;
}

template <>
std::vector<BoxDims<TrBig>> build_dims<TrBig>(const TestFunction& f, const Integer& den) {
  std::vector<BoxDims<TrBig>> dims;
  for (size_t i = 0; i < f.box.dims(); ++i) {
    BoxDims<TrBig> d;
    d.ld = f.box.lo[i].get_den();
    d.hd = f.box.hi[i].get_den();
    d.A = f.box.lo[i].get_num() * den;
    d.B = f.box.hi[i].get_num() * den;
    dims.push_back(d);
  }
  return dims;
}

template <class T>
CorrelationResult correlate_with_traits(const SortedPoints& pts, const TestFunction& f, Mode mode,
                                        TupleConvention conv, const Plan& plan, uint64_t work_cap,
                                        bool throw_on_cap, double error_budget) {
  CorrelationResult res;
  res.m = f.m;
  res.count = pts.count;
  res.mode = mode;
  res.convention = conv;
  res.exact = f.exact();
  res.reference = poisson_reference(f, conv);
  res.error_budget = error_budget;
  if (pts.count < f.m) {
    res.value = 0;
    return res;
  }

  ValStore<T> store = build_store<T>(pts, f.m, mode, plan);
  auto hi = window_ends(store);

  // Work estimate: combinations per window times m!.
  double mfact = 1;
  for (int i = 2; i <= f.m; ++i) mfact *= i;
  double est = 0;
  for (size_t j = 0; j < store.n_orig; ++j)
    est += approx_binomial(static_cast<double>(hi[j] - j), f.m - 1);
  est *= mfact;
  const bool capped = est > static_cast<double>(work_cap);
  if (capped && throw_on_cap)
    throw std::runtime_error(
        "correlation_bruteforce: N exceeds the brute-force cap; use correlation_fast");

  TupleCounts counts;
  auto perms = all_perms(f.m);
  if (capped) {
    const bool is_box = f.kind == TestFunction::Kind::box;
    tie_lower_bound(store, is_box ? f.contains_zero() : true, 1.0, is_box, conv, counts);
    res.lower_bound = true;
  } else if (f.kind == TestFunction::Kind::box) {
    BoxEngine<T> eng;
    eng.dims = build_dims<T>(f, store.den);
    eng.store = std::move(store);
    enumerate_tuples(eng, hi, conv, perms, counts);
  } else {
    SmoothEngine<T> eng;
    eng.rho = f.rho;
    eng.den_d = mpz_get_d(Integer(store.den).get_mpz_t());
    eng.store = std::move(store);
    enumerate_tuples(eng, hi, conv, perms, counts);
  }

  if (f.kind == TestFunction::Kind::box) {
    res.matched = counts.matched;
    res.value_exact = f.amplitude * make_rational(counts.matched, Integer(static_cast<long>(pts.count)));
    res.value = to_double(res.value_exact);
  } else {
    res.exact = false;
    res.value = counts.smooth_sum / static_cast<double>(pts.count);
  }
  return res;
}

CorrelationResult correlate(const SortedPoints& pts, const TestFunction& f, Mode mode,
                            TupleConvention conv, const Plan& plan, uint64_t work_cap,
                            bool throw_on_cap, double error_budget) {
  const bool can64 = pts.fits64 && pts.count <= (int64_t(1) << 31) && box_fits64(f);
  if (can64)
    return correlate_with_traits<Tr64>(pts, f, mode, conv, plan, work_cap, throw_on_cap,
                                       error_budget);
  return correlate_with_traits<TrBig>(pts, f, mode, conv, plan, work_cap, throw_on_cap,
                                      error_budget);
}

}  // namespace

CorrelationResult correlation_bruteforce(const SortedPoints& pts, const TestFunction& f, Mode mode,
                                         TupleConvention conv, int64_t cap_override,
                                         double error_budget) {
  int64_t cap = cap_override > 0 ? cap_override : (f.m <= 3 ? 500 : 80);
  if (pts.count > cap)
    throw std::runtime_error("correlation_bruteforce: N=" + std::to_string(pts.count) +
                             " exceeds cap " + std::to_string(cap) + "; use correlation_fast");
  Plan plan;
  plan.infinite = true;
  return correlate(pts, f, mode, conv, plan, UINT64_MAX, true, error_budget);
}

CorrelationResult correlation_fast(const SortedPoints& pts, const TestFunction& f, Mode mode,
                                   TupleConvention conv, uint64_t work_cap, double error_budget) {
  Plan plan;
  // Window of width m * R_s / N (in numerator units, rounded up).
  Rational rs = f.support_radius();
  Integer wnum = f.m * rs.get_num() * pts.den;
  Integer wden = rs.get_den() * Integer(static_cast<long>(pts.count));
  Integer W;
  mpz_cdiv_q(W.get_mpz_t(), wnum.get_mpz_t(), wden.get_mpz_t());
  // Circle windows must stay below half a turn for the wrap bookkeeping to
  // count each tuple exactly once; oversized windows degenerate to the full
  // enumeration either way.
  if ((mode == Mode::circle && 2 * W >= pts.den) || W >= pts.den) {
    plan.infinite = true;
  } else {
    plan.infinite = false;
    plan.window_num = W;
  }
  return correlate(pts, f, mode, conv, plan, work_cap, false, error_budget);
}

// ---------------------------------------------------------------------------
// Poisson references
// ---------------------------------------------------------------------------

namespace {

double adaptive_simpson(double a, double b, double fa, double fm, double fb, double whole,
                        double eps, int depth, const std::function<double(double)>& g) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = g(lm), frm = g(rm);
  double left = (m - a) / 6 * (fa + 4 * flm + fm);
  double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15 * eps)
    return left + right + (left + right - whole) / 15;
  return adaptive_simpson(a, m, fa, flm, fm, left, eps / 2, depth - 1, g) +
         adaptive_simpson(m, b, fm, frm, fb, right, eps / 2, depth - 1, g);
}

double integrate(const std::function<double(double)>& g, double a, double b, double eps) {
  double m = 0.5 * (a + b);
  double fa = g(a), fm = g(m), fb = g(b);
  double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return adaptive_simpson(a, b, fa, fm, fb, whole, eps, 40, g);
}

}  // namespace

double poisson_reference(const TestFunction& f, TupleConvention conv) {
  const int m = f.m;
  if (f.kind == TestFunction::Kind::smooth) {
    double half = integrate([&](double x) { return seqgen::bump_value(x, f.rho); }, 0, f.rho, 1e-9);
    double full = 2 * half;
    double vol = std::pow(full, m - 1);
    if (conv == TupleConvention::distinct_ordered) return vol;
    double mfact = 1;
    for (int i = 2; i <= m; ++i) mfact *= i;
    return vol / mfact;
  }

  const double amp = to_double(f.amplitude);
  if (conv == TupleConvention::distinct_ordered) {
    Rational vol(1);
    for (size_t i = 0; i < f.box.dims(); ++i) {
      Rational len = f.box.hi[i] - f.box.lo[i];
      if (len < 0) return 0;
      vol *= len;
    }
    return amp * to_double(vol);
  }

  // index_ordered: volume of difference vectors reachable from an ascending
  // tuple under some arrangement.
  if (m == 2) {
    // { t >= 0 : t in [lo,hi] or -t in [lo,hi] }
    const Rational &lo = f.box.lo[0], &hi = f.box.hi[0];
    if (hi < lo) return 0;
    auto clamp0 = [](const Rational& x) { return x < 0 ? Rational(0) : x; };
    Rational a1 = clamp0(lo), b1 = clamp0(hi);
    Rational a2 = clamp0(-hi), b2 = clamp0(-lo);
    Rational len = (b1 - a1) + (b2 - a2);
    Rational il = std::max(a1, a2), ih = std::min(b1, b2);
    if (ih > il) len -= ih - il;
    return amp * to_double(len);
  }
  // With every lower edge >= 0 only the descending arrangement can qualify
  // and the volume is the plain box volume.  For boxes dipping below 0 the
  // lower edges are clamped, which keeps the descending representative and
  // makes the constant a lower bound on the symmetrized volume.
  Rational vol(1);
  for (size_t i = 0; i < f.box.dims(); ++i) {
    Rational lo = f.box.lo[i] < 0 ? Rational(0) : f.box.lo[i];
    Rational len = f.box.hi[i] - lo;
    if (len < 0) return 0;
    vol *= len;
  }
  return amp * to_double(vol);
}

}  // namespace spacinglab::stats
