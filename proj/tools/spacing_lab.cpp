// spacing-lab: local spacing statistics of {n^2 alpha} and {b n^2 / q},
// special-alpha constructions, finite-field curve scans, and square-free
// kernel reports, each as a reproducible subcommand with machine-readable
// output.
//
// Exit codes: 0 = pass, 1 = tolerance failure, 2 = precondition failure.

#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "spacinglab/config.hpp"
#include "spacinglab/constructions.hpp"
#include "spacinglab/contfrac.hpp"
#include "spacinglab/ffcurves.hpp"
#include "spacinglab/metric.hpp"
#include "spacinglab/numtheory.hpp"
#include "spacinglab/seqgen.hpp"
#include "spacinglab/stats.hpp"

using json = nlohmann::ordered_json;
using namespace spacinglab;

#ifndef SPACINGLAB_GIT_HASH
#define SPACINGLAB_GIT_HASH "unknown"
#endif

namespace {

constexpr int kExitPass = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitPrecondition = 2;

struct GlobalOpts {
  std::string config_path;
  uint64_t seed = 0;
  std::string out_dir;
  bool json_out = false;
  bool csv_out = false;
  std::string mode;        // "", "line", "circle"
  std::string convention;  // "", "i3", "distinct"
  config::KeyValueConfig cfg;
};

stats::Mode mode_or(const GlobalOpts& g, stats::Mode fallback) {
  if (g.mode == "line") return stats::Mode::line;
  if (g.mode == "circle") return stats::Mode::circle;
  return fallback;
}

stats::TupleConvention convention_or(const GlobalOpts& g, stats::TupleConvention fallback) {
  if (g.convention == "i3") return stats::TupleConvention::index_ordered;
  if (g.convention == "distinct") return stats::TupleConvention::distinct_ordered;
  return fallback;
}

json provenance(const GlobalOpts& g) {
  json p;
  p["git"] = SPACINGLAB_GIT_HASH;
  p["gmp"] = gmp_version;
  p["compiler"] = __VERSION__;
  p["seed"] = g.seed;
  json cfg = json::object();
  for (const auto& [k, v] : g.cfg.entries()) cfg[k] = v;
  p["config"] = cfg;
  return p;
}

void emit(const GlobalOpts& g, const std::string& name, const json& result,
          const std::string& csv = "") {
  json doc;
  doc["command"] = name;
  doc["provenance"] = provenance(g);
  doc["result"] = result;
  if (g.json_out) {
    std::cout << doc.dump(2) << "\n";
  } else if (g.csv_out && !csv.empty()) {
    std::cout << csv;
  } else {
    std::cout << "== " << name << " ==\n";
    for (auto& [k, v] : result.items()) std::cout << "  " << k << ": " << v.dump() << "\n";
  }
  if (!g.out_dir.empty()) {
    std::filesystem::create_directories(g.out_dir);
    std::ofstream jf(g.out_dir + "/" + name + ".json");
    jf << doc.dump(2) << "\n";
    if (!csv.empty()) {
      std::ofstream cfile(g.out_dir + "/" + name + ".csv");
      cfile << csv;
    }
  }
}

// Rational from "a/b", integer, or decimal literal.
Rational parse_rational(const std::string& s) {
  if (s.find('/') != std::string::npos) {
    Rational r(s);
    r.canonicalize();
    if (r.get_den() <= 0) throw std::invalid_argument("rational: bad denominator in " + s);
    return r;
  }
  size_t dot = s.find('.');
  if (dot == std::string::npos) return Rational(Integer(s));
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  size_t frac_len = s.size() - dot - 1;
  Integer num(digits);
  Integer den(1);
  for (size_t i = 0; i < frac_len; ++i) den *= 10;
  return make_rational(num, den);
}

// "lo1,hi1;lo2,hi2;..." -> box over m-1 difference coordinates; a single
// interval is broadcast across all coordinates.
stats::BoxWindow parse_box(const std::string& s, int m) {
  stats::BoxWindow box;
  std::istringstream in(s);
  std::string dim;
  while (std::getline(in, dim, ';')) {
    size_t comma = dim.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("box: expected lo,hi pairs");
    box.lo.push_back(parse_rational(dim.substr(0, comma)));
    box.hi.push_back(parse_rational(dim.substr(comma + 1)));
  }
  while (box.lo.size() == 1 && box.lo.size() < static_cast<size_t>(m - 1)) {
    box.lo.push_back(box.lo[0]);
    box.hi.push_back(box.hi[0]);
  }
  if (box.lo.size() != static_cast<size_t>(m - 1))
    throw std::invalid_argument("box: need m-1 intervals");
  return box;
}

json correlation_json(const stats::CorrelationResult& r) {
  json j;
  j["m"] = r.m;
  j["N"] = r.count;
  j["mode"] = stats::to_string(r.mode);
  j["convention"] = stats::to_string(r.convention);
  j["value"] = r.value;
  if (r.exact) j["value_exact"] = r.value_exact.get_str();
  j["reference"] = r.reference;
  j["abs_error"] = std::abs(r.value - r.reference);
  j["error_budget"] = r.error_budget;
  j["lower_bound"] = r.lower_bound;
  return j;
}

uint64_t work_cap(const GlobalOpts& g) {
  return static_cast<uint64_t>(g.cfg.get_int("corr.work_cap", 200000000));
}

// ---------------------------------------------------------------------------
// cf
// ---------------------------------------------------------------------------

int cmd_cf(const GlobalOpts& g, const std::string& alpha_text, int64_t depth, bool with_type,
           int64_t bounds_at) {
  auto alpha = contfrac::AlphaSpec::parse(alpha_text);
  auto cf = contfrac::expand(alpha, static_cast<size_t>(depth));
  json r;
  r["alpha"] = alpha.text();
  json quot = json::array(), conv = json::array();
  for (size_t m = 0; m < cf.depth(); ++m) {
    quot.push_back(cf.quotients[m].get_str());
    conv.push_back({{"p", cf.convergents[m].p.get_str()}, {"q", cf.convergents[m].q.get_str()}});
  }
  r["quotients"] = quot;
  r["convergents"] = conv;
  r["exact_terminated"] = cf.exact_terminated;
  if (with_type && cf.convergents.size() >= 3) {
    auto t = contfrac::estimate_type(cf);
    r["type_estimate"] = {{"k_hat", t.k_hat}, {"c_hat", t.c_hat}, {"depth", t.depth}};
  }
  if (bounds_at >= 0) {
    auto [lo, hi] = contfrac::approx_error_bounds(cf, static_cast<size_t>(bounds_at));
    r["error_bounds"] = {{"m", bounds_at}, {"lower", lo.get_str()}, {"upper", hi.get_str()}};
  }
  emit(g, "cf", r);
  return kExitPass;
}

// ---------------------------------------------------------------------------
// seq
// ---------------------------------------------------------------------------

int cmd_seq(const GlobalOpts& g, const std::string& alpha_text, int64_t N, bool f64) {
  auto alpha = contfrac::AlphaSpec::parse(alpha_text);
  Rational target = parse_rational(g.cfg.get_or("seq.target_scaled_error", "1/1000000"));
  auto s = seqgen::generate(alpha, N, target);
  std::ostringstream csv;
  if (f64) {
    csv << "n,value_f64\n";
    for (int64_t n = 1; n <= N; ++n) csv << n << "," << to_double(s.value(n)) << "\n";
  } else {
    csv << "n,value_num,value_den\n";
    for (int64_t n = 1; n <= N; ++n)
      csv << n << "," << s.numerators[static_cast<size_t>(n - 1)].get_str() << ","
          << s.den.get_str() << "\n";
  }
  json r;
  r["alpha"] = alpha.text();
  r["N"] = N;
  r["den"] = s.den.get_str();
  r["scaled_error"] = to_double(s.scaled_error);
  if (s.convergent_index) r["convergent_index"] = *s.convergent_index;
  emit(g, "seq", r, csv.str());
  return kExitPass;
}

// ---------------------------------------------------------------------------
// spacing
// ---------------------------------------------------------------------------

int cmd_spacing(const GlobalOpts& g, const std::string& alpha_text, int64_t N, int k, int bins) {
  auto alpha = contfrac::AlphaSpec::parse(alpha_text);
  Rational target = parse_rational(g.cfg.get_or("seq.target_scaled_error", "1/1000000"));
  auto s = seqgen::generate(alpha, N, target);
  auto pts = stats::sort_points(s);
  auto h = stats::spacing_measure(pts, k, bins);
  std::ostringstream csv;
  csv << "bin_lo,bin_hi,count,poisson_mass\n";
  for (size_t i = 0; i < h.bin_counts.size(); ++i) {
    double mass = stats::poisson_spacing_cdf(k - 1, h.bin_edges[i + 1]) -
                  stats::poisson_spacing_cdf(k - 1, h.bin_edges[i]);
    csv << h.bin_edges[i] << "," << h.bin_edges[i + 1] << "," << h.bin_counts[i] << "," << mass
        << "\n";
  }
  json r;
  r["alpha"] = alpha.text();
  r["N"] = N;
  r["k"] = k;
  r["ks_to_poisson"] = h.ks_to_poisson;
  r["overflow"] = h.overflow;
  r["scaled_error"] = to_double(s.scaled_error);
  emit(g, "spacing", r, csv.str());
  return kExitPass;
}

// ---------------------------------------------------------------------------
// corr
// ---------------------------------------------------------------------------

int cmd_corr(const GlobalOpts& g, const std::string& alpha_text, int64_t N, int m,
             const std::string& box_text, double smooth_rho, bool brute) {
  auto alpha = contfrac::AlphaSpec::parse(alpha_text);
  Rational target = parse_rational(g.cfg.get_or("seq.target_scaled_error", "1/1000000"));
  auto s = seqgen::generate(alpha, N, target);
  auto pts = stats::sort_points(s);
  stats::TestFunction f = smooth_rho > 0
                              ? stats::TestFunction::smooth_bump(m, smooth_rho)
                              : stats::TestFunction::box_indicator(m, parse_box(box_text, m));
  auto mode = mode_or(g, stats::Mode::line);
  auto conv = convention_or(g, stats::TupleConvention::index_ordered);
  stats::CorrelationResult r =
      brute ? stats::correlation_bruteforce(pts, f, mode, conv, 0, to_double(s.scaled_error))
            : stats::correlation_fast(pts, f, mode, conv, work_cap(g), to_double(s.scaled_error));
  emit(g, "corr", correlation_json(r));
  return kExitPass;
}

// ---------------------------------------------------------------------------
// thm3: R^(m)(N, b/q, I) -> Vol(I) for prime q
// ---------------------------------------------------------------------------

int cmd_thm3(const GlobalOpts& g, int64_t q, int64_t b, int64_t N, int m,
             const std::string& box_text) {
  if (!numtheory::is_prime_u64(static_cast<uint64_t>(q))) {
    std::cerr << "thm3: q = " << q << " is composite; this experiment requires a prime modulus\n";
    return kExitPrecondition;
  }
  if (std::gcd(b, q) != 1) {
    std::cerr << "thm3: gcd(b, q) != 1\n";
    return kExitPrecondition;
  }
  const double qd = static_cast<double>(q);
  const double lo_range = std::pow(qd, 1.0 - 1.0 / (2.0 * m));
  const double hi_range = qd / std::log(qd);
  if (static_cast<double>(N) < lo_range || static_cast<double>(N) > hi_range)
    std::cerr << "thm3: warning: N=" << N << " outside [q^(1-1/2m), q/log q] = [" << lo_range
              << ", " << hi_range << "]\n";

  auto s =
      seqgen::generate(contfrac::AlphaSpec::rational(make_rational(Integer(b), Integer(q))), N);
  auto pts = stats::sort_points(s);
  stats::TestFunction f = stats::TestFunction::box_indicator(m, parse_box(box_text, m));
  auto mode = mode_or(g, stats::Mode::line);
  auto conv = convention_or(g, stats::TupleConvention::distinct_ordered);
  auto r = stats::correlation_fast(pts, f, mode, conv, work_cap(g));
  double tol = g.cfg.get_double("thm3.tol.m" + std::to_string(m), m == 2 ? 0.1 : 0.2);

  json out = correlation_json(r);
  out["q"] = q;
  out["b"] = b;
  out["tolerance"] = tol;
  bool pass = std::abs(r.value - r.reference) <= tol;
  out["pass"] = pass;
  emit(g, "thm3", out);
  return pass ? kExitPass : kExitTolerance;
}

// ---------------------------------------------------------------------------
// thm2a: square-denominator alpha, 5-level correlation blowup
// ---------------------------------------------------------------------------

int cmd_thm2a(const GlobalOpts& g, int max_m, const std::vector<int64_t>& n_list,
              int64_t force_m) {
  auto st =
      constructions::thm2a_extend(constructions::thm2a_init(), static_cast<size_t>(max_m) - 1);
  // exact square check, re-derived through the generic expansion
  auto cf = contfrac::expand(contfrac::AlphaSpec::explicit_cf(st.quotients), st.quotients.size());
  for (long m = 0; m <= st.max_index(); ++m) {
    const Integer& v = st.v_at(m);
    if (cf.convergents[static_cast<size_t>(m)].q != v * v) {
      std::cerr << "thm2a: q_m != v_m^2 at m=" << m << "\n";
      return kExitPrecondition;
    }
  }

  auto alpha = contfrac::AlphaSpec::generated("thm2a");
  stats::TestFunction f = stats::TestFunction::box_uniform(5, Rational(-1), Rational(1));
  auto conv = convention_or(g, stats::TupleConvention::distinct_ordered);

  json rows = json::array();
  std::ostringstream csv;
  csv << "N,conv_index,v,zeros_predicted,zeros_actual,R5,lower_bound,ratio\n";
  double prev_ratio = -1;
  bool monotone = true;
  for (int64_t N : n_list) {
    seqgen::FracSequence s =
        force_m >= 0 ? seqgen::generate_with_convergent(alpha, N, static_cast<size_t>(force_m))
                     : seqgen::generate(alpha, N);
    Integer v = numtheory::isqrt(s.den);
    if (v * v != s.den) {
      std::cerr << "thm2a: substituted denominator is not a perfect square\n";
      return kExitPrecondition;
    }
    int64_t zeros_pred = v > N ? 0 : N / to_int64(v);
    int64_t zeros = 0;
    for (const Integer& num : s.numerators)
      if (num == 0) ++zeros;
    if (zeros != zeros_pred) {
      std::cerr << "thm2a: zero-cluster count " << zeros << " != predicted " << zeros_pred << "\n";
      return kExitPrecondition;
    }
    auto pts = stats::sort_points(s);
    auto r = stats::correlation_fast(pts, f, stats::Mode::line, conv, work_cap(g),
                                     to_double(s.scaled_error));
    double lnN = std::log(static_cast<double>(N));
    double scale = std::pow(static_cast<double>(N), 0.25) / std::pow(lnN, 5.0);
    double ratio = r.value / scale;
    if (prev_ratio >= 0 && ratio <= prev_ratio) monotone = false;
    prev_ratio = ratio;
    json row;
    row["N"] = N;
    row["conv_index"] = s.convergent_index ? json(*s.convergent_index) : json(nullptr);
    row["v"] = v.get_str();
    row["zeros"] = zeros;
    row["R5"] = r.value;
    row["lower_bound"] = r.lower_bound;
    row["ratio_vs_N14_log5"] = ratio;
    rows.push_back(row);
    csv << N << "," << (s.convergent_index ? static_cast<long>(*s.convergent_index) : -1) << ","
        << v.get_str() << "," << zeros_pred << "," << zeros << "," << r.value << ","
        << (r.lower_bound ? 1 : 0) << "," << ratio << "\n";
  }
  json out;
  out["max_m"] = max_m;
  json transcript;
  json rj = json::array(), vj = json::array(), aj = json::array();
  for (size_t i = 0; i < st.r.size(); ++i) rj.push_back(st.r[i].get_str());
  for (size_t i = 0; i < st.v.size(); ++i) vj.push_back(st.v[i].get_str());
  for (size_t i = 0; i < st.quotients.size(); ++i) aj.push_back(st.quotients[i].get_str());
  transcript["r_from_minus1"] = rj;
  transcript["v_from_minus1"] = vj;
  transcript["a"] = aj;
  out["transcript"] = transcript;
  out["rows"] = rows;
  out["ratio_monotone"] = monotone;
  emit(g, "thm2a", out, csv.str());
  return monotone ? kExitPass : kExitTolerance;
}

// ---------------------------------------------------------------------------
// thm2b: type-sigma alpha with prime-square factors
// ---------------------------------------------------------------------------

int cmd_thm2b(const GlobalOpts& g, const std::string& sigma_text, int steps, int64_t n_cap) {
  Rational sigma = parse_rational(sigma_text);
  auto st =
      constructions::thm2b_extend(constructions::thm2b_init(sigma), static_cast<size_t>(steps));
  const double sig = to_double(sigma);
  const double E = sig * (8 * sig - 23) / (6 * (sig - 1));

  json rows = json::array();
  std::ostringstream csv;
  csv << "m,ell,u_digits,q_digits,N,Z,count_bound,scale_bound,q_E_over_log5\n";
  for (size_t i = 0; i < st.steps.size(); ++i) {
    const auto& stp = st.steps[i];
    Integer ell2 = stp.ell * stp.ell;
    if (stp.q % ell2 != 0) {
      std::cerr << "thm2b: ell^2 does not divide q_m\n";
      return kExitPrecondition;
    }
    const double lq = log_integer(stp.q);
    const double Nm_d = std::exp(sig / 3.0 * lq - std::log(lq));
    json row;
    row["m"] = st.seed_len + i;
    row["ell"] = stp.ell.get_str();
    row["u"] = stp.u.get_str();
    row["q"] = stp.q.get_str();
    row["N"] = Nm_d;
    double count_bound = 0, scale_bound = 0, z_d = 0;
    if (Nm_d < 9e18 && Nm_d >= 1) {
      Integer Nm(static_cast<unsigned long>(Nm_d));
      Integer uv = stp.u * stp.ell;
      Integer Z = Nm / uv;
      z_d = mpz_get_d(Z.get_mpz_t());
      Rational cb(0);
      if (Z >= 5) {
        Integer prod = Z * (Z - 1) * (Z - 2) * (Z - 3) * (Z - 4);
        cb = make_rational(prod, Nm);
      }
      count_bound = to_double(cb);
      double nv_q = Nm_d * mpz_get_d(stp.ell.get_mpz_t()) / mpz_get_d(stp.q.get_mpz_t());
      scale_bound = std::pow(nv_q, 5.0) / Nm_d;
      if (scale_bound + 1e-15 < to_double(make_rational(Z * Z * Z * Z * Z, Nm))) {
        // (1/N)(Nv/q)^5 >= (1/N) floor(Nv/q)^5 must hold
        std::cerr << "thm2b: scale bound fell below the floored count form\n";
        return kExitTolerance;
      }
      // exact tie verification when the sequence is small enough to build
      if (Nm_d <= static_cast<double>(n_cap) && Z >= 1) {
        auto s = seqgen::generate_with_convergent(
            contfrac::AlphaSpec::generated("thm2b", {{"sigma", sigma_text}}), to_int64(Nm),
            st.seed_len + i);
        int64_t zeros = 0;
        for (const Integer& num : s.numerators)
          if (num == 0) ++zeros;
        if (zeros < to_int64(Z)) {
          std::cerr << "thm2b: zero count " << zeros << " below floor(N/(uv)) = " << Z.get_str()
                    << "\n";
          return kExitTolerance;
        }
        row["zeros_verified"] = zeros;
      }
    }
    row["Z"] = z_d;
    row["count_bound"] = count_bound;
    row["scale_bound"] = scale_bound;
    double shape = std::exp(E * lq) / std::pow(lq, 5.0);
    row["q_E_over_log5"] = shape;
    rows.push_back(row);
    csv << (st.seed_len + i) << "," << stp.ell.get_str() << ","
        << mpz_sizeinbase(stp.u.get_mpz_t(), 10) << "," << mpz_sizeinbase(stp.q.get_mpz_t(), 10)
        << "," << Nm_d << "," << z_d << "," << count_bound << "," << scale_bound << "," << shape
        << "\n";
  }
  json out;
  out["sigma"] = to_double(sigma);
  out["E"] = E;
  out["rows"] = rows;
  emit(g, "thm2b", out, csv.str());
  return kExitPass;
}

// ---------------------------------------------------------------------------
// thm4: coprime square surrogate and the comparison chain
// ---------------------------------------------------------------------------

int cmd_thm4(const GlobalOpts& g, int64_t q, int64_t N, int m, double delta, double rho) {
  constructions::Thm4Config cfg;
  try {
    cfg = constructions::thm4_config(Integer(static_cast<long>(q)), N, m, delta);
  } catch (const std::exception& e) {
    std::cerr << "thm4: " << e.what() << "\n";
    return kExitPrecondition;
  }
  const double qd = static_cast<double>(q);
  if (static_cast<double>(N) < std::pow(qd, 1.0 / 3.0) ||
      static_cast<double>(N) > std::pow(qd, static_cast<double>(m) / (m + 2) - delta))
    std::cerr << "thm4: warning: N outside [q^(1/3), q^(m/(m+2)-delta)]\n";

  auto seq_b = seqgen::generate(contfrac::AlphaSpec::rational(make_rational(cfg.b, cfg.q)), N);
  auto seq_bp =
      seqgen::generate(contfrac::AlphaSpec::rational(make_rational(cfg.b_prime, cfg.q_prime)), N);
  double eps = seqgen::scaled_distance(seq_b, seq_bp);
  const double lnN = std::log(static_cast<double>(N));
  bool eps_ok = eps <= 1.0 / (lnN * lnN * lnN) + 1e-12;

  seqgen::MajorantSpec maj = seqgen::build_majorant(rho, 1.0);
  Rational two_rho(2 * rho);
  stats::TestFunction f = stats::TestFunction::box_uniform(m, -two_rho, two_rho);
  stats::TestFunction f_plus = stats::TestFunction::plateau_majorant(m, maj);
  auto conv = convention_or(g, stats::TupleConvention::distinct_ordered);

  auto pts_bp = stats::sort_points(seq_bp);
  auto r_bp = stats::correlation_fast(pts_bp, f, stats::Mode::line, conv, work_cap(g));
  auto pts_b = stats::sort_points(seq_b);
  auto r_b_plus = stats::correlation_fast(pts_b, f_plus, stats::Mode::line, conv, work_cap(g));
  auto r_b = stats::correlation_fast(pts_b, f, stats::Mode::line, conv, work_cap(g));

  int64_t v64 = to_int64(cfg.v);
  int64_t Z = v64 > N ? 0 : N / v64;
  double count_bound = 0;
  if (Z >= m) {
    double prod = 1;
    for (int i = 0; i < m; ++i) prod *= static_cast<double>(Z - i);
    count_bound = prod / static_cast<double>(N);
  }

  json out;
  out["q"] = q;
  out["q_prime"] = cfg.q_prime.get_str();
  out["v"] = cfg.v.get_str();
  out["b"] = cfg.b.get_str();
  out["b_prime"] = cfg.b_prime.get_str();
  out["N"] = N;
  out["m"] = m;
  out["delta"] = delta;
  out["scaled_distance"] = eps;
  out["scaled_distance_bound"] = 1.0 / (lnN * lnN * lnN);
  out["scaled_distance_ok"] = eps_ok;
  out["R_surrogate"] = correlation_json(r_bp);
  out["R_majorant_on_bq"] = correlation_json(r_b_plus);
  out["R_on_bq"] = correlation_json(r_b);
  out["lemma_count_bound"] = count_bound;
  out["comparison_rhs"] = r_b_plus.value * eps;
  // shape of the lower bound: q^(delta(m/2+1)) (log q)^(-3m/2)
  double shape = std::pow(qd, delta * (m / 2.0 + 1.0)) /
                 std::pow(std::log(qd), 1.5 * m);
  out["shape_q_delta_log"] = shape;
  out["R_surrogate_over_shape"] = r_bp.value / shape;
  emit(g, "thm4", out);
  return eps_ok ? kExitPass : kExitTolerance;
}

// ---------------------------------------------------------------------------
// sqrt2 demo
// ---------------------------------------------------------------------------

int cmd_sqrt2(const GlobalOpts& g, int64_t N, int k_max, int m) {
  double tol_ks = g.cfg.get_double("sqrt2.tol.ks", 0.02);
  double tol_r = g.cfg.get_double("sqrt2.tol.r2", 0.05);
  auto alpha = contfrac::AlphaSpec::periodic_cf({Integer(1)}, {Integer(2)});
  auto s = seqgen::generate(alpha, N);
  auto pts = stats::sort_points(s);

  json ks = json::array();
  double ks1 = 0;
  for (int k = 1; k <= k_max; ++k) {
    auto h = stats::spacing_measure(pts, k);
    if (k == 1) ks1 = h.ks_to_poisson;
    ks.push_back({{"k", k}, {"ks", h.ks_to_poisson}});
  }
  stats::TestFunction f = stats::TestFunction::box_uniform(m, Rational(0), Rational(1));
  auto conv = convention_or(g, stats::TupleConvention::distinct_ordered);
  auto r = stats::correlation_fast(pts, f, mode_or(g, stats::Mode::line), conv, work_cap(g),
                                   to_double(s.scaled_error));

  // trend: the same statistic three decades down, for the report
  json trend = json::array();
  if (N >= 100000) {
    auto s_small = seqgen::generate(alpha, N / 1000);
    auto h_small = stats::spacing_measure(stats::sort_points(s_small), 1);
    trend.push_back({{"N", N / 1000}, {"ks1", h_small.ks_to_poisson}});
    trend.push_back({{"N", N}, {"ks1", ks1}});
  }

  bool pass = ks1 <= tol_ks && std::abs(r.value - r.reference) <= tol_r;
  json out;
  out["N"] = N;
  out["spacings"] = ks;
  out["correlation"] = correlation_json(r);
  out["ks_trend"] = trend;
  out["tol_ks"] = tol_ks;
  out["tol_r2"] = tol_r;
  out["pass"] = pass;
  emit(g, "sqrt2", out);
  return pass ? kExitPass : kExitTolerance;
}

// ---------------------------------------------------------------------------
// weilscan
// ---------------------------------------------------------------------------

int cmd_weilscan(const GlobalOpts& g, int64_t qmin, int64_t qmax, int m, int per_q) {
  double max_ratio_cap = g.cfg.get_double("weilscan.max_ratio", 24.0);
  std::mt19937_64 rng(g.seed ^ 0x5eedULL);
  std::ostringstream csv;
  csv << "q,m,b,a_vec,nu,r_eff,D_mod_q_zero,B,B_over_sqrtq\n";
  double observed_max = 0;
  int64_t rows = 0;
  for (int64_t q = qmin | 1; q <= qmax; q += 2) {
    if (!numtheory::is_prime_u64(static_cast<uint64_t>(q))) continue;
    for (int i = 0; i < per_q; ++i) {
      std::vector<int64_t> a;
      int r_eff = 0;
      Integer D;
      do {  // admissible: full rank
        a.clear();
        for (int d = 0; d + 1 < m; ++d)
          a.push_back(1 + static_cast<int64_t>(rng() % static_cast<uint64_t>(q - 1)));
        std::tie(r_eff, D) = ffcurves::r_eff_and_D(a, q);
      } while (r_eff != m);
      int64_t b = 1 + static_cast<int64_t>(rng() % static_cast<uint64_t>(q - 1));
      auto c = ffcurves::nu_points({q, b, a, m});
      double ratio = std::abs(static_cast<double>(c.B)) / std::sqrt(static_cast<double>(q));
      observed_max = std::max(observed_max, ratio);
      ++rows;
      csv << q << "," << m << "," << b << ",\"";
      for (size_t k = 0; k < a.size(); ++k) csv << (k ? " " : "") << a[k];
      csv << "\"," << c.nu << "," << c.r_eff << "," << (c.D % q == 0 ? 1 : 0) << "," << c.B << ","
          << ratio << "\n";
    }
  }
  json out;
  out["qmin"] = qmin;
  out["qmax"] = qmax;
  out["m"] = m;
  out["per_q"] = per_q;
  out["rows"] = rows;
  out["observed_max_ratio"] = observed_max;
  out["cap"] = max_ratio_cap;
  bool pass = observed_max <= max_ratio_cap;
  out["pass"] = pass;
  emit(g, "weilscan", out, csv.str());
  return pass ? kExitPass : kExitTolerance;
}

// ---------------------------------------------------------------------------
// metric
// ---------------------------------------------------------------------------

int cmd_metric(const GlobalOpts& g, int64_t q, int64_t tail_x, bool mc, int samples, int bits,
               int depth) {
  json out;
  std::string csv;
  bool pass = true;
  if (q > 0) {
    auto k = metric::kernel_decompose(Integer(static_cast<long>(q)));
    auto f = metric::f_membership(Integer(static_cast<long>(q)));
    out["kernel"] = {{"q", k.q.get_str()},       {"q_tilde", k.q_tilde.get_str()},
                     {"s", k.s.get_str()},       {"rad", k.rad.get_str()},
                     {"in_F", f.in_f},           {"threshold", f.threshold}};
  }
  if (tail_x > 0) {
    auto t = metric::tail_sum_both(tail_x);
    bool agree = std::abs(t.direct - t.grouped) <= 1e-12;
    out["tail"] = {
        {"X", tail_x}, {"direct", t.direct}, {"grouped", t.grouped}, {"agree_1e-12", agree}};
    pass = pass && agree;
  }
  if (mc) {
    double threshold = g.cfg.get_double("metric.mc_threshold", 0.02);
    auto rep = metric::prop_a1_montecarlo(samples, bits, depth, g.seed);
    csv = rep.to_csv();
    Integer million(1000000);
    double frac = rep.frac_big_s_above(million);
    out["montecarlo"] = {{"samples", samples},
                         {"bits", bits},
                         {"depth", depth},
                         {"rows", rep.rows.size()},
                         {"truncated_samples", rep.truncated_samples},
                         {"frac_s_gt_q14_above_1e6", frac},
                         {"threshold", threshold}};
    pass = pass && frac <= threshold;
  }
  out["pass"] = pass;
  emit(g, "metric", out, csv);
  return pass ? kExitPass : kExitTolerance;
}

// ---------------------------------------------------------------------------
// abc
// ---------------------------------------------------------------------------

int cmd_abc(const GlobalOpts& g, const std::string& poly_text, const std::string& lo_text,
            const std::string& hi_text, int depth) {
  std::vector<Integer> poly;
  std::istringstream in(poly_text);
  std::string c;
  while (std::getline(in, c, ',')) poly.emplace_back(c);
  auto rep =
      metric::abc_corollary_check(poly, parse_rational(lo_text), parse_rational(hi_text), depth);
  bool all_ok = true;
  for (const auto& row : rep.rows) all_ok = all_ok && row.bound_ok;
  json out;
  out["C"] = to_double(rep.C);
  out["rows"] = rep.rows.size();
  out["all_bounds_ok"] = all_ok;
  emit(g, "abc", out, rep.to_csv());
  return all_ok ? kExitPass : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spacing-lab: local spacing statistics of quadratic sequences mod 1"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--config", g.config_path, "key=value configuration file");
  app.add_option("--seed", g.seed, "RNG seed (default 0)");
  app.add_option("--out", g.out_dir, "directory for result JSON/CSV files");
  app.add_flag("--json", g.json_out, "print a JSON document to stdout");
  app.add_flag("--csv", g.csv_out, "print the primary CSV to stdout");
  app.add_option("--mode", g.mode, "difference mode: line|circle")
      ->check(CLI::IsMember({"line", "circle"}));
  app.add_option("--convention", g.convention, "tuple convention: i3|distinct")
      ->check(CLI::IsMember({"i3", "distinct"}));

  auto* cf = app.add_subcommand("cf", "expand a continued fraction");
  std::string cf_alpha;
  int64_t cf_depth = 10, cf_bounds = -1;
  bool cf_type = false;
  cf->add_option("--alpha", cf_alpha)->required();
  cf->add_option("--depth", cf_depth);
  cf->add_flag("--type", cf_type, "report the diophantine-type estimate");
  cf->add_option("--bounds", cf_bounds, "error enclosure at convergent index");

  auto* seq = app.add_subcommand("seq", "generate {alpha n^2} and dump CSV");
  std::string seq_alpha;
  int64_t seq_n = 100;
  bool seq_f64 = false;
  seq->add_option("--alpha", seq_alpha)->required();
  seq->add_option("--N", seq_n)->required();
  seq->add_flag("--f64", seq_f64, "dump doubles instead of exact rationals");

  auto* sp = app.add_subcommand("spacing", "k-th consecutive spacing histogram");
  std::string sp_alpha;
  int64_t sp_n = 1000;
  int sp_k = 1, sp_bins = 60;
  sp->add_option("--alpha", sp_alpha)->required();
  sp->add_option("--N", sp_n)->required();
  sp->add_option("--k", sp_k);
  sp->add_option("--bins", sp_bins);

  auto* co = app.add_subcommand("corr", "m-level correlation against the Poisson reference");
  std::string co_alpha, co_box = "0,1";
  int64_t co_n = 1000;
  int co_m = 2;
  double co_rho = 0;
  bool co_brute = false;
  co->add_option("--alpha", co_alpha)->required();
  co->add_option("--N", co_n)->required();
  co->add_option("--m", co_m);
  co->add_option("--box", co_box, "lo,hi[;lo,hi...] box on consecutive differences");
  co->add_option("--smooth-rho", co_rho, "use the smooth bump with this radius instead");
  co->add_flag("--brute", co_brute, "force the literal O(N^m) evaluation");

  auto* t3 = app.add_subcommand("thm3", "prime-modulus correlation vs Vol(I)");
  int64_t t3_q = 100003, t3_b = 1, t3_n = 8688;
  int t3_m = 2;
  std::string t3_box = "0,1";
  t3->add_option("--q", t3_q);
  t3->add_option("--b", t3_b);
  t3->add_option("--N", t3_n);
  t3->add_option("--m", t3_m);
  t3->add_option("--box", t3_box);

  auto* t2a = app.add_subcommand("thm2a", "square-denominator alpha: R^(5) blowup table");
  int t2a_maxm = 8;
  std::vector<int64_t> t2a_nlist{25, 729};
  int64_t t2a_force = -1;
  t2a->add_option("--max-m", t2a_maxm);
  t2a->add_option("--N-list", t2a_nlist)->delimiter(',');
  t2a->add_option("--force-m", t2a_force, "substitute this convergent index instead of the policy");

  auto* t2b = app.add_subcommand("thm2b", "type-sigma alpha: construction and R^(5) lower bounds");
  std::string t2b_sigma = "3";
  int t2b_steps = 5;
  int64_t t2b_ncap = 200000;
  t2b->add_option("--sigma", t2b_sigma);
  t2b->add_option("--steps", t2b_steps);
  t2b->add_option("--n-cap", t2b_ncap, "generate sequences only when N_m is below this");

  auto* t4 = app.add_subcommand("thm4", "coprime square surrogate and comparison chain");
  int64_t t4_q = 100003, t4_n = 0;
  int t4_m = 3;
  double t4_delta = 0.05, t4_rho = 0.5;
  t4->add_option("--q", t4_q);
  t4->add_option("--N", t4_n, "defaults to ceil(q^0.55)");
  t4->add_option("--m", t4_m);
  t4->add_option("--delta", t4_delta);
  t4->add_option("--rho", t4_rho);

  auto* s2 = app.add_subcommand("sqrt2", "spacings and pair correlation for alpha = sqrt(2)");
  int64_t s2_n = 1000000;
  int s2_kmax = 3, s2_m = 2;
  s2->add_option("--N", s2_n);
  s2->add_option("--k-max", s2_kmax);
  s2->add_option("--m", s2_m);

  auto* ws = app.add_subcommand("weilscan", "point-count scan against the square-root bound");
  int64_t ws_qmin = 50, ws_qmax = 2000;
  int ws_m = 3, ws_perq = 50;
  ws->add_option("--qmin", ws_qmin);
  ws->add_option("--qmax", ws_qmax);
  ws->add_option("--m", ws_m);
  ws->add_option("--per-q", ws_perq);

  auto* me = app.add_subcommand("metric", "square-free kernel reports");
  int64_t me_q = 0, me_tail = 0;
  bool me_mc = false;
  int me_samples = 1000, me_bits = 256, me_depth = 40;
  me->add_option("--q", me_q, "decompose one integer");
  me->add_option("--tail", me_tail, "dual harmonic tail sums up to X");
  me->add_flag("--mc", me_mc, "Monte Carlo over random reals' convergents");
  me->add_option("--samples", me_samples);
  me->add_option("--bits", me_bits);
  me->add_option("--depth", me_depth);

  auto* ab = app.add_subcommand("abc", "homogeneous-form radical checks for an algebraic alpha");
  std::string ab_poly = "-2,0,1", ab_lo = "1", ab_hi = "2";
  int ab_depth = 15;
  ab->add_option("--poly", ab_poly, "ascending integer coefficients, comma separated");
  ab->add_option("--lo", ab_lo);
  ab->add_option("--hi", ab_hi);
  ab->add_option("--depth", ab_depth);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();
  CLI11_PARSE(app, argc, argv);

  try {
    if (!g.config_path.empty()) g.cfg = config::KeyValueConfig::load(g.config_path);
    if (cf->parsed()) return cmd_cf(g, cf_alpha, cf_depth, cf_type, cf_bounds);
    if (seq->parsed()) return cmd_seq(g, seq_alpha, seq_n, seq_f64);
    if (sp->parsed()) return cmd_spacing(g, sp_alpha, sp_n, sp_k, sp_bins);
    if (co->parsed()) return cmd_corr(g, co_alpha, co_n, co_m, co_box, co_rho, co_brute);
    if (t3->parsed()) return cmd_thm3(g, t3_q, t3_b, t3_n, t3_m, t3_box);
    if (t2a->parsed()) return cmd_thm2a(g, t2a_maxm, t2a_nlist, t2a_force);
    if (t2b->parsed()) return cmd_thm2b(g, t2b_sigma, t2b_steps, t2b_ncap);
    if (t4->parsed()) {
      if (t4_n == 0)
        t4_n = static_cast<int64_t>(std::ceil(std::pow(static_cast<double>(t4_q), 0.55)));
      return cmd_thm4(g, t4_q, t4_n, t4_m, t4_delta, t4_rho);
    }
    if (s2->parsed()) return cmd_sqrt2(g, s2_n, s2_kmax, s2_m);
    if (ws->parsed()) return cmd_weilscan(g, ws_qmin, ws_qmax, ws_m, ws_perq);
    if (me->parsed()) return cmd_metric(g, me_q, me_tail, me_mc, me_samples, me_bits, me_depth);
    if (ab->parsed()) return cmd_abc(g, ab_poly, ab_lo, ab_hi, ab_depth);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
  return kExitPrecondition;
}
