#include "spacinglab/contfrac.hpp"

#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spacinglab/constructions.hpp"

namespace spacinglab::contfrac {

namespace {

class ListGenerator : public QuotientGenerator {
 public:
  explicit ListGenerator(std::vector<Integer> a) : a_(std::move(a)) {}
  std::optional<Integer> next() override {
    if (i_ >= a_.size()) return std::nullopt;
    return a_[i_++];
  }

 private:
  std::vector<Integer> a_;
  size_t i_ = 0;
};

class PeriodicGenerator : public QuotientGenerator {
 public:
  PeriodicGenerator(std::vector<Integer> pre, std::vector<Integer> period)
      : pre_(std::move(pre)), period_(std::move(period)) {
    if (period_.empty()) throw std::invalid_argument("periodic cf: empty period");
  }
  std::optional<Integer> next() override {
    if (i_ < pre_.size()) return pre_[i_++];
    const Integer& q = period_[(i_ - pre_.size()) % period_.size()];
    ++i_;
    return q;
  }

 private:
  std::vector<Integer> pre_, period_;
  size_t i_ = 0;
};

void validate_quotients(const std::vector<Integer>& a) {
  for (size_t m = 1; m < a.size(); ++m)
    if (a[m] < 1) throw std::invalid_argument("continued fraction: a_m >= 1 required for m >= 1");
}

}  // namespace

std::unique_ptr<QuotientGenerator> AlphaSpec::make_generator() const {
  if (auto* r = std::get_if<RationalAlpha>(&v))
    return std::make_unique<ListGenerator>(cf_of_rational(r->value));
  if (auto* e = std::get_if<ExplicitCf>(&v)) {
    validate_quotients(e->quotients);
    return std::make_unique<ListGenerator>(e->quotients);
  }
  if (auto* p = std::get_if<PeriodicCf>(&v)) {
    validate_quotients(p->preperiod);
    for (const Integer& q : p->period)
      if (q < 1) throw std::invalid_argument("periodic cf: period quotients must be >= 1");
    return std::make_unique<PeriodicGenerator>(p->preperiod, p->period);
  }
  const auto& g = std::get<GeneratedCf>(v);
  return constructions::make_named_generator(g.name, g.params);
}

ContinuedFraction expand(const AlphaSpec& alpha, size_t M) {
  auto gen = alpha.make_generator();
  ContinuedFraction cf;
  Integer pm2(1), qm2(0);  // p_{-1}, q_{-1}
  Integer pm1(0), qm1(1);  // overwritten at m = 0; seeds shift afterwards
  for (size_t m = 0; m <= M; ++m) {
    auto a = gen->next();
    if (!a) {
      cf.exact_terminated = true;
      break;
    }
    if (m >= 1 && *a < 1) throw std::invalid_argument("continued fraction: a_m >= 1 for m >= 1");
    Integer p, q;
    if (m == 0) {
      p = *a;
      q = 1;
      pm2 = 1;  // p_{-1}
      qm2 = 0;
    } else {
      p = *a * pm1 + pm2;
      q = *a * qm1 + qm2;
      pm2 = pm1;
      qm2 = qm1;
    }
    pm1 = p;
    qm1 = q;
    cf.quotients.push_back(*a);
    cf.convergents.push_back(Convergent{p, q});
    // Exact invariant check: p_m q_{m-1} - p_{m-1} q_m = (-1)^{m-1}.
    if (m >= 1) {
      const auto& prev = cf.convergents[m - 1];
      Integer det = p * prev.q - prev.p * q;
      Integer want = (m % 2 == 0) ? Integer(-1) : Integer(1);
      if (det != want) throw std::logic_error("convergent recursion broke the determinant identity");
    }
  }
  if (cf.quotients.empty()) throw std::invalid_argument("expand: no quotients produced");
  return cf;
}

std::pair<Rational, Rational> approx_error_bounds(const ContinuedFraction& cf, size_t m) {
  if (m + 1 >= cf.convergents.size())
    throw std::out_of_range("approx_error_bounds: need one more convergent");
  const Integer& qm = cf.convergents[m].q;
  const Integer& qn = cf.convergents[m + 1].q;
  Integer prod = qm * qn;
  return {make_rational(1, 2 * prod), make_rational(1, prod)};
}

TypeEstimate estimate_type(const ContinuedFraction& cf) {
  if (cf.convergents.size() < 3)
    throw std::invalid_argument("estimate_type: need at least 3 convergents");
  const size_t last = cf.convergents.size() - 1;
  // Deepest index m with q_m >= 2 and a successor q_{m+1}.
  size_t m_top = last - 1;
  while (m_top > 0 && cf.convergents[m_top].q < 2) --m_top;
  if (cf.convergents[m_top].q < 2)
    throw std::invalid_argument("estimate_type: all usable q_m equal 1");
  const double lq = log_integer(cf.convergents[m_top].q);
  const double lqq = lq + log_integer(cf.convergents[m_top + 1].q);
  TypeEstimate est;
  est.k_hat = lqq / lq;
  est.depth = static_cast<int>(cf.convergents.size());
  // Largest c (<= 1/2) with 1/(2 q_m q_{m+1}) >= c q_m^{-k_hat} for all m.
  double c = 0.5;
  for (size_t m = 0; m + 1 < cf.convergents.size(); ++m) {
    double lo = -std::log(2.0) - log_integer(cf.convergents[m].q) -
                log_integer(cf.convergents[m + 1].q);  // log lower error bound
    double rhs = lo + est.k_hat * log_integer(cf.convergents[m].q);  // log(q^k/(2qq'))
    c = std::min(c, std::exp(rhs));
  }
  est.c_hat = c;
  return est;
}

Rational evaluate_finite_cf(std::span<const Integer> a) {
  if (a.empty()) throw std::invalid_argument("evaluate_finite_cf: empty");
  Rational x(a.back());
  for (size_t i = a.size() - 1; i-- > 0;) {
    x = Rational(a[i]) + Rational(1) / x;
  }
  return x;
}

std::vector<Integer> cf_of_rational(const Rational& x) {
  std::vector<Integer> a;
  Integer num = x.get_num(), den = x.get_den();
  while (true) {
    Integer q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    a.push_back(q);
    if (r == 0) break;
    num = den;
    den = r;
  }
  return a;
}

std::vector<Integer> cf_common_prefix(const Rational& lo, const Rational& hi, size_t max_terms) {
  if (lo > hi) throw std::invalid_argument("cf_common_prefix: lo > hi");
  std::vector<Integer> a;
  Rational l = lo, h = hi;
  while (a.size() < max_terms) {
    Integer fl = floor_to_integer(l);
    Integer fh = floor_to_integer(h);
    if (fl != fh) break;
    // Boundary: if an endpoint equals its floor the next inversion divides by
    // zero and the quotient is not certified; stop.
    Rational tl = l - Rational(fl);
    Rational th = h - Rational(fh);
    a.push_back(fl);
    if (tl == 0 || th == 0) break;
    // 1/t reverses order.
    Rational nl = Rational(1) / th;
    Rational nh = Rational(1) / tl;
    l = nl;
    h = nh;
  }
  return a;
}

// ---------------------------------------------------------------------------
// Textual grammar
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<Integer> parse_int_list(const std::string& body, char sep) {
  std::vector<Integer> out;
  std::string cur;
  std::istringstream in(body);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (cur.empty()) throw std::invalid_argument("alpha spec: empty integer in list");
    out.emplace_back(cur);
  }
  return out;
}

// "[a0;a1,a2,...]" -> vector
std::vector<Integer> parse_bracket_cf(const std::string& s) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw std::invalid_argument("alpha spec: expected [a0;a1,...]");
  std::string body = s.substr(1, s.size() - 2);
  size_t semi = body.find(';');
  std::vector<Integer> a;
  if (semi == std::string::npos) {
    a.emplace_back(trim(body));
  } else {
    a.emplace_back(trim(body.substr(0, semi)));
    std::string rest = trim(body.substr(semi + 1));
    if (!rest.empty()) {
      auto tail = parse_int_list(rest, ',');
      a.insert(a.end(), tail.begin(), tail.end());
    }
  }
  return a;
}

}  // namespace

std::vector<Integer> parse_quotient_list(const std::string& text) {
  return parse_bracket_cf(trim(text));
}

AlphaSpec AlphaSpec::parse(const std::string& raw) {
  std::string s = trim(raw);
  if (s.rfind("rat:", 0) == 0) {
    std::string body = s.substr(4);
    size_t slash = body.find('/');
    Integer num(trim(slash == std::string::npos ? body : body.substr(0, slash)));
    Integer den = slash == std::string::npos ? Integer(1) : Integer(trim(body.substr(slash + 1)));
    if (den <= 0) throw std::invalid_argument("rat: denominator must be positive");
    return AlphaSpec::rational(make_rational(num, den));
  }
  if (s.rfind("cf:", 0) == 0) {
    auto a = parse_bracket_cf(s.substr(3));
    validate_quotients(a);
    return AlphaSpec::explicit_cf(std::move(a));
  }
  if (s.rfind("pcf:", 0) == 0) {
    std::string body = s.substr(4);
    if (body.size() < 2 || body.front() != '[' || body.back() != ']')
      throw std::invalid_argument("pcf: expected [pre|period]");
    body = body.substr(1, body.size() - 2);
    size_t bar = body.find('|');
    if (bar == std::string::npos) throw std::invalid_argument("pcf: expected '|' separator");
    std::string pre_s = trim(body.substr(0, bar));
    std::string per_s = trim(body.substr(bar + 1));
    std::vector<Integer> pre = pre_s.empty() ? std::vector<Integer>{} : parse_int_list(pre_s, ',');
    std::vector<Integer> per = parse_int_list(per_s, ',');
    if (per.empty()) throw std::invalid_argument("pcf: period must be nonempty");
    return AlphaSpec::periodic_cf(std::move(pre), std::move(per));
  }
  if (s.rfind("gen:", 0) == 0) {
    std::string body = s.substr(4);
    std::string name = body;
    std::map<std::string, std::string> params;
    size_t paren = body.find('(');
    if (paren != std::string::npos) {
      if (body.back() != ')') throw std::invalid_argument("gen: unterminated parameter list");
      name = trim(body.substr(0, paren));
      std::string plist = body.substr(paren + 1, body.size() - paren - 2);
      // comma-split at top level only (seeds contain brackets)
      std::vector<std::string> parts;
      int depth = 0;
      std::string cur;
      for (char c : plist) {
        if (c == '[') ++depth;
        if (c == ']') --depth;
        if (c == ',' && depth == 0) {
          parts.push_back(cur);
          cur.clear();
        } else {
          cur += c;
        }
      }
      if (!trim(cur).empty()) parts.push_back(cur);
      for (auto& part : parts) {
        size_t eq = part.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("gen: parameters are key=value");
        params[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
      }
    }
    return AlphaSpec::generated(std::move(name), std::move(params));
  }
  throw std::invalid_argument("alpha spec: unknown prefix in '" + raw + "'");
}

std::string AlphaSpec::text() const {
  std::ostringstream out;
  if (auto* r = std::get_if<RationalAlpha>(&v)) {
    out << "rat:" << r->value.get_num() << "/" << r->value.get_den();
  } else if (auto* e = std::get_if<ExplicitCf>(&v)) {
    out << "cf:[" << e->quotients[0];
    for (size_t i = 1; i < e->quotients.size(); ++i) out << (i == 1 ? ";" : ",") << e->quotients[i];
    out << "]";
  } else if (auto* p = std::get_if<PeriodicCf>(&v)) {
    out << "pcf:[";
    for (size_t i = 0; i < p->preperiod.size(); ++i) out << (i ? "," : "") << p->preperiod[i];
    out << "|";
    for (size_t i = 0; i < p->period.size(); ++i) out << (i ? "," : "") << p->period[i];
    out << "]";
  } else {
    const auto& g = std::get<GeneratedCf>(v);
    out << "gen:" << g.name;
    if (!g.params.empty()) {
      out << "(";
      bool first = true;
      for (auto& [k, val] : g.params) {
        if (!first) out << ",";
        first = false;
        out << k << "=" << val;
      }
      out << ")";
    }
  }
  return out.str();
}

}  // namespace spacinglab::contfrac
