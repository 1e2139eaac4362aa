#include "levitype/series.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "levitype/errors.hpp"

namespace levitype {

namespace {

constexpr int kInfinity = 1 << 28;

int known_or_infinity(const TruncatedSeries& s) { return s.is_exact() ? kInfinity : s.precision(); }

int saturating_add(int a, int b) { return std::min(kInfinity, a + b); }

void check_space(int num_vars, int cap) {
  if (num_vars < 1 || num_vars > Monomial::kMaxVars)
    throw ShapeError("series variable count must lie in [1, " + std::to_string(Monomial::kMaxVars) + "]");
  if (cap < 0 || cap > Monomial::kMaxDegree)
    throw ShapeError("series degree cap must lie in [0, " + std::to_string(Monomial::kMaxDegree) + "]");
}

void check_same_space(const TruncatedSeries& a, const TruncatedSeries& b, const char* op) {
  if (a.num_vars() != b.num_vars() || a.cap() != b.cap())
    throw ShapeError(std::string(op) + ": operands differ in variable count or degree cap (" +
                     std::to_string(a.num_vars()) + "," + std::to_string(a.cap()) + ") vs (" +
                     std::to_string(b.num_vars()) + "," + std::to_string(b.cap()) + ")");
}

struct MonomialHash {
  std::size_t operator()(std::uint64_t k) const noexcept { return std::hash<std::uint64_t>{}(k * 0x9E3779B97F4A7C15ull); }
};

using Accumulator = std::unordered_map<std::uint64_t, Rational, MonomialHash>;

std::vector<Term> drain(Accumulator& acc) {
  std::vector<Term> out;
  out.reserve(acc.size());
  for (auto& [bits, c] : acc) {
    if (c == 0) continue;
    out.push_back({Monomial::from_bits(bits), std::move(c)});
  }
  std::sort(out.begin(), out.end(), [](const Term& a, const Term& b) { return graded_less(a.monomial, b.monomial); });
  return out;
}

}  // namespace

// Builder used by the free functions to assemble results without re-validating.
class SeriesBuilder {
 public:
  static TruncatedSeries make(int num_vars, int cap, int precision, std::vector<Term> terms) {
    TruncatedSeries s;
    s.num_vars_ = num_vars;
    s.cap_ = cap;
    s.precision_ = precision;
    s.terms_ = std::move(terms);
    return s;
  }
};

// ---------------------------------------------------------------------------
// Monomial

Monomial Monomial::from_exponents(std::span<const int> exponents) {
  if (static_cast<int>(exponents.size()) > kMaxVars) throw ShapeError("too many variables in multi-index");
  std::uint64_t bits = 0;
  int degree = 0;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    int e = exponents[i];
    if (e < 0 || e > kMaxDegree) throw ShapeError("multi-index exponent out of range");
    degree += e;
    bits |= static_cast<std::uint64_t>(e) << shift(static_cast<int>(i));
  }
  if (degree > kMaxDegree) throw ShapeError("multi-index degree out of range");
  return Monomial(bits | (static_cast<std::uint64_t>(degree) << 56));
}

Monomial Monomial::unit(int var) { return Monomial((std::uint64_t{1} << 56) | (std::uint64_t{1} << shift(var))); }

MultiIndex Monomial::exponents(int num_vars) const {
  MultiIndex e(num_vars);
  for (int i = 0; i < num_vars; ++i) e[i] = exponent(i);
  return e;
}

// ---------------------------------------------------------------------------
// Construction and access

TruncatedSeries::TruncatedSeries(int num_vars, int cap) : num_vars_(num_vars), cap_(cap) { check_space(num_vars, cap); }

TruncatedSeries TruncatedSeries::constant(int num_vars, int cap, const Rational& c) {
  TruncatedSeries s(num_vars, cap);
  if (c != 0) s.terms_.push_back({Monomial{}, c});
  return s;
}

TruncatedSeries TruncatedSeries::variable(int num_vars, int cap, int var) {
  TruncatedSeries s(num_vars, cap);
  if (var < 0 || var >= num_vars) throw ShapeError("variable index out of range");
  if (cap >= 1)
    s.terms_.push_back({Monomial::unit(var), Rational(1)});
  else
    s.precision_ = cap;
  return s;
}

TruncatedSeries TruncatedSeries::monomial(int num_vars, int cap, const MultiIndex& exponents, const Rational& c) {
  return from_terms(num_vars, cap, {{exponents, c}});
}

TruncatedSeries TruncatedSeries::from_terms(int num_vars, int cap,
                                            const std::vector<std::pair<MultiIndex, Rational>>& terms,
                                            int precision) {
  TruncatedSeries s(num_vars, cap);
  if (precision != kExact) {
    if (precision < -1) precision = -1;
    s.precision_ = std::min(precision, cap);
  }
  int keep = s.known_degree();
  Accumulator acc;
  for (const auto& [idx, c] : terms) {
    if (static_cast<int>(idx.size()) != num_vars) throw ShapeError("multi-index length differs from variable count");
    Monomial m = Monomial::from_exponents(idx);
    if (m.degree() > keep) {
      if (c != 0 && s.is_exact()) s.precision_ = cap;
      continue;
    }
    acc[m.bits()] += c;
  }
  // An exact series may have lost a term above the cap; re-filter.
  s.terms_ = drain(acc);
  if (!s.is_exact()) std::erase_if(s.terms_, [&](const Term& t) { return t.monomial.degree() > s.precision_; });
  return s;
}

Rational TruncatedSeries::coefficient(Monomial m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, Monomial key) { return graded_less(t.monomial, key); });
  if (it != terms_.end() && it->monomial == m) return it->coeff;
  if (!is_exact() && m.degree() > precision_)
    throw PrecisionError("coefficient of degree " + std::to_string(m.degree()) + " requested from a series known through degree " +
                         std::to_string(precision_));
  return 0;
}

Rational TruncatedSeries::coefficient(const MultiIndex& exponents) const {
  if (static_cast<int>(exponents.size()) != num_vars_) throw ShapeError("multi-index length differs from variable count");
  Monomial m = Monomial::from_exponents(exponents);
  if (m.degree() > cap_) return 0;
  return coefficient(m);
}

Rational TruncatedSeries::constant_term() const {
  if (!is_exact() && precision_ < 0) throw PrecisionError("value at the origin is beyond the reliable truncation depth");
  if (!terms_.empty() && terms_.front().monomial.degree() == 0) return terms_.front().coeff;
  return 0;
}

int TruncatedSeries::low_degree() const {
  if (!terms_.empty()) return terms_.front().monomial.degree();
  return is_exact() ? kInfinity : precision_ + 1;
}

int TruncatedSeries::max_degree() const { return terms_.empty() ? -1 : terms_.back().monomial.degree(); }

TruncatedSeries TruncatedSeries::homogeneous_part(int degree) const {
  if (degree > known_degree()) throw PrecisionError("homogeneous part beyond the known degree");
  std::vector<Term> out;
  for (const auto& t : terms_)
    if (t.monomial.degree() == degree) out.push_back(t);
  return SeriesBuilder::make(num_vars_, cap_, kExact, std::move(out));
}

TruncatedSeries TruncatedSeries::truncated(int degree) const {
  if (degree >= known_degree() && !(is_exact() && degree < cap_)) return *this;
  if (is_exact() && max_degree() <= degree) return *this;
  int p = std::max(-1, std::min(degree, known_degree()));
  std::vector<Term> out;
  for (const auto& t : terms_)
    if (t.monomial.degree() <= p) out.push_back(t);
  return SeriesBuilder::make(num_vars_, cap_, p, std::move(out));
}

TruncatedSeries TruncatedSeries::with_cap(int new_cap) const {
  check_space(num_vars_, new_cap);
  if (new_cap >= cap_) return SeriesBuilder::make(num_vars_, new_cap, precision_, terms_);
  if (is_exact() && max_degree() <= new_cap) return SeriesBuilder::make(num_vars_, new_cap, kExact, terms_);
  int p = std::min(known_degree(), new_cap);
  std::vector<Term> out;
  for (const auto& t : terms_)
    if (t.monomial.degree() <= p) out.push_back(t);
  return SeriesBuilder::make(num_vars_, new_cap, p, std::move(out));
}

TruncatedSeries TruncatedSeries::operator-() const { return scaled(-1); }

TruncatedSeries TruncatedSeries::scaled(const Rational& s) const {
  if (s == 0) return TruncatedSeries(num_vars_, cap_);
  TruncatedSeries r = *this;
  for (auto& t : r.terms_) t.coeff *= s;
  return r;
}

// ---------------------------------------------------------------------------
// Ring operations

namespace {

TruncatedSeries add_scaled(const TruncatedSeries& a, const TruncatedSeries& b, int sign) {
  int precision = (a.is_exact() && b.is_exact()) ? TruncatedSeries::kExact : std::min(a.known_degree(), b.known_degree());
  int keep = precision == TruncatedSeries::kExact ? a.cap() : precision;
  std::vector<Term> out;
  out.reserve(a.terms().size() + b.terms().size());
  auto ia = a.terms().begin(), ea = a.terms().end();
  auto ib = b.terms().begin(), eb = b.terms().end();
  auto push = [&](Monomial m, Rational c) {
    if (c != 0 && m.degree() <= keep) out.push_back({m, std::move(c)});
  };
  while (ia != ea || ib != eb) {
    if (ib == eb || (ia != ea && graded_less(ia->monomial, ib->monomial))) {
      push(ia->monomial, ia->coeff);
      ++ia;
    } else if (ia == ea || graded_less(ib->monomial, ia->monomial)) {
      push(ib->monomial, sign > 0 ? Rational(ib->coeff) : Rational(-ib->coeff));
      ++ib;
    } else {
      push(ia->monomial, sign > 0 ? Rational(ia->coeff + ib->coeff) : Rational(ia->coeff - ib->coeff));
      ++ia;
      ++ib;
    }
  }
  return SeriesBuilder::make(a.num_vars(), a.cap(), precision, std::move(out));
}

}  // namespace

TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
  check_same_space(a, b, "add");
  return add_scaled(a, b, +1);
}

TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
  check_same_space(a, b, "sub");
  return add_scaled(a, b, -1);
}

TruncatedSeries multiply_limited(const TruncatedSeries& a, const TruncatedSeries& b, int limit) {
  check_same_space(a, b, "mul");
  const int cap = a.cap();
  if (a.is_exact_zero() || b.is_exact_zero()) return TruncatedSeries(a.num_vars(), cap);
  int bound = std::min(saturating_add(known_or_infinity(a), b.low_degree()),
                       saturating_add(known_or_infinity(b), a.low_degree()));
  int hi = std::min({bound, cap, limit});
  bool exact = a.is_exact() && b.is_exact() && a.max_degree() + b.max_degree() <= std::min(cap, limit);
  if (hi < 0) return SeriesBuilder::make(a.num_vars(), cap, exact ? TruncatedSeries::kExact : std::max(hi, -1), {});

  Accumulator acc;
  acc.reserve(std::min<std::size_t>(a.terms().size() * b.terms().size(), 1u << 16));
  Rational prod;
  for (const auto& ta : a.terms()) {
    int da = ta.monomial.degree();
    if (da > hi) break;
    for (const auto& tb : b.terms()) {
      if (da + tb.monomial.degree() > hi) break;
      mpq_mul(prod.get_mpq_t(), ta.coeff.get_mpq_t(), tb.coeff.get_mpq_t());
      auto& slot = acc[(ta.monomial * tb.monomial).bits()];
      mpq_add(slot.get_mpq_t(), slot.get_mpq_t(), prod.get_mpq_t());
    }
  }
  return SeriesBuilder::make(a.num_vars(), cap, exact ? TruncatedSeries::kExact : hi, drain(acc));
}

TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
  return multiply_limited(a, b, a.cap());
}

bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
  check_same_space(a, b, "compare");
  int d = std::min(a.known_degree(), b.known_degree());
  auto ia = a.terms().begin(), ea = a.terms().end();
  auto ib = b.terms().begin(), eb = b.terms().end();
  auto live = [d](auto it, auto end) { return it != end && it->monomial.degree() <= d; };
  while (live(ia, ea) || live(ib, eb)) {
    if (!live(ia, ea) || !live(ib, eb)) return false;
    if (ia->monomial != ib->monomial || ia->coeff != ib->coeff) return false;
    ++ia;
    ++ib;
  }
  return true;
}

Rational TruncatedSeries::evaluate(std::span<const Rational> point) const {
  if (!is_exact()) throw PrecisionError("only exact polynomials can be evaluated away from the origin");
  if (static_cast<int>(point.size()) != num_vars_) throw ShapeError("evaluation point has the wrong dimension");
  Rational total = 0;
  for (const auto& t : terms_) {
    Rational v = t.coeff;
    for (int i = 0; i < num_vars_; ++i) {
      for (int k = 0; k < t.monomial.exponent(i); ++k) v *= point[i];
    }
    total += v;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Calculus

TruncatedSeries partial(const TruncatedSeries& f, int var) {
  if (var < 0 || var >= f.num_vars()) throw ShapeError("partial: variable index out of range");
  std::vector<Term> out;
  for (const auto& t : f.terms()) {
    int e = t.monomial.exponent(var);
    if (e == 0) continue;
    out.push_back({t.monomial.lowered(var), t.coeff * e});
  }
  std::sort(out.begin(), out.end(), [](const Term& a, const Term& b) { return graded_less(a.monomial, b.monomial); });
  int precision = f.is_exact() ? TruncatedSeries::kExact : std::max(-1, f.precision() - 1);
  return SeriesBuilder::make(f.num_vars(), f.cap(), precision, std::move(out));
}

TruncatedSeries integrate(const TruncatedSeries& f, int var) {
  if (var < 0 || var >= f.num_vars()) throw ShapeError("integrate: variable index out of range");
  const int cap = f.cap();
  int precision = f.is_exact() ? TruncatedSeries::kExact : std::min(cap, f.precision() + 1);
  std::vector<Term> out;
  for (const auto& t : f.terms()) {
    if (t.monomial.degree() + 1 > cap) {
      precision = std::min(precision, cap);
      continue;
    }
    out.push_back({t.monomial.raised(var), t.coeff / (t.monomial.exponent(var) + 1)});
  }
  std::sort(out.begin(), out.end(), [](const Term& a, const Term& b) { return graded_less(a.monomial, b.monomial); });
  return SeriesBuilder::make(f.num_vars(), cap, precision, std::move(out));
}

TruncatedSeries inverse(const TruncatedSeries& f) {
  Rational a0 = f.constant_term();
  if (a0 == 0) throw PreconditionError("inverse: series has zero constant term (not a unit)");
  Rational inv0 = 1 / a0;
  const int cap = f.cap();
  if (f.is_exact() && f.max_degree() == 0)
    return TruncatedSeries::constant(f.num_vars(), cap, inv0);
  int hi = std::min(f.known_degree(), cap);

  // Homogeneous parts of f and of the inverse.
  std::vector<std::vector<Term>> fp(hi + 1), bp(hi + 1);
  for (const auto& t : f.terms())
    if (t.monomial.degree() <= hi) fp[t.monomial.degree()].push_back(t);
  bp[0].push_back({Monomial{}, inv0});
  Rational prod;
  for (int d = 1; d <= hi; ++d) {
    Accumulator acc;
    for (int i = 1; i <= d; ++i)
      for (const auto& ta : fp[i])
        for (const auto& tb : bp[d - i]) {
          mpq_mul(prod.get_mpq_t(), ta.coeff.get_mpq_t(), tb.coeff.get_mpq_t());
          auto& slot = acc[(ta.monomial * tb.monomial).bits()];
          mpq_add(slot.get_mpq_t(), slot.get_mpq_t(), prod.get_mpq_t());
        }
    bp[d] = drain(acc);
    for (auto& t : bp[d]) t.coeff *= -inv0;
  }
  std::vector<Term> out;
  for (auto& part : bp)
    for (auto& t : part) out.push_back(std::move(t));
  std::sort(out.begin(), out.end(), [](const Term& a, const Term& b) { return graded_less(a.monomial, b.monomial); });
  return SeriesBuilder::make(f.num_vars(), cap, hi, std::move(out));
}

std::vector<TruncatedSeries> compose_all(std::span<const TruncatedSeries> fs, std::span<const TruncatedSeries> g) {
  if (g.empty()) throw ShapeError("compose: no inner series");
  const int m = static_cast<int>(g.size());
  const int d = g[0].num_vars();
  const int cap = g[0].cap();
  int vmin = kInfinity;
  for (const auto& gi : g) {
    if (gi.num_vars() != d || gi.cap() != cap) throw ShapeError("compose: inner series live in different spaces");
    if (gi.constant_term() != 0) throw PreconditionError("compose: inner series must have zero constant term");
    vmin = std::min(vmin, gi.low_degree());
  }
  // Values of monomials in g, shared by all outer series and built lazily
  // from a monomial of one lower degree.
  std::unordered_map<std::uint64_t, TruncatedSeries> values;
  values.emplace(Monomial().bits(), TruncatedSeries::constant(d, cap, 1));
  std::function<const TruncatedSeries&(Monomial)> value = [&](Monomial mono) -> const TruncatedSeries& {
    auto it = values.find(mono.bits());
    if (it != values.end()) return it->second;
    int var = 0;
    while (mono.exponent(var) == 0) ++var;
    TruncatedSeries v = multiply_limited(value(mono.lowered(var)), g[var], cap);
    return values.emplace(mono.bits(), std::move(v)).first->second;
  };

  std::vector<TruncatedSeries> out;
  for (const auto& f : fs) {
    if (f.num_vars() != m)
      throw ShapeError("compose: expected " + std::to_string(f.num_vars()) + " inner series, got " + std::to_string(m));
    if (f.cap() != cap) throw ShapeError("compose: outer and inner series have different degree caps");
    // Unknown tail of f contributes from degree (p_f + 1) * vmin on.
    long long limit = cap;
    if (!f.is_exact()) limit = std::min<long long>(cap, static_cast<long long>(f.precision() + 1) * vmin - 1);
    limit = std::max(limit, -1LL);
    std::unordered_map<std::uint64_t, Rational> acc;
    int precision = TruncatedSeries::kExact;
    for (const auto& t : f.terms()) {
      if (static_cast<long long>(t.monomial.degree()) * vmin > limit) continue;
      const TruncatedSeries& v = value(t.monomial);
      precision = std::min(precision, v.precision());
      for (const auto& r : v.terms()) acc[r.monomial.bits()] += t.coeff * r.coeff;
    }
    std::vector<std::pair<MultiIndex, Rational>> terms;
    terms.reserve(acc.size());
    for (auto& [bits, c] : acc)
      if (c != 0) terms.push_back({Monomial::from_bits(bits).exponents(d), std::move(c)});
    TruncatedSeries result = TruncatedSeries::from_terms(d, cap, terms, precision);
    if (limit < cap) result = result.truncated(static_cast<int>(limit));
    out.push_back(std::move(result));
  }
  return out;
}

TruncatedSeries compose(const TruncatedSeries& f, std::span<const TruncatedSeries> g) {
  return compose_all(std::span<const TruncatedSeries>(&f, 1), g).front();
}

TruncatedSeries substitute_affine(const TruncatedSeries& f, const RVector& offset, const std::vector<RVector>& B) {
  if (!f.is_exact()) throw PrecisionError("affine substitution requires an exact polynomial");
  const int m = f.num_vars();
  if (static_cast<int>(offset.size()) != m || static_cast<int>(B.size()) != m)
    throw ShapeError("substitute_affine: dimension mismatch");
  const int d = static_cast<int>(B[0].size());
  const int cap = f.cap();
  std::vector<TruncatedSeries> forms;
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<MultiIndex, Rational>> terms;
    terms.push_back({MultiIndex(d, 0), offset[i]});
    for (int j = 0; j < d; ++j) {
      MultiIndex e(d, 0);
      e[j] = 1;
      terms.push_back({e, B[i][j]});
    }
    forms.push_back(TruncatedSeries::from_terms(d, cap, terms));
  }
  TruncatedSeries result(d, cap);
  for (const auto& t : f.terms()) {
    TruncatedSeries prod = TruncatedSeries::constant(d, cap, t.coeff);
    for (int i = 0; i < m; ++i)
      for (int e = 0; e < t.monomial.exponent(i); ++e) prod *= forms[i];
    result += prod;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Printing

std::vector<std::string> default_variable_names(int num_vars) {
  std::vector<std::string> names;
  if (num_vars % 2 == 0) {
    for (int i = 0; i < num_vars / 2; ++i) {
      names.push_back("x" + std::to_string(i + 1));
      names.push_back("y" + std::to_string(i + 1));
    }
  } else {
    for (int i = 0; i < num_vars; ++i) names.push_back("v" + std::to_string(i + 1));
  }
  return names;
}

std::string to_string(const TruncatedSeries& f, const std::vector<std::string>& names_in) {
  auto names = names_in.empty() ? default_variable_names(f.num_vars()) : names_in;
  if (f.terms().empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : f.terms()) {
    Rational c = t.coeff;
    bool negative = c < 0;
    if (negative) c = -c;
    if (first)
      out += negative ? "-" : "";
    else
      out += negative ? " - " : " + ";
    first = false;
    std::string mono;
    for (int i = 0; i < f.num_vars(); ++i) {
      int e = t.monomial.exponent(i);
      if (!e) continue;
      if (!mono.empty()) mono += "*";
      mono += names[i];
      if (e > 1) mono += "^" + std::to_string(e);
    }
    if (mono.empty())
      out += c.get_str();
    else if (c == 1)
      out += mono;
    else
      out += c.get_str() + "*" + mono;
  }
  return out;
}

}  // namespace levitype
