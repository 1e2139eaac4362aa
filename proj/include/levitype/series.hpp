#pragma once

// Exact truncated multivariate power series over Q.
//
// A TruncatedSeries lives in a fixed space (num_vars, cap K): it never stores a
// monomial of total degree above K, and binary operations refuse operands from
// different spaces. Independently of the cap, every series carries a precision:
// the total degree through which its stored coefficients are the true Taylor
// coefficients of the function it represents. Coefficients above the precision
// are unknown and are never stored. Exact series (precision kExact) are
// polynomials with no hidden tail.
//
// Precision bookkeeping follows the usual rules: a partial derivative loses one
// degree, a product f*g is known through min(p_f + val(g), p_g + val(f)), and any
// term pushed above the cap turns an exact result into one of precision K.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "levitype/rational.hpp"

namespace levitype {

using MultiIndex = std::vector<int>;

/// Exponent vector packed into 64 bits: total degree in the top byte and six
/// bits per variable, variable 0 most significant.
class Monomial {
 public:
  static constexpr int kMaxVars = 9;
  static constexpr int kMaxDegree = 63;

  constexpr Monomial() = default;

  static Monomial from_exponents(std::span<const int> exponents);
  static Monomial unit(int var);
  static constexpr Monomial from_bits(std::uint64_t bits) { return Monomial(bits); }

  int degree() const { return static_cast<int>(bits_ >> 56); }
  int exponent(int var) const { return static_cast<int>((bits_ >> shift(var)) & 63u); }
  MultiIndex exponents(int num_vars) const;

  /// Caller guarantees the product degree stays within kMaxDegree.
  Monomial operator*(Monomial other) const { return Monomial(bits_ + other.bits_); }
  /// Requires exponent(var) > 0.
  Monomial lowered(int var) const { return Monomial(bits_ - (std::uint64_t{1} << 56) - (std::uint64_t{1} << shift(var))); }
  Monomial raised(int var) const { return Monomial(bits_ + (std::uint64_t{1} << 56) + (std::uint64_t{1} << shift(var))); }

  std::uint64_t bits() const { return bits_; }

  friend bool operator==(Monomial a, Monomial b) { return a.bits_ == b.bits_; }
  friend bool operator!=(Monomial a, Monomial b) { return a.bits_ != b.bits_; }

  /// Graded lexicographic order: lower degree first, then x1^2 before x1*y1.
  friend bool graded_less(Monomial a, Monomial b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return (a.bits_ & kExpMask) > (b.bits_ & kExpMask);
  }

 private:
  static constexpr std::uint64_t kExpMask = (std::uint64_t{1} << 56) - 1;
  static constexpr int shift(int var) { return 6 * (8 - var); }
  explicit constexpr Monomial(std::uint64_t bits) : bits_(bits) {}

  std::uint64_t bits_ = 0;
};

struct Term {
  Monomial monomial;
  Rational coeff;
};

class TruncatedSeries {
 public:
  static constexpr int kExact = std::numeric_limits<int>::max();

  TruncatedSeries() = default;
  /// The exact zero series of the given space.
  TruncatedSeries(int num_vars, int cap);

  static TruncatedSeries constant(int num_vars, int cap, const Rational& c);
  static TruncatedSeries variable(int num_vars, int cap, int var);
  static TruncatedSeries monomial(int num_vars, int cap, const MultiIndex& exponents, const Rational& c);
  /// Builds a series from (multi-index, coefficient) pairs; repeated indices add
  /// up. Terms above min(cap, precision) are dropped (and mark the series inexact).
  static TruncatedSeries from_terms(int num_vars, int cap,
                                    const std::vector<std::pair<MultiIndex, Rational>>& terms,
                                    int precision = kExact);

  int num_vars() const { return num_vars_; }
  int cap() const { return cap_; }
  int precision() const { return precision_; }
  bool is_exact() const { return precision_ == kExact; }
  /// Highest degree whose coefficients are known (cap for exact series).
  int known_degree() const { return is_exact() ? cap_ : precision_; }

  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  Rational coefficient(const MultiIndex& exponents) const;
  Rational coefficient(Monomial m) const;
  /// Value at the origin. Throws PrecisionError when even degree 0 is unknown.
  Rational constant_term() const;
  /// Lowest degree of a stored nonzero term; for an all-zero series this is
  /// one past the known degree (a large sentinel for the exact zero).
  int low_degree() const;
  /// Highest stored degree, -1 when no term is stored.
  int max_degree() const;
  bool is_exact_zero() const { return is_exact() && terms_.empty(); }

  TruncatedSeries homogeneous_part(int degree) const;
  /// Forgets everything above `degree`; exact polynomials of degree <= `degree` stay exact.
  TruncatedSeries truncated(int degree) const;
  /// Moves the series into the space with cap `new_cap` (explicit cap change).
  TruncatedSeries with_cap(int new_cap) const;

  TruncatedSeries operator-() const;
  TruncatedSeries scaled(const Rational& s) const;

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b);
  friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b);
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b);
  friend TruncatedSeries operator*(const Rational& s, const TruncatedSeries& a) { return a.scaled(s); }

  TruncatedSeries& operator+=(const TruncatedSeries& b) { return *this = *this + b; }
  TruncatedSeries& operator-=(const TruncatedSeries& b) { return *this = *this - b; }
  TruncatedSeries& operator*=(const TruncatedSeries& b) { return *this = *this * b; }

  /// Coefficient-wise equality through the degree both operands know.
  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b);
  friend bool operator!=(const TruncatedSeries& a, const TruncatedSeries& b) { return !(a == b); }

  /// Evaluates an exact polynomial at a rational point.
  Rational evaluate(std::span<const Rational> point) const;

 private:
  friend class SeriesBuilder;
  friend TruncatedSeries multiply_limited(const TruncatedSeries& a, const TruncatedSeries& b, int limit);

  int num_vars_ = 0;
  int cap_ = 0;
  int precision_ = kExact;
  std::vector<Term> terms_;  // graded-lex sorted, nonzero, degree <= known_degree()
};

/// Product truncated at total degree `limit` (precision at most `limit`).
TruncatedSeries multiply_limited(const TruncatedSeries& a, const TruncatedSeries& b, int limit);

TruncatedSeries partial(const TruncatedSeries& f, int var);
/// Antiderivative in `var` vanishing on {x_var = 0}.
TruncatedSeries integrate(const TruncatedSeries& f, int var);
/// Multiplicative inverse; requires a nonzero constant term.
TruncatedSeries inverse(const TruncatedSeries& f);
/// f(g_1, ..., g_m). Every g_i must share num_vars and cap with the others and
/// with f's cap, and have zero constant term.
TruncatedSeries compose(const TruncatedSeries& f, std::span<const TruncatedSeries> g);
/// Composes several outer series with the same inner map, sharing the powers of g.
std::vector<TruncatedSeries> compose_all(std::span<const TruncatedSeries> fs, std::span<const TruncatedSeries> g);
/// f(offset + B w) for an exact polynomial f; B has f.num_vars() rows and
/// `B[0].size()` columns. The result is exact when its degree fits under the cap.
TruncatedSeries substitute_affine(const TruncatedSeries& f, const RVector& offset,
                                  const std::vector<RVector>& B);

/// Default variable names: x1,y1,x2,y2,... for an even count, v1,v2,... otherwise.
std::vector<std::string> default_variable_names(int num_vars);
/// Renders the stored terms as an expression the expression parser accepts.
std::string to_string(const TruncatedSeries& f, const std::vector<std::string>& names = {});

}  // namespace levitype
