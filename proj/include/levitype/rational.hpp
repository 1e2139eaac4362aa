#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace levitype {

using Rational = mpq_class;

/// A point or tangent vector of R^{2n} with exact coordinates.
using RVector = std::vector<Rational>;

/// Parses "3", "-3/4" or "0.125" into an exact rational. Throws ParseError.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);
std::string to_string(const RVector& v);

/// Complex rational a + ib, used by the polar Levi form.
struct ComplexRational {
  Rational re;
  Rational im;

  ComplexRational conj() const { return {re, -im}; }
  friend bool operator==(const ComplexRational& a, const ComplexRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

std::string to_string(const ComplexRational& z);

// Small dense helpers over RVector.
RVector operator+(const RVector& a, const RVector& b);
RVector operator-(const RVector& a, const RVector& b);
RVector operator*(const Rational& s, const RVector& v);
Rational dot(const RVector& a, const RVector& b);
bool is_zero(const RVector& v);

}  // namespace levitype
