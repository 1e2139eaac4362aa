#pragma once

// Random generators and independent oracles shared by the test suites.

#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "levitype/engine.hpp"

namespace testsupport {

using namespace levitype;

/// LEVITYPE_SEED when set, otherwise a fixed default.
std::uint64_t base_seed();

class Gen {
 public:
  explicit Gen(std::uint64_t salt) : rng_(base_seed() ^ (salt * 0x9E3779B97F4A7C15ull)) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return uniform(0, 1) == 1; }
  std::uint64_t bits() { return rng_(); }
  /// Numerator in [-3, 3], denominator in {1, 2}.
  Rational small();
  Rational nonzero_small();
  RVector vector(int dim);
  RVector nonzero_vector(int dim);
  /// Random polynomial with terms of degree lo..hi.
  TruncatedSeries poly(int nv, int cap, int lo, int hi, int terms);
  /// 2 x_n + random terms of degree 2..max_degree.
  TruncatedSeries phi(int n, int cap, int max_degree, int terms);
  VectorField field(int dim, int cap, int max_degree, int terms);
  ACStructure structure(int n, int cap, bool perturbed);

 private:
  std::mt19937_64 rng_;
};

Rational factorial(int m);

/// Two-variable polynomial keyed by (a, b) for x^a y^b.
using Poly2 = std::map<std::pair<int, int>, Rational>;

/// sum over the terms of f of coeff * prod_v u_v^{e_v}, keeping degrees <= max_degree.
Poly2 substitute(const TruncatedSeries& f, const std::vector<Poly2>& u, int max_degree);

/// Taylor coefficients of the formal disk with the given x-jet, found by
/// undetermined coefficients: at each degree d the unknown coefficients with a
/// y factor are fixed by solving the degree d-1 part of du/dy - J(u) du/dx = 0
/// as a linear system. Returns d^{p+q}u/dx^p dy^q (0) for 1 <= p+q <= order.
std::map<std::pair<int, int>, RVector> cr_oracle(const std::vector<RVector>& x_jet, const ACStructure& J);

/// Contact order of phi along the holomorphic disk u_j(z) = sum_m c_{j,m} z^m
/// (standard structure), by direct complex polynomial arithmetic. Returns
/// `limit + 1` when no term of degree <= limit survives.
int holomorphic_contact(const TruncatedSeries& phi, const std::vector<std::vector<ComplexRational>>& coeffs, int limit);

/// Levi form value of the standard structure at 0 from the Hessian:
/// D^2 phi(v, v) + D^2 phi(J v, J v), by direct coefficient reading.
Rational hessian_levi_oracle(const TruncatedSeries& phi, const RVector& v);

}  // namespace testsupport
