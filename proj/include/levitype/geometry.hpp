#pragma once

// Hypersurfaces, almost complex structures and vector fields near the origin of
// R^{2n}, coordinates ordered (x1, y1, ..., xn, yn).

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "levitype/linalg.hpp"
#include "levitype/series.hpp"

namespace levitype {

/// Index of x_i / y_i (1-based i) in the coordinate list.
inline int x_index(int i) { return 2 * (i - 1); }
inline int y_index(int i) { return 2 * (i - 1) + 1; }

/// Standard complex structure: (a, b, c, d, ...) -> (-b, a, -d, c, ...).
RVector apply_standard_j(const RVector& v);
RMatrix standard_j_matrix(int n);

/// M = {phi = 0} through the origin. M_+ = {phi > 0} is the outside.
class Hypersurface {
 public:
  /// Throws GeometryError unless phi(0) = 0, dphi(0) != 0 and cap >= 2.
  Hypersurface(int n, TruncatedSeries phi);

  int n() const { return n_; }
  int dim() const { return 2 * n_; }
  int cap() const { return phi_.cap(); }
  const TruncatedSeries& phi() const { return phi_; }

  RVector gradient_at_origin() const;
  /// Second derivatives d^2 phi / dx_i dx_j at 0.
  RMatrix hessian_at_origin() const;

  Hypersurface with_cap(int cap) const { return Hypersurface(n_, phi_.with_cap(cap)); }

 private:
  int n_;
  TruncatedSeries phi_;
};

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(std::vector<TruncatedSeries> components);

  static VectorField zero(int dim, int cap);
  static VectorField constant(const RVector& v, int cap);
  /// The coordinate field d/d(coordinate `var`).
  static VectorField coordinate(int dim, int cap, int var);

  int dim() const { return static_cast<int>(c_.size()); }
  int cap() const { return c_.front().cap(); }
  const TruncatedSeries& operator[](int i) const { return c_[i]; }
  TruncatedSeries& operator[](int i) { return c_[i]; }
  const std::vector<TruncatedSeries>& components() const { return c_; }

  RVector at_origin() const;
  /// Smallest precision among the components.
  int known_degree() const;
  VectorField truncated(int degree) const;
  VectorField with_cap(int cap) const;

  friend VectorField operator+(const VectorField& a, const VectorField& b);
  friend VectorField operator-(const VectorField& a, const VectorField& b);
  friend VectorField operator*(const TruncatedSeries& f, const VectorField& v);
  friend VectorField operator*(const Rational& s, const VectorField& v);
  friend bool operator==(const VectorField& a, const VectorField& b) { return a.c_ == b.c_; }

 private:
  std::vector<TruncatedSeries> c_;
};

/// Pointwise Euclidean pairing sum_i a_i b_i.
TruncatedSeries pairing(const VectorField& a, const VectorField& b);

class ACStructure {
 public:
  /// Row-major 2n x 2n entries. Throws GeometryError unless J(0) is the
  /// standard structure and J o J = -I through the known degree.
  ACStructure(int n, std::vector<TruncatedSeries> entries);

  static ACStructure standard(int n, int cap);
  /// J = A J_std A^{-1} with A = I + P, P strictly upper triangular with entries
  /// linear in the coordinates (quadratic when `quadratic`), seeded.
  static ACStructure perturbed(int n, int cap, std::uint64_t seed, bool quadratic = false);
  /// Same construction from an explicit strictly upper triangular P.
  static ACStructure conjugated(int n, const std::vector<TruncatedSeries>& P);

  int n() const { return n_; }
  int dim() const { return 2 * n_; }
  int cap() const { return e_.front().cap(); }
  const TruncatedSeries& at(int i, int j) const { return e_[i * dim() + j]; }
  const std::vector<TruncatedSeries>& entries() const { return e_; }
  bool is_constant() const;

  VectorField apply(const VectorField& v) const;
  /// J v keeping only degrees <= limit.
  VectorField apply(const VectorField& v, int limit) const;
  /// dJ/dx_k at 0 as a matrix.
  RMatrix derivative_at_origin(int k) const;
  ACStructure with_cap(int cap) const;

 private:
  ACStructure() = default;
  int n_ = 0;
  std::vector<TruncatedSeries> e_;
};

struct Frame {
  VectorField N;   // gradient of phi
  VectorField JN;  // J applied to N
};

/// Triangle of vectors indexed by (p, q), p + q <= order.
struct FieldJet {
  int order = 0;
  std::map<std::pair<int, int>, RVector> entries;

  const RVector& at(int p, int q) const;
  friend bool operator==(const FieldJet& a, const FieldJet& b) = default;
};

Frame gradient_frame(const Hypersurface& M, const ACStructure& J);

/// dphi(V) as a series.
TruncatedSeries differential(const Hypersurface& M, const VectorField& V);

/// X = V - a N - b JN with dphi(X) = dphi(JX) = 0.
VectorField project_to_complex_tangent(const VectorField& V, const Hypersurface& M, const ACStructure& J);

VectorField lie_bracket(const VectorField& X, const VectorField& Y);
/// Flat connection: (nabla_X Y)_i = sum_j X_j dY_i/dx_j.
VectorField covariant_derivative(const VectorField& X, const VectorField& Y);
/// Same, keeping only degrees <= limit of the result.
VectorField covariant_derivative(const VectorField& X, const VectorField& Y, int limit);

/// nabla_{JX}^q nabla_X^p X at 0.
RVector dpq_derivative(const VectorField& X, const ACStructure& J, int p, int q);
FieldJet field_jet(const VectorField& X, const ACStructure& J, int k);

/// True when v annihilates dphi(0) and dphi(0) o J(0).
bool in_complex_tangent_at_origin(const Hypersurface& M, const RVector& v);

/// Greedy complex basis of the complex tangent space at 0 (n - 1 vectors), from
/// the projections of the coordinate directions.
std::vector<RVector> complex_tangent_basis(const Hypersurface& M);

/// Result of moving a rational point of M to the origin.
struct Recentered {
  Hypersurface M;
  ACStructure J;
  RVector point;  // after the optional projection onto M
  RMatrix basis;  // x = point + basis * w
  bool projected = false;
};

/// Translates `point` to the origin and conjugates J by a constant linear map so
/// that the new structure is standard at 0. Needs exact polynomial phi and J
/// (the J entries may be any structure with J(point)^2 = -I). A point off M is
/// moved onto M along a coordinate in which phi is affine with constant slope.
Recentered recenter(int n, const TruncatedSeries& phi, const std::vector<TruncatedSeries>& J_entries,
                    const RVector& point);

}  // namespace levitype
