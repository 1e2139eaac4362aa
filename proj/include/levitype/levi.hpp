#pragma once

// Levi form (two independent routes), its polar form, pointwise
// classification, and the higher Levi forms L^{p,q}.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "levitype/disks.hpp"
#include "levitype/errors.hpp"

namespace levitype {

enum class LeviRoute { bracket, hessian };

struct LeviReport {
  Rational value;
  LeviRoute route = LeviRoute::bracket;
  /// dphi((nabla_{JX} J) X - (nabla_X J) JX) at 0; zero for constant J.
  Rational correction_term;
};

struct HermitianLeviMatrix {
  std::vector<RVector> basis;
  std::vector<std::vector<ComplexRational>> entries;
};

enum class PointClass {
  strictly_pseudoconvex,
  pseudoconvex_degenerate,
  indefinite,
  strictly_pseudoconcave,
  pseudoconcave_degenerate,
  levi_flat,
};

std::string to_string(PointClass c);

struct Classification {
  PointClass kind = PointClass::levi_flat;
  HermitianLeviMatrix matrix;
  /// Inertia of the Hermitian matrix (complex dimensions).
  Inertia inertia;
};

/// The printed closed form and the disk-route value disagree.
class ClosedFormMismatch : public Error {
 public:
  ClosedFormMismatch(int p, int q, Rational printed, Rational definition);
  const Rational& printed() const { return printed_; }
  const Rational& definition() const { return definition_; }

 private:
  Rational printed_, definition_;
};

/// dphi(J[X, JX]) at 0. X must be complex tangent (PreconditionError otherwise).
LeviReport levi_form_bracket(const Hypersurface& M, const ACStructure& J, const VectorField& X);
/// D^2 phi(X, X) + D^2 phi(JX, JX) + correction, from X(0), the Hessian and dJ(0).
LeviReport levi_form_hessian(const Hypersurface& M, const ACStructure& J, const VectorField& X);

/// Polar form: (dphi(J[X,JY] + J[Y,JX]) + i dphi(J[X,Y] + J[JX,JY])) / 2 at 0.
ComplexRational levi_polar(const Hypersurface& M, const ACStructure& J, const VectorField& X, const VectorField& Y);

/// Requires n >= 2.
Classification classify_point(const Hypersurface& M, const ACStructure& J);

/// d^{p+q}/dx^p dy^q of Laplacian(phi o u) at 0 for the disk propagated from
/// (u_1, ..., u_{p+q+1}, 0). `x_jet` holds exactly p + q + 1 vectors.
Rational higher_levi(const Hypersurface& M, const ACStructure& J, const std::vector<RVector>& x_jet, int p, int q);

/// All L^{i,j} with i + j <= x_jet.size() - 1, from a single padded disk.
std::map<std::pair<int, int>, Rational> higher_levi_all(const Hypersurface& M, const ACStructure& J,
                                                        const std::vector<RVector>& x_jet);

/// Closed forms for standard J and (p, q) in {(0,0), (1,0), (0,1)}, evaluated as
/// printed. Each value is checked against higher_levi; a disagreement raises
/// ClosedFormMismatch carrying both numbers.
Rational higher_levi_closed_form(int p, int q, const Hypersurface& M, const std::vector<RVector>& X);

/// D^2 phi(a, b) and D^3 phi(a, b, c) at 0.
Rational second_derivative(const Hypersurface& M, const RVector& a, const RVector& b);
Rational third_derivative(const Hypersurface& M, const RVector& a, const RVector& b, const RVector& c);

}  // namespace levitype
