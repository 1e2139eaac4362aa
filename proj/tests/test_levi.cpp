#include <gtest/gtest.h>

#include "levitype/errors.hpp"
#include "support.hpp"

using namespace levitype;
using testsupport::Gen;
using testsupport::Poly2;

namespace {

constexpr int K = 5;

TruncatedSeries v(int n, int i) { return TruncatedSeries::variable(2 * n, K, i); }
TruncatedSeries norm2(int n, int i) { return v(n, x_index(i)) * v(n, x_index(i)) + v(n, y_index(i)) * v(n, y_index(i)); }

Hypersurface sphere() { return Hypersurface(2, v(2, 2).scaled(2) + norm2(2, 1)); }

VectorField tangent_field(const Hypersurface& M, const ACStructure& J, int coord) {
  return project_to_complex_tangent(VectorField::coordinate(M.dim(), M.cap(), coord), M, J);
}

// (d/dx)^p (d/dy)^q of the Laplacian at 0 from the coefficients c_{a,b} of x^a y^b.
Rational laplacian_derivative(const Poly2& f, int p, int q) {
  auto c = [&](int a, int b) {
    auto it = f.find({a, b});
    return it == f.end() ? Rational(0) : it->second;
  };
  using testsupport::factorial;
  return c(p + 2, q) * factorial(p + 2) * factorial(q) + c(p, q + 2) * factorial(p) * factorial(q + 2);
}

// u = x v + y Jv + ((x^2 - y^2)/2) w + x y Jw: the standard holomorphic disk v z + w z^2 / 2.
std::vector<Poly2> quadratic_disk(const RVector& a, const RVector& b) {
  RVector ja = apply_standard_j(a), jb = apply_standard_j(b);
  std::vector<Poly2> u(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto put = [&](int e1, int e2, const Rational& c) {
      if (c != 0) u[i][{e1, e2}] += c;
    };
    put(1, 0, a[i]);
    put(0, 1, ja[i]);
    put(2, 0, b[i] / 2);
    put(0, 2, -b[i] / 2);
    put(1, 1, jb[i]);
  }
  return u;
}

Rational corrected_closed_form(int p, const Hypersurface& M, const RVector& X1, const RVector& X2) {
  RVector i1 = apply_standard_j(X1), i2 = apply_standard_j(X2);
  if (p == 1)
    return third_derivative(M, X1, X1, X1) + third_derivative(M, X1, i1, i1) + 2 * second_derivative(M, X2, X1) +
           2 * second_derivative(M, i2, i1);
  return third_derivative(M, i1, X1, X1) + third_derivative(M, i1, i1, i1) + 2 * second_derivative(M, i2, X1) -
         2 * second_derivative(M, X2, i1);
}

}  // namespace

TEST(Levi, SphereRoutesAgree) {
  Hypersurface M = sphere();
  ACStructure J = ACStructure::standard(2, K);
  VectorField X = tangent_field(M, J, 0);
  LeviReport b = levi_form_bracket(M, J, X), h = levi_form_hessian(M, J, X);
  EXPECT_EQ(b.value, 4);
  EXPECT_EQ(h.value, 4);
  EXPECT_EQ(b.route, LeviRoute::bracket);
  EXPECT_EQ(h.route, LeviRoute::hessian);
  EXPECT_EQ(h.correction_term, 0);
}

TEST(Levi, HessianRouteMatchesCoefficientOracle) {
  Gen g(401);
  for (int i = 0; i < 20; ++i) {
    int n = 2 + i % 2;
    Hypersurface M(n, g.phi(n, K, 4, 6));
    ACStructure J = ACStructure::standard(n, K);
    VectorField X = project_to_complex_tangent(g.field(2 * n, K, 2, 2), M, J);
    Rational oracle = testsupport::hessian_levi_oracle(M.phi(), X.at_origin());
    EXPECT_EQ(levi_form_bracket(M, J, X).value, oracle);
    EXPECT_EQ(levi_form_hessian(M, J, X).value, oracle);
  }
}

TEST(Levi, PerturbedRoutesAgree) {
  Gen g(402);
  int corrections = 0;
  for (int i = 0; i < 20; ++i) {
    int n = 2 + i % 2;
    Hypersurface M(n, g.phi(n, K, 4, 6));
    ACStructure J = ACStructure::perturbed(n, K, g.bits(), g.coin());
    VectorField X = project_to_complex_tangent(g.field(2 * n, K, 2, 2), M, J);
    LeviReport h = levi_form_hessian(M, J, X);
    EXPECT_EQ(levi_form_bracket(M, J, X).value, h.value);
    corrections += h.correction_term != 0;
  }
  EXPECT_GT(corrections, 0);
}

TEST(Levi, RejectsNonTangentField) {
  Hypersurface M = sphere();
  ACStructure J = ACStructure::standard(2, K);
  VectorField N = VectorField::coordinate(4, K, 2);
  EXPECT_THROW(levi_form_bracket(M, J, N), PreconditionError);
  EXPECT_THROW(levi_form_hessian(M, J, N), PreconditionError);
}

TEST(Levi, PolarFormIsHermitian) {
  Gen g(403);
  for (int i = 0; i < 10; ++i) {
    Hypersurface M(3, g.phi(3, K, 3, 6));
    ACStructure J = g.structure(3, K, i % 2 == 1);
    VectorField X = project_to_complex_tangent(g.field(6, K, 2, 2), M, J);
    VectorField Y = project_to_complex_tangent(g.field(6, K, 2, 2), M, J);
    ComplexRational xy = levi_polar(M, J, X, Y), yx = levi_polar(M, J, Y, X);
    EXPECT_EQ(xy.re, yx.re);
    EXPECT_EQ(xy.im, -yx.im);
    ComplexRational xx = levi_polar(M, J, X, X);
    EXPECT_EQ(xx.re, levi_form_bracket(M, J, X).value);
    EXPECT_EQ(xx.im, 0);
  }
}

TEST(Levi, PolarFormRecoversLevi) {
  Gen g(404);
  for (int i = 0; i < 10; ++i) {
    Hypersurface M(3, g.phi(3, K, 3, 6));
    ACStructure J = ACStructure::standard(3, K);
    VectorField X = project_to_complex_tangent(g.field(6, K, 2, 2), M, J);
    VectorField Y = project_to_complex_tangent(g.field(6, K, 2, 2), M, J);
    Rational lx = levi_form_bracket(M, J, X).value, ly = levi_form_bracket(M, J, Y).value;
    Rational lsum = levi_form_bracket(M, J, X + Y).value;
    EXPECT_EQ(lsum, lx + ly + 2 * levi_polar(M, J, X, Y).re);
  }
}

TEST(Levi, ClassifyExamples) {
  ACStructure J2 = ACStructure::standard(2, K), J3 = ACStructure::standard(3, K);
  EXPECT_EQ(classify_point(sphere(), J2).kind, PointClass::strictly_pseudoconvex);
  EXPECT_EQ(classify_point(Hypersurface(2, v(2, 2).scaled(2) - norm2(2, 1)), J2).kind, PointClass::strictly_pseudoconcave);
  EXPECT_EQ(classify_point(Hypersurface(2, v(2, 2).scaled(2)), J2).kind, PointClass::levi_flat);
  EXPECT_EQ(classify_point(Hypersurface(2, v(2, 2).scaled(2) + norm2(2, 1) * norm2(2, 1)), J2).kind, PointClass::levi_flat);

  Classification ind = classify_point(Hypersurface(3, v(3, 4).scaled(2) + norm2(3, 1) - norm2(3, 2)), J3);
  EXPECT_EQ(ind.kind, PointClass::indefinite);
  EXPECT_EQ(ind.inertia.positive, 1);
  EXPECT_EQ(ind.inertia.negative, 1);
  EXPECT_EQ(ind.matrix.basis.size(), 2u);
  EXPECT_EQ(classify_point(Hypersurface(3, v(3, 4).scaled(2) + norm2(3, 1)), J3).kind, PointClass::pseudoconvex_degenerate);
  EXPECT_EQ(classify_point(Hypersurface(3, v(3, 4).scaled(2) - norm2(3, 2)), J3).kind, PointClass::pseudoconcave_degenerate);
}

TEST(Levi, ClassifyNeedsTwoComplexDimensions) {
  Hypersurface M(1, TruncatedSeries::variable(2, K, 0).scaled(2));
  EXPECT_THROW(classify_point(M, ACStructure::standard(1, K)), PreconditionError);
}

TEST(Levi, MatrixDiagonalMatchesLevi) {
  Gen g(405);
  for (int i = 0; i < 8; ++i) {
    Hypersurface M(3, g.phi(3, K, 3, 6));
    ACStructure J = g.structure(3, K, i % 2 == 0);
    Classification c = classify_point(M, J);
    ASSERT_EQ(c.matrix.entries.size(), 2u);
    for (int r = 0; r < 2; ++r) {
      EXPECT_EQ(c.matrix.entries[r][r].im, 0);
      EXPECT_EQ(c.matrix.entries[0][1].re, c.matrix.entries[1][0].re);
      EXPECT_EQ(c.matrix.entries[0][1].im, -c.matrix.entries[1][0].im);
    }
  }
}

TEST(Levi, HigherLeviZeroOrderIsLevi) {
  Gen g(406);
  for (int i = 0; i < 10; ++i) {
    Hypersurface M(2, g.phi(2, K, 4, 6));
    ACStructure J = g.structure(2, K, i % 2 == 1);
    VectorField X = project_to_complex_tangent(g.field(4, K, 2, 2), M, J);
    EXPECT_EQ(higher_levi(M, J, {X.at_origin()}, 0, 0), levi_form_bracket(M, J, X).value);
  }
}

TEST(Levi, FirstOrderMatchesSubstitution) {
  Gen g(407);
  for (int i = 0; i < 20; ++i) {
    Hypersurface M(2, g.phi(2, K, 3, 8));
    ACStructure J = ACStructure::standard(2, K);
    RVector a = g.nonzero_vector(4), b = g.vector(4);
    Poly2 f = testsupport::substitute(M.phi(), quadratic_disk(a, b), 3);
    EXPECT_EQ(higher_levi(M, J, {a, b}, 1, 0), laplacian_derivative(f, 1, 0));
    EXPECT_EQ(higher_levi(M, J, {a, b}, 0, 1), laplacian_derivative(f, 0, 1));
  }
}

TEST(Levi, HigherLeviArity) {
  Hypersurface M = sphere();
  ACStructure J = ACStructure::standard(2, K);
  EXPECT_THROW(higher_levi(M, J, {{1, 0, 0, 0}}, 1, 0), PreconditionError);
  EXPECT_THROW(higher_levi(M, J, std::vector<RVector>(5, RVector{1, 0, 0, 0}), 4, 0), PrecisionError);
  EXPECT_THROW(higher_levi_all(M, J, {}), PreconditionError);
}

TEST(Levi, ZeroOrderClosedForm) {
  Gen g(408);
  for (int i = 0; i < 10; ++i) {
    Hypersurface M(2, g.phi(2, K, 4, 6));
    RVector a = g.nonzero_vector(4);
    EXPECT_EQ(higher_levi_closed_form(0, 0, M, {a}), testsupport::hessian_levi_oracle(M.phi(), a));
  }
}

TEST(Levi, FirstOrderClosedFormsAreGated) {
  Gen g(409);
  int mismatches = 0;
  for (int i = 0; i < 50; ++i) {
    Hypersurface M(2, g.phi(2, K, 3, 8));
    ACStructure J = ACStructure::standard(2, K);
    std::vector<RVector> X{g.nonzero_vector(4), g.vector(4)};
    for (int p = 0; p <= 1; ++p) {
      Rational definition = higher_levi(M, J, X, p, 1 - p);
      EXPECT_EQ(corrected_closed_form(p, M, X[0], X[1]), definition);
      try {
        EXPECT_EQ(higher_levi_closed_form(p, 1 - p, M, X), definition);
      } catch (const ClosedFormMismatch& e) {
        ++mismatches;
        EXPECT_EQ(e.definition(), definition);
        EXPECT_NE(e.printed(), definition);
      }
    }
  }
  EXPECT_GT(mismatches, 0);
}

TEST(Levi, ClosedFormDomain) {
  Hypersurface M = sphere();
  EXPECT_THROW(higher_levi_closed_form(1, 1, M, std::vector<RVector>(3, RVector(4, 0))), PreconditionError);
  EXPECT_THROW(higher_levi_closed_form(1, 0, M, {RVector{1, 0, 0, 0}}), PreconditionError);
}

TEST(Levi, TensorialInTheField) {
  Gen g(410);
  for (int i = 0; i < 10; ++i) {
    Hypersurface M(2, g.phi(2, K, 4, 6));
    ACStructure J = g.structure(2, K, true);
    VectorField V = g.field(4, K, 2, 2);
    VectorField W = V + v(2, g.uniform(0, 3)) * g.field(4, K, 2, 2);
    EXPECT_EQ(levi_form_bracket(M, J, project_to_complex_tangent(W, M, J)).value,
              levi_form_bracket(M, J, project_to_complex_tangent(V, M, J)).value);
  }
}

TEST(Levi, QuadraticScaling) {
  Gen g(411);
  for (int i = 0; i < 10; ++i) {
    Hypersurface M(2, g.phi(2, K, 4, 6));
    ACStructure J = g.structure(2, K, i % 2 == 0);
    VectorField X = project_to_complex_tangent(g.field(4, K, 2, 2), M, J);
    Rational c = g.nonzero_small();
    EXPECT_EQ(levi_form_bracket(M, J, c * X).value, c * c * levi_form_bracket(M, J, X).value);
    EXPECT_EQ(levi_form_bracket(M, J, J.apply(X)).value, levi_form_bracket(M, J, X).value);
  }
}

TEST(Levi, DefiningFunctionCovariance) {
  Gen g(412);
  for (int i = 0; i < 10; ++i) {
    Hypersurface M(2, g.phi(2, K, 4, 6));
    ACStructure J = g.structure(2, K, i % 2 == 1);
    Rational f0 = g.nonzero_small();
    Hypersurface Mf(2, (TruncatedSeries::constant(4, K, f0) + g.poly(4, K, 1, 2, 3)) * M.phi());
    VectorField V = g.field(4, K, 2, 2);
    EXPECT_EQ(levi_form_bracket(Mf, J, project_to_complex_tangent(V, Mf, J)).value,
              f0 * levi_form_bracket(M, J, project_to_complex_tangent(V, M, J)).value);
  }
}

TEST(Levi, LaplacianIdentity) {
  Gen g(413);
  for (int i = 0; i < 10; ++i) {
    Hypersurface M(2, g.phi(2, K, 5, 6));
    ACStructure J = g.structure(2, K, i % 2 == 0);
    std::vector<RVector> jet{g.nonzero_vector(4)};
    for (int m = 1; m < K; ++m) jet.push_back(g.vector(4));
    DiskTrace t = compose_phi_u(M, propagate_cr_jet(jet, J));
    for (int s = 0; s + 2 <= K; ++s)
      for (int p = 0; p <= s; ++p) {
        std::vector<RVector> head(jet.begin(), jet.begin() + s + 1);
        EXPECT_EQ(t.a(p + 2, s - p) + t.a(p, s - p + 2), higher_levi(M, J, head, p, s - p));
      }
  }
}

TEST(Levi, AllOrdersFromOneDisk) {
  Gen g(414);
  for (int i = 0; i < 8; ++i) {
    Hypersurface M(2, g.phi(2, K, 5, 6));
    ACStructure J = g.structure(2, K, i % 2 == 1);
    std::vector<RVector> jet{g.nonzero_vector(4), g.vector(4), g.vector(4)};
    auto all = higher_levi_all(M, J, jet);
    EXPECT_EQ(all.size(), 6u);
    for (const auto& [pq, val] : all) {
      auto [p, q] = pq;
      if (p + q == 2) EXPECT_EQ(val, higher_levi(M, J, jet, p, q));
    }
  }
}

TEST(Levi, TrailingDerivativesDoNotMatter) {
  Gen g(415);
  for (int i = 0; i < 8; ++i) {
    Hypersurface M(2, g.phi(2, K, 5, 6));
    ACStructure J = g.structure(2, K, i % 2 == 0);
    std::vector<RVector> jet{g.nonzero_vector(4), g.vector(4), g.vector(4)};
    auto all = higher_levi_all(M, J, jet);
    for (int s = 0; s <= 1; ++s)
      for (int p = 0; p <= s; ++p) {
        std::vector<RVector> head(jet.begin(), jet.begin() + s + 1);
        EXPECT_EQ(all.at({p, s - p}), higher_levi(M, J, head, p, s - p));
      }
  }
}
