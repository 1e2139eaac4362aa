#include <gtest/gtest.h>

#include "levitype/errors.hpp"
#include "support.hpp"

using namespace levitype;
using testsupport::Gen;

namespace {

constexpr int K = 6;

TruncatedSeries x(int n, int i) { return TruncatedSeries::variable(2 * n, K, x_index(i)); }
TruncatedSeries y(int n, int i) { return TruncatedSeries::variable(2 * n, K, y_index(i)); }

Hypersurface flat() { return Hypersurface(2, x(2, 2).scaled(2)); }
Hypersurface sphere() { return Hypersurface(2, x(2, 2).scaled(2) + x(2, 1) * x(2, 1) + y(2, 1) * y(2, 1)); }

RVector e(int dim, int i) {
  RVector v(dim, 0);
  v[i] = 1;
  return v;
}

}  // namespace

TEST(Geometry, GradientFrameFlat) {
  ACStructure J = ACStructure::standard(2, K);
  Frame f = gradient_frame(flat(), J);
  EXPECT_EQ(f.N, VectorField::constant({0, 0, 2, 0}, K));
  EXPECT_EQ(f.JN, VectorField::constant({0, 0, 0, 2}, K));
}

TEST(Geometry, GradientFramePolynomial) {
  Frame f = gradient_frame(sphere(), ACStructure::standard(2, K));
  EXPECT_EQ(f.N[0], x(2, 1).scaled(2));
  EXPECT_EQ(f.N[1], y(2, 1).scaled(2));
  EXPECT_EQ(f.N[2], TruncatedSeries::constant(4, K, 2));
  EXPECT_TRUE(f.N[3].terms().empty());
}

TEST(Geometry, GradientFramePerturbedAtOrigin) {
  Gen g(201);
  ACStructure J = ACStructure::perturbed(2, K, g.bits());
  Hypersurface M(2, g.phi(2, K, 3, 4));
  Frame f = gradient_frame(M, J);
  EXPECT_EQ(f.JN.at_origin(), apply_standard_j(f.N.at_origin()));
}

TEST(Geometry, ProjectionKeepsTangentField) {
  ACStructure J = ACStructure::standard(2, K);
  VectorField X = project_to_complex_tangent(VectorField::coordinate(4, K, 0), flat(), J);
  EXPECT_EQ(X, VectorField::coordinate(4, K, 0));
}

TEST(Geometry, ProjectionKillsNormal) {
  ACStructure J = ACStructure::standard(2, K);
  VectorField X = project_to_complex_tangent(VectorField::coordinate(4, K, 2), flat(), J);
  EXPECT_EQ(X, VectorField::zero(4, K));
}

TEST(Geometry, ProjectionOnSphereIsComplexTangent) {
  Hypersurface M = sphere();
  ACStructure J = ACStructure::standard(2, K);
  VectorField X = project_to_complex_tangent(VectorField::coordinate(4, K, 0), M, J);
  EXPECT_EQ(X.at_origin(), e(4, 0));
  EXPECT_EQ(differential(M, X), TruncatedSeries(4, K));
  EXPECT_EQ(differential(M, J.apply(X)), TruncatedSeries(4, K));
}

TEST(Geometry, ProjectionIsComplexTangentForRandomData) {
  Gen g(202);
  for (int i = 0; i < 20; ++i) {
    int n = 2 + i % 2;
    Hypersurface M(n, g.phi(n, 5, 4, 4));
    ACStructure J = g.structure(n, 5, i % 2 == 0);
    VectorField X = project_to_complex_tangent(g.field(2 * n, 5, 2, 2), M, J);
    EXPECT_EQ(differential(M, X), TruncatedSeries(2 * n, 5));
    EXPECT_EQ(differential(M, J.apply(X)), TruncatedSeries(2 * n, 5));
  }
}

TEST(Geometry, BracketExamples) {
  VectorField a = VectorField::constant({1, 2, 0, 0}, K), b = VectorField::constant({0, 1, 3, 0}, K);
  EXPECT_EQ(lie_bracket(a, b), VectorField::zero(4, K));
  VectorField X = VectorField::coordinate(4, K, 0);
  VectorField Y = x(2, 1) * VectorField::coordinate(4, K, 1);
  EXPECT_EQ(lie_bracket(X, Y), VectorField::coordinate(4, K, 1));
}

TEST(Geometry, BracketAntisymmetryAndJacobi) {
  Gen g(203);
  for (int i = 0; i < 10; ++i) {
    VectorField A = g.field(4, 5, 2, 2), B = g.field(4, 5, 2, 2), C = g.field(4, 5, 2, 2);
    EXPECT_EQ(lie_bracket(A, B), VectorField::zero(4, 5) - lie_bracket(B, A));
    VectorField jac = lie_bracket(A, lie_bracket(B, C)) + lie_bracket(B, lie_bracket(C, A)) + lie_bracket(C, lie_bracket(A, B));
    EXPECT_EQ(jac, VectorField::zero(4, 5));
  }
}

namespace {

// sum_j V_j(0) dX_i/dx_j(0), read off the linear coefficients of X.
RVector first_derivative_oracle(const VectorField& X, const RVector& V) {
  const int d = X.dim();
  RVector out(d, 0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      MultiIndex e(d, 0);
      e[j] = 1;
      out[i] += V[j] * X[i].coefficient(e);
    }
  return out;
}

}  // namespace

TEST(Geometry, CovariantDerivativeExample) {
  VectorField X = VectorField::coordinate(4, K, 0);
  VectorField Y = (x(2, 1) * x(2, 1)) * VectorField::coordinate(4, K, 1);
  EXPECT_EQ(covariant_derivative(X, Y), x(2, 1).scaled(2) * VectorField::coordinate(4, K, 1));
  EXPECT_EQ(covariant_derivative(Y, X), VectorField::zero(4, K));
}

TEST(Geometry, TorsionFree) {
  Gen g(204);
  for (int i = 0; i < 10; ++i) {
    VectorField A = g.field(4, 5, 3, 3), B = g.field(4, 5, 3, 3);
    EXPECT_EQ(covariant_derivative(A, B) - covariant_derivative(B, A), lie_bracket(A, B));
  }
}

TEST(Geometry, SphereFirstDerivative) {
  Hypersurface M = sphere();
  ACStructure J = ACStructure::standard(2, K);
  VectorField X = project_to_complex_tangent(VectorField::coordinate(4, K, 0), M, J);
  EXPECT_EQ(dpq_derivative(X, J, 0, 0), e(4, 0));
  RVector d10 = dpq_derivative(X, J, 1, 0);
  EXPECT_EQ(d10, (RVector{0, 0, -1, 0}));
  EXPECT_EQ(d10, first_derivative_oracle(X, X.at_origin()));
}

TEST(Geometry, FirstDerivativesMatchCoefficientOracle) {
  Gen g(205);
  for (int i = 0; i < 20; ++i) {
    ACStructure J = g.structure(2, 5, i % 2 == 1);
    VectorField X = g.field(4, 5, 3, 4);
    EXPECT_EQ(dpq_derivative(X, J, 1, 0), first_derivative_oracle(X, X.at_origin()));
    EXPECT_EQ(dpq_derivative(X, J, 0, 1), first_derivative_oracle(X, apply_standard_j(X.at_origin())));
  }
}

TEST(Geometry, SecondDerivativeByComposition) {
  Gen g(206);
  for (int i = 0; i < 10; ++i) {
    ACStructure J = g.structure(2, 5, true);
    VectorField X = g.field(4, 5, 3, 4);
    VectorField JX = J.apply(X);
    VectorField XX = covariant_derivative(X, X);
    EXPECT_EQ(dpq_derivative(X, J, 2, 0), covariant_derivative(X, XX).at_origin());
    EXPECT_EQ(dpq_derivative(X, J, 1, 1), covariant_derivative(JX, XX).at_origin());
    EXPECT_EQ(dpq_derivative(X, J, 0, 2), covariant_derivative(JX, covariant_derivative(JX, X)).at_origin());
  }
}

TEST(Geometry, FieldJetCollectsDerivatives) {
  Gen g(207);
  ACStructure J = g.structure(2, 5, true);
  VectorField X = g.field(4, 5, 3, 4);
  FieldJet jet = field_jet(X, J, 3);
  EXPECT_EQ(jet.order, 3);
  EXPECT_EQ(jet.entries.size(), 10u);
  for (int p = 0; p <= 3; ++p)
    for (int q = 0; p + q <= 3; ++q) EXPECT_EQ(jet.at(p, q), dpq_derivative(X, J, p, q));
  EXPECT_THROW(jet.at(4, 0), PreconditionError);
}

TEST(Geometry, JetOrderLimitedByPrecision) {
  Gen g(208);
  ACStructure J = ACStructure::standard(2, 5);
  VectorField X = g.field(4, 5, 5, 4).truncated(2);
  EXPECT_THROW(field_jet(X, J, 3), PrecisionError);
  EXPECT_THROW(dpq_derivative(X, J, 2, 1), PrecisionError);
}

TEST(Geometry, StructureValidation) {
  std::vector<TruncatedSeries> entries = ACStructure::standard(2, 4).entries();
  entries[1] = TruncatedSeries::constant(4, 4, 1);  // J(0) no longer standard
  EXPECT_THROW(ACStructure(2, entries), GeometryError);

  entries = ACStructure::standard(2, 4).entries();
  entries[0] = TruncatedSeries::variable(4, 4, 0);  // J^2 fails at degree 1
  EXPECT_THROW(ACStructure(2, entries), GeometryError);

  entries.pop_back();
  EXPECT_THROW(ACStructure(2, entries), GeometryError);
}

TEST(Geometry, PerturbedStructureSquaresToMinusOne) {
  Gen g(209);
  for (int i = 0; i < 10; ++i) {
    ACStructure J = ACStructure::perturbed(2 + i % 2, 5, g.bits(), g.coin());
    const int d = J.dim();
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        TruncatedSeries s(d, 5);
        for (int m = 0; m < d; ++m) s += J.at(r, m) * J.at(m, c);
        EXPECT_EQ(s, TruncatedSeries::constant(d, 5, r == c ? -1 : 0));
      }
  }
}

TEST(Geometry, HypersurfaceValidation) {
  EXPECT_THROW(Hypersurface(2, x(2, 1) * x(2, 1)), GeometryError);
  EXPECT_THROW(Hypersurface(2, x(2, 2) + TruncatedSeries::constant(4, K, 1)), GeometryError);
  EXPECT_THROW(Hypersurface(3, x(2, 2)), GeometryError);
  EXPECT_THROW(Hypersurface(2, TruncatedSeries::variable(4, 1, 2)), GeometryError);
  EXPECT_NO_THROW(Hypersurface(2, x(2, 2)));
}

TEST(Geometry, ComplexTangentBasis) {
  Hypersurface M = sphere();
  std::vector<RVector> B = complex_tangent_basis(M);
  ASSERT_EQ(B.size(), 1u);
  EXPECT_TRUE(in_complex_tangent_at_origin(M, B[0]));
  EXPECT_TRUE(in_complex_tangent_at_origin(M, apply_standard_j(B[0])));
  EXPECT_FALSE(in_complex_tangent_at_origin(M, e(4, 2)));
}

TEST(Geometry, RecenterProjectsOntoSurface) {
  Hypersurface M = sphere();
  ACStructure J = ACStructure::standard(2, K);
  Recentered r = recenter(2, M.phi(), J.entries(), {1, 0, 0, 0});
  EXPECT_TRUE(r.projected);
  EXPECT_EQ(r.point, (RVector{1, 0, Rational(-1, 2), 0}));
  EXPECT_EQ(r.M.phi().constant_term(), 0);
}

TEST(Geometry, RecenterPullsBackGradient) {
  // grad phi at (1, 0, -1/2, 0) is (2, 0, 2, 0); new coordinates satisfy x = p + B w.
  Hypersurface M = sphere();
  Recentered r = recenter(2, M.phi(), ACStructure::standard(2, K).entries(), {1, 0, Rational(-1, 2), 0});
  EXPECT_FALSE(r.projected);
  RVector old_grad{2, 0, 2, 0};
  RVector pulled(4, 0);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) pulled[j] += r.basis[i][j] * old_grad[i];
  EXPECT_EQ(r.M.gradient_at_origin(), pulled);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(r.J.at(i, j).constant_term(), standard_j_matrix(2)[i][j]);
}

TEST(Geometry, RecenterRejectsBadPoints) {
  TruncatedSeries phi = x(2, 2).scaled(2) + x(2, 1) * x(2, 1) * x(2, 2);
  EXPECT_THROW(recenter(2, phi, ACStructure::standard(2, K).entries(), {1, 0}), GeometryError);
}
