#include "levitype/levi.hpp"

#include "levitype/errors.hpp"

namespace levitype {

namespace {

// dphi(V) through degree `limit`.
TruncatedSeries differential_limited(const Hypersurface& M, const VectorField& V, int limit) {
  TruncatedSeries s(M.dim(), V.cap());
  for (int i = 0; i < M.dim(); ++i) {
    if (V[i].is_exact_zero()) continue;
    s += multiply_limited(partial(M.phi(), i).truncated(limit), V[i], limit);
  }
  return s.truncated(limit);
}

bool vanishes(const TruncatedSeries& s) { return s == TruncatedSeries(s.num_vars(), s.cap()); }

void require_complex_tangent(const Hypersurface& M, const ACStructure& J, const VectorField& X) {
  if (X.dim() != M.dim() || X.cap() != J.cap()) throw ShapeError("field, hypersurface and J live in different spaces");
  if (X.known_degree() < 1) throw PrecisionError("Levi form needs the field through degree 1");
  VectorField X1 = X.truncated(1);
  if (!vanishes(differential_limited(M, X1, 1)) || !vanishes(differential_limited(M, J.apply(X1, 1), 1)))
    throw PreconditionError("field is not complex tangent (dphi(X) or dphi(JX) does not vanish)");
}

// J(0) [A, B](0) paired with dphi(0); A and B known through degree 1.
Rational bracket_value(const RVector& g, const VectorField& A, const VectorField& B) {
  VectorField br = covariant_derivative(A, B, 0) - covariant_derivative(B, A, 0);
  return dot(g, apply_standard_j(br.at_origin()));
}

// dphi((nabla_{JX} J) X - (nabla_X J) JX) at 0, from X(0) and dJ(0).
Rational j_correction(const Hypersurface& M, const ACStructure& J, const RVector& x0) {
  RVector jx = apply_standard_j(x0);
  RVector corr(M.dim(), 0);
  for (int k = 0; k < M.dim(); ++k) {
    if (jx[k] == 0 && x0[k] == 0) continue;
    RMatrix Jk = J.derivative_at_origin(k);
    for (int i = 0; i < M.dim(); ++i)
      for (int j = 0; j < M.dim(); ++j) {
        if (Jk[i][j] == 0) continue;
        corr[i] += jx[k] * Jk[i][j] * x0[j];
        corr[i] -= x0[k] * Jk[i][j] * jx[j];
      }
  }
  return dot(M.gradient_at_origin(), corr);
}

Rational factorial(int m) {
  mpz_class f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  return Rational(f);
}

// Laplacian(phi o u) from a propagated disk, as a series in (x, y).
TruncatedSeries laplacian_trace(const Hypersurface& M, const ACStructure& J, std::vector<RVector> x_jet) {
  x_jet.push_back(RVector(M.dim(), 0));
  const int order = static_cast<int>(x_jet.size());
  if (order > M.cap() || order > J.cap())
    throw PrecisionError("higher Levi form of total order " + std::to_string(order) + " exceeds the degree cap");
  DiskJet u = propagate_cr_jet(x_jet, J);
  TruncatedSeries t = compose_phi_u(M, u).series;
  return partial(partial(t, 0), 0) + partial(partial(t, 1), 1);
}

}  // namespace

std::string to_string(PointClass c) {
  switch (c) {
    case PointClass::strictly_pseudoconvex: return "strictly_pseudoconvex";
    case PointClass::pseudoconvex_degenerate: return "pseudoconvex_degenerate";
    case PointClass::indefinite: return "indefinite";
    case PointClass::strictly_pseudoconcave: return "strictly_pseudoconcave";
    case PointClass::pseudoconcave_degenerate: return "pseudoconcave_degenerate";
    case PointClass::levi_flat: return "levi_flat";
  }
  return "unknown";
}

ClosedFormMismatch::ClosedFormMismatch(int p, int q, Rational printed, Rational definition)
    : Error("closed form L^{" + std::to_string(p) + "," + std::to_string(q) + "} evaluates to " + printed.get_str() +
            " but the disk-route definition gives " + definition.get_str()),
      printed_(std::move(printed)),
      definition_(std::move(definition)) {}

LeviReport levi_form_bracket(const Hypersurface& M, const ACStructure& J, const VectorField& X) {
  require_complex_tangent(M, J, X);
  VectorField X1 = X.truncated(1);
  VectorField JX = J.apply(X1, 1);
  LeviReport r;
  r.route = LeviRoute::bracket;
  r.value = bracket_value(M.gradient_at_origin(), X1, JX);
  r.correction_term = j_correction(M, J, X.at_origin());
  return r;
}

LeviReport levi_form_hessian(const Hypersurface& M, const ACStructure& J, const VectorField& X) {
  require_complex_tangent(M, J, X);
  RVector x0 = X.at_origin();
  RVector jx = apply_standard_j(x0);
  LeviReport r;
  r.route = LeviRoute::hessian;
  r.correction_term = j_correction(M, J, x0);
  r.value = second_derivative(M, x0, x0) + second_derivative(M, jx, jx) + r.correction_term;
  return r;
}

ComplexRational levi_polar(const Hypersurface& M, const ACStructure& J, const VectorField& X, const VectorField& Y) {
  require_complex_tangent(M, J, X);
  require_complex_tangent(M, J, Y);
  RVector g = M.gradient_at_origin();
  VectorField X1 = X.truncated(1), Y1 = Y.truncated(1);
  VectorField JX = J.apply(X1, 1), JY = J.apply(Y1, 1);
  Rational re = (bracket_value(g, X1, JY) + bracket_value(g, Y1, JX)) / 2;
  Rational im = (bracket_value(g, X1, Y1) + bracket_value(g, JX, JY)) / 2;
  return {re, im};
}

Classification classify_point(const Hypersurface& M, const ACStructure& J) {
  if (M.n() < 2) throw PreconditionError("classification needs n >= 2 (the complex tangent space is trivial for n = 1)");
  const int cap = 3;
  Hypersurface Mc = M.with_cap(cap);
  ACStructure Jc = J.with_cap(cap);
  Classification out;
  out.matrix.basis = complex_tangent_basis(M);
  std::vector<VectorField> fields;
  for (const auto& v : out.matrix.basis)
    fields.push_back(project_to_complex_tangent(VectorField::constant(v, cap), Mc, Jc));
  const int m = static_cast<int>(fields.size());
  out.matrix.entries.assign(m, std::vector<ComplexRational>(m));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      ComplexRational z = levi_polar(Mc, Jc, fields[i], fields[j]);
      out.matrix.entries[i][j] = z;
      if (j != i) {
        ComplexRational w = levi_polar(Mc, Jc, fields[j], fields[i]);
        if (!(w == z.conj())) throw TheoremViolation("polar Levi form is not Hermitian");
        out.matrix.entries[j][i] = w;
      } else if (z.im != 0) {
        throw TheoremViolation("polar Levi form has a non-real diagonal entry");
      }
    }
  // Realification [[A, -B], [B, A]] of H = A + iB is symmetric with doubled spectrum.
  RMatrix R(2 * m, RVector(2 * m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const auto& z = out.matrix.entries[i][j];
      R[i][j] = z.re;
      R[i + m][j + m] = z.re;
      R[i][j + m] = -z.im;
      R[i + m][j] = z.im;
    }
  Inertia real = symmetric_inertia(R);
  if (real.positive % 2 || real.negative % 2 || real.zero % 2)
    throw TheoremViolation("realified Levi matrix has an odd multiplicity");
  out.inertia = {real.positive / 2, real.negative / 2, real.zero / 2};
  const auto& in = out.inertia;
  if (in.zero == m)
    out.kind = PointClass::levi_flat;
  else if (in.positive > 0 && in.negative > 0)
    out.kind = PointClass::indefinite;
  else if (in.positive == m)
    out.kind = PointClass::strictly_pseudoconvex;
  else if (in.negative == m)
    out.kind = PointClass::strictly_pseudoconcave;
  else if (in.positive > 0)
    out.kind = PointClass::pseudoconvex_degenerate;
  else
    out.kind = PointClass::pseudoconcave_degenerate;
  return out;
}

Rational higher_levi(const Hypersurface& M, const ACStructure& J, const std::vector<RVector>& x_jet, int p, int q) {
  if (p < 0 || q < 0) throw PreconditionError("negative Levi form index");
  if (static_cast<int>(x_jet.size()) != p + q + 1)
    throw PreconditionError("L^{p,q} takes exactly p + q + 1 x-derivatives");
  TruncatedSeries lap = laplacian_trace(M, J, x_jet);
  return lap.coefficient(MultiIndex{p, q}) * factorial(p) * factorial(q);
}

std::map<std::pair<int, int>, Rational> higher_levi_all(const Hypersurface& M, const ACStructure& J,
                                                        const std::vector<RVector>& x_jet) {
  if (x_jet.empty()) throw PreconditionError("empty x-jet");
  TruncatedSeries lap = laplacian_trace(M, J, x_jet);
  std::map<std::pair<int, int>, Rational> out;
  const int top = static_cast<int>(x_jet.size()) - 1;
  for (int s = 0; s <= top; ++s)
    for (int i = s; i >= 0; --i) out[{i, s - i}] = lap.coefficient(MultiIndex{i, s - i}) * factorial(i) * factorial(s - i);
  return out;
}

Rational second_derivative(const Hypersurface& M, const RVector& a, const RVector& b) {
  RMatrix H = M.hessian_at_origin();
  Rational s = 0;
  for (int i = 0; i < M.dim(); ++i)
    for (int j = 0; j < M.dim(); ++j) s += H[i][j] * a[i] * b[j];
  return s;
}

Rational third_derivative(const Hypersurface& M, const RVector& a, const RVector& b, const RVector& c) {
  // sum over ordered triples of d^3 phi/dx_i dx_j dx_k (0) a_i b_j c_k.
  Rational s = 0;
  const int d = M.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        if (a[i] == 0 || b[j] == 0 || c[k] == 0) continue;
        Monomial m = Monomial::unit(i) * Monomial::unit(j) * Monomial::unit(k);
        Rational coef = M.phi().coefficient(m);
        if (coef == 0) continue;
        Rational mult = 1;
        for (int v = 0; v < d; ++v) mult *= factorial(m.exponent(v));
        s += coef * mult * a[i] * b[j] * c[k];
      }
  return s;
}

Rational higher_levi_closed_form(int p, int q, const Hypersurface& M, const std::vector<RVector>& X) {
  if (!((p == 0 && q == 0) || (p == 1 && q == 0) || (p == 0 && q == 1)))
    throw PreconditionError("closed forms exist only for (p,q) in {(0,0), (1,0), (0,1)}");
  if (static_cast<int>(X.size()) != p + q + 1) throw PreconditionError("closed form takes p + q + 1 vectors");
  const RVector& X1 = X[0];
  RVector iX1 = apply_standard_j(X1);
  Rational printed;
  if (p == 0 && q == 0) {
    printed = second_derivative(M, X1, X1) + second_derivative(M, iX1, iX1);
  } else {
    const RVector& X2 = X[1];
    RVector iX2 = apply_standard_j(X2);
    if (p == 1)
      printed = third_derivative(M, X1, X1, X1) + third_derivative(M, X1, iX1, iX1) + 2 * second_derivative(M, X2, X1) +
                2 * second_derivative(M, iX2, iX2);
    else
      printed = third_derivative(M, iX1, X1, X1) + third_derivative(M, iX1, iX1, iX1) +
                2 * second_derivative(M, iX2, X1) - 2 * second_derivative(M, X2, iX2);
  }
  Rational definition = higher_levi(M, ACStructure::standard(M.n(), M.cap()), X, p, q);
  if (printed != definition) throw ClosedFormMismatch(p, q, printed, definition);
  return printed;
}

}  // namespace levitype
