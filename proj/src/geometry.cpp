#include "levitype/geometry.hpp"

#include <algorithm>
#include <random>

#include "levitype/errors.hpp"

namespace levitype {

namespace {

using SeriesMatrix = std::vector<TruncatedSeries>;  // row-major, square

SeriesMatrix matmul(const SeriesMatrix& a, const SeriesMatrix& b, int d) {
  SeriesMatrix out;
  out.reserve(a.size());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      TruncatedSeries s(a[0].num_vars(), a[0].cap());
      for (int k = 0; k < d; ++k) {
        const auto& x = a[i * d + k];
        const auto& y = b[k * d + j];
        if (x.is_exact_zero() || y.is_exact_zero()) continue;
        s += x * y;
      }
      out.push_back(std::move(s));
    }
  return out;
}

SeriesMatrix identity_matrix(int d, int num_vars, int cap) {
  SeriesMatrix m;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m.push_back(TruncatedSeries::constant(num_vars, cap, i == j ? 1 : 0));
  return m;
}

SeriesMatrix standard_series_matrix(int n, int num_vars, int cap) {
  RMatrix js = standard_j_matrix(n);
  SeriesMatrix m;
  for (const auto& row : js)
    for (const auto& x : row) m.push_back(TruncatedSeries::constant(num_vars, cap, x));
  return m;
}

RMatrix invert(const RMatrix& B) {
  const int d = static_cast<int>(B.size());
  RMatrix inv(d, RVector(d));
  for (int c = 0; c < d; ++c) {
    RVector e(d, 0);
    e[c] = 1;
    auto sol = solve_affine(B, e, d);
    if (!sol.consistent || sol.rank != d) throw GeometryError("singular change of basis");
    for (int r = 0; r < d; ++r) inv[r][c] = sol.particular[r];
  }
  return inv;
}

RVector matvec(const RMatrix& A, const RVector& v) {
  RVector out(A.size(), 0);
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += A[i][j] * v[j];
  return out;
}

}  // namespace

RVector apply_standard_j(const RVector& v) {
  RVector out(v.size());
  for (std::size_t i = 0; i + 1 < v.size(); i += 2) {
    out[i] = -v[i + 1];
    out[i + 1] = v[i];
  }
  return out;
}

RMatrix standard_j_matrix(int n) {
  RMatrix m(2 * n, RVector(2 * n, 0));
  for (int i = 0; i < n; ++i) {
    m[2 * i][2 * i + 1] = -1;
    m[2 * i + 1][2 * i] = 1;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Hypersurface

Hypersurface::Hypersurface(int n, TruncatedSeries phi) : n_(n), phi_(std::move(phi)) {
  if (n < 1) throw GeometryError("dimension n must be positive");
  if (phi_.num_vars() != 2 * n)
    throw GeometryError("defining function has " + std::to_string(phi_.num_vars()) + " variables, expected " +
                        std::to_string(2 * n));
  if (phi_.cap() < 2) throw GeometryError("degree cap must be at least 2");
  if (phi_.known_degree() < 1) throw GeometryError("defining function known through degree < 1");
  if (phi_.constant_term() != 0) throw GeometryError("phi(0) = " + phi_.constant_term().get_str() + ", origin not on M");
  if (is_zero(gradient_at_origin())) throw GeometryError("dphi(0) = 0, M is singular at the origin");
}

RVector Hypersurface::gradient_at_origin() const {
  RVector g(dim());
  for (int i = 0; i < dim(); ++i) g[i] = phi_.coefficient(Monomial::unit(i));
  return g;
}

RMatrix Hypersurface::hessian_at_origin() const {
  RMatrix h(dim(), RVector(dim()));
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) {
      Rational c = phi_.coefficient(Monomial::unit(i) * Monomial::unit(j));
      h[i][j] = i == j ? Rational(2 * c) : c;
    }
  return h;
}

// ---------------------------------------------------------------------------
// VectorField

VectorField::VectorField(std::vector<TruncatedSeries> components) : c_(std::move(components)) {
  if (c_.empty()) throw ShapeError("vector field without components");
  for (const auto& s : c_)
    if (s.num_vars() != dim() || s.cap() != c_.front().cap())
      throw ShapeError("vector field components live in different series spaces");
}

VectorField VectorField::zero(int dim, int cap) { return VectorField(std::vector<TruncatedSeries>(dim, TruncatedSeries(dim, cap))); }

VectorField VectorField::constant(const RVector& v, int cap) {
  std::vector<TruncatedSeries> c;
  for (const auto& x : v) c.push_back(TruncatedSeries::constant(static_cast<int>(v.size()), cap, x));
  return VectorField(std::move(c));
}

VectorField VectorField::coordinate(int dim, int cap, int var) {
  RVector v(dim, 0);
  v.at(var) = 1;
  return constant(v, cap);
}

RVector VectorField::at_origin() const {
  RVector v;
  for (const auto& s : c_) v.push_back(s.constant_term());
  return v;
}

int VectorField::known_degree() const {
  int d = c_.front().known_degree();
  for (const auto& s : c_) d = std::min(d, s.known_degree());
  return d;
}

VectorField VectorField::truncated(int degree) const {
  std::vector<TruncatedSeries> c;
  for (const auto& s : c_) c.push_back(s.truncated(degree));
  return VectorField(std::move(c));
}

VectorField VectorField::with_cap(int cap) const {
  std::vector<TruncatedSeries> c;
  for (const auto& s : c_) c.push_back(s.with_cap(cap));
  return VectorField(std::move(c));
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  if (a.dim() != b.dim()) throw ShapeError("vector fields of different dimension");
  std::vector<TruncatedSeries> c;
  for (int i = 0; i < a.dim(); ++i) c.push_back(a[i] + b[i]);
  return VectorField(std::move(c));
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  if (a.dim() != b.dim()) throw ShapeError("vector fields of different dimension");
  std::vector<TruncatedSeries> c;
  for (int i = 0; i < a.dim(); ++i) c.push_back(a[i] - b[i]);
  return VectorField(std::move(c));
}

VectorField operator*(const TruncatedSeries& f, const VectorField& v) {
  std::vector<TruncatedSeries> c;
  for (int i = 0; i < v.dim(); ++i) c.push_back(f * v[i]);
  return VectorField(std::move(c));
}

VectorField operator*(const Rational& s, const VectorField& v) {
  std::vector<TruncatedSeries> c;
  for (int i = 0; i < v.dim(); ++i) c.push_back(v[i].scaled(s));
  return VectorField(std::move(c));
}

TruncatedSeries pairing(const VectorField& a, const VectorField& b) {
  if (a.dim() != b.dim()) throw ShapeError("pairing of fields with different dimension");
  TruncatedSeries s(a.dim(), a.cap());
  for (int i = 0; i < a.dim(); ++i) {
    if (a[i].is_exact_zero() || b[i].is_exact_zero()) continue;
    s += a[i] * b[i];
  }
  return s;
}

// ---------------------------------------------------------------------------
// ACStructure

ACStructure::ACStructure(int n, std::vector<TruncatedSeries> entries) : n_(n), e_(std::move(entries)) {
  const int d = 2 * n;
  if (n < 1 || static_cast<int>(e_.size()) != d * d)
    throw GeometryError("almost complex structure needs " + std::to_string(d * d) + " entries");
  for (const auto& s : e_)
    if (s.num_vars() != d || s.cap() != e_.front().cap())
      throw GeometryError("almost complex structure entries live in different series spaces");
  RMatrix js = standard_j_matrix(n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (at(i, j).constant_term() != js[i][j]) throw GeometryError("J(0) is not the standard complex structure");
  SeriesMatrix sq = matmul(e_, e_, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      auto target = TruncatedSeries::constant(d, cap(), i == j ? -1 : 0);
      if (sq[i * d + j] != target)
        throw GeometryError("J^2 != -I (entry " + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    }
}

ACStructure ACStructure::standard(int n, int cap) {
  ACStructure J;
  J.n_ = n;
  J.e_ = standard_series_matrix(n, 2 * n, cap);
  return J;
}

ACStructure ACStructure::conjugated(int n, const std::vector<TruncatedSeries>& P) {
  const int d = 2 * n;
  if (static_cast<int>(P.size()) != d * d) throw ShapeError("perturbation matrix has the wrong size");
  const int nv = P[0].num_vars(), cap = P[0].cap();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j)
      if (!P[i * d + j].is_exact_zero()) throw PreconditionError("perturbation must be strictly upper triangular");
  SeriesMatrix A = identity_matrix(d, nv, cap);
  for (int i = 0; i < d * d; ++i) A[i] += P[i];
  // (I + P)^{-1} = sum_j (-P)^j, finite because P is nilpotent.
  SeriesMatrix negP;
  for (const auto& s : P) negP.push_back(-s);
  SeriesMatrix inv = identity_matrix(d, nv, cap), power = identity_matrix(d, nv, cap);
  for (int j = 1; j < d; ++j) {
    power = matmul(power, negP, d);
    for (int i = 0; i < d * d; ++i) inv[i] += power[i];
  }
  SeriesMatrix J = matmul(matmul(A, standard_series_matrix(n, nv, cap), d), inv, d);
  return ACStructure(n, std::move(J));
}

ACStructure ACStructure::perturbed(int n, int cap, std::uint64_t seed, bool quadratic) {
  const int d = 2 * n;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coeff(-2, 2);
  std::vector<TruncatedSeries> P(d * d, TruncatedSeries(d, cap));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      std::vector<std::pair<MultiIndex, Rational>> terms;
      for (int v = 0; v < d; ++v) {
        if (quadratic) {
          for (int w = v; w < d; ++w) {
            int c = coeff(rng);
            if (c == 0 || rng() % 3 != 0) continue;
            MultiIndex e(d, 0);
            ++e[v];
            ++e[w];
            terms.push_back({e, Rational(c) / 2});
          }
        } else {
          int c = coeff(rng);
          if (c == 0) continue;
          MultiIndex e(d, 0);
          e[v] = 1;
          terms.push_back({e, Rational(c) / 2});
        }
      }
      P[i * d + j] = TruncatedSeries::from_terms(d, cap, terms);
    }
  return conjugated(n, P);
}

bool ACStructure::is_constant() const {
  return std::all_of(e_.begin(), e_.end(), [](const TruncatedSeries& s) { return s.is_exact() && s.max_degree() <= 0; });
}

VectorField ACStructure::apply(const VectorField& v) const { return apply(v, v.cap()); }

VectorField ACStructure::apply(const VectorField& v, int limit) const {
  if (v.dim() != dim()) throw ShapeError("J applied to a field of the wrong dimension");
  std::vector<TruncatedSeries> c;
  for (int i = 0; i < dim(); ++i) {
    TruncatedSeries s(dim(), v.cap());
    for (int j = 0; j < dim(); ++j) {
      const auto& a = at(i, j);
      if (a.is_exact_zero() || v[j].is_exact_zero()) continue;
      if (a.is_exact() && a.max_degree() == 0)
        s += v[j].truncated(limit).scaled(a.constant_term());
      else
        s += multiply_limited(a, v[j], limit);
    }
    c.push_back(limit < v.cap() ? s.truncated(limit) : std::move(s));
  }
  return VectorField(std::move(c));
}

RMatrix ACStructure::derivative_at_origin(int k) const {
  RMatrix m(dim(), RVector(dim()));
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) m[i][j] = at(i, j).coefficient(Monomial::unit(k));
  return m;
}

ACStructure ACStructure::with_cap(int cap) const {
  ACStructure J;
  J.n_ = n_;
  for (const auto& s : e_) J.e_.push_back(s.with_cap(cap));
  return J;
}

const RVector& FieldJet::at(int p, int q) const {
  auto it = entries.find({p, q});
  if (it == entries.end())
    throw PreconditionError("field jet has no entry (" + std::to_string(p) + "," + std::to_string(q) + ")");
  return it->second;
}

// ---------------------------------------------------------------------------
// Frames, projection and derivatives

Frame gradient_frame(const Hypersurface& M, const ACStructure& J) {
  std::vector<TruncatedSeries> g;
  for (int i = 0; i < M.dim(); ++i) g.push_back(partial(M.phi(), i));
  VectorField N(std::move(g));
  return {N, J.apply(N)};
}

TruncatedSeries differential(const Hypersurface& M, const VectorField& V) {
  TruncatedSeries s(M.dim(), V.cap());
  for (int i = 0; i < M.dim(); ++i) {
    if (V[i].is_exact_zero()) continue;
    s += partial(M.phi(), i) * V[i];
  }
  return s;
}

VectorField project_to_complex_tangent(const VectorField& V, const Hypersurface& M, const ACStructure& J) {
  Frame F = gradient_frame(M, J);
  TruncatedSeries dN = pairing(F.N, F.N);
  TruncatedSeries dJN = pairing(F.N, F.JN);
  TruncatedSeries dV = pairing(F.N, V);
  TruncatedSeries dJV = pairing(F.N, J.apply(V));
  TruncatedSeries det = -(dN * dN + dJN * dJN);
  if (det.constant_term() == 0) throw GeometryError("degenerate frame at the origin");
  TruncatedSeries inv = inverse(det);
  TruncatedSeries a = (-(dV * dN) - dJN * dJV) * inv;
  TruncatedSeries b = (dN * dJV - dJN * dV) * inv;
  return V - a * F.N - b * F.JN;
}

VectorField covariant_derivative(const VectorField& X, const VectorField& Y, int limit) {
  if (X.dim() != Y.dim() || X.cap() != Y.cap()) throw ShapeError("covariant derivative of mismatched fields");
  const int d = X.dim();
  std::vector<TruncatedSeries> out(d, TruncatedSeries(d, X.cap()));
  VectorField Xt = X.truncated(limit);
  std::vector<TruncatedSeries> Yt;
  for (int i = 0; i < d; ++i) Yt.push_back(Y[i].truncated(limit + 1));
  for (int j = 0; j < d; ++j) {
    if (Xt[j].is_exact_zero()) continue;
    for (int i = 0; i < d; ++i) {
      TruncatedSeries dy = partial(Yt[i], j);
      if (dy.is_exact_zero()) continue;
      out[i] += multiply_limited(Xt[j], dy, limit);
    }
  }
  for (auto& s : out) s = s.truncated(limit);
  return VectorField(std::move(out));
}

VectorField covariant_derivative(const VectorField& X, const VectorField& Y) {
  return covariant_derivative(X, Y, X.cap());
}

VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
  return covariant_derivative(X, Y) - covariant_derivative(Y, X);
}

RVector dpq_derivative(const VectorField& X, const ACStructure& J, int p, int q) {
  if (p < 0 || q < 0) throw PreconditionError("negative derivative order");
  int steps = p + q;
  if (steps > X.known_degree()) throw PrecisionError("derivative order exceeds the reliable truncation depth of the field");
  VectorField Y = X.truncated(steps);
  VectorField JX = q > 0 ? J.apply(X.truncated(steps)) : Y;
  int remaining = steps;
  for (int i = 0; i < p; ++i) Y = covariant_derivative(X, Y, --remaining);
  for (int i = 0; i < q; ++i) Y = covariant_derivative(JX, Y, --remaining);
  return Y.at_origin();
}

FieldJet field_jet(const VectorField& X, const ACStructure& J, int k) {
  if (k < 0) throw PreconditionError("negative jet order");
  if (k > X.known_degree()) throw PrecisionError("jet order exceeds the reliable truncation depth of the field");
  FieldJet jet;
  jet.order = k;
  VectorField base = X.truncated(k);
  VectorField JX = J.apply(base);
  VectorField Y = base;  // nabla_X^p X truncated to degree k - p
  for (int p = 0; p <= k; ++p) {
    if (p > 0) Y = covariant_derivative(base, Y, k - p);
    VectorField Z = Y;
    jet.entries[{p, 0}] = Z.at_origin();
    for (int q = 1; p + q <= k; ++q) {
      Z = covariant_derivative(JX, Z, k - p - q);
      jet.entries[{p, q}] = Z.at_origin();
    }
  }
  return jet;
}

bool in_complex_tangent_at_origin(const Hypersurface& M, const RVector& v) {
  RVector g = M.gradient_at_origin();
  return dot(g, v) == 0 && dot(g, apply_standard_j(v)) == 0;
}

std::vector<RVector> complex_tangent_basis(const Hypersurface& M) {
  RVector g = M.gradient_at_origin();
  Rational g2 = dot(g, g);
  std::vector<RVector> basis;
  RMatrix span;  // rows: kept vectors and their J-images
  for (int j = 0; j < M.dim() && static_cast<int>(basis.size()) < M.n() - 1; ++j) {
    RVector e(M.dim(), 0);
    e[j] = 1;
    Rational a = dot(g, e) / g2;
    Rational b = -dot(g, apply_standard_j(e)) / g2;
    RVector w = e - a * g - b * apply_standard_j(g);
    if (is_zero(w)) continue;
    RMatrix trial = span;
    trial.push_back(w);
    if (rank(trial) == static_cast<int>(span.size())) continue;
    span.push_back(w);
    span.push_back(apply_standard_j(w));
    basis.push_back(std::move(w));
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Recentering

Recentered recenter(int n, const TruncatedSeries& phi, const std::vector<TruncatedSeries>& J_entries,
                    const RVector& point_in) {
  const int d = 2 * n;
  if (static_cast<int>(point_in.size()) != d)
    throw GeometryError("point has " + std::to_string(point_in.size()) + " coordinates, expected " + std::to_string(d));
  if (!phi.is_exact()) throw PrecisionError("recentering needs an exact polynomial defining function");
  for (const auto& s : J_entries)
    if (!s.is_exact()) throw PrecisionError("recentering needs an almost complex structure with exact polynomial entries");

  RVector point = point_in;
  bool projected = false;
  Rational value = phi.evaluate(point);
  if (value != 0) {
    int var = -1;
    Rational slope;
    for (int v = 0; v < d && var < 0; ++v) {
      bool affine = true;
      Rational s = 0;
      for (const auto& t : phi.terms()) {
        if (t.monomial.exponent(v) == 0) continue;
        if (t.monomial == Monomial::unit(v))
          s = t.coeff;
        else
          affine = false;
      }
      if (affine && s != 0) {
        var = v;
        slope = s;
      }
    }
    if (var < 0) throw GeometryError("point is not on M and phi is not affine in any coordinate; cannot project");
    point[var] -= value / slope;
    projected = true;
  }

  RMatrix Jp(d, RVector(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) Jp[i][j] = J_entries[i * d + j].evaluate(point);
  // Check J(point)^2 = -I before building the adapted basis.
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Rational s = 0;
      for (int k = 0; k < d; ++k) s += Jp[i][k] * Jp[k][j];
      if (s != (i == j ? -1 : 0)) throw GeometryError("J^2 != -I at the base point");
    }

  RMatrix cols;
  for (int j = 0; j < d && static_cast<int>(cols.size()) < d; ++j) {
    RVector e(d, 0);
    e[j] = 1;
    RMatrix trial = cols;
    trial.push_back(e);
    if (rank(trial) == static_cast<int>(cols.size())) continue;
    cols.push_back(e);
    cols.push_back(matvec(Jp, e));
  }
  RMatrix B(d, RVector(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) B[i][j] = cols[j][i];
  RMatrix Binv = invert(B);

  TruncatedSeries phi_new = substitute_affine(phi, point, B);
  std::vector<TruncatedSeries> moved;
  for (const auto& s : J_entries) moved.push_back(substitute_affine(s, point, B));
  std::vector<TruncatedSeries> J_new;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      TruncatedSeries s(d, phi.cap());
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          Rational c = Binv[i][k] * B[l][j];
          if (c != 0 && !moved[k * d + l].is_exact_zero()) s += moved[k * d + l].scaled(c);
        }
      J_new.push_back(std::move(s));
    }
  return {Hypersurface(n, std::move(phi_new)), ACStructure(n, std::move(J_new)), point, B, projected};
}

}  // namespace levitype
