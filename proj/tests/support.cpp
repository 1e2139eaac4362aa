#include "support.hpp"

#include <cstdlib>
#include <stdexcept>

namespace testsupport {

std::uint64_t base_seed() {
  if (const char* s = std::getenv("LEVITYPE_SEED")) return std::strtoull(s, nullptr, 10);
  return 20261016ull;
}

Rational Gen::small() { return Rational(uniform(-3, 3)) / uniform(1, 2); }

Rational Gen::nonzero_small() {
  Rational r;
  do r = small();
  while (r == 0);
  return r;
}

RVector Gen::vector(int dim) {
  RVector v(dim);
  for (auto& c : v) c = small();
  return v;
}

RVector Gen::nonzero_vector(int dim) {
  RVector v;
  do v = vector(dim);
  while (is_zero(v));
  return v;
}

TruncatedSeries Gen::poly(int nv, int cap, int lo, int hi, int terms) {
  std::vector<std::pair<MultiIndex, Rational>> t;
  for (int i = 0; i < terms; ++i) {
    int deg = uniform(lo, hi);
    MultiIndex e(nv, 0);
    for (int d = 0; d < deg; ++d) ++e[uniform(0, nv - 1)];
    t.push_back({e, small()});
  }
  return TruncatedSeries::from_terms(nv, cap, t);
}

TruncatedSeries Gen::phi(int n, int cap, int max_degree, int terms) {
  MultiIndex e(2 * n, 0);
  e[x_index(n)] = 1;
  TruncatedSeries out = TruncatedSeries::monomial(2 * n, cap, e, 2);
  // Tilted linear part half of the time.
  if (coin())
    for (int v = 0; v < 2 * n; ++v)
      if (v != x_index(n) && coin()) out += TruncatedSeries::variable(2 * n, cap, v).scaled(small());
  return out + poly(2 * n, cap, 2, max_degree, terms);
}

VectorField Gen::field(int dim, int cap, int max_degree, int terms) {
  std::vector<TruncatedSeries> c;
  for (int i = 0; i < dim; ++i)
    c.push_back(TruncatedSeries::constant(dim, cap, small()) + poly(dim, cap, 1, max_degree, terms));
  return VectorField(c);
}

ACStructure Gen::structure(int n, int cap, bool perturbed) {
  if (!perturbed) return ACStructure::standard(n, cap);
  return ACStructure::perturbed(n, cap, bits(), coin());
}

Rational factorial(int m) {
  Rational f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

namespace {

Poly2 mul(const Poly2& a, const Poly2& b, int max_degree) {
  Poly2 out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      if (ea.first + ea.second + eb.first + eb.second > max_degree) continue;
      out[{ea.first + eb.first, ea.second + eb.second}] += ca * cb;
    }
  return out;
}

}  // namespace

Poly2 substitute(const TruncatedSeries& f, const std::vector<Poly2>& u, int max_degree) {
  Poly2 out;
  std::map<std::pair<int, int>, Poly2> powers;  // (variable, exponent)
  auto power = [&](int v, int e) -> const Poly2& {
    auto key = std::make_pair(v, e);
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    Poly2 p{{{0, 0}, Rational(1)}};
    for (int i = 0; i < e; ++i) p = mul(p, u[v], max_degree);
    return powers.emplace(key, p).first->second;
  };
  for (const auto& t : f.terms()) {
    if (t.monomial.degree() > max_degree) continue;
    Poly2 term{{{0, 0}, t.coeff}};
    for (int v = 0; v < f.num_vars(); ++v)
      if (int e = t.monomial.exponent(v)) term = mul(term, power(v, e), max_degree);
    for (const auto& [k, c] : term) out[k] += c;
  }
  return out;
}

namespace {

Rational get(const Poly2& p, int a, int b) {
  auto it = p.find({a, b});
  return it == p.end() ? Rational(0) : it->second;
}

}  // namespace

std::map<std::pair<int, int>, RVector> cr_oracle(const std::vector<RVector>& x_jet, const ACStructure& J) {
  const int k = static_cast<int>(x_jet.size());
  const int dim = J.dim();
  std::vector<Poly2> u(dim);
  for (int m = 1; m <= k; ++m)
    for (int i = 0; i < dim; ++i)
      if (x_jet[m - 1][i] != 0) u[i][{m, 0}] = x_jet[m - 1][i] / factorial(m);

  for (int d = 1; d <= k; ++d) {
    // J(u) through degree d - 1 only sees coefficients of degree < d.
    std::vector<Poly2> Ju(J.entries().size());
    for (std::size_t e = 0; e < Ju.size(); ++e) Ju[e] = substitute(J.entries()[e], u, d - 1);

    // Unknowns: coefficient of x^a y^b, b >= 1, a + b = d, component i.
    std::vector<std::pair<std::pair<int, int>, int>> unknowns;
    for (int b = 1; b <= d; ++b)
      for (int i = 0; i < dim; ++i) unknowns.push_back({{d - b, b}, i});

    auto residual = [&](const std::vector<Poly2>& trial) {
      RVector r;
      for (int a = 0; a <= d - 1; ++a) {
        int b = d - 1 - a;
        for (int i = 0; i < dim; ++i) {
          Rational val = (b + 1) * get(trial[i], a, b + 1);
          for (int j = 0; j < dim; ++j) {
            const Poly2& Jij = Ju[i * dim + j];
            // coefficient of x^a y^b in J_ij(u) * du_j/dx
            for (const auto& [e, c] : Jij) {
              int ra = a - e.first, rb = b - e.second;
              if (ra < 0 || rb < 0) continue;
              val -= c * (ra + 1) * get(trial[j], ra + 1, rb);
            }
          }
          r.push_back(val);
        }
      }
      return r;
    };

    std::vector<Poly2> zero = u;
    RVector r0 = residual(zero);
    RMatrix A(r0.size(), RVector(unknowns.size()));
    for (std::size_t c = 0; c < unknowns.size(); ++c) {
      std::vector<Poly2> trial = u;
      trial[unknowns[c].second][unknowns[c].first] = 1;
      RVector rc = residual(trial);
      for (std::size_t e = 0; e < r0.size(); ++e) A[e][c] = rc[e] - r0[e];
    }
    RVector rhs;
    for (const auto& v : r0) rhs.push_back(-v);
    AffineSolution sol = solve_affine(A, rhs, static_cast<int>(unknowns.size()));
    if (!sol.consistent || !sol.nullspace.empty()) throw std::runtime_error("CR oracle: system not uniquely solvable");
    for (std::size_t c = 0; c < unknowns.size(); ++c)
      if (sol.particular[c] != 0) u[unknowns[c].second][unknowns[c].first] = sol.particular[c];
  }

  std::map<std::pair<int, int>, RVector> out;
  for (int s = 1; s <= k; ++s)
    for (int q = 0; q <= s; ++q) {
      int p = s - q;
      RVector v(dim);
      for (int i = 0; i < dim; ++i) v[i] = get(u[i], p, q) * factorial(p) * factorial(q);
      out[{p, q}] = v;
    }
  return out;
}

namespace {

struct CPoly {
  // coefficient of z^a zbar^b
  std::map<std::pair<int, int>, ComplexRational> c;
};

ComplexRational cmul(const ComplexRational& a, const ComplexRational& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

CPoly cpmul(const CPoly& a, const CPoly& b, int limit) {
  CPoly out;
  for (const auto& [ea, ca] : a.c)
    for (const auto& [eb, cb] : b.c) {
      if (ea.first + ea.second + eb.first + eb.second > limit) continue;
      auto& slot = out.c[{ea.first + eb.first, ea.second + eb.second}];
      ComplexRational p = cmul(ca, cb);
      slot.re += p.re;
      slot.im += p.im;
    }
  return out;
}

}  // namespace

int holomorphic_contact(const TruncatedSeries& phi, const std::vector<std::vector<ComplexRational>>& coeffs, int limit) {
  const int n = static_cast<int>(coeffs.size());
  // x_j = (u_j + conj u_j) / 2, y_j = (u_j - conj u_j) / (2i).
  std::vector<CPoly> coord(2 * n);
  for (int j = 0; j < n; ++j)
    for (std::size_t m = 0; m < coeffs[j].size(); ++m) {
      const auto& c = coeffs[j][m];
      int deg = static_cast<int>(m) + 1;
      ComplexRational half{c.re / 2, c.im / 2};
      ComplexRational half_conj{c.re / 2, -c.im / 2};
      auto& X = coord[2 * j].c;
      X[{deg, 0}] = half;
      X[{0, deg}] = half_conj;
      // (c z^m - conj(c) zbar^m) / (2i) = -i c/2 z^m + i conj(c)/2 zbar^m
      auto& Y = coord[2 * j + 1].c;
      Y[{deg, 0}] = ComplexRational{c.im / 2, -c.re / 2};
      Y[{0, deg}] = ComplexRational{c.im / 2, c.re / 2};
    }
  CPoly total;
  for (const auto& t : phi.terms()) {
    CPoly term;
    term.c[{0, 0}] = ComplexRational{t.coeff, 0};
    for (int v = 0; v < 2 * n; ++v)
      for (int e = 0; e < t.monomial.exponent(v); ++e) term = cpmul(term, coord[v], limit);
    for (const auto& [k, c] : term.c) {
      auto& slot = total.c[k];
      slot.re += c.re;
      slot.im += c.im;
    }
  }
  int best = limit + 1;
  for (const auto& [k, c] : total.c)
    if ((c.re != 0 || c.im != 0) && k.first + k.second < best) best = k.first + k.second;
  return best;
}

Rational hessian_levi_oracle(const TruncatedSeries& phi, const RVector& v) {
  const int d = phi.num_vars();
  auto H = [&](int i, int j) {
    MultiIndex e(d, 0);
    ++e[i];
    ++e[j];
    Rational c = phi.coefficient(e);
    return i == j ? 2 * c : c;
  };
  RVector w = apply_standard_j(v);
  Rational out = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out += H(i, j) * (v[i] * v[j] + w[i] * w[j]);
  return out;
}

}  // namespace testsupport
