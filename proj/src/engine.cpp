#include "levitype/engine.hpp"

#include <algorithm>
#include <future>
#include <set>

#include "levitype/errors.hpp"

namespace levitype {

namespace {

Rational factorial(int m) {
  mpz_class f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  return Rational(f);
}

// Real basis (T_1..T_m, J T_1..J T_m) of the complex tangent space at 0.
std::vector<RVector> real_tangent_basis(const Hypersurface& M) {
  auto T = complex_tangent_basis(M);
  std::vector<RVector> out = T;
  for (const auto& t : T) out.push_back(apply_standard_j(t));
  return out;
}

// Multiplies v by the complex number making its first nonzero (x_j, y_j) pair (1, 0).
RVector gauge_normalize(const RVector& v) {
  for (std::size_t j = 0; j + 1 < v.size(); j += 2) {
    const Rational& a = v[j];
    const Rational& b = v[j + 1];
    if (a == 0 && b == 0) continue;
    Rational r = a * a + b * b;
    return (a / r) * v - (b / r) * apply_standard_j(v);
  }
  return v;
}

// Orthogonal projection at 0 onto the complex tangent space.
RVector project_at_origin(const Hypersurface& M, const RVector& v) {
  RVector g = M.gradient_at_origin();
  Rational g2 = dot(g, g);
  Rational a = dot(g, v) / g2;
  Rational b = -dot(g, apply_standard_j(v)) / g2;
  return v - a * g - b * apply_standard_j(g);
}

// Real vectors completing (u1, J u1) to a basis of the complex tangent space,
// taken in complex pairs from the tangent basis.
std::vector<RVector> complement_basis(const Hypersurface& M, const RVector& u1) {
  RMatrix span{u1, apply_standard_j(u1)};
  std::vector<RVector> out;
  for (const auto& t : complex_tangent_basis(M)) {
    RMatrix trial = span;
    trial.push_back(t);
    if (rank(trial) == static_cast<int>(span.size())) continue;
    span.push_back(t);
    span.push_back(apply_standard_j(t));
    out.push_back(t);
    out.push_back(apply_standard_j(t));
  }
  return out;
}

// Data read from the disk propagated from (u_1, ..., u_s, 0).
struct StageProbe {
  std::vector<Rational> levi;  // L^{i, s-1-i}, i = 0..s-1
  Rational r0, r1;             // a_{s+1,0}, a_{s,1}
};

StageProbe probe(const Hypersurface& M, const ACStructure& J, const std::vector<RVector>& jet) {
  const int s = static_cast<int>(jet.size());
  std::vector<RVector> padded = jet;
  padded.push_back(RVector(M.dim(), 0));
  DiskJet u = propagate_cr_jet(padded, J);
  DiskTrace t = compose_phi_u(M, u);
  TruncatedSeries lap = partial(partial(t.series, 0), 0) + partial(partial(t.series, 1), 1);
  StageProbe out;
  for (int i = 0; i < s; ++i)
    out.levi.push_back(lap.coefficient(MultiIndex{i, s - 1 - i}) * factorial(i) * factorial(s - 1 - i));
  out.r0 = t.a(s + 1, 0);
  out.r1 = t.a(s, 1);
  return out;
}

// Normal vector killing the residuals a_{s+1,0}, a_{s,1}.
RVector forced_normal(const Hypersurface& M, const Rational& r0, const Rational& r1) {
  RVector g = M.gradient_at_origin();
  Rational g2 = dot(g, g);
  return (-r0 / g2) * g + (r1 / g2) * apply_standard_j(g);
}

struct StageRun {
  int solved = 0;                 // last solved stage
  std::vector<RVector> jet;       // u_1..u_solved followed by the forced normal part of the next
  bool unique = true;             // every solved stage had a unique solution
  bool inconsistent = false;      // stopped on an inconsistent affine system
  std::optional<Obstruction> obstruction;
};

StageRun run_stages(const Hypersurface& M, const ACStructure& J, const RVector& u1, int max_stage) {
  StageRun run;
  StageProbe p1 = probe(M, J, {u1});
  if (p1.levi[0] != 0) {
    run.inconsistent = true;
    run.obstruction = Obstruction{1, "L^{0,0}(u_1) = " + p1.levi[0].get_str() + " != 0"};
    return run;
  }
  run.solved = 1;
  run.jet = {u1, forced_normal(M, p1.r0, p1.r1)};
  std::vector<RVector> C = complement_basis(M, u1);
  for (int s = 2; s <= max_stage; ++s) {
    // Unknown: tangential part t_s = sum_r c_r C_r added to the forced normal part.
    std::vector<RVector> base = run.jet;
    StageProbe p0 = probe(M, J, base);
    const int eqs = s;
    RMatrix A(eqs, RVector(C.size()));
    for (std::size_t r = 0; r < C.size(); ++r) {
      std::vector<RVector> trial = base;
      trial.back() = trial.back() + C[r];
      StageProbe pr = probe(M, J, trial);
      for (int e = 0; e < eqs; ++e) A[e][r] = pr.levi[e] - p0.levi[e];
    }
    RVector rhs;
    for (int e = 0; e < eqs; ++e) rhs.push_back(-p0.levi[e]);
    AffineSolution sol = solve_affine(A, rhs, static_cast<int>(C.size()));
    if (!sol.consistent) {
      run.inconsistent = true;
      std::string vals;
      for (int e = 0; e < eqs; ++e) {
        if (e) vals += ", ";
        vals += "L^{" + std::to_string(e) + "," + std::to_string(s - 1 - e) + "}=" + p0.levi[e].get_str();
      }
      run.obstruction = Obstruction{s, "stage " + std::to_string(s) + ": affine system in the free tangential part of u_" +
                                           std::to_string(s) + " is inconsistent (" + vals + " at the gauge point)"};
      return run;
    }
    if (!sol.nullspace.empty()) run.unique = false;
    std::vector<RVector> solved = base;
    for (std::size_t r = 0; r < C.size(); ++r)
      if (sol.particular[r] != 0) solved.back() = solved.back() + sol.particular[r] * C[r];
    StageProbe ps = probe(M, J, solved);
    for (const auto& v : ps.levi)
      if (v != 0) throw TheoremViolation("stage constraints are not affine in the newest unknown");
    solved.push_back(forced_normal(M, ps.r0, ps.r1));
    run.jet = std::move(solved);
    run.solved = s;
  }
  return run;
}

// Symmetric congruence diagonalization: returns (P, d) with P^T R P = diag(d).
std::pair<RMatrix, RVector> diagonalize(RMatrix R) {
  const int n = static_cast<int>(R.size());
  RMatrix P(n, RVector(n, 0));
  for (int i = 0; i < n; ++i) P[i][i] = 1;
  auto add_col = [&](int dst, int src, const Rational& f) {  // e_dst += f e_src
    for (int i = 0; i < n; ++i) P[i][dst] += f * P[i][src];
    for (int i = 0; i < n; ++i) R[i][dst] += f * R[i][src];
    for (int j = 0; j < n; ++j) R[dst][j] += f * R[src][j];
  };
  auto swap_idx = [&](int a, int b) {
    for (int i = 0; i < n; ++i) std::swap(P[i][a], P[i][b]);
    std::swap(R[a], R[b]);
    for (int i = 0; i < n; ++i) std::swap(R[i][a], R[i][b]);
  };
  for (int k = 0; k < n; ++k) {
    if (R[k][k] == 0) {
      int j = k + 1;
      while (j < n && R[j][j] == 0) ++j;
      if (j < n) {
        swap_idx(k, j);
      } else {
        j = k + 1;
        while (j < n && R[k][j] == 0) ++j;
        if (j == n) continue;
        add_col(k, j, 1);
      }
    }
    for (int j = k + 1; j < n; ++j)
      if (R[k][j] != 0) add_col(j, k, -R[k][j] / R[k][k]);
  }
  RVector d(n);
  for (int i = 0; i < n; ++i) d[i] = R[i][i];
  return {P, d};
}

// Rational null vectors of the Levi form, as first derivatives u_1 (gauge normalized).
std::vector<RVector> levi_null_candidates(const Hypersurface& M, const Classification& cls, std::size_t limit) {
  const auto& T = cls.matrix.basis;
  const int m = static_cast<int>(T.size());
  RMatrix R(2 * m, RVector(2 * m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const auto& z = cls.matrix.entries[i][j];
      R[i][j] = z.re;
      R[i + m][j + m] = z.re;
      R[i][j + m] = -z.im;
      R[i + m][j] = z.im;
    }
  auto [P, d] = diagonalize(R);
  std::vector<RVector> basis = T;
  for (const auto& t : T) basis.push_back(apply_standard_j(t));

  std::vector<RVector> out;
  std::set<std::vector<std::string>> seen;
  auto consider = [&](const std::vector<int>& y) {
    Rational q = 0;
    for (int i = 0; i < 2 * m; ++i) q += d[i] * y[i] * y[i];
    if (q != 0) return;
    RVector x(2 * m, 0);
    for (int i = 0; i < 2 * m; ++i)
      for (int j = 0; j < 2 * m; ++j) x[i] += P[i][j] * y[j];
    RVector u(M.dim(), 0);
    for (int r = 0; r < 2 * m; ++r)
      if (x[r] != 0) u = u + x[r] * basis[r];
    if (is_zero(u)) return;
    u = gauge_normalize(u);
    std::vector<std::string> key;
    for (const auto& c : u) key.push_back(c.get_str());
    if (seen.insert(key).second) out.push_back(u);
  };
  // Small integer vectors in diagonal coordinates, sparsest first.
  const int bound = 3;
  const int dim = 2 * m;
  for (int support = 1; support <= dim && out.size() < limit; ++support) {
    std::vector<int> y(dim, 0);
    std::vector<int> idx(support);
    // Enumerate index subsets of the given size.
    std::vector<bool> mask(dim, false);
    std::fill(mask.begin(), mask.begin() + support, true);
    do {
      int k = 0;
      for (int i = 0; i < dim; ++i)
        if (mask[i]) idx[k++] = i;
      // Enumerate nonzero values in [-bound, bound] on the support; first entry positive.
      std::vector<int> val(support, 1);
      while (true) {
        std::fill(y.begin(), y.end(), 0);
        for (int i = 0; i < support; ++i) y[idx[i]] = val[i];
        consider(y);
        if (out.size() >= limit) return out;
        int pos = support - 1;
        while (pos >= 0) {
          int next = val[pos] + 1;
          if (next == 0) next = 1;
          int lo = pos == 0 ? 1 : -bound;
          if (next > bound) {
            val[pos] = lo;
            --pos;
          } else {
            val[pos] = next;
            break;
          }
        }
        if (pos < 0) break;
      }
    } while (std::prev_permutation(mask.begin(), mask.end()));
  }
  return out;
}

DiskJet support_disk(const Hypersurface& M, const ACStructure& J, const RVector& u1) {
  DiskJet u0 = propagate_cr_jet({u1, RVector(M.dim(), 0)}, J);
  DiskTrace t = compose_phi_u(M, u0);
  Rational nu = (t.a(0, 2) - t.a(2, 0)) / 2;
  Rational omega = -t.a(1, 1);
  RVector g = M.gradient_at_origin();
  Rational g2 = dot(g, g);
  RVector u2 = (nu / g2) * g - (omega / g2) * apply_standard_j(g);
  return propagate_cr_jet({u1, u2}, J);
}

}  // namespace

// ---------------------------------------------------------------------------
// Strategy

SearchStrategy SearchStrategy::grid(Rational step) {
  if (step <= 0 || step > 1) throw PreconditionError("grid step must lie in (0, 1]");
  SearchStrategy s;
  s.kind = Kind::grid;
  s.step = std::move(step);
  return s;
}

SearchStrategy SearchStrategy::from_directions(std::vector<RVector> dirs) {
  if (dirs.empty()) throw PreconditionError("empty direction list");
  SearchStrategy s;
  s.kind = Kind::directions;
  s.directions = std::move(dirs);
  return s;
}

std::string SearchStrategy::describe() const {
  switch (kind) {
    case Kind::exact: return "exact";
    case Kind::grid: return "grid:" + step.get_str();
    case Kind::directions: return "dirs(" + std::to_string(directions.size()) + ")";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Jet realization

ExtensionResult jet_extension_test(const Hypersurface& M, const ACStructure& J, const VectorField& X1, const FieldJet& xi) {
  const int m = xi.order;
  if (m < 1) throw PreconditionError("extension target must have order >= 1");
  if (X1.cap() != J.cap() || M.cap() != J.cap()) throw ShapeError("field, hypersurface and J live in different spaces");
  FieldJet have = field_jet(X1, J, m);
  for (const auto& [pq, v] : have.entries)
    if (pq.first + pq.second < m && xi.at(pq.first, pq.second) != v)
      throw PreconditionError("field does not realize the order " + std::to_string(m - 1) + " part of the target jet");

  RVector g = M.gradient_at_origin();
  std::map<std::pair<int, int>, RVector> diff;
  for (int p = m; p >= 0; --p) {
    int q = m - p;
    RVector dv = xi.at(p, q) - have.at(p, q);
    if (dot(g, dv) != 0 || dot(g, apply_standard_j(dv)) != 0) {
      ExtensionResult r;
      r.realizable = false;
      r.offending = std::make_pair(p, q);
      r.field = X1;
      return r;
    }
    diff[{p, q}] = dv;
  }

  ExtensionResult r;
  r.realizable = true;
  std::vector<RVector> S0 = real_tangent_basis(M);
  const int nr = static_cast<int>(S0.size());
  const int cap = X1.cap();
  for (const auto& s : S0) r.directions.push_back(project_to_complex_tangent(VectorField::constant(s, cap), M, J));
  RVector v = X1.at_origin();
  RVector w = apply_standard_j(v);
  Rational v2 = dot(v, v);
  if (v2 == 0) throw PreconditionError("field vanishes at the origin");
  // l1 = v.x / |v|^2, l2 = w.x / |v|^2 take the values (1,0) on v and (0,1) on w.
  std::vector<std::pair<MultiIndex, Rational>> t1, t2;
  for (int i = 0; i < M.dim(); ++i) {
    MultiIndex e(M.dim(), 0);
    e[i] = 1;
    t1.push_back({e, v[i] / v2});
    t2.push_back({e, w[i] / v2});
  }
  TruncatedSeries l1 = TruncatedSeries::from_terms(M.dim(), cap, t1);
  TruncatedSeries l2 = TruncatedSeries::from_terms(M.dim(), cap, t2);
  std::vector<TruncatedSeries> p1{TruncatedSeries::constant(M.dim(), cap, 1)}, p2 = p1;
  for (int e = 1; e <= m; ++e) {
    p1.push_back(p1.back() * l1);
    p2.push_back(p2.back() * l2);
  }
  RMatrix A(M.dim(), RVector(nr));
  for (int i = 0; i < M.dim(); ++i)
    for (int c = 0; c < nr; ++c) A[i][c] = S0[c][i];
  r.multipliers.assign(nr, TruncatedSeries(M.dim(), cap));
  for (const auto& [pq, dv] : diff) {
    if (is_zero(dv)) continue;
    AffineSolution sol = solve_affine(A, dv, nr);
    if (!sol.consistent) throw TheoremViolation("tangential jet difference is not in the span of the tangent basis");
    TruncatedSeries mono = p1[pq.first] * p2[pq.second];
    Rational norm = factorial(pq.first) * factorial(pq.second);
    for (int c = 0; c < nr; ++c)
      if (sol.particular[c] != 0) r.multipliers[c] += mono.scaled(sol.particular[c] / norm);
  }
  VectorField X = X1;
  for (int c = 0; c < nr; ++c)
    if (!r.multipliers[c].is_exact_zero()) X = X + r.multipliers[c] * r.directions[c];
  r.field = X;
  FieldJet got = field_jet(X, J, m);
  for (const auto& [pq, target] : xi.entries)
    if (got.at(pq.first, pq.second) != target) throw TheoremViolation("jet extension did not realize the target jet");
  return r;
}

VectorField realize_field_from_disk(const Hypersurface& M, const ACStructure& J, const DiskJet& u, int k) {
  if (k < 0) throw PreconditionError("negative realization order");
  if (!u.is_regular()) throw PreconditionError("disk is not regular");
  if (u.order() < k + 1) throw PrecisionError("disk jet too short to certify contact order " + std::to_string(k + 2));
  ContactOrder co = contact_order(M, u);
  if (co.order < k + 2)
    throw PreconditionError("contact order " + std::to_string(co.order) + " < " + std::to_string(k + 2) +
                            ": the jet of du/dx is not realizable");
  const int cap = k + 1;
  Hypersurface Mc = M.with_cap(std::max(cap, 2));
  ACStructure Jc = J.with_cap(Mc.cap());
  VectorField X = project_to_complex_tangent(VectorField::constant(u.derivative(1, 0), Mc.cap()), Mc, Jc);
  for (int m = 1; m <= k; ++m) {
    FieldJet xi;
    xi.order = m;
    for (int s = 0; s <= m; ++s)
      for (int p = s; p >= 0; --p) xi.entries[{p, s - p}] = u.derivative(p + 1, s - p);
    ExtensionResult ext = jet_extension_test(Mc, Jc, X, xi);
    if (!ext.realizable)
      throw TheoremViolation("disk of sufficient contact order produced a non-realizable jet at (" +
                             std::to_string(ext.offending->first) + "," + std::to_string(ext.offending->second) + ")");
    X = ext.field;
  }
  return X;
}

// ---------------------------------------------------------------------------
// Commutation

std::map<Word, RVector> word_values(const VectorField& X, const ACStructure& J0, int k) {
  const ACStructure J = J0.cap() == X.cap() ? J0 : J0.with_cap(X.cap());
  if (k < 1) throw PreconditionError("word length must be positive");
  if (X.known_degree() < k - 1) throw PrecisionError("field not known to the degree needed for words of length " + std::to_string(k));
  VectorField Xt = X.truncated(k - 1);
  VectorField JX = J.apply(Xt, k - 1);
  std::map<Word, VectorField> level{{"X", Xt}, {"J", JX}};
  std::map<Word, RVector> out;
  for (int len = 1; len <= k; ++len) {
    std::map<Word, VectorField> next;
    for (const auto& [w, F] : level) {
      out[w] = F.at_origin();
      if (len == k) continue;
      int limit = k - len - 1;
      next[Word("X") + w] = covariant_derivative(Xt, F, limit);
      next[Word("J") + w] = covariant_derivative(JX, F, limit);
    }
    level = std::move(next);
  }
  return out;
}

CommutationReport commutation_defect(const VectorField& X, const ACStructure& J0, int k) {
  const ACStructure J = J0.cap() == X.cap() ? J0 : J0.with_cap(X.cap());
  if (k < 1) throw PreconditionError("commutation order must be positive");
  if (k > X.cap()) throw PrecisionError("commutation order exceeds the degree cap");
  CommutationReport rep;
  rep.order_tested = k;
  auto values = word_values(X, J, k);
  VectorField Xt = X.truncated(std::max(k - 1, 0));
  VectorField JX = J.apply(Xt, std::max(k - 1, 0));

  // Right-normed brackets.
  std::map<Word, VectorField> level{{"X", Xt}, {"J", JX}};
  std::vector<bool> level_brackets_zero(k + 1, true);
  for (int len = 2; len <= k; ++len) {
    std::map<Word, VectorField> next;
    int limit = k - len;
    for (const auto& [w, F] : level)
      for (char a : {'X', 'J'}) {
        const VectorField& A = a == 'X' ? Xt : JX;
        VectorField B = covariant_derivative(A, F, limit) - covariant_derivative(F, A, limit);
        RVector v = B.at_origin();
        Word key = Word(1, a) + w;
        if (!is_zero(v)) level_brackets_zero[len] = false;
        rep.defects[key] = v;
        next[key] = std::move(B);
      }
    level = std::move(next);
  }

  // Derivatives of [X, JX] along words of length <= k - 2.
  std::vector<bool> level_deriv_zero(k + 1, true);
  if (k >= 2) {
    int top = k - 2;
    VectorField br = covariant_derivative(Xt, JX, top) - covariant_derivative(JX, Xt, top);
    std::map<Word, VectorField> lv{{"", br}};
    for (int len = 0; len <= top; ++len) {
      std::map<Word, VectorField> next;
      for (const auto& [w, F] : lv) {
        if (!is_zero(F.at_origin())) level_deriv_zero[len + 2] = false;
        if (len == top) continue;
        next[Word("X") + w] = covariant_derivative(Xt, F, top - len - 1);
        next[Word("J") + w] = covariant_derivative(JX, F, top - len - 1);
      }
      lv = std::move(next);
    }
  }

  // Orderings with equal content agree.
  std::vector<bool> level_perm_ok(k + 1, true);
  for (int len = 2; len <= k; ++len) {
    std::map<int, RVector> by_content;
    for (const auto& [w, v] : values) {
      if (static_cast<int>(w.size()) != len) continue;
      int js = static_cast<int>(std::count(w.begin(), w.end(), 'J'));
      auto it = by_content.find(js);
      if (it == by_content.end())
        by_content[js] = v;
      else if (it->second != v)
        level_perm_ok[len] = false;
    }
  }

  // JX^q X^p JX = JX^{q+1} X^p with p + q + 1 = len.
  std::vector<bool> level_pre_ok(k + 1, true);
  for (int len = 2; len <= k; ++len)
    for (int p = 0; p <= len - 1; ++p) {
      int q = len - 1 - p;
      Word lhs = std::string(q, 'J') + std::string(p, 'X') + "J";
      Word rhs = std::string(q + 1, 'J') + std::string(p, 'X');
      if (values.at(lhs) != values.at(rhs)) level_pre_ok[len] = false;
    }

  auto order_of = [k](const std::vector<bool>& ok) {
    int o = 1;
    for (int len = 2; len <= k && ok[len]; ++len) o = len;
    return o;
  };
  rep.criterion_order = {order_of(level_perm_ok), order_of(level_pre_ok), order_of(level_brackets_zero),
                         order_of(level_deriv_zero)};
  rep.max_vanishing_order = rep.criterion_order[2];
  rep.criteria_agree = std::all_of(rep.criterion_order.begin(), rep.criterion_order.end(),
                                   [&](int o) { return o == rep.criterion_order[0]; });
  return rep;
}

DiskJet disk_from_commuting_field(const Hypersurface& M, const ACStructure& J, const VectorField& X, int k) {
  CommutationReport rep = commutation_defect(X, J, k + 1);
  if (!rep.criteria_agree) throw TheoremViolation("commutation criteria disagree");
  if (rep.max_vanishing_order < k + 1)
    throw PreconditionError("field commutes only to order " + std::to_string(rep.max_vanishing_order) + " < " +
                            std::to_string(k + 1));
  auto values = word_values(X, J, k + 1);
  std::vector<RVector> x_jet;
  for (int m = 1; m <= k + 1; ++m) x_jet.push_back(values.at(std::string(m, 'X')));
  ACStructure Jd = J.cap() >= k + 1 ? J : J.with_cap(k + 1);
  DiskJet u = propagate_cr_jet(x_jet, Jd);
  ContactOrder co = contact_order(M.cap() >= k + 1 ? M : M.with_cap(k + 1), u);
  if (co.order < k + 2) throw TheoremViolation("disk from a commuting field has contact order " + std::to_string(co.order));
  return u;
}

// ---------------------------------------------------------------------------
// Type search

TypeReport type_search(const Hypersurface& M0, const ACStructure& J0, int k_max, const SearchStrategy& strategy) {
  if (k_max < 2) throw PreconditionError("K_max must be at least 2");
  if (k_max + 2 > M0.cap() || k_max + 2 > J0.cap())
    throw PrecisionError("K_max + 2 = " + std::to_string(k_max + 2) + " exceeds the degree cap " +
                         std::to_string(std::min(M0.cap(), J0.cap())));
  if (M0.n() < 2) throw PreconditionError("type search needs n >= 2");
  const Hypersurface M = M0.with_cap(k_max + 1);
  const ACStructure J = J0.with_cap(k_max + 1);
  TypeReport rep;
  rep.point = RVector(M.dim(), 0);
  rep.k_max = k_max;
  rep.strategy = strategy.describe();
  const int max_stage = k_max - 2;

  Classification cls = classify_point(M, J);
  std::vector<RVector> candidates;
  bool unique_first = false;
  bool real_null_exists = cls.inertia.zero > 0 || (cls.inertia.positive > 0 && cls.inertia.negative > 0);

  switch (strategy.kind) {
    case SearchStrategy::Kind::exact: {
      if (real_null_exists) candidates = levi_null_candidates(M, cls, 8);
      bool semidefinite = cls.inertia.positive == 0 || cls.inertia.negative == 0;
      unique_first = semidefinite && cls.inertia.zero == 1;
      break;
    }
    case SearchStrategy::Kind::grid: {
      std::vector<RVector> S = real_tangent_basis(M);
      std::vector<Rational> values;
      for (Rational x = -1; x <= 1; x += strategy.step) values.push_back(x);
      std::vector<std::size_t> idx(S.size(), 0);
      std::set<std::vector<std::string>> seen;
      while (true) {
        RVector u(M.dim(), 0);
        for (std::size_t r = 0; r < S.size(); ++r) u = u + values[idx[r]] * S[r];
        if (!is_zero(u)) {
          u = gauge_normalize(u);
          std::vector<std::string> key;
          for (const auto& c : u) key.push_back(c.get_str());
          if (seen.insert(key).second) candidates.push_back(u);
        }
        std::size_t pos = 0;
        while (pos < idx.size() && ++idx[pos] == values.size()) idx[pos++] = 0;
        if (pos == idx.size()) break;
      }
      break;
    }
    case SearchStrategy::Kind::directions: {
      for (const auto& d : strategy.directions) {
        if (static_cast<int>(d.size()) != M.dim()) throw PreconditionError("direction of the wrong dimension");
        RVector u = project_at_origin(M, d);
        if (!is_zero(u)) candidates.push_back(gauge_normalize(u));
      }
      if (candidates.empty()) throw PreconditionError("empty direction list after projection to the complex tangent space");
      break;
    }
  }

  std::optional<StageRun> best;
  for (const auto& u1 : candidates) {
    StageRun run = run_stages(M, J, u1, max_stage);
    if (!best || run.solved > best->solved) best = std::move(run);
    if (best->solved == max_stage) break;
  }

  if (!best || best->solved == 0) {
    rep.lower_bound = 2;
    bool definite = cls.inertia.zero == 0 && (cls.inertia.positive == 0 || cls.inertia.negative == 0);
    if (strategy.kind == SearchStrategy::Kind::exact && real_null_exists) {
      // A real null direction exists even though no rational one was found.
      rep.lower_bound = 3;
      rep.certified_exact = false;
    } else {
      rep.certified_exact = strategy.kind == SearchStrategy::Kind::exact && definite;
      rep.obstruction = Obstruction{1, definite ? "Levi form is definite at the origin"
                                                : "no candidate first derivative annihilates the Levi form"};
      RVector u1 = gauge_normalize(cls.matrix.basis.front());
      rep.witness_disk = support_disk(M, J, u1);
      VectorField X = realize_field_from_disk(M, J, *rep.witness_disk, 0);
      rep.witness_field_jet = field_jet(X, J.with_cap(X.cap()), 0);
    }
    if (rep.lower_bound >= k_max) rep.cap_reached = true;
    return rep;
  }

  const StageRun& run = *best;
  rep.lower_bound = 2 + run.solved;
  if (run.solved >= max_stage) {
    rep.cap_reached = true;
  } else {
    rep.obstruction = run.obstruction;
    rep.certified_exact = strategy.kind == SearchStrategy::Kind::exact && run.inconsistent && run.unique &&
                          (M.n() == 2 || unique_first);
  }
  std::vector<RVector> jet = run.jet;
  jet.push_back(RVector(M.dim(), 0));
  rep.witness_disk = propagate_cr_jet(jet, J);
  int k = rep.lower_bound - 2;
  VectorField X = realize_field_from_disk(M, J, *rep.witness_disk, k);
  ACStructure Jf = J.with_cap(X.cap());
  rep.witness_field_jet = field_jet(X, Jf, k);
  return rep;
}

// ---------------------------------------------------------------------------
// Cross-validation

ValidationRecord cross_validate(const Hypersurface& M, const ACStructure& J, const TypeReport& report) {
  if (!report.witness_disk) throw PreconditionError("report has no witness disk");
  const DiskJet& u = *report.witness_disk;
  const int k = report.lower_bound - 2;
  ValidationRecord rec;
  rec.k = k;
  auto fail = [](const std::string& what) { throw TheoremViolation("cross-validation failed: " + what); };

  VectorField X = realize_field_from_disk(M, J, u, k);
  ACStructure Jf = J.with_cap(X.cap());
  rec.field_jet = field_jet(X, Jf, k);
  for (const auto& [pq, v] : rec.field_jet.entries)
    if (v != u.derivative(pq.first + 1, pq.second)) fail("realized field jet differs from the disk jet");
  rec.field_realized = true;

  if (k + 1 <= X.cap()) {
    rec.commutation = commutation_defect(X, Jf, k + 1);
    if (!rec.commutation.criteria_agree) fail("commutation criteria disagree");
    if (rec.commutation.max_vanishing_order < k + 1) fail("brackets of the realized field do not vanish to order k+1");
  }
  rec.brackets_vanish = true;

  std::vector<RVector> xj = u.x_jet();
  if (k >= 1) {
    std::vector<RVector> head(xj.begin(), xj.begin() + k);
    for (const auto& [pq, v] : higher_levi_all(M, J, head))
      if (v != 0) fail("L^{" + std::to_string(pq.first) + "," + std::to_string(pq.second) + "} does not vanish on the witness");
  }
  rec.levi_forms_vanish = true;

  auto values = word_values(X, Jf, k + 1);
  for (int m = 1; m <= k + 1; ++m)
    if (values.at(std::string(m, 'X')) != xj[m - 1]) fail("X^m(0) differs from the m-th x-derivative of the disk");
  rec.derivatives_match = true;

  DiskJet back = disk_from_commuting_field(M, J, X, k);
  rec.round_trip = contact_order(M.with_cap(std::max(2, back.order())), back).order >= k + 2;
  if (!rec.round_trip) fail("disk from the realized field lost contact order");
  return rec;
}

std::vector<TypeReport> scan_type(int n, const TruncatedSeries& phi, const std::vector<TruncatedSeries>& J_entries,
                                  const std::vector<RVector>& points, int k_max, const SearchStrategy& strategy) {
  std::vector<std::future<TypeReport>> jobs;
  for (const auto& p : points)
    jobs.push_back(std::async(std::launch::async, [&, p] {
      Recentered rc = recenter(n, phi, J_entries, p);
      TypeReport r = type_search(rc.M, rc.J, k_max, strategy);
      r.point = rc.point;
      return r;
    }));
  std::vector<TypeReport> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace levitype
