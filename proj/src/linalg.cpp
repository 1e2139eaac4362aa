#include "levitype/linalg.hpp"

#include "levitype/errors.hpp"

namespace levitype {

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> reduce(RMatrix& M, int num_cols) {
  std::vector<int> pivots;
  int row = 0;
  const int rows = static_cast<int>(M.size());
  for (int col = 0; col < num_cols && row < rows; ++col) {
    int sel = -1;
    for (int r = row; r < rows; ++r)
      if (M[r][col] != 0) {
        sel = r;
        break;
      }
    if (sel < 0) continue;
    std::swap(M[row], M[sel]);
    Rational inv = 1 / M[row][col];
    for (auto& x : M[row]) x *= inv;
    for (int r = 0; r < rows; ++r) {
      if (r == row || M[r][col] == 0) continue;
      Rational f = M[r][col];
      for (std::size_t c = col; c < M[r].size(); ++c) M[r][c] -= f * M[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

int sign_changes(const RVector& coeffs) {
  int changes = 0, last = 0;
  for (const auto& c : coeffs) {
    int s = sgn(c);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

AffineSolution solve_affine(const RMatrix& A, const RVector& b, int num_cols) {
  if (A.size() != b.size()) throw ShapeError("solve_affine: row count differs from right-hand side length");
  RMatrix M;
  M.reserve(A.size());
  for (std::size_t r = 0; r < A.size(); ++r) {
    if (static_cast<int>(A[r].size()) != num_cols) throw ShapeError("solve_affine: ragged matrix");
    RVector row = A[r];
    row.push_back(b[r]);
    M.push_back(std::move(row));
  }
  auto pivots = reduce(M, num_cols);
  AffineSolution sol;
  sol.rank = static_cast<int>(pivots.size());
  sol.consistent = true;
  for (std::size_t r = pivots.size(); r < M.size(); ++r)
    if (M[r][num_cols] != 0) sol.consistent = false;
  if (!sol.consistent) return sol;

  sol.particular.assign(num_cols, 0);
  for (std::size_t r = 0; r < pivots.size(); ++r) sol.particular[pivots[r]] = M[r][num_cols];
  std::vector<bool> is_pivot(num_cols, false);
  for (int p : pivots) is_pivot[p] = true;
  for (int free = 0; free < num_cols; ++free) {
    if (is_pivot[free]) continue;
    RVector v(num_cols, 0);
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -M[r][free];
    sol.nullspace.push_back(std::move(v));
  }
  return sol;
}

int rank(const RMatrix& A) {
  if (A.empty()) return 0;
  RMatrix M = A;
  return static_cast<int>(reduce(M, static_cast<int>(A[0].size())).size());
}

RVector characteristic_polynomial(const RMatrix& A) {
  const int n = static_cast<int>(A.size());
  RVector c(n + 1, 0);
  c[n] = 1;
  if (n == 0) return c;
  // Faddeev-LeVerrier: M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k.
  RMatrix Mk(n, RVector(n, 0));
  for (int k = 1; k <= n; ++k) {
    RMatrix next(n, RVector(n, 0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Rational s = 0;
        for (int l = 0; l < n; ++l) s += A[i][l] * Mk[l][j];
        next[i][j] = s;
      }
      next[i][i] += c[n - k + 1];
    }
    Mk = std::move(next);
    Rational tr = 0;
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) tr += A[i][l] * Mk[l][i];
    c[n - k] = -tr / k;
  }
  return c;
}

Inertia symmetric_inertia(const RMatrix& A) {
  RVector p = characteristic_polynomial(A);
  Inertia in;
  while (in.zero < static_cast<int>(p.size()) && p[in.zero] == 0) ++in.zero;
  in.positive = sign_changes(p);
  RVector q = p;
  for (std::size_t i = 1; i < q.size(); i += 2) q[i] = -q[i];
  in.negative = sign_changes(q);
  return in;
}

}  // namespace levitype
