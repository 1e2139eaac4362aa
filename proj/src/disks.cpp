#include "levitype/disks.hpp"

#include "levitype/errors.hpp"

namespace levitype {

namespace {

Rational factorial(int m) {
  mpz_class f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  return Rational(f);
}

MultiIndex xy(int p, int q) { return {p, q}; }

}  // namespace

DiskJet::DiskJet(int order, std::vector<TruncatedSeries> components) : order_(order), c_(std::move(components)) {
  if (order < 1) throw PreconditionError("disk jet order must be positive");
  for (const auto& s : c_)
    if (s.num_vars() != 2 || s.cap() != order) throw ShapeError("disk jet components must be 2-variable series with cap = order");
}

RVector DiskJet::derivative(int p, int q) const {
  if (p + q > order_) throw PrecisionError("disk derivative beyond the jet order");
  Rational scale = factorial(p) * factorial(q);
  RVector v;
  for (const auto& s : c_) v.push_back(s.coefficient(xy(p, q)) * scale);
  return v;
}

std::vector<RVector> DiskJet::x_jet() const {
  std::vector<RVector> jet;
  for (int m = 1; m <= order_; ++m) jet.push_back(derivative(m, 0));
  return jet;
}

Rational DiskTrace::a(int p, int q) const {
  return series.coefficient(xy(p, q)) * factorial(p) * factorial(q);
}

DiskJet propagate_cr_jet(const std::vector<RVector>& x_jet, const ACStructure& J) {
  const int k = static_cast<int>(x_jet.size());
  const int d = J.dim();
  if (k < 1) throw PreconditionError("empty x-jet");
  if (k > J.cap()) throw PrecisionError("disk order exceeds the truncation depth of J");
  for (const auto& v : x_jet)
    if (static_cast<int>(v.size()) != d) throw ShapeError("x-jet vector of the wrong dimension");

  // u restricted to y = 0.
  std::vector<TruncatedSeries> c0;
  for (int i = 0; i < d; ++i) {
    std::vector<std::pair<MultiIndex, Rational>> terms;
    for (int m = 1; m <= k; ++m) terms.push_back({xy(m, 0), x_jet[m - 1][i] / factorial(m)});
    c0.push_back(TruncatedSeries::from_terms(2, k, terms));
  }
  if (J.is_constant()) {
    // du/dy = J0 du/dx with J0 constant: d^{p+q}u/dx^p dy^q = J0^q u_{p+q}.
    std::vector<std::vector<std::pair<MultiIndex, Rational>>> terms(d);
    for (int m = 1; m <= k; ++m) {
      RVector v = x_jet[m - 1];
      for (int q = 0; q <= m; ++q) {
        Rational scale = factorial(m - q) * factorial(q);
        for (int i = 0; i < d; ++i)
          if (v[i] != 0) terms[i].push_back({xy(m - q, q), v[i] / scale});
        v = apply_standard_j(v);
      }
    }
    std::vector<TruncatedSeries> c;
    for (int i = 0; i < d; ++i) c.push_back(TruncatedSeries::from_terms(2, k, terms[i]));
    return DiskJet(k, std::move(c));
  }

  std::vector<TruncatedSeries> Jk;
  // J(u) enters only through degree k - 1.
  for (const auto& s : J.entries()) Jk.push_back(s.with_cap(k).truncated(k - 1));
  // Picard iteration in y: each pass fixes one more power of y.
  std::vector<TruncatedSeries> u = c0;
  for (int it = 0; it <= k; ++it) {
    std::vector<TruncatedSeries> Ju = compose_all(Jk, u);
    std::vector<TruncatedSeries> ux;
    for (const auto& s : u) ux.push_back(partial(s, 0));
    std::vector<TruncatedSeries> next;
    for (int i = 0; i < d; ++i) {
      TruncatedSeries rhs(2, k);
      for (int j = 0; j < d; ++j) {
        const auto& a = Ju[i * d + j];
        if (a.is_exact_zero() || ux[j].is_exact_zero()) continue;
        rhs += multiply_limited(a, ux[j], k - 1);
      }
      next.push_back((c0[i] + integrate(rhs.truncated(k - 1), 1)).truncated(k));
    }
    u = std::move(next);
  }
  return DiskJet(k, std::move(u));
}

DiskTrace compose_phi_u(const Hypersurface& M, const DiskJet& u) {
  if (u.dim() != M.dim()) throw ShapeError("disk and hypersurface live in different dimensions");
  TruncatedSeries phi = M.phi().with_cap(u.order());
  return {compose(phi, u.components())};
}

ContactOrder contact_order(const Hypersurface& M, const DiskJet& u) {
  if (!u.is_regular()) throw PreconditionError("contact order of a non-regular disk (du/dx(0) = 0)");
  DiskTrace t = compose_phi_u(M, u);
  int known = t.series.known_degree();
  if (!t.series.empty() && t.series.low_degree() <= known) return {t.series.low_degree(), false};
  return {known + 1, true};
}

DiskJet reparametrize_disk_jet(const DiskJet& u, const std::vector<ComplexCoefficient>& theta_jet, const ACStructure& J) {
  const int k = u.order();
  if (theta_jet.empty() || (theta_jet[0].re == 0 && theta_jet[0].im == 0))
    throw PreconditionError("reparametrization needs theta'(0) != 0");
  // Re and Im of theta(x + i y) as series in (x, y).
  TruncatedSeries re(2, k), im(2, k);
  TruncatedSeries zr = TruncatedSeries::variable(2, k, 0), zi = TruncatedSeries::variable(2, k, 1);
  TruncatedSeries pr = zr, pi = zi;  // (x + i y)^m
  for (std::size_t m = 0; m < theta_jet.size() && static_cast<int>(m) < k; ++m) {
    const auto& c = theta_jet[m];
    re += pr.scaled(c.re) - pi.scaled(c.im);
    im += pr.scaled(c.im) + pi.scaled(c.re);
    TruncatedSeries nr = pr * zr - pi * zi;
    TruncatedSeries ni = pr * zi + pi * zr;
    pr = std::move(nr);
    pi = std::move(ni);
  }
  std::vector<TruncatedSeries> inner{re, im};
  std::vector<TruncatedSeries> composed = compose_all(u.components(), inner);
  DiskJet direct(k, composed);
  DiskJet repropagated = propagate_cr_jet(direct.x_jet(), J.with_cap(std::max(J.cap(), k)));
  if (!(repropagated == direct))
    throw TheoremViolation("reparametrized disk is not the propagation of its own x-jet");
  return direct;
}

RVector standard_holomorphic_derivative(const std::vector<RVector>& x_jet, int p, int q) {
  if (p + q < 1 || p + q > static_cast<int>(x_jet.size())) throw PreconditionError("derivative order outside the x-jet");
  RVector v = x_jet[p + q - 1];
  for (int i = 0; i < q; ++i) v = apply_standard_j(v);
  return v;
}

}  // namespace levitype
