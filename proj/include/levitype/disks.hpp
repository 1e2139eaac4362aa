#pragma once

// Formal pseudoholomorphic disk jets u : (C, 0) -> (R^{2n}, 0) and their
// composition with a defining function.

#include <vector>

#include "levitype/geometry.hpp"

namespace levitype {

/// Jet of order k of a disk, stored as 2n series in the disk variables (x, y)
/// with cap k.
class DiskJet {
 public:
  DiskJet(int order, std::vector<TruncatedSeries> components);

  int order() const { return order_; }
  int dim() const { return static_cast<int>(c_.size()); }
  const std::vector<TruncatedSeries>& components() const { return c_; }

  /// d^{p+q} u / dx^p dy^q at 0.
  RVector derivative(int p, int q) const;
  /// (u_1, ..., u_k), u_m = d^m u / dx^m (0).
  std::vector<RVector> x_jet() const;
  bool is_regular() const { return !is_zero(derivative(1, 0)); }

  friend bool operator==(const DiskJet& a, const DiskJet& b) { return a.order_ == b.order_ && a.c_ == b.c_; }

 private:
  int order_;
  std::vector<TruncatedSeries> c_;
};

/// Jet of phi o u in (x, y).
struct DiskTrace {
  TruncatedSeries series;

  /// a_{p,q} = d^{p+q}(phi o u)/dx^p dy^q at 0.
  Rational a(int p, int q) const;
  int order() const { return series.known_degree(); }
};

struct ContactOrder {
  int order = 0;
  /// True when every computed coefficient vanishes: the contact order is at least `order`.
  bool at_least = false;
};

/// The unique formal solution of du/dy = J(u) du/dx with du^m/dx^m (0) = u_m.
DiskJet propagate_cr_jet(const std::vector<RVector>& x_jet, const ACStructure& J);

DiskTrace compose_phi_u(const Hypersurface& M, const DiskJet& u);

ContactOrder contact_order(const Hypersurface& M, const DiskJet& u);

/// Complex number re + i im.
using ComplexCoefficient = ComplexRational;

/// Jet of u o theta for theta(z) = sum_m theta_m z^m (theta_jet = theta_1, theta_2, ...).
DiskJet reparametrize_disk_jet(const DiskJet& u, const std::vector<ComplexCoefficient>& theta_jet, const ACStructure& J);

/// Holomorphic disk with the given x-jet for the standard structure:
/// d^{p+q}u/dx^p dy^q (0) = J_std^q u_{p+q}.
RVector standard_holomorphic_derivative(const std::vector<RVector>& x_jet, int p, int q);

}  // namespace levitype
