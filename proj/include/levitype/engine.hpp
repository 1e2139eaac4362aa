#pragma once

// Regular type at a point: staged disk-jet search, field realization, Lie
// bracket commutation tests and their cross-validation.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "levitype/levi.hpp"

namespace levitype {

struct Obstruction {
  int stage = 0;  // 1-based stage whose constraints could not be met
  std::string description;
};

struct TypeReport {
  RVector point;
  int lower_bound = 2;
  bool certified_exact = false;
  bool cap_reached = false;
  std::optional<DiskJet> witness_disk;
  std::optional<FieldJet> witness_field_jet;
  std::optional<Obstruction> obstruction;
  int k_max = 0;
  std::string strategy;
};

struct SearchStrategy {
  enum class Kind { exact, grid, directions };
  Kind kind = Kind::exact;
  Rational step = Rational(1, 2);   // grid spacing, coordinates range over [-1, 1]
  std::vector<RVector> directions;  // candidate first derivatives

  static SearchStrategy exact() { return {}; }
  static SearchStrategy grid(Rational step);
  static SearchStrategy from_directions(std::vector<RVector> dirs);
  std::string describe() const;
};

/// Word over {X, JX}; letter 'X' or 'J'.
using Word = std::string;

struct CommutationReport {
  int order_tested = 0;
  /// Right-normed brackets [A1,[A2,...,[A_{m-1},A_m]]] at 0, keyed by their word.
  std::map<Word, RVector> defects;
  /// Largest order (<= order_tested) through which each criterion holds:
  /// [0] all orderings agree, [1] JX^q X^p JX = JX^{q+1} X^p,
  /// [2] brackets vanish, [3] derivatives of [X, JX] vanish.
  std::array<int, 4> criterion_order{};
  int max_vanishing_order = 1;
  bool criteria_agree = true;
};

struct ExtensionResult {
  bool realizable = false;
  std::optional<std::pair<int, int>> offending;
  VectorField field;
  /// Real multipliers mu_r of the correction sum_r mu_r S_r.
  std::vector<TruncatedSeries> multipliers;
  /// Complex tangent fields S_r used by the correction.
  std::vector<VectorField> directions;
};

/// Tries to extend the field X1 (realizing the order-k part of xi) to a
/// complex tangent field realizing xi of order k + 1.
ExtensionResult jet_extension_test(const Hypersurface& M, const ACStructure& J, const VectorField& X1, const FieldJet& xi);

/// Complex tangent field X with D^{p,q}_X X(0) = d^{p+q}/dx^p dy^q du/dx (0)
/// for p + q <= k. Requires contact order >= k + 2.
VectorField realize_field_from_disk(const Hypersurface& M, const ACStructure& J, const DiskJet& u, int k);

/// Disk with x-jet (X(0), X^2(0), ..., X^{k+1}(0)); X must commute to order k + 1.
DiskJet disk_from_commuting_field(const Hypersurface& M, const ACStructure& J, const VectorField& X, int k);

CommutationReport commutation_defect(const VectorField& X, const ACStructure& J, int k);

/// Values A_1 ... A_m at 0 (nabla_{A_1}(... nabla_{A_{m-1}} A_m)) for all words
/// of length 1..k.
std::map<Word, RVector> word_values(const VectorField& X, const ACStructure& J, int k);

TypeReport type_search(const Hypersurface& M, const ACStructure& J, int k_max,
                       const SearchStrategy& strategy = SearchStrategy::exact());

struct ValidationRecord {
  int k = 0;
  bool field_realized = false;
  bool brackets_vanish = false;
  bool levi_forms_vanish = false;
  bool derivatives_match = false;
  bool round_trip = false;
  CommutationReport commutation;
  FieldJet field_jet;
};

/// Runs the four theorem checks on the witness of `report`; throws
/// TheoremViolation on any failure.
ValidationRecord cross_validate(const Hypersurface& M, const ACStructure& J, const TypeReport& report);

/// Type at each point (recentered to the origin), in input order. Points are
/// evaluated concurrently.
std::vector<TypeReport> scan_type(int n, const TruncatedSeries& phi, const std::vector<TruncatedSeries>& J_entries,
                                  const std::vector<RVector>& points, int k_max,
                                  const SearchStrategy& strategy = SearchStrategy::exact());

}  // namespace levitype
