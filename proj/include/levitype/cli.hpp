#pragma once

// Expression language, problem description and report generation for the
// levitype command line tool.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "levitype/engine.hpp"

namespace levitype::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSchema = "levitype-report/1";

enum ExitCode : int { kOk = 0, kFailure = 1, kParse = 2, kGeometry = 3, kCap = 4 };

/// Polynomial in x1, y1, ..., xn, yn. Accepts rationals, x_i, y_i, z_i, i,
/// + - * ^ (natural powers), division by nonzero constants, Re, Im, conj,
/// abs2 and parentheses. The value must be real.
TruncatedSeries parse_expression(std::string_view text, int n, int cap);

/// Row-major 2n x 2n entries: one row per line, entries separated by ';'.
/// Blank lines and lines starting with '#' are skipped.
std::vector<TruncatedSeries> parse_j_matrix(std::string_view text, int n, int cap);

/// Comma separated rationals.
RVector parse_point(std::string_view text);

struct ProblemSpec {
  std::string command;  // levi | classify | type | scan | validate | catalog
  int n = 2;
  std::string phi_expression;
  std::string j_spec = "standard";  // standard | perturbed[:seed] | path to a matrix file
  std::vector<RVector> points;      // empty means the origin
  int cap = 8;
  int k_max = 6;
  std::string strategy = "exact";   // exact | grid:<step> | dirs:<file>
  std::optional<std::uint64_t> seed;
};

struct CommandResult {
  int exit_code = kOk;
  nlohmann::json tree;
  std::string text;
};

/// Builds the structure selected by `j_spec`; `perturbed` without a seed uses
/// `seed`, then LEVITYPE_SEED, then 1.
std::vector<TruncatedSeries> resolve_structure(const std::string& j_spec, int n, int cap,
                                               std::optional<std::uint64_t> seed);
SearchStrategy resolve_strategy(const std::string& text, int n, int cap);

CommandResult run_command(const ProblemSpec& spec);

nlohmann::json to_json(const TruncatedSeries& f);
nlohmann::json to_json(const RVector& v);
nlohmann::json to_json(const DiskJet& u);
nlohmann::json to_json(const FieldJet& jet);
nlohmann::json to_json(const TypeReport& report);
nlohmann::json to_json(const CommutationReport& report);
nlohmann::json to_json(const ValidationRecord& record);
nlohmann::json to_json(const Classification& c);

std::string render_text(const nlohmann::json& tree);

}  // namespace levitype::cli
