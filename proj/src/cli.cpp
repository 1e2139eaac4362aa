#include "levitype/cli.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "levitype/errors.hpp"

namespace levitype::cli {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Expressions

struct Complex {
  TruncatedSeries re, im;
};

Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
Complex operator*(const Complex& a, const Complex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

bool is_constant(const TruncatedSeries& f) { return f.is_exact() && f.max_degree() <= 0; }

class Parser {
 public:
  Parser(std::string_view text, int n, int cap) : s_(text), n_(n), cap_(cap) {}

  Complex parse() {
    Complex e = expression();
    skip_space();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Complex constant(const Rational& c) const {
    return {TruncatedSeries::constant(2 * n_, cap_, c), TruncatedSeries(2 * n_, cap_)};
  }
  Complex zero() const { return {TruncatedSeries(2 * n_, cap_), TruncatedSeries(2 * n_, cap_)}; }

  Complex expression() {
    Complex e = term();
    while (true) {
      if (accept('+'))
        e = e + term();
      else if (accept('-'))
        e = e - term();
      else
        return e;
    }
  }

  Complex term() {
    Complex e = unary();
    while (true) {
      if (accept('*')) {
        e = e * unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        Complex d = unary();
        if (!is_constant(d.re) || !is_constant(d.im)) throw ParseError("division by non-unit", at);
        Rational a = d.re.constant_term(), b = d.im.constant_term();
        Rational r = a * a + b * b;
        if (r == 0) throw ParseError("division by zero", at);
        e = e * Complex{TruncatedSeries::constant(2 * n_, cap_, a / r), TruncatedSeries::constant(2 * n_, cap_, -b / r)};
      } else {
        return e;
      }
    }
  }

  Complex unary() {
    if (accept('-')) return zero() - unary();
    if (accept('+')) return unary();
    return power();
  }

  Complex power() {
    Complex base = primary();
    if (!accept('^')) return base;
    skip_space();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a natural exponent");
    long e = std::stol(std::string(s_.substr(start, pos_ - start)));
    if (e > 4096) throw ParseError("exponent too large", start);
    Complex result = constant(1);
    Complex b = base;
    while (e > 0) {
      if (e & 1) result = result * b;
      e >>= 1;
      if (e) b = b * b;
    }
    return result;
  }

  int index_suffix(const std::string& ident, std::size_t at) const {
    std::string digits = ident.substr(1);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw ParseError("unknown identifier '" + ident + "'", at);
    int i = std::stoi(digits);
    if (i < 1 || i > n_) throw ParseError("variable '" + ident + "' out of range for n = " + std::to_string(n_), at);
    return i;
  }

  Complex call_argument() {
    if (!accept('(')) fail("expected '('");
    Complex e = expression();
    if (!accept(')')) fail("expected ')'");
    return e;
  }

  Complex primary() {
    skip_space();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Complex e = expression();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return constant(Rational(mpz_class(std::string(s_.substr(start, pos_ - start)))));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string id(s_.substr(start, pos_ - start));
      if (id == "i") return {TruncatedSeries(2 * n_, cap_), TruncatedSeries::constant(2 * n_, cap_, 1)};
      if (id == "Re") {
        Complex a = call_argument();
        return {a.re, TruncatedSeries(2 * n_, cap_)};
      }
      if (id == "Im") {
        Complex a = call_argument();
        return {a.im, TruncatedSeries(2 * n_, cap_)};
      }
      if (id == "conj") {
        Complex a = call_argument();
        return {a.re, -a.im};
      }
      if (id == "abs2") {
        Complex a = call_argument();
        return {a.re * a.re + a.im * a.im, TruncatedSeries(2 * n_, cap_)};
      }
      auto var = [&](int v) { return TruncatedSeries::variable(2 * n_, cap_, v); };
      switch (id[0]) {
        case 'x': return {var(x_index(index_suffix(id, start))), TruncatedSeries(2 * n_, cap_)};
        case 'y': return {var(y_index(index_suffix(id, start))), TruncatedSeries(2 * n_, cap_)};
        case 'z': {
          int i = index_suffix(id, start);
          return {var(x_index(i)), var(y_index(i))};
        }
        default: throw ParseError("unknown identifier '" + id + "'", start);
      }
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  int n_;
  int cap_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read '" + path + "'", 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool is_origin(const RVector& p) { return is_zero(p); }

// ---------------------------------------------------------------------------
// Problem setup

struct Setup {
  TruncatedSeries phi;
  std::vector<TruncatedSeries> J_entries;
};

Setup build_setup(const ProblemSpec& spec) {
  if (spec.n < 1 || spec.n > 4) throw PreconditionError("n must lie in 1..4");
  if (spec.cap < 2 || spec.cap > 40) throw PrecisionError("degree cap must lie in 2..40");
  if (spec.phi_expression.empty()) throw ParseError("missing defining function", 0);
  Setup s{parse_expression(spec.phi_expression, spec.n, spec.cap), resolve_structure(spec.j_spec, spec.n, spec.cap, spec.seed)};
  return s;
}

struct Local {
  Hypersurface M;
  ACStructure J;
  RVector point;
  bool projected;
};

Local localize(const Setup& s, int n, const RVector& point) {
  if (static_cast<int>(point.size()) != 2 * n)
    throw GeometryError("point has " + std::to_string(point.size()) + " coordinates, expected " + std::to_string(2 * n));
  if (is_origin(point)) return {Hypersurface(n, s.phi), ACStructure(n, s.J_entries), point, false};
  Recentered rc = recenter(n, s.phi, s.J_entries, point);
  return {rc.M, rc.J, rc.point, rc.projected};
}

RVector first_point(const ProblemSpec& spec) {
  return spec.points.empty() ? RVector(2 * spec.n, 0) : spec.points.front();
}

json provenance(const ProblemSpec& spec) {
  return {{"version", kVersion},
          {"cap", spec.cap},
          {"k_max", spec.k_max},
          {"strategy", spec.strategy},
          {"J", spec.j_spec}};
}

json command_levi(const ProblemSpec& spec, const Setup& s) {
  Local L = localize(s, spec.n, first_point(spec));
  json fields = json::array();
  for (const auto& t : complex_tangent_basis(L.M)) {
    VectorField X = project_to_complex_tangent(VectorField::constant(t, L.M.cap()), L.M, L.J);
    LeviReport b = levi_form_bracket(L.M, L.J, X);
    LeviReport h = levi_form_hessian(L.M, L.J, X);
    fields.push_back({{"direction", to_json(t)},
                      {"bracket", to_string(b.value)},
                      {"hessian", to_string(h.value)},
                      {"correction", to_string(h.correction_term)},
                      {"agree", b.value == h.value}});
  }
  Classification c = classify_point(L.M, L.J);
  return {{"point", to_json(L.point)}, {"projected", L.projected}, {"fields", fields}, {"polar_form", to_json(c)["matrix"]}};
}

json command_classify(const ProblemSpec& spec, const Setup& s) {
  Local L = localize(s, spec.n, first_point(spec));
  json out = to_json(classify_point(L.M, L.J));
  out["point"] = to_json(L.point);
  return out;
}

json command_type(const ProblemSpec& spec, const Setup& s) {
  Local L = localize(s, spec.n, first_point(spec));
  TypeReport r = type_search(L.M, L.J, spec.k_max, resolve_strategy(spec.strategy, spec.n, spec.cap));
  r.point = L.point;
  return to_json(r);
}

json command_validate(const ProblemSpec& spec, const Setup& s) {
  Local L = localize(s, spec.n, first_point(spec));
  TypeReport r = type_search(L.M, L.J, spec.k_max, resolve_strategy(spec.strategy, spec.n, spec.cap));
  r.point = L.point;
  json out{{"type", to_json(r)}};
  if (!r.witness_disk) {
    out["validation"] = nullptr;
    out["note"] = "no witness disk to validate";
    return out;
  }
  out["validation"] = to_json(cross_validate(L.M, L.J, r));
  return out;
}

json command_scan(const ProblemSpec& spec, const Setup& s) {
  std::vector<RVector> pts = spec.points.empty() ? std::vector<RVector>{RVector(2 * spec.n, 0)} : spec.points;
  auto reports = scan_type(spec.n, s.phi, s.J_entries, pts, spec.k_max, resolve_strategy(spec.strategy, spec.n, spec.cap));
  json out = json::array();
  for (const auto& r : reports) out.push_back(to_json(r));
  return {{"points", out}};
}

struct CatalogEntry {
  const char* name;
  int n;
  const char* phi;
};

constexpr CatalogEntry kCatalog[] = {
    {"flat", 2, "2*x2"},
    {"sphere", 2, "2*x2 + abs2(z1)"},
    {"quartic", 2, "2*x2 + abs2(z1)^2"},
    {"sextic", 2, "2*x2 + abs2(z1)^3"},
    {"harmonic", 2, "2*x2 + Re(z1^2)"},
    {"hyperbolic", 3, "2*x3 + abs2(z1) - abs2(z2)"},
};

json command_catalog(const ProblemSpec& spec) {
  json out = json::array();
  int cap = std::max(spec.cap, spec.k_max + 2);
  for (const auto& e : kCatalog) {
    TruncatedSeries phi = parse_expression(e.phi, e.n, cap);
    Hypersurface M(e.n, phi);
    ACStructure J = ACStructure::standard(e.n, cap);
    Classification c = classify_point(M, J);
    TypeReport r = type_search(M, J, spec.k_max);
    out.push_back({{"name", e.name}, {"n", e.n}, {"phi", e.phi}, {"class", to_string(c.kind)}, {"type", to_json(r)}});
  }
  return {{"entries", out}};
}

void render(const json& j, const std::string& indent, std::string& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_object() || (v.is_array() && !v.empty() && (v.front().is_object() || v.front().is_array()))) {
        out += indent + k + ":\n";
        render(v, indent + "  ", out);
      } else {
        out += indent + k + ": ";
        render(v, "", out);
        out += "\n";
      }
    }
  } else if (j.is_array()) {
    bool nested = !j.empty() && (j.front().is_object() || j.front().is_array());
    if (!nested) {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ", ";
        render(j[i], "", out);
      }
      out += "]";
      return;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (j[i].is_object()) {
        out += indent + "- [" + std::to_string(i) + "]\n";
        render(j[i], indent + "  ", out);
      } else {
        out += indent + "- ";
        render(j[i], indent + "  ", out);
        out += "\n";
      }
    }
  } else if (j.is_string()) {
    out += j.get<std::string>();
  } else if (j.is_null()) {
    out += "none";
  } else {
    out += j.dump();
  }
}

}  // namespace

TruncatedSeries parse_expression(std::string_view text, int n, int cap) {
  if (n < 1) throw PreconditionError("n must be positive");
  Complex v = Parser(text, n, cap).parse();
  if (!v.im.is_exact_zero() && !(v.im == TruncatedSeries(2 * n, cap)))
    throw ParseError("expression is not real", 0);
  for (const auto& t : v.im.terms())
    if (t.coeff != 0) throw ParseError("expression is not real", 0);
  return v.re;
}

std::vector<TruncatedSeries> parse_j_matrix(std::string_view text, int n, int cap) {
  std::vector<TruncatedSeries> out;
  int rows = 0;
  for (const auto& raw : split(text, '\n')) {
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto cells = split(line, ';');
    if (static_cast<int>(cells.size()) != 2 * n)
      throw ParseError("row " + std::to_string(rows + 1) + " has " + std::to_string(cells.size()) + " entries, expected " +
                           std::to_string(2 * n),
                       0);
    for (const auto& c : cells) out.push_back(parse_expression(c, n, cap));
    ++rows;
  }
  if (rows != 2 * n) throw ParseError("J matrix has " + std::to_string(rows) + " rows, expected " + std::to_string(2 * n), 0);
  return out;
}

RVector parse_point(std::string_view text) {
  RVector out;
  for (const auto& c : split(text, ',')) {
    std::string t = trim(c);
    if (t.empty()) throw ParseError("empty coordinate", 0);
    out.push_back(parse_rational(t));
  }
  return out;
}

std::vector<TruncatedSeries> resolve_structure(const std::string& j_spec, int n, int cap,
                                               std::optional<std::uint64_t> seed) {
  if (j_spec == "standard") return ACStructure::standard(n, cap).entries();
  if (j_spec.rfind("perturbed", 0) == 0) {
    std::uint64_t sd = 1;
    if (j_spec.size() > 9) {
      if (j_spec[9] != ':') throw ParseError("expected perturbed:<seed>", 9);
      try {
        sd = std::stoull(j_spec.substr(10));
      } catch (const std::exception&) {
        throw ParseError("bad seed in '" + j_spec + "'", 10);
      }
    } else if (seed) {
      sd = *seed;
    } else if (const char* env = std::getenv("LEVITYPE_SEED")) {
      sd = std::strtoull(env, nullptr, 10);
    }
    return ACStructure::perturbed(n, cap, sd).entries();
  }
  auto entries = parse_j_matrix(read_file(j_spec), n, cap);
  return ACStructure(n, entries).entries();
}

SearchStrategy resolve_strategy(const std::string& text, int n, int) {
  if (text == "exact") return SearchStrategy::exact();
  if (text.rfind("grid:", 0) == 0) return SearchStrategy::grid(parse_rational(text.substr(5)));
  if (text.rfind("dirs:", 0) == 0) {
    std::vector<RVector> dirs;
    for (const auto& raw : split(read_file(text.substr(5)), '\n')) {
      std::string line = trim(raw);
      if (line.empty() || line[0] == '#') continue;
      RVector d = parse_point(line);
      if (static_cast<int>(d.size()) != 2 * n) throw ParseError("direction '" + line + "' has the wrong dimension", 0);
      dirs.push_back(d);
    }
    return SearchStrategy::from_directions(dirs);
  }
  throw ParseError("unknown strategy '" + text + "'", 0);
}

CommandResult run_command(const ProblemSpec& spec) {
  CommandResult res;
  res.tree = {{"schema", kSchema}, {"command", spec.command}, {"provenance", provenance(spec)}};
  if (spec.command != "catalog") res.tree["input"] = {{"n", spec.n}, {"phi", spec.phi_expression}};
  try {
    json result;
    if (spec.command == "catalog") {
      result = command_catalog(spec);
    } else {
      Setup s = build_setup(spec);
      if (spec.command == "levi")
        result = command_levi(spec, s);
      else if (spec.command == "classify")
        result = command_classify(spec, s);
      else if (spec.command == "type")
        result = command_type(spec, s);
      else if (spec.command == "scan")
        result = command_scan(spec, s);
      else if (spec.command == "validate")
        result = command_validate(spec, s);
      else
        throw ParseError("unknown command '" + spec.command + "'", 0);
      res.tree["input"]["phi_parsed"] = to_json(s.phi);
    }
    res.tree["status"] = "ok";
    res.tree["result"] = result;
  } catch (const ParseError& e) {
    res.exit_code = kParse;
    res.tree["status"] = "error";
    res.tree["error"] = {{"kind", "parse"}, {"message", e.what()}, {"position", e.position()}};
  } catch (const GeometryError& e) {
    res.exit_code = kGeometry;
    res.tree["status"] = "error";
    res.tree["error"] = {{"kind", "geometry"}, {"message", e.what()}};
  } catch (const PrecisionError& e) {
    res.exit_code = kCap;
    res.tree["status"] = "error";
    res.tree["error"] = {{"kind", "cap"}, {"message", e.what()}};
  } catch (const Error& e) {
    res.exit_code = kFailure;
    res.tree["status"] = "error";
    res.tree["error"] = {{"kind", "failure"}, {"message", e.what()}};
  }
  res.text = render_text(res.tree);
  return res;
}

// ---------------------------------------------------------------------------
// Serialization

json to_json(const TruncatedSeries& f) {
  json j{{"text", to_string(f)}};
  if (!f.is_exact()) j["known_degree"] = f.known_degree();
  return j;
}

json to_json(const RVector& v) {
  json j = json::array();
  for (const auto& c : v) j.push_back(to_string(c));
  return j;
}

json to_json(const DiskJet& u) {
  json x = json::array();
  for (const auto& v : u.x_jet()) x.push_back(to_json(v));
  json comps = json::array();
  for (const auto& c : u.components()) comps.push_back(to_string(c, {"x", "y"}));
  return {{"order", u.order()}, {"x_jet", x}, {"components", comps}};
}

json to_json(const FieldJet& jet) {
  json entries = json::array();
  for (const auto& [pq, v] : jet.entries) entries.push_back({{"p", pq.first}, {"q", pq.second}, {"value", to_json(v)}});
  return {{"order", jet.order}, {"entries", entries}};
}

json to_json(const TypeReport& r) {
  json j{{"point", to_json(r.point)},
         {"lower_bound", r.lower_bound},
         {"certified_exact", r.certified_exact},
         {"cap_reached", r.cap_reached},
         {"k_max", r.k_max},
         {"strategy", r.strategy}};
  j["witness_disk"] = r.witness_disk ? to_json(*r.witness_disk) : json(nullptr);
  j["witness_field_jet"] = r.witness_field_jet ? to_json(*r.witness_field_jet) : json(nullptr);
  j["obstruction"] = r.obstruction ? json{{"stage", r.obstruction->stage}, {"description", r.obstruction->description}}
                                   : json(nullptr);
  return j;
}

json to_json(const CommutationReport& r) {
  json defects = json::object();
  for (const auto& [w, v] : r.defects) defects[w] = to_json(v);
  return {{"order_tested", r.order_tested},
          {"max_vanishing_order", r.max_vanishing_order},
          {"criterion_order",
           {{"orderings", r.criterion_order[0]},
            {"prefix", r.criterion_order[1]},
            {"brackets", r.criterion_order[2]},
            {"derivatives", r.criterion_order[3]}}},
          {"criteria_agree", r.criteria_agree},
          {"defects", defects}};
}

json to_json(const ValidationRecord& v) {
  return {{"k", v.k},
          {"field_realized", v.field_realized},
          {"brackets_vanish", v.brackets_vanish},
          {"levi_forms_vanish", v.levi_forms_vanish},
          {"derivatives_match", v.derivatives_match},
          {"round_trip", v.round_trip},
          {"commutation", to_json(v.commutation)},
          {"field_jet", to_json(v.field_jet)}};
}

json to_json(const Classification& c) {
  json basis = json::array();
  for (const auto& b : c.matrix.basis) basis.push_back(to_json(b));
  json rows = json::array();
  for (const auto& row : c.matrix.entries) {
    json r = json::array();
    for (const auto& z : row) r.push_back(to_string(z));
    rows.push_back(r);
  }
  return {{"class", to_string(c.kind)},
          {"inertia", {{"positive", c.inertia.positive}, {"negative", c.inertia.negative}, {"zero", c.inertia.zero}}},
          {"matrix", {{"basis", basis}, {"entries", rows}}}};
}

std::string render_text(const json& tree) {
  std::string out;
  render(tree, "", out);
  return out;
}

}  // namespace levitype::cli
