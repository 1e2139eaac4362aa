#include <iostream>

#include "CLI11.hpp"
#include "levitype/cli.hpp"
#include "levitype/errors.hpp"

int main(int argc, char** argv) {
  using namespace levitype;
  CLI::App app{"Levi forms and regular type of real hypersurfaces in almost complex manifolds"};
  app.require_subcommand(1);

  cli::ProblemSpec spec;
  std::vector<std::string> points;
  std::string format = "text";

  auto add_common = [&](CLI::App* sub, bool needs_phi) {
    auto* phi = sub->add_option("--phi", spec.phi_expression, "defining function, e.g. \"2*x2 + abs2(z1)^2\"");
    if (needs_phi) phi->required();
    sub->add_option("--n", spec.n, "complex dimension")->capture_default_str();
    sub->add_option("--J", spec.j_spec, "standard | perturbed[:seed] | matrix file")->capture_default_str();
    sub->add_option("--point", points, "comma separated rational coordinates (repeatable)");
    sub->add_option("--cap", spec.cap, "degree cap K")->capture_default_str();
    sub->add_option("--kmax", spec.k_max, "largest contact order searched")->capture_default_str();
    sub->add_option("--strategy", spec.strategy, "exact | grid:<step> | dirs:<file>")->capture_default_str();
    sub->add_option("--format", format, "text | tree")->check(CLI::IsMember({"text", "tree"}))->capture_default_str();
  };
  add_common(app.add_subcommand("levi", "Levi form at a point by both routes"), true);
  add_common(app.add_subcommand("classify", "pointwise Levi classification"), true);
  add_common(app.add_subcommand("type", "regular type lower bound with witness"), true);
  add_common(app.add_subcommand("scan", "type at several points"), true);
  add_common(app.add_subcommand("validate", "type search followed by the equivalence checks"), true);
  add_common(app.add_subcommand("catalog", "built-in examples"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cli::kParse;
  }

  spec.command = app.get_subcommands().front()->get_name();
  try {
    for (const auto& p : points) spec.points.push_back(cli::parse_point(p));
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kParse;
  }

  cli::CommandResult res = cli::run_command(spec);
  if (format == "tree")
    std::cout << res.tree.dump(2) << "\n";
  else
    std::cout << res.text;
  return res.exit_code;
}
