// qpel: check, eval and wp from the command line.

#include "qpel/driver.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

qpel::DerivationConfig packs(const std::vector<std::string>& names) {
  qpel::DerivationConfig cfg;
  cfg.qubit = false;
  cfg.beta_iso = false;
  for (const auto& n : names) {
    if (n == "qubit")
      cfg.qubit = true;
    else if (n == "beta-iso")
      cfg.beta_iso = true;
    else if (n != "core")
      throw CLI::ValidationError("--rules", "unknown rule pack '" + n + "'");
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qpel: a linear type theory for quantum programs and its effect logic"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "parse, typecheck and check the lemmas of .qpel files");
  std::string verify;
  std::vector<std::string> rules{"core", "qubit"};
  int depth = 6;
  std::string format = "text";
  bool timing = false;
  std::vector<std::string> files;
  check->add_option("--verify", verify, "check lemmas in a backend")
      ->check(CLI::IsMember({"set", "stochastic", "quantum", "all"}));
  check->add_option("--rules", rules, "enabled rule packs (core is always on)")->delimiter(',');
  check->add_option("--auto-depth", depth, "depth bound of the auto search")->check(CLI::NonNegativeNumber);
  check->add_option("--format", format, "report format")->check(CLI::IsMember({"text", "json"}));
  check->add_flag("--timing", timing, "include timings in the report");
  check->add_option("files", files, "source files")->required()->check(CLI::ExistingFile);

  auto* eval = app.add_subcommand("eval", "evaluate a closed term");
  std::string backend, eval_file, eval_decl;
  eval->add_option("--backend", backend, "set, stochastic or quantum")
      ->required()
      ->check(CLI::IsMember({"set", "stochastic", "quantum"}));
  eval->add_option("file", eval_file)->required();
  eval->add_option("decl", eval_decl)->required();

  auto* wp = app.add_subcommand("wp", "weakest precondition of a term for an effect (quantum)");
  bool cross = false;
  std::string wp_file, wp_term, wp_effect;
  wp->add_flag("--cross-check", cross, "compare with the substituted effect");
  wp->add_option("file", wp_file)->required();
  wp->add_option("term", wp_term)->required();
  wp->add_option("effect", wp_effect)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : qpel::kUsage;
  }

  if (*check) {
    qpel::CheckFlags flags;
    try {
      flags.rules = packs(rules);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return qpel::kUsage;
    }
    flags.rules.auto_depth = depth;
    flags.timing = timing;
    if (verify == "all")
      flags.verify = {"set", "stochastic", "quantum"};
    else if (!verify.empty())
      flags.verify = {verify};
    auto run = qpel::check_files(files, flags);
    if (format == "json")
      std::cout << qpel::to_json(run, timing).dump(2) << "\n";
    else
      std::cout << qpel::format_text(run, timing);
    return run.exit_code;
  }
  qpel::CommandResult r = *eval ? qpel::cmd_eval(eval_file, eval_decl, backend)
                                 : qpel::cmd_wp(wp_file, wp_term, wp_effect, cross);
  std::cout << r.out;
  std::cerr << r.err;
  return r.code;
}
