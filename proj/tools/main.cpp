#include <iostream>

#include "CLI11.hpp"
#include "potmap/cli/runner.hpp"

int main(int argc, char** argv) {
  using namespace potmap::cli;
  CLI::App app{"potmap: potential maps between semi-Riemann manifolds"};
  std::string command;
  std::string scenario;
  std::string out_dir = "potmap_out";
  std::vector<std::string> tols;
  std::uint64_t seed = 1;
  app.add_option("command", command, "check | prolong | solve | hamilton | lie")
      ->required()
      ->check(CLI::IsMember({"check", "prolong", "solve", "hamilton", "lie"}));
  app.add_option("scenario", scenario, "scenario JSON file")->required();
  app.add_option("--out", out_dir, "output directory for reports and sheets");
  app.add_option("--tol", tols, "tolerance override KEY=VAL (repeatable)");
  app.add_option("--seed", seed, "seed for sampled checks and initial noise");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  RunOptions opts;
  opts.out_dir = out_dir;
  opts.seed = seed;
  try {
    for (const std::string& t : tols) parse_tolerance_override(t, opts.tol_overrides);
  } catch (const potmap::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  const RunOutcome out = run_scenario(scenario, command, opts);
  for (const auto& [name, st] : out.report.residuals)
    std::cout << (st.pass ? "ok   " : "FAIL ") << name << " max=" << st.max << " tol=" << st.tolerance << "\n";
  if (out.report.error) std::cerr << out.report.error->second << "\n";
  std::cout << "exit " << out.exit_code << "\n";
  return out.exit_code;
}
