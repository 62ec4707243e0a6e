#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nmpg/harness/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nonmonotone proximal gradient solver and benchmark harness"};
  app.require_subcommand(1);

  std::string run_config;
  std::string run_out;
  auto* run = app.add_subcommand("run", "Run the configured experiment and write traces");
  run->add_option("--config", run_config, "Experiment config (JSON)")->required();
  run->add_option("--out", run_out, "Output directory, overrides out_dir");

  std::string cmp_config;
  std::string cmp_out;
  auto* compare = app.add_subcommand("compare", "Monotone vs. mean-rule vs. max-rule comparison");
  compare->add_option("--config", cmp_config, "Experiment config (JSON)")->required();
  compare->add_option("--out", cmp_out, "Output directory, overrides out_dir");

  std::string filter;
  auto* check = app.add_subcommand("check", "Run the property suite");
  check->add_option("--filter", filter, "Only run checks whose name contains this string");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nmpg::harness::kExitConfigError;
  }

  auto optional_path = [](const std::string& s) -> std::optional<std::filesystem::path> {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
  };

  try {
    if (*run) return nmpg::harness::cmd_run(run_config, optional_path(run_out), std::cout, std::cerr);
    if (*compare) {
      return nmpg::harness::cmd_compare(cmp_config, optional_path(cmp_out), std::cout, std::cerr);
    }
    return nmpg::harness::cmd_check(filter.empty() ? std::nullopt : std::optional(filter),
                                    std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nmpg::harness::kExitSolverError;
  }
}
