#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nmpg/diagnostics.hpp"
#include "nmpg/harness/check_suite.hpp"
#include "nmpg/harness/config.hpp"

namespace nmpg::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitSolverError = 2,
  kExitCheckFailure = 3,
};

/// Environment variable holding the number of worker threads for sweeps.
inline constexpr const char* kJobsEnv = "NMPG_JOBS";

/// Worker count for `runs` independent runs: $NMPG_JOBS if set to a positive
/// integer, otherwise min(runs, hardware threads).
std::size_t sweep_parallelism(std::size_t runs);

struct NamedRate {
  std::string name;
  std::optional<RateReport> report;
  std::string error;
};

/// One solver run plus everything the summary reports about it.
struct RunArtifacts {
  std::string variant;
  std::size_t repeat = 0;
  SolverParams params;
  RunResult result;
  std::string trace_file;  // relative to the output directory
  AuditReport audit;
  std::vector<NamedRate> rates;
};

/// Rate fits for a finished run, driven by the problem's KL hypothesis.
/// `psi_star`/`x_star` come from the problem or a reference solve.
std::vector<NamedRate> rate_reports(const RunResult& run, const CompositeProblem& problem,
                                    double psi_star, const std::optional<Vector>& x_star);

nlohmann::json to_json(const AuditReport& report);
nlohmann::json to_json(const RateReport& report);

/// `run --config <path> [--out <dir>]`.
int cmd_run(const std::filesystem::path& config_path,
            const std::optional<std::filesystem::path>& out_override, std::ostream& out,
            std::ostream& err);

/// `compare --config <path> [--out <dir>]`: monotone, mean-rule and max-rule
/// runs of the same problem side by side.
int cmd_compare(const std::filesystem::path& config_path,
                const std::optional<std::filesystem::path>& out_override, std::ostream& out,
                std::ostream& err);

/// `check [--filter <name>]`: the property suite.
int cmd_check(const std::optional<std::string>& filter, std::ostream& out, std::ostream& err,
              const CheckSuiteOptions& options = {});

}  // namespace nmpg::harness
