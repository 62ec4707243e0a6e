#include "nmpg/harness/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <thread>

#include "nmpg/harness/trace_io.hpp"
#include "nmpg/problems.hpp"
#include "nmpg/solver.hpp"

namespace nmpg::harness {

using nlohmann::json;

std::size_t sweep_parallelism(std::size_t runs) {
  if (const char* env = std::getenv(kJobsEnv)) {
    char* end = nullptr;
    const unsigned long jobs = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && jobs > 0) return static_cast<std::size_t>(jobs);
  }
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(runs, hw));
}

namespace {

/// Runs job(i) for i in [0, count) on `workers` threads.
template <class Job>
void parallel_for(std::size_t count, std::size_t workers, Job&& job) {
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) job(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Target {
  double psi_star;
  std::optional<Vector> x_star;
};

/// ψ* for rate fits: the attached optimum, or a cached reference solve.
std::optional<Target> rate_target(const ProblemSpec& spec, const CompositeProblem& problem) {
  if (!problem.kl_hypothesis()) return std::nullopt;
  if (problem.optimum()) return Target{problem.optimum()->psi_star, problem.optimum()->x_star};
  const auto& ref = cached_reference(spec.resolved().label(), problem,
                                     Vector::Zero(static_cast<Eigen::Index>(problem.dim())));
  return Target{ref.psi_star, ref.x_star};
}

std::size_t total_backtracks(const Trace& trace) {
  std::size_t n = 0;
  for (const auto& r : trace) n += r.backtracks;
  return n;
}

/// First iteration whose residual is within epsilon, or nullopt.
std::optional<std::size_t> iterations_to_epsilon(const Trace& trace, double epsilon) {
  for (const auto& r : trace) {
    if (r.residual <= epsilon) return r.k + 1;
  }
  return std::nullopt;
}

json run_json(const RunArtifacts& a) {
  const auto& r = a.result;
  json rates = json::array();
  for (const auto& nr : a.rates) {
    json entry{{"name", nr.name}};
    if (nr.report) {
      entry["report"] = to_json(*nr.report);
    } else {
      entry["error"] = nr.error;
    }
    rates.push_back(entry);
  }
  json j{{"variant", a.variant},
         {"repeat", a.repeat},
         {"trace", a.trace_file},
         {"status", to_string(r.status)},
         {"message", r.message},
         {"iterations", r.trace.size()},
         {"final_residual", r.trace.empty() ? 0.0 : r.trace.back().residual},
         {"total_backtracks", total_backtracks(r.trace)},
         {"wall_time", r.wall_time},
         {"audit", r.trace.empty() ? json(nullptr) : to_json(a.audit)},
         {"rates", rates},
         {"params", to_json(a.params)}};
  if (auto it = iterations_to_epsilon(r.trace, a.params.epsilon)) {
    j["iterations_to_epsilon"] = *it;
  } else {
    j["iterations_to_epsilon"] = nullptr;
  }
  return j;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

struct Variant {
  std::string name;
  SolverParams params;
};

struct Job {
  const Variant* variant;
  std::size_t repeat;
};

/// Executes every (variant, repeat) pair, writing one trace per run.
std::vector<RunArtifacts> execute(const ExperimentConfig& cfg, const CompositeProblem& problem,
                                  const std::vector<Variant>& variants, std::size_t repeats,
                                  const std::filesystem::path& out_dir) {
  const std::string label = cfg.problem.resolved().label();
  const auto target = rate_target(cfg.problem, problem);

  std::vector<Job> jobs;
  for (const auto& v : variants) {
    for (std::size_t r = 0; r < repeats; ++r) jobs.push_back({&v, r});
  }
  std::vector<RunArtifacts> results(jobs.size());
  parallel_for(jobs.size(), sweep_parallelism(jobs.size()), [&](std::size_t i) {
    const Job& job = jobs[i];
    RunArtifacts& a = results[i];
    a.variant = job.variant->name;
    a.repeat = job.repeat;
    a.params = job.variant->params;
    const Vector x0 = make_x0(cfg, problem, job.repeat);
    SolveOptions options;
    options.record_iterates = cfg.record_iterates;
    a.result = solve(problem, a.params, x0, options);
    a.trace_file = label + "_" + a.variant + "_r" + std::to_string(job.repeat) + ".csv";
    write_trace_csv(out_dir / a.trace_file, a.result.trace);
    if (!a.result.trace.empty()) a.audit = audit_run(a.result, a.params);
    if (target && a.result.ok()) {
      a.rates = rate_reports(a.result, problem, target->psi_star, target->x_star);
    }
  });
  return results;
}

struct Prepared {
  ExperimentConfig config;
  std::filesystem::path out_dir;
  std::optional<CompositeProblem> problem;
};

/// Loads the config and builds the problem; returns an exit code on failure.
std::variant<Prepared, int> prepare(const std::filesystem::path& config_path,
                                    const std::optional<std::filesystem::path>& out_override,
                                    std::ostream& err) {
  Prepared p;
  try {
    p.config = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  p.out_dir = out_override ? *out_override : p.config.out_dir;
  try {
    p.problem.emplace(make_problem(p.config.problem));
    std::filesystem::create_directories(p.out_dir);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return p;
}

}  // namespace

json to_json(const AuditReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"applicable", c.applicable},
                      {"worst_violation", c.worst_violation},
                      {"worst_index", c.worst_index},
                      {"slack", c.slack}});
  }
  return json{{"pass", report.pass()}, {"checks", checks}};
}

json to_json(const RateReport& report) {
  json j{{"mode", to_string(report.mode)},
         {"fitted", report.fitted},
         {"tolerance", report.tolerance},
         {"window", {report.first, report.last}},
         {"pass", report.pass}};
  j["predicted"] = report.predicted ? json(*report.predicted) : json(nullptr);
  if (report.mode == RateMode::QLinear) j["max_ratio"] = report.max_ratio;
  return j;
}

std::vector<NamedRate> rate_reports(const RunResult& run, const CompositeProblem& problem,
                                    double psi_star, const std::optional<Vector>& x_star) {
  std::vector<NamedRate> out;
  if (!problem.kl_hypothesis()) return out;
  const double kappa = problem.kl_hypothesis()->kappa;
  const std::vector<double> refs = reference_series(run.trace);

  auto attempt = [&](const std::string& name, auto&& fit) {
    NamedRate nr{name, std::nullopt, {}};
    try {
      nr.report = fit();
    } catch (const std::exception& e) {
      nr.error = e.what();
    }
    out.push_back(std::move(nr));
  };

  const std::size_t usable = usable_prefix(refs, psi_star);
  const std::span<const double> values(refs.data(), usable);
  if (kappa >= 0.5) {
    attempt("reference_q_factor", [&] { return estimate_q_factor(values, psi_star, 0.5); });
  } else {
    attempt("reference_loglog_slope", [&] {
      return fit_loglog_slope(values, psi_star, 0.5, 0, predicted_value_slope(kappa), 0.15);
    });
    if (x_star && !run.iterates.empty()) {
      attempt("iterate_loglog_slope", [&] {
        std::vector<double> d = iterate_distance_series(run.iterates, *x_star);
        d.resize(std::min(d.size(), run.trace.size()));
        const std::size_t n = usable_prefix(d, 0.0);
        return fit_loglog_slope(std::span<const double>(d.data(), n), 0.0, 0.5, 0,
                                predicted_iterate_slope(kappa), 0.15);
      });
    }
  }
  return out;
}

int cmd_run(const std::filesystem::path& config_path,
            const std::optional<std::filesystem::path>& out_override, std::ostream& out,
            std::ostream& err) {
  auto prepared = prepare(config_path, out_override, err);
  if (auto* code = std::get_if<int>(&prepared)) return *code;
  auto& p = std::get<Prepared>(prepared);

  std::vector<RunArtifacts> runs;
  try {
    runs = execute(p.config, *p.problem, {{"run", p.config.params}}, p.config.repeats, p.out_dir);
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  const std::string label = p.config.problem.resolved().label();
  json summary{{"experiment", label},
               {"command", "run"},
               {"problem", to_json(p.config.problem.resolved())},
               {"config", to_json(p.config)}};
  json list = json::array();
  bool failed = false;
  for (const auto& a : runs) {
    list.push_back(run_json(a));
    failed |= !a.result.ok();
    out << a.trace_file << ": " << to_string(a.result.status) << ", " << a.result.trace.size()
        << " iterations, residual "
        << (a.result.trace.empty() ? 0.0 : a.result.trace.back().residual) << '\n';
    if (!a.result.ok()) err << a.trace_file << ": " << a.result.message << '\n';
  }
  summary["runs"] = list;
  const std::string summary_file = label + "_summary.json";
  write_json(p.out_dir / summary_file, summary);
  out << "summary: " << (p.out_dir / summary_file).string() << '\n';
  return failed ? kExitSolverError : kExitOk;
}

int cmd_compare(const std::filesystem::path& config_path,
                const std::optional<std::filesystem::path>& out_override, std::ostream& out,
                std::ostream& err) {
  auto prepared = prepare(config_path, out_override, err);
  if (auto* code = std::get_if<int>(&prepared)) return *code;
  auto& p = std::get<Prepared>(prepared);

  SolverParams mean = p.config.params;
  std::size_t window = 10;
  if (const auto* m = std::get_if<MaxReference>(&mean.reference)) window = m->window;
  mean.reference = MeanReference{};
  SolverParams max_rule = mean;
  max_rule.reference = MaxReference{window};
  const std::vector<Variant> variants{
      {"monotone", monotone(mean)}, {"mean", mean}, {"max", max_rule}};

  std::vector<RunArtifacts> runs;
  try {
    runs = execute(p.config, *p.problem, variants, 1, p.out_dir);
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  const std::string label = p.config.problem.resolved().label();
  json rows = json::array();
  bool failed = false;
  out << std::left << std::setw(10) << "variant" << std::setw(22) << "status" << std::setw(12)
      << "iters" << std::setw(14) << "iters_to_eps" << std::setw(12) << "backtracks"
      << "wall_s\n";
  for (const auto& a : runs) {
    rows.push_back(run_json(a));
    failed |= !a.result.ok();
    const auto to_eps = iterations_to_epsilon(a.result.trace, a.params.epsilon);
    out << std::left << std::setw(10) << a.variant << std::setw(22) << to_string(a.result.status)
        << std::setw(12) << a.result.trace.size() << std::setw(14)
        << (to_eps ? std::to_string(*to_eps) : std::string("-")) << std::setw(12)
        << total_backtracks(a.result.trace) << a.result.wall_time << '\n';
  }
  json summary{{"experiment", label},
               {"command", "compare"},
               {"problem", to_json(p.config.problem.resolved())},
               {"config", to_json(p.config)},
               {"runs", rows}};
  const std::string summary_file = label + "_compare.json";
  write_json(p.out_dir / summary_file, summary);
  out << "summary: " << (p.out_dir / summary_file).string() << '\n';
  return failed ? kExitSolverError : kExitOk;
}

int cmd_check(const std::optional<std::string>& filter, std::ostream& out, std::ostream& err,
              const CheckSuiteOptions& options) {
  std::vector<NamedCheck> checks = default_checks();
  if (filter) {
    std::erase_if(checks, [&](const NamedCheck& c) {
      return c.name.find(*filter) == std::string::npos;
    });
    if (checks.empty()) {
      err << "no check matches filter '" << *filter << "'\n";
      return kExitConfigError;
    }
  }
  bool all_pass = true;
  for (const auto& check : checks) {
    CheckOutcome outcome;
    try {
      outcome = check.run(options);
    } catch (const std::exception& e) {
      outcome = {check.name, false, std::string("exception: ") + e.what()};
    }
    all_pass &= outcome.pass;
    out << std::left << std::setw(24) << check.name << (outcome.pass ? "PASS  " : "FAIL  ")
        << outcome.detail << '\n';
  }
  out << (all_pass ? "all checks passed" : "some checks FAILED") << '\n';
  return all_pass ? kExitOk : kExitCheckFailure;
}

}  // namespace nmpg::harness
