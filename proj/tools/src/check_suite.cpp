#include "nmpg/harness/check_suite.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "nmpg/diagnostics.hpp"
#include "nmpg/problems.hpp"
#include "nmpg/prox.hpp"
#include "nmpg/solver.hpp"

namespace nmpg::harness {

namespace {

double prox_objective(const SeparableTerm& term, double gamma, double v, double t) {
  return term.component_value(0, t).to_double() + (t - v) * (t - v) / (2.0 * gamma);
}

std::string fmt(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

const std::vector<ProblemKind>& all_kinds() {
  static const std::vector<ProblemKind> kinds{
      ProblemKind::LassoIdentity,       ProblemKind::LassoGeneral,
      ProblemKind::QuarticScalar,       ProblemKind::QuarticRegressionL0,
      ProblemKind::SparsityProjectedQuadratic, ProblemKind::ExpFitL1};
  return kinds;
}

Vector seeded_start(const CompositeProblem& problem, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x(static_cast<Eigen::Index>(problem.dim()));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = normal(rng);
  if (problem.phi().value(x).is_infinite()) x = problem.phi().prox(1.0, x);
  return x;
}

CheckOutcome check_prox_oracle(const CheckSuiteOptions& options) {
  std::vector<std::shared_ptr<const SeparableTerm>> terms{
      std::make_shared<L1Term>(1, 0.7),
      options.l0_term ? options.l0_term : std::make_shared<L0Term>(1, 0.5),
      std::make_shared<LHalfTerm>(1, 0.7),
      std::make_shared<BoxIndicator>(Vector::Constant(1, -1.0), Vector::Constant(1, 0.5)),
  };
  // ℓ0 with λ = 0.5: |v| = sqrt(2γλ) is a tie between 0 and v.
  const std::vector<std::pair<double, double>> l0_ties{{1.0, 1.0}, {-2.0, 4.0}, {0.5, 0.25}};
  std::ostringstream detail;
  bool pass = true;
  std::uint64_t seed = 11;
  for (const auto& term : terms) {
    const auto ties = term->name() == "l0" ? l0_ties : std::vector<std::pair<double, double>>{};
    CheckOutcome one = check_separable_prox(*term, 100, ties, seed++);
    pass &= one.pass;
    detail << one.name << ": " << one.detail << "; ";
  }
  return {"prox_oracle", pass, detail.str()};
}

CheckOutcome check_sparsity_oracle(const CheckSuiteOptions&) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim_dist(1, 12);
  std::uniform_int_distribution<int> level(-2, 2);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::size_t mismatches = 0;
  const std::size_t cases = 300;
  for (std::size_t c = 0; c < cases; ++c) {
    const int n = dim_dist(rng);
    std::uniform_int_distribution<int> s_dist(1, std::min(4, n));
    const auto s = static_cast<std::size_t>(s_dist(rng));
    Vector v(n);
    const bool ties = c % 2 == 0;
    for (int i = 0; i < n; ++i) v[i] = ties ? level(rng) : normal(rng);
    SparsitySetIndicator term(static_cast<std::size_t>(n), s);
    if (term.prox(1.0, v) != brute_force_sparsity_projection(v, s)) ++mismatches;
  }
  return {"sparsity_oracle", mismatches == 0,
          std::to_string(cases - mismatches) + "/" + std::to_string(cases) + " exact matches"};
}

CheckOutcome check_gradients(const CheckSuiteOptions&) {
  double worst = 0.0;
  std::string worst_name;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (ProblemKind kind : all_kinds()) {
    ProblemSpec spec;
    spec.kind = kind;
    const CompositeProblem p = make_problem(spec);
    for (int i = 0; i < 20; ++i) {
      Vector x(static_cast<Eigen::Index>(p.dim()));
      for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = normal(rng);
      const double err = gradient_relative_error(p.f(), x);
      if (err > worst) {
        worst = err;
        worst_name = p.name();
      }
    }
  }
  return {"gradient", worst <= 1e-6, "worst relative error " + fmt(worst) + " (" + worst_name + ")"};
}

CheckOutcome check_audits(const CheckSuiteOptions&) {
  SolverParams mean;
  SolverParams mono = monotone(mean);
  SolverParams max_rule = mean;
  max_rule.reference = MaxReference{10};
  const std::vector<std::pair<std::string, SolverParams>> policies{
      {"monotone", mono}, {"mean", mean}, {"max", max_rule}};
  std::size_t runs = 0;
  std::vector<std::string> failures;
  for (ProblemKind kind : all_kinds()) {
    ProblemSpec spec;
    spec.kind = kind;
    const CompositeProblem p = make_problem(spec);
    for (const auto& [name, params] : policies) {
      for (std::uint64_t start = 1; start <= 3; ++start) {
        const RunResult r = solve(p, params, seeded_start(p, start));
        ++runs;
        const std::string tag = p.name() + "/" + name + "/start" + std::to_string(start);
        if (!r.ok()) {
          failures.push_back(tag + ": " + to_string(r.status));
          continue;
        }
        const AuditReport audit = audit_run(r, params);
        for (const auto& c : audit.checks) {
          if (!c.pass) failures.push_back(tag + ": " + c.name + " violated by " + fmt(c.worst_violation));
        }
        if (r.status == RunStatus::ConvergedResidual && r.trace.back().residual > params.epsilon) {
          failures.push_back(tag + ": converged with residual above epsilon");
        }
        if (name == "monotone") {
          for (std::size_t k = 1; k < r.trace.size(); ++k) {
            if (r.trace[k].psi > r.trace[k - 1].psi) {
              failures.push_back(tag + ": psi increased at k=" + std::to_string(k));
              break;
            }
          }
        }
      }
    }
  }
  std::string detail = std::to_string(runs) + " runs audited";
  if (!failures.empty()) detail += "; first failure: " + failures.front();
  return {"audit", failures.empty(), detail};
}

CheckOutcome check_m_table(const CheckSuiteOptions&) {
  std::ostringstream table;
  bool pass = true;
  table << "p_min:m";
  for (int i = 1; i <= 10; ++i) {
    const double p = 0.1 * i;
    const std::size_t m = compute_m(p);
    const std::size_t oracle = scan_m(p);
    pass &= m == oracle;
    table << ' ' << fmt(p) << ':' << m << (m == oracle ? "" : "(oracle " + std::to_string(oracle) + ")");
  }
  return {"m_table", pass, table.str()};
}

CheckOutcome check_rates(const CheckSuiteOptions&) {
  std::ostringstream detail;
  bool pass = true;

  ProblemSpec spec;
  spec.kind = ProblemKind::LassoGeneral;
  const CompositeProblem lasso = make_problem(spec);
  const Vector x0 = Vector::Zero(static_cast<Eigen::Index>(lasso.dim()));
  const double psi_star = cached_reference(spec.resolved().label(), lasso, x0).psi_star;
  for (double p_min : {1.0, 0.1}) {
    SolverParams params;
    params.p_min = p_min;
    const RunResult r = solve(lasso, params, x0);
    const auto refs = reference_series(r.trace);
    const std::size_t n = usable_prefix(refs, psi_star);
    const RateReport q = estimate_q_factor(std::span<const double>(refs.data(), n), psi_star, 0.5);
    pass &= q.pass;
    detail << "lasso p_min=" << p_min << " Q=" << q.fitted << "; ";
  }

  const CompositeProblem quartic = make_quartic_scalar();
  SolverParams params;
  params.epsilon = 0.0;
  params.max_outer_iters = 100000;
  SolveOptions options;
  options.record_iterates = true;
  const RunResult r = solve(quartic, params, Vector::Constant(1, 1.0), options);
  const auto refs = reference_series(r.trace);
  const RateReport values = fit_loglog_slope(refs, 0.0, 0.5, 0, -2.0, 0.15);
  std::vector<double> dist = iterate_distance_series(r.iterates, Vector::Zero(1));
  dist.resize(r.trace.size());
  const RateReport iterates = fit_loglog_slope(dist, 0.0, 0.5, 0, -0.5, 0.15);
  pass &= values.pass && iterates.pass;
  detail << "quartic slopes " << values.fitted << " / " << iterates.fitted;
  return {"rates", pass, detail.str()};
}

CheckOutcome check_lasso_optimality(const CheckSuiteOptions&) {
  ProblemSpec spec;
  spec.kind = ProblemKind::LassoIdentity;
  const CompositeProblem p = make_problem(spec);
  const Vector& x_star = *p.optimum()->x_star;
  const auto* l1 = dynamic_cast<const L1Term*>(&p.phi());
  const double lambda = l1->lambda();
  SolverParams params;
  params.gamma_max = 0.3;
  double worst_dist = 0.0;
  double worst_kkt = 0.0;
  for (std::uint64_t start = 1; start <= 10; ++start) {
    const RunResult r = solve(p, params, seeded_start(p, start));
    if (r.status != RunStatus::ConvergedResidual) {
      return {"lasso_optimality", false, "start " + std::to_string(start) + ": " + to_string(r.status)};
    }
    worst_dist = std::max(worst_dist, (r.x_final - x_star).norm());
    const Vector g = p.f().gradient(r.x_final);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double xi = r.x_final[i];
      const double kkt = xi != 0.0 ? std::abs(g[i] + lambda * (xi > 0 ? 1.0 : -1.0))
                                   : std::max(0.0, std::abs(g[i]) - lambda);
      worst_kkt = std::max(worst_kkt, kkt);
    }
  }
  const bool pass = worst_dist <= 1e-6 && worst_kkt <= params.epsilon + 1e-12;
  return {"lasso_optimality", pass,
          "max |x - x*| " + fmt(worst_dist) + ", max optimality violation " + fmt(worst_kkt)};
}

CheckOutcome check_sparsity_fixed_point(const CheckSuiteOptions&) {
  const CompositeProblem p =
      make_sparsity_projected_quadratic(Matrix::Identity(2, 2), Vector{{3.0, -1.0}}, 1);
  SolveOptions options;
  options.record_iterates = true;
  const RunResult r = solve(p, SolverParams{}, Vector::Zero(2), options);
  const double err = (r.x_final - Vector{{3.0, 0.0}}).norm();
  bool sparse = true;
  for (std::size_t k = 1; k < r.iterates.size(); ++k) {
    sparse &= (r.iterates[k].array() != 0.0).count() <= 1;
  }
  return {"sparsity_fixed_point", r.ok() && err <= 1e-10 && sparse,
          "distance to [3,0] " + fmt(err) + (sparse ? "" : ", non-sparse iterate")};
}

CheckOutcome check_max_rule_reduction(const CheckSuiteOptions&) {
  ProblemSpec spec;
  spec.kind = ProblemKind::LassoGeneral;
  const CompositeProblem p = make_problem(spec);
  const Vector x0 = seeded_start(p, 1);
  const SolverParams mono = monotone(SolverParams{});
  SolverParams w1 = mono;
  w1.reference = MaxReference{1};
  const RunResult a = solve(p, mono, x0);
  const RunResult b = solve(p, w1, x0);
  bool same = a.trace.size() == b.trace.size();
  for (std::size_t k = 0; same && k < a.trace.size(); ++k) {
    same = a.trace[k].psi == b.trace[k].psi && a.trace[k].reference == b.trace[k].reference &&
           a.trace[k].gamma == b.trace[k].gamma && a.trace[k].step_norm == b.trace[k].step_norm;
  }
  return {"max_rule_reduction", same,
          same ? std::to_string(a.trace.size()) + " identical iterations" : "traces differ"};
}

}  // namespace

std::size_t scan_m(double p_min, std::size_t limit) {
  const double r = std::sqrt(1.0 - p_min);
  std::size_t best = 0;
  for (std::size_t l = limit; l >= 1; --l) {
    if ((1.0 - r) * std::sqrt(static_cast<double>(l)) >= 1.0 + r) best = l;
  }
  return best;
}

CheckOutcome check_separable_prox(const SeparableTerm& term, std::size_t cases,
                                  const std::vector<std::pair<double, double>>& tie_probes,
                                  std::uint64_t seed) {
  if (term.dim() != 1) throw std::invalid_argument("check_separable_prox: expects a 1-D term");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> v_dist(-3.0, 3.0);
  std::uniform_real_distribution<double> g_dist(0.05, 2.0);

  std::vector<double> box_points;
  if (const auto* box = dynamic_cast<const BoxIndicator*>(&term)) {
    box_points = {box->lo()[0], box->hi()[0]};
  }

  double worst_gap = 0.0;
  std::size_t domain_failures = 0;
  std::size_t nondeterministic = 0;
  auto probe = [&](double v, double gamma) {
    const Vector z = term.prox(gamma, Vector::Constant(1, v));
    if (term.prox(gamma, Vector::Constant(1, v)) != z) ++nondeterministic;
    if (term.value(z).is_infinite()) ++domain_failures;
    const double a = std::abs(v);
    const double t = brute_force_prox_1d([&](double s) { return term.component_value(0, s); },
                                         gamma, v, -2.0 * a - 1.0, 2.0 * a + 1.0, 1e-4, box_points);
    worst_gap = std::max(worst_gap, prox_objective(term, gamma, v, z[0]) -
                                        prox_objective(term, gamma, v, t));
    return z[0];
  };

  for (std::size_t c = 0; c < cases; ++c) {
    const double v = v_dist(rng);
    const double gamma = g_dist(rng);
    probe(v, gamma);
  }
  std::size_t tie_failures = 0;
  for (const auto& [v, gamma] : tie_probes) {
    if (probe(v, gamma) != 0.0) ++tie_failures;
  }
  const bool pass =
      worst_gap <= 1e-8 && domain_failures == 0 && nondeterministic == 0 && tie_failures == 0;
  std::string detail = "gap " + fmt(worst_gap);
  if (tie_failures) detail += ", " + std::to_string(tie_failures) + " tie-break violations";
  if (domain_failures) detail += ", " + std::to_string(domain_failures) + " outputs outside domain";
  if (nondeterministic) detail += ", nondeterministic output";
  return {term.name(), pass, detail};
}

std::vector<NamedCheck> default_checks() {
  return {
      {"prox_oracle", "closed-form prox vs. 1-D grid oracle", check_prox_oracle},
      {"sparsity_oracle", "sparsity projection vs. support enumeration", check_sparsity_oracle},
      {"gradient", "analytic gradients vs. central differences", check_gradients},
      {"audit", "descent invariants on 54 solver runs", check_audits},
      {"m_table", "window constant m vs. exhaustive scan", check_m_table},
      {"rates", "Q-linear and power-law rate fits", check_rates},
      {"lasso_optimality", "limits of the lasso satisfy optimality", check_lasso_optimality},
      {"sparsity_fixed_point", "projected gradient on {||x||_0 <= 1}", check_sparsity_fixed_point},
      {"max_rule_reduction", "max rule with W=1 equals the monotone method", check_max_rule_reduction},
  };
}

}  // namespace nmpg::harness
