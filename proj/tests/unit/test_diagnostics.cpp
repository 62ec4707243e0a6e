#include <gtest/gtest.h>

#include <cmath>

#include "nmpg/diagnostics.hpp"
#include "nmpg/problems.hpp"
#include "nmpg/prox.hpp"
#include "nmpg/solver.hpp"

using namespace nmpg;

namespace {

RunResult lasso_run() {
  return solve(make_problem({ProblemKind::LassoIdentity}), SolverParams{}, Vector::Zero(10));
}

RunResult general_run(const SolverParams& params) {
  return solve(make_problem({ProblemKind::LassoGeneral}), params, Vector::Zero(50));
}

// Recomputes xi from the reference column, as the solver does.
void refresh_xi(Trace& trace) {
  for (std::size_t k = 1; k < trace.size(); ++k) {
    trace[k].xi = std::sqrt(std::max(0.0, trace[k - 1].reference - trace[k].reference));
  }
}

bool check_fails(const AuditReport& report, const std::string& name) {
  const AuditCheck* c = report.find(name);
  return c != nullptr && !c->pass && c->worst_violation > 0.0;
}

}  // namespace

TEST(Audit, ValidRunsPass) {
  const RunResult r = lasso_run();
  EXPECT_TRUE(audit_trace(r.trace, SolverParams{}).pass());
  const RunResult g = general_run(SolverParams{});
  EXPECT_GT(g.trace.size(), 5u);
  EXPECT_TRUE(audit_trace(g.trace, SolverParams{}).pass());
}

TEST(Audit, DetectsReferenceIncrease) {
  Trace t = general_run(SolverParams{}).trace;
  t[5].reference += 1.0;
  EXPECT_TRUE(check_fails(audit_trace(t, SolverParams{}), "reference_nonincreasing"));
}

TEST(Audit, DetectsReferenceBelowPsi) {
  Trace t = general_run(SolverParams{}).trace;
  t[3].psi = t[3].reference + 1e-3;
  const AuditReport report = audit_trace(t, SolverParams{});
  EXPECT_TRUE(check_fails(report, "reference_dominates_psi"));
  EXPECT_EQ(report.find("reference_dominates_psi")->worst_index, 3u);
}

TEST(Audit, DetectsInsufficientDecrease) {
  Trace t = general_run(SolverParams{}).trace;
  t[4].step_norm = 10.0 * std::sqrt(t[4].reference / (0.1 * 0.45));
  const AuditReport report = audit_trace(t, SolverParams{});
  EXPECT_TRUE(check_fails(report, "sufficient_decrease"));
  EXPECT_TRUE(check_fails(report, "xi_bounds_step"));
  EXPECT_TRUE(report.find("reference_nonincreasing")->pass);
}

TEST(Audit, DetectsXiInconsistency) {
  Trace t = general_run(SolverParams{}).trace;
  t[2].xi += 0.5;
  EXPECT_TRUE(check_fails(audit_trace(t, SolverParams{}), "xi_consistency"));
  refresh_xi(t);
  EXPECT_TRUE(audit_trace(t, SolverParams{}).pass());
}

TEST(Audit, SingleRecordTrace) {
  IterationRecord rec;
  rec.psi = 1.0;
  rec.reference = 1.0;
  EXPECT_TRUE(audit_trace({rec}, SolverParams{}).pass());
  rec.reference = 0.5;
  EXPECT_TRUE(check_fails(audit_trace({rec}, SolverParams{}), "reference_dominates_psi"));
}

TEST(Audit, MaxRuleSkipsMeanRuleDecrease) {
  SolverParams params;
  params.reference = MaxReference{5};
  const AuditReport report = audit_trace(general_run(params).trace, params);
  EXPECT_FALSE(report.find("sufficient_decrease")->applicable);
  EXPECT_FALSE(report.find("xi_bounds_step")->applicable);
  EXPECT_TRUE(report.pass());
}

TEST(Audit, StepDecayOnIterationCap) {
  SolverParams params;
  params.epsilon = 0.0;
  params.max_outer_iters = 5000;
  const RunResult r = solve(make_quartic_scalar(), params, Vector{{1.0}});
  const AuditReport report = audit_run(r, params);
  ASSERT_TRUE(report.find("step_decay")->applicable);
  EXPECT_TRUE(report.pass());

  Trace t = r.trace;
  for (std::size_t k = t.size() - 500; k < t.size(); ++k) t[k].step_norm = 10.0;
  AuditOptions options;
  options.check_step_decay = true;
  EXPECT_TRUE(check_fails(audit_trace(t, params, options), "step_decay"));
}

TEST(QFactor, ExactGeometric) {
  std::vector<double> v;
  for (int k = 0; k < 60; ++k) v.push_back(std::pow(0.5, k));
  const RateReport q = estimate_q_factor(v, 0.0, 0.5);
  EXPECT_NEAR(q.fitted, 0.5, 1e-12);
  EXPECT_TRUE(q.pass);
  EXPECT_EQ(q.mode, RateMode::QLinear);
}

TEST(QFactor, ShiftedGeometric) {
  std::vector<double> v;
  for (int k = 0; k < 40; ++k) v.push_back(3.0 + std::pow(0.8, k));
  EXPECT_NEAR(estimate_q_factor(v, 3.0, 0.5).fitted, 0.8, 1e-9);
}

TEST(QFactor, SublinearRejected) {
  std::vector<double> v;
  for (int k = 1; k <= 10000; ++k) v.push_back(1.0 / (double(k) * k));
  const RateReport q = estimate_q_factor(v, 0.0, 0.5);
  EXPECT_GT(q.fitted, 0.999);
  EXPECT_FALSE(q.pass);
}

TEST(QFactor, IncreasingRatioRejected) {
  std::vector<double> v;
  for (int k = 0; k < 60; ++k) v.push_back(std::pow(0.5, k));
  v[50] = v[49] * 1.01;
  EXPECT_FALSE(estimate_q_factor(v, 0.0, 0.5).pass);
}

TEST(QFactor, NonpositiveTail) {
  std::vector<double> v{1.0, 0.5, 0.25, 0.0, 0.0};
  EXPECT_THROW(estimate_q_factor(v, 0.0, 0.5), NonpositiveTail);
}

TEST(RateHelpers, UsablePrefixAndWindow) {
  std::vector<double> v{2.0, 1.5, 1.0 + 1e-9, 1.0 + 1e-17, 1.0};
  EXPECT_EQ(usable_prefix(v, 1.0), 3u);
  using Window = std::pair<std::size_t, std::size_t>;
  EXPECT_EQ(tail_window(1000, 0.5), Window(500, 1000));
  EXPECT_EQ(tail_window(60, 0.5), Window(10, 60));
  EXPECT_EQ(tail_window(20, 0.5), Window(0, 20));
  EXPECT_DOUBLE_EQ(predicted_value_slope(0.25), -2.0);
  EXPECT_DOUBLE_EQ(predicted_iterate_slope(0.25), -0.5);
}

TEST(LogLogSlope, ExactPowerLaw) {
  std::vector<double> v{1.0};
  for (int k = 1; k < 2000; ++k) v.push_back(1.0 / (double(k) * k));
  const RateReport r = fit_loglog_slope(v, 0.0, 0.5, 0, -2.0);
  EXPECT_NEAR(r.fitted, -2.0, 1e-6);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.mode, RateMode::SublinearPower);
}

TEST(LogLogSlope, PerturbedPowerLaw) {
  std::vector<double> v{1.0};
  for (int k = 1; k < 2000; ++k) v.push_back(3.0 * (1.0 + 0.01 * std::sin(k)) / (double(k) * k));
  EXPECT_NEAR(fit_loglog_slope(v, 0.0, 0.5).fitted, -2.0, 0.05);
}

TEST(LogLogSlope, ToleranceDecidesPass) {
  std::vector<double> v{1.0};
  for (int k = 1; k < 500; ++k) v.push_back(std::pow(double(k), -1.5));
  EXPECT_FALSE(fit_loglog_slope(v, 0.0, 0.5, 0, -2.0, 0.15).pass);
  EXPECT_TRUE(fit_loglog_slope(v, 0.0, 0.5, 0, -1.5, 0.15).pass);
}

TEST(IterateDistance, Examples) {
  const Vector x_star{{1.0, 2.0}};
  std::vector<Vector> same(4, x_star);
  for (double d : iterate_distance_series(same, x_star)) EXPECT_EQ(d, 0.0);
  std::vector<Vector> its{Vector{{4.0, 6.0}}};
  EXPECT_EQ(iterate_distance_series(its, x_star)[0], 5.0);
}

TEST(IterateDistance, LassoIdentityConverges) {
  const CompositeProblem p = make_problem({ProblemKind::LassoIdentity});
  SolverParams params;
  params.gamma_max = 0.3;
  SolveOptions options;
  options.record_iterates = true;
  const RunResult r = solve(p, params, Vector::Zero(10), options);
  EXPECT_LT(iterate_distance_series(r.iterates, *p.optimum()->x_star).back(), 1e-6);
}

TEST(XiSeries, Examples) {
  Trace t(3);
  t[0].reference = 4.0;
  t[1].reference = 1.0;
  t[2].reference = 0.0;
  const XiSeries xs = xi_series(t);
  ASSERT_EQ(xs.xi.size(), 2u);
  EXPECT_DOUBLE_EQ(xs.xi[0], std::sqrt(3.0));
  EXPECT_DOUBLE_EQ(xs.xi[1], 1.0);

  for (auto& rec : t) rec.reference = 2.0;
  for (double x : xi_series(t).xi) EXPECT_EQ(x, 0.0);

  t[2].reference = 3.0;
  EXPECT_THROW(xi_series(t), NegativeGap);
}

TEST(XiSeries, BoundsStepsOnValidRun) {
  const SolverParams params;
  const RunResult r = general_run(params);
  const XiSeries xs = xi_series(r.trace);
  const double c = std::sqrt(params.descent_constant() * params.p_min);
  for (std::size_t k = 0; k < xs.xi.size(); ++k) {
    EXPECT_LE(c * r.trace[k].step_norm, xs.xi[k] + 1e-10);
  }
  EXPECT_TRUE(xs.cauchy_tail);
}

TEST(BruteForceProx, Examples) {
  auto abs_term = [](double t) { return ExtReal(std::abs(t)); };
  EXPECT_NEAR(brute_force_prox_1d(abs_term, 1.0, 3.0, -7.0, 7.0, 1e-4), 2.0, 1e-6);
  auto zero = [](double) { return ExtReal(0.0); };
  EXPECT_NEAR(brute_force_prox_1d(zero, 1.0, 1.3, -3.6, 3.6, 1e-4), 1.3, 1e-9);
  auto unit = [](double t) { return t >= 0.0 && t <= 1.0 ? ExtReal(0.0) : ExtReal::infinity(); };
  const double bounds[] = {0.0, 1.0};
  EXPECT_EQ(brute_force_prox_1d(unit, 1.0, 2.0, -5.0, 5.0, 1e-4, bounds), 1.0);
}

TEST(BruteForceSparsity, TieTakesLowerIndex) {
  EXPECT_EQ(brute_force_sparsity_projection(Vector{{1.0, -1.0, 0.5}}, 1), (Vector{{1.0, 0.0, 0.0}}));
  EXPECT_EQ(brute_force_sparsity_projection(Vector{{0.1, 2.0, -3.0}}, 2), (Vector{{0.0, 2.0, -3.0}}));
}

TEST(FiniteDiff, Examples) {
  SmoothModel half(
      2, [](const Vector& x) { return 0.5 * x.squaredNorm(); },
      [](const Vector& x) { return Vector(x); }, GlobalLipschitz{1.0});
  const Vector fd = finite_diff_gradient(half, Vector{{1.0, 2.0}});
  EXPECT_NEAR(fd[0], 1.0, 1e-8);
  EXPECT_NEAR(fd[1], 2.0, 1e-8);

  const CompositeProblem q = make_quartic_scalar();
  EXPECT_NEAR(finite_diff_gradient(q.f(), Vector{{2.0}})[0], 8.0, 1e-5);
}

TEST(FiniteDiff, DetectsWrongGradient) {
  SmoothModel wrong(
      1, [](const Vector& x) { return x[0] * x[0]; },
      [](const Vector& x) { return Vector(x); }, GlobalLipschitz{2.0});
  EXPECT_GT(gradient_relative_error(wrong, Vector{{3.0}}), 0.1);
}
