#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nmpg/diagnostics.hpp"
#include "nmpg/problems.hpp"
#include "nmpg/prox.hpp"
#include "nmpg/solver.hpp"

using namespace nmpg;

namespace {

CompositeProblem half_square(std::shared_ptr<const NonsmoothTerm> phi) {
  SmoothModel f(
      1, [](const Vector& x) { return 0.5 * x.squaredNorm(); },
      [](const Vector& x) { return Vector(x); }, GlobalLipschitz{1.0});
  return CompositeProblem(f, std::move(phi), "half_square");
}

SolverState state_at(const CompositeProblem& p, const Vector& x) {
  SolverState s;
  s.x = x;
  s.psi_x = psi_eval(p, x).value();
  s.reference = s.psi_x;
  s.grad_x = p.f().gradient(x);
  return s;
}

Vector seeded(const CompositeProblem& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Vector x(static_cast<Eigen::Index>(p.dim()));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = nd(rng);
  if (p.phi().value(x).is_infinite()) x = p.phi().prox(1.0, x);
  return x;
}

std::size_t total_backtracks(const Trace& trace) {
  std::size_t n = 0;
  for (const auto& r : trace) n += r.backtracks;
  return n;
}

}  // namespace

TEST(SubproblemStep, SteepestDescentWithoutPhi) {
  const CompositeProblem p = make_quartic_scalar();
  const Vector x{{1.5}};
  const Vector g = p.f().gradient(x);
  EXPECT_EQ(subproblem_step(p, x, g, 0.1), x - 0.1 * g);
}

TEST(SubproblemStep, LassoIdentityFromB) {
  const Vector b{{2.0, 0.5, -3.0}};
  const CompositeProblem p = make_lasso_identity(b, 1.0);
  EXPECT_EQ(subproblem_step(p, b, p.f().gradient(b), 1.0), prox_l1(b, 1.0));
  const Vector& x_star = *p.optimum()->x_star;
  EXPECT_EQ(subproblem_step(p, x_star, p.f().gradient(x_star), 1.0), x_star);
}

TEST(SubproblemStep, RejectsNonFinite) {
  const CompositeProblem p = make_quartic_scalar();
  EXPECT_THROW(subproblem_step(p, Vector{{1.0}}, Vector{{NAN}}, 1.0), NumericalError);
  EXPECT_THROW(subproblem_step(p, Vector{{1.0}}, Vector{{1.0}}, 0.0), std::invalid_argument);
}

TEST(AcceptStep, Examples) {
  EXPECT_TRUE(accept_step(4.9, 5.0, 0.5, 1.0, 0.1));
  EXPECT_FALSE(accept_step(5.0, 5.0, 0.5, 1.0, 1e-3));
  EXPECT_TRUE(accept_step(5.0, 5.0, 0.5, 1.0, 0.0));
  EXPECT_FALSE(accept_step(5.0 + 1e-12, 5.0, 0.5, 1.0, 0.0));
}

TEST(Residual, Examples) {
  const Vector x{{1.0, 2.0}};
  const Vector xn{{0.5, 2.5}};
  const Vector g{{3.0, -1.0}};
  EXPECT_DOUBLE_EQ(residual(xn, x, 1.0, g, g), (xn - x).norm());
  EXPECT_EQ(residual(x, x, 0.3, g, g), 0.0);
}

TEST(UpdateReference, Examples) {
  EXPECT_EQ(update_reference(10.0, 0.5, 6.0), 8.0);
  EXPECT_EQ(update_reference(10.0, 1.0, 6.25), 6.25);
  EXPECT_EQ(update_reference(3.5, 0.3, 3.5), 3.5);
}

TEST(MaxRuleReference, Examples) {
  const double w[] = {3.0, 5.0, 4.0};
  EXPECT_EQ(max_rule_reference(w), 5.0);
  const double one[] = {2.5};
  EXPECT_EQ(max_rule_reference(one), 2.5);
  EXPECT_THROW(max_rule_reference({}), std::invalid_argument);
}

TEST(ComputeM, Examples) {
  EXPECT_EQ(compute_m(1.0), 1u);
  EXPECT_EQ(compute_m(0.75), 9u);
  EXPECT_EQ(compute_m(0.96), 3u);
  EXPECT_THROW(compute_m(0.0), std::invalid_argument);
}

TEST(ComputeM, ClosedFormOracle) {
  // Squaring the defining inequality: l >= ((1 + r) / (1 - r))², r = sqrt(1 - p).
  const std::size_t expected[] = {6082, 1442, 607, 322, 194, 127, 87, 62, 46, 34,
                                  26,   20,   16,  12,  9,   7,   6,  4,  3,  1};
  for (int i = 1; i <= 20; ++i) {
    EXPECT_EQ(compute_m(0.05 * i), expected[i - 1]) << "p_min=" << 0.05 * i;
  }
}

TEST(InitialGamma, Policies) {
  SolverParams params;
  SolverState s;
  EXPECT_EQ(initial_gamma(s, params), params.gamma_max);
  s.last_dx = Vector{{1.0}};
  s.last_dg = Vector{{4.0}};
  EXPECT_EQ(initial_gamma(s, params), 0.25);
  s.last_dg = Vector{{1e-12}};
  EXPECT_EQ(initial_gamma(s, params), params.gamma_max);
  s.last_dg = Vector{{-1.0}};
  EXPECT_EQ(initial_gamma(s, params), params.gamma_max);
  params.gamma_init = ConstantGamma{1e-20};
  EXPECT_EQ(initial_gamma(s, params), params.gamma_min);
  params.gamma_init = PreviousAcceptedGamma{};
  s.gamma_prev = 0.125;
  EXPECT_EQ(initial_gamma(s, params), 0.125);
}

TEST(Backtrack, AcceptsFirstTrialOnHalfSquare) {
  const CompositeProblem p = half_square(std::make_shared<ZeroTerm>(1));
  SolverParams params;
  params.alpha_min = params.alpha_max = 0.5;
  params.gamma_init = ConstantGamma{1.0};
  const StepOutcome out = backtrack(p, state_at(p, Vector{{1.0}}), params);
  EXPECT_EQ(out.backtracks, 0u);
  EXPECT_EQ(out.x_next[0], 0.0);
  EXPECT_EQ(out.psi_next, 0.0);
}

TEST(Backtrack, QuarticOvershootIsRejected) {
  const CompositeProblem p = make_quartic_scalar();
  SolverParams params;
  const SolverState s = state_at(p, Vector{{10.0}});
  const StepOutcome out = backtrack(p, s, params);
  EXPECT_GE(out.backtracks, 1u);
  EXPECT_EQ(out.gamma_used, std::pow(0.5, static_cast<double>(out.backtracks)));
  EXPECT_TRUE(accept_step(out.psi_next, s.reference, params.alpha(), out.gamma_used,
                          out.step_norm * out.step_norm));

  params.max_backtracks = out.backtracks - 1;
  EXPECT_THROW(backtrack(p, s, params), BacktrackCapError);
  params.max_backtracks = out.backtracks;
  EXPECT_NO_THROW(backtrack(p, s, params));
}

TEST(Backtrack, StationaryPointAcceptsZeroStep) {
  const CompositeProblem p = make_lasso_identity(Vector{{2.0, 0.5}}, 1.0);
  const StepOutcome out = backtrack(p, state_at(p, *p.optimum()->x_star), SolverParams{});
  EXPECT_EQ(out.backtracks, 0u);
  EXPECT_EQ(out.step_norm, 0.0);
  EXPECT_EQ(out.residual, 0.0);
}

TEST(Solve, LassoIdentityExample) {
  const CompositeProblem p = make_lasso_identity(Vector{{2.0, 0.5}}, 1.0);
  SolverParams params;
  params.epsilon = 1e-10;
  const RunResult r = solve(p, params, Vector::Zero(2));
  EXPECT_EQ(r.status, RunStatus::ConvergedResidual);
  EXPECT_LE((r.x_final - Vector{{1.0, 0.0}}).norm(), 1e-6);
}

TEST(Solve, StationaryStartStopsImmediately) {
  const CompositeProblem p = make_lasso_identity(Vector{{2.0, 0.5}}, 1.0);
  const RunResult r = solve(p, SolverParams{}, *p.optimum()->x_star);
  EXPECT_EQ(r.status, RunStatus::ConvergedResidual);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].residual, 0.0);
}

TEST(Solve, EpsilonZeroRunsToIterationCap) {
  SolverParams params;
  params.epsilon = 0.0;
  params.max_outer_iters = 2000;
  const RunResult r = solve(make_quartic_scalar(), params, Vector{{1.0}});
  EXPECT_EQ(r.status, RunStatus::MaxIters);
  EXPECT_EQ(r.trace.size(), 2000u);
}

TEST(Solve, RejectsBadStartsAndParams) {
  auto box = std::make_shared<BoxIndicator>(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
  const CompositeProblem p = half_square(box);
  EXPECT_THROW(solve(p, SolverParams{}, Vector{{2.0}}), std::invalid_argument);
  EXPECT_THROW(solve(p, SolverParams{}, Vector::Zero(2)), std::invalid_argument);
  SolverParams bad;
  bad.p_min = 1.5;
  EXPECT_THROW(solve(p, bad, Vector::Zero(1)), std::invalid_argument);
}

TEST(Solve, BacktrackCapIsAnErrorStatus) {
  SolverParams params;
  params.max_backtracks = 0;
  const RunResult r = solve(make_quartic_scalar(), params, Vector{{10.0}});
  EXPECT_EQ(r.status, RunStatus::BacktrackCapExceeded);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.message.empty());
}

TEST(Solve, OverflowIsNumericalFailure) {
  const CompositeProblem p = make_problem({ProblemKind::ExpFitL1});
  const RunResult r = solve(p, SolverParams{}, Vector::Constant(static_cast<Eigen::Index>(p.dim()), 400.0));
  EXPECT_EQ(r.status, RunStatus::NumericalFailure);
}

TEST(Solve, RecordsIteratesWhenAsked) {
  SolveOptions options;
  options.record_iterates = true;
  const CompositeProblem p = make_problem({ProblemKind::LassoGeneral});
  const RunResult r = solve(p, SolverParams{}, Vector::Zero(50), options);
  ASSERT_EQ(r.iterates.size(), r.trace.size() + 1);
  EXPECT_EQ(r.iterates.back(), r.x_final);
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    EXPECT_DOUBLE_EQ((r.iterates[k + 1] - r.iterates[k]).norm(), r.trace[k].step_norm);
  }
  EXPECT_TRUE(solve(p, SolverParams{}, Vector::Zero(50)).iterates.empty());
}

class SolverInvariants : public ::testing::TestWithParam<std::tuple<ProblemKind, int>> {};

TEST_P(SolverInvariants, RecordsSatisfyInvariants) {
  const auto [kind, policy] = GetParam();
  const CompositeProblem p = make_problem({kind});
  SolverParams params;
  if (policy == 0) params = monotone(params);
  if (policy == 2) params.reference = MaxReference{10};
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const RunResult r = solve(p, params, seeded(p, seed));
    ASSERT_TRUE(r.ok()) << r.message;
    if (r.status == RunStatus::ConvergedResidual) {
      EXPECT_LE(r.trace.back().residual, params.epsilon);
    }
    double prev_ref = r.trace.front().reference;
    for (const auto& rec : r.trace) {
      EXPECT_GE(rec.reference, rec.psi - 1e-12 * (1.0 + std::abs(rec.psi)));
      EXPECT_LE(rec.reference, prev_ref + 1e-12 * (1.0 + std::abs(prev_ref)));
      EXPECT_GT(rec.gamma, 0.0);
      EXPECT_LE(rec.gamma, params.gamma_max);
      if (rec.k > 0) EXPECT_NEAR(rec.xi * rec.xi, prev_ref - rec.reference, 1e-12);
      prev_ref = rec.reference;
    }
    if (policy == 0) {
      for (std::size_t k = 1; k < r.trace.size(); ++k) {
        EXPECT_LE(r.trace[k].psi, r.trace[k - 1].psi);
      }
    }
    EXPECT_TRUE(audit_run(r, params).pass());
  }
}

INSTANTIATE_TEST_SUITE_P(
    AllProblems, SolverInvariants,
    ::testing::Combine(::testing::Values(ProblemKind::LassoIdentity, ProblemKind::LassoGeneral,
                                         ProblemKind::QuarticScalar, ProblemKind::QuarticRegressionL0,
                                         ProblemKind::SparsityProjectedQuadratic,
                                         ProblemKind::ExpFitL1),
                       ::testing::Values(0, 1, 2)));

TEST(SolverProperties, BacktrackFactorIsBeta) {
  SolverParams params;
  params.gamma_init = ConstantGamma{1.0};
  const RunResult r = solve(make_problem({ProblemKind::QuarticRegressionL0}), params,
                            Vector::Constant(10, 0.5));
  for (const auto& rec : r.trace) {
    EXPECT_EQ(rec.gamma, std::pow(0.5, static_cast<double>(rec.backtracks)));
  }
}

TEST(SolverProperties, NonmonotoneNeedsNoMoreBacktracks) {
  const CompositeProblem p = make_problem({ProblemKind::LassoGeneral});
  const Vector x0 = Vector::Zero(50);
  const RunResult mono = solve(p, monotone(SolverParams{}), x0);
  SolverParams nonmono;
  nonmono.p_min = 0.1;
  const RunResult mean = solve(p, nonmono, x0);
  EXPECT_LE(total_backtracks(mean.trace), total_backtracks(mono.trace));
}

TEST(SolverProperties, WindowOneMaxRuleIsMonotone) {
  const CompositeProblem p = make_problem({ProblemKind::QuarticRegressionL0});
  const Vector x0 = seeded(p, 5);
  const SolverParams mono = monotone(SolverParams{});
  SolverParams w1 = mono;
  w1.reference = MaxReference{1};
  const RunResult a = solve(p, mono, x0);
  const RunResult b = solve(p, w1, x0);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    EXPECT_EQ(a.trace[k].psi, b.trace[k].psi);
    EXPECT_EQ(a.trace[k].reference, b.trace[k].reference);
    EXPECT_EQ(a.trace[k].gamma, b.trace[k].gamma);
  }
  EXPECT_EQ(a.x_final, b.x_final);
}

TEST(SolverProperties, MaxRuleReferenceIsWindowMaximum) {
  const CompositeProblem p = make_problem({ProblemKind::QuarticRegressionL0});
  SolverParams params;
  params.reference = MaxReference{4};
  const RunResult r = solve(p, params, seeded(p, 2));
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    double m = r.trace[k].psi;
    for (std::size_t j = k >= 3 ? k - 3 : 0; j < k; ++j) m = std::max(m, r.trace[j].psi);
    EXPECT_EQ(r.trace[k].reference, m);
  }
}

TEST(SolverProperties, DeterministicTraces) {
  const CompositeProblem p = make_problem({ProblemKind::ExpFitL1});
  const RunResult a = solve(p, SolverParams{}, seeded(p, 3));
  const RunResult b = solve(p, SolverParams{}, seeded(p, 3));
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    EXPECT_EQ(a.trace[k].psi, b.trace[k].psi);
    EXPECT_EQ(a.trace[k].residual, b.trace[k].residual);
  }
}
