#include "nmpg/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <type_traits>

namespace nmpg {

namespace {

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw NumericalError(std::string(what) + " contains non-finite entries");
}

double finite_psi(const CompositeProblem& problem, const Vector& x) {
  const ExtReal psi = psi_eval(problem, x);
  if (psi.is_infinite()) {
    // A prox output must lie in dom(φ); anything else is a broken term.
    throw NumericalError("prox returned a point outside dom(phi) for " + problem.name());
  }
  return psi.value();
}

}  // namespace

Vector subproblem_step(const CompositeProblem& problem, const Vector& x, const Vector& grad_x,
                       double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("subproblem_step: gamma must be positive");
  require_finite(grad_x, "gradient");
  Vector x_next = problem.phi().prox(gamma, x - gamma * grad_x);
  require_finite(x_next, "prox output");
  return x_next;
}

bool accept_step(double psi_next, double reference, double alpha, double gamma,
                 double step_norm_sq) {
  return reference - psi_next >= (1.0 - alpha) / (2.0 * gamma) * step_norm_sq;
}

double residual(const Vector& x_next, const Vector& x, double gamma, const Vector& grad_next,
                const Vector& grad_x) {
  return ((x_next - x) / gamma - grad_next + grad_x).norm();
}

double update_reference(double reference, double p_next, double psi_next) {
  return psi_next + (1.0 - p_next) * (reference - psi_next);
}

double max_rule_reference(std::span<const double> window) {
  if (window.empty()) throw std::invalid_argument("max_rule_reference: empty window");
  return *std::max_element(window.begin(), window.end());
}

std::size_t compute_m(double p_min) {
  if (!(p_min > 0.0 && p_min <= 1.0)) throw std::invalid_argument("compute_m: p_min must lie in (0,1]");
  const double r = std::sqrt(1.0 - p_min);
  std::size_t l = 1;
  while ((1.0 - r) * std::sqrt(static_cast<double>(l)) < 1.0 + r) ++l;
  return l;
}

double initial_gamma(const SolverState& state, const SolverParams& params) {
  const double trial = std::visit(
      [&](const auto& policy) -> double {
        using P = std::decay_t<decltype(policy)>;
        if constexpr (std::is_same_v<P, ConstantGamma>) {
          return policy.value;
        } else if constexpr (std::is_same_v<P, PreviousAcceptedGamma>) {
          return state.gamma_prev > 0.0 ? state.gamma_prev : params.gamma_max;
        } else {
          if (state.last_dx.size() == 0) return params.gamma_max;
          const double dg_sq = state.last_dg.squaredNorm();
          const double curvature = state.last_dx.dot(state.last_dg);
          if (!(dg_sq > 0.0) || !(curvature > 0.0)) return params.gamma_max;
          return curvature / dg_sq;
        }
      },
      params.gamma_init);
  if (!std::isfinite(trial)) return params.gamma_max;
  return std::clamp(trial, params.gamma_min, params.gamma_max);
}

StepOutcome backtrack(const CompositeProblem& problem, const SolverState& state,
                      const SolverParams& params) {
  const double alpha = params.alpha();
  const double beta = params.beta();
  const bool mean_rule = !params.uses_max_reference();
  StepOutcome out;
  double gamma = initial_gamma(state, params);
  for (std::size_t rejected = 0;; ++rejected) {
    Vector x_next = subproblem_step(problem, state.x, state.grad_x, gamma);
    const double psi_next = finite_psi(problem, x_next);
    const double step_sq = (x_next - state.x).squaredNorm();
    bool accepted = accept_step(psi_next, state.reference, alpha, gamma, step_sq);
    if (accepted && mean_rule) {
      const double decrease = state.reference - update_reference(state.reference, params.p_min, psi_next);
      accepted = decrease >= params.p_min * (1.0 - alpha) / (2.0 * gamma) * step_sq;
    }
    if (accepted) {
      out.grad_next = problem.f().gradient(x_next);
      require_finite(out.grad_next, "gradient");
      out.residual = residual(x_next, state.x, gamma, out.grad_next, state.grad_x);
      out.x_next = std::move(x_next);
      out.gamma_used = gamma;
      out.backtracks = rejected;
      out.psi_next = psi_next;
      out.step_norm = std::sqrt(step_sq);
      return out;
    }
    if (rejected >= params.max_backtracks) {
      throw BacktrackCapError("stepsize search exceeded " + std::to_string(params.max_backtracks) +
                              " backtracks at iteration " + std::to_string(state.k));
    }
    gamma *= beta;
  }
}

RunResult solve(const CompositeProblem& problem, const SolverParams& params, const Vector& x0,
                const SolveOptions& options) {
  params.validate();
  if (static_cast<std::size_t>(x0.size()) != problem.dim()) {
    throw std::invalid_argument("solve: x0 has dimension " + std::to_string(x0.size()) +
                                ", problem " + problem.name() + " has " +
                                std::to_string(problem.dim()));
  }
  if (problem.phi().value(x0).is_infinite()) {
    throw std::invalid_argument("solve: x0 is not in dom(phi) for " + problem.name());
  }

  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.x_final = x0;
  auto finish = [&](RunStatus status, std::string message = {}) {
    result.status = status;
    result.message = std::move(message);
    result.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  };

  SolverState state;
  try {
    state.x = x0;
    state.psi_x = finite_psi(problem, x0);
    state.grad_x = problem.f().gradient(x0);
    require_finite(state.grad_x, "gradient");
  } catch (const NumericalError& e) {
    return finish(RunStatus::NumericalFailure, e.what());
  }
  state.reference = state.psi_x;
  const auto* max_rule = std::get_if<MaxReference>(&params.reference);
  if (max_rule) state.max_window.push_back(state.psi_x);
  if (options.record_iterates) result.iterates.push_back(x0);

  double prev_reference = state.reference;
  result.trace.reserve(std::min<std::size_t>(params.max_outer_iters, 1 << 16));

  for (state.k = 0; state.k < params.max_outer_iters; ++state.k) {
    StepOutcome step;
    try {
      step = backtrack(problem, state, params);
    } catch (const BacktrackCapError& e) {
      return finish(RunStatus::BacktrackCapExceeded, e.what());
    } catch (const NumericalError& e) {
      return finish(RunStatus::NumericalFailure, e.what());
    }
    if (!std::isfinite(step.residual)) {
      return finish(RunStatus::NumericalFailure, "residual is not finite");
    }

    IterationRecord rec;
    rec.k = state.k;
    rec.psi = state.psi_x;
    rec.reference = state.reference;
    rec.gamma = step.gamma_used;
    rec.backtracks = step.backtracks;
    rec.step_norm = step.step_norm;
    rec.residual = step.residual;
    rec.xi = state.k == 0 ? 0.0 : std::sqrt(std::max(0.0, prev_reference - state.reference));
    result.trace.push_back(rec);

    result.x_final = step.x_next;
    if (options.record_iterates) result.iterates.push_back(step.x_next);

    if (step.residual <= params.epsilon) return finish(RunStatus::ConvergedResidual);

    prev_reference = state.reference;
    if (max_rule) {
      state.max_window.push_back(step.psi_next);
      while (state.max_window.size() > max_rule->window) state.max_window.pop_front();
      const std::vector<double> window(state.max_window.begin(), state.max_window.end());
      state.reference = max_rule_reference(window);
    } else {
      state.reference = update_reference(state.reference, params.p_min, step.psi_next);
    }

    state.last_dx = step.x_next - state.x;
    state.last_dg = step.grad_next - state.grad_x;
    state.x = std::move(step.x_next);
    state.grad_x = std::move(step.grad_next);
    state.psi_x = step.psi_next;
    state.gamma_prev = step.gamma_used;
  }
  return finish(RunStatus::MaxIters);
}

ReferenceSolution solve_reference(const CompositeProblem& problem, const Vector& x0,
                                  std::size_t max_iters) {
  SolverParams params = monotone(SolverParams{});
  params.epsilon = 1e-12;
  params.max_outer_iters = max_iters;
  const RunResult run = solve(problem, params, x0);
  if (!run.ok()) {
    throw std::runtime_error("reference solve failed for " + problem.name() + ": " + run.message);
  }
  ReferenceSolution ref;
  ref.x_star = run.x_final;
  ref.psi_star = finite_psi(problem, run.x_final);
  ref.status = run.status;
  ref.final_residual = run.trace.empty() ? 0.0 : run.trace.back().residual;
  ref.iterations = run.trace.size();
  return ref;
}

const ReferenceSolution& cached_reference(const std::string& cache_key,
                                          const CompositeProblem& problem, const Vector& x0,
                                          std::size_t max_iters) {
  static std::mutex mutex;
  static std::map<std::string, ReferenceSolution> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(cache_key);
  if (it == cache.end()) {
    it = cache.emplace(cache_key, solve_reference(problem, x0, max_iters)).first;
  }
  return it->second;
}

}  // namespace nmpg
