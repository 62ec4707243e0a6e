#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "nmpg/types.hpp"

namespace nmpg {

// Building blocks of the nonmonotone proximal gradient iteration. They are
// exposed individually so the diagnostics and tests can exercise each rule.

/// x⁺ ∈ Prox_{γφ}(x - γ f'(x)). Throws NumericalError on non-finite input or output.
Vector subproblem_step(const CompositeProblem& problem, const Vector& x, const Vector& grad_x,
                       double gamma);

/// psi_next <= reference - (1 - alpha) / (2 gamma) * step_norm_sq.
bool accept_step(double psi_next, double reference, double alpha, double gamma,
                 double step_norm_sq);

/// ||(x_next - x) / γ - f'(x_next) + f'(x)||, an upper bound on dist(0, ∂ψ(x_next)).
double residual(const Vector& x_next, const Vector& x, double gamma, const Vector& grad_next,
                const Vector& grad_x);

/// Mean rule: (1 - p) R + p ψ, evaluated as ψ + (1 - p)(R - ψ).
double update_reference(double reference, double p_next, double psi_next);

/// Max rule: the largest stored objective value.
double max_rule_reference(std::span<const double> window);

/// Smallest l >= 1 with (1 - sqrt(1 - p_min)) sqrt(l) >= 1 + sqrt(1 - p_min).
std::size_t compute_m(double p_min);

/// Iteration state at x^k.
struct SolverState {
  Vector x;
  double psi_x = 0.0;
  double reference = 0.0;
  double gamma_prev = 0.0;  // zero before the first accepted step
  Vector grad_x;
  std::size_t k = 0;
  /// x^k - x^{k-1} and f'(x^k) - f'(x^{k-1}); empty for k = 0.
  Vector last_dx;
  Vector last_dg;
  /// Recent ψ(x^l), oldest first. Only maintained for the max rule.
  std::deque<double> max_window;
};

struct StepOutcome {
  Vector x_next;
  Vector grad_next;
  double gamma_used = 0.0;
  std::size_t backtracks = 0;
  double psi_next = 0.0;
  double step_norm = 0.0;
  double residual = 0.0;
};

/// Thrown by backtrack() when more than max_backtracks trial steps are rejected.
class BacktrackCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Trial stepsize for the current iteration according to params.gamma_init,
/// clipped to [gamma_min, gamma_max].
double initial_gamma(const SolverState& state, const SolverParams& params);

/// Inner loop: shrink γ by β until the nonmonotone acceptance test holds. Under the
/// mean rule the test also requires the stored reference to drop by p (1 - α) / (2γ) ‖Δx‖².
StepOutcome backtrack(const CompositeProblem& problem, const SolverState& state,
                      const SolverParams& params);

struct SolveOptions {
  bool record_iterates = false;
};

/// Runs the nonmonotone proximal gradient method from x0.
///
/// Throws std::invalid_argument for invalid params, a dimension mismatch, or
/// x0 outside dom(φ). Backtracking and numerical failures are reported through
/// RunResult::status with the partial trace.
RunResult solve(const CompositeProblem& problem, const SolverParams& params, const Vector& x0,
                const SolveOptions& options = {});

// High-accuracy reference solutions ---------------------------------------------

struct ReferenceSolution {
  double psi_star = 0.0;
  Vector x_star;
  RunStatus status = RunStatus::MaxIters;
  double final_residual = 0.0;
  std::size_t iterations = 0;
};

/// Long monotone run (p ≡ 1, ε = 1e-12) used where no closed-form optimum exists.
ReferenceSolution solve_reference(const CompositeProblem& problem, const Vector& x0,
                                  std::size_t max_iters = 1000000);

/// solve_reference() memoized on `cache_key` for the lifetime of the process.
/// Thread-safe.
const ReferenceSolution& cached_reference(const std::string& cache_key,
                                          const CompositeProblem& problem, const Vector& x0,
                                          std::size_t max_iters = 1000000);

}  // namespace nmpg
