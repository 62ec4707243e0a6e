#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nmpg/types.hpp"

namespace nmpg {

// Trace audits ------------------------------------------------------------------

struct AuditCheck {
  std::string name;
  bool pass = true;
  /// Largest observed violation in the check's own units; pass iff <= slack.
  double worst_violation = 0.0;
  double slack = 0.0;
  /// Index of the record where the worst violation occurred.
  std::size_t worst_index = 0;
  /// False when the check does not apply to this run (it then passes).
  bool applicable = true;
};

struct AuditReport {
  std::vector<AuditCheck> checks;

  bool pass() const;
  const AuditCheck* find(const std::string& name) const;
};

struct AuditOptions {
  /// Compare mean step length over the last and first 10% of the trace. Only
  /// meaningful for long runs stopped by the iteration cap.
  bool check_step_decay = false;
};

/// Audits a trace against the descent invariants of the method:
///
///   reference_dominates_psi   (ψ_k - R_k) / (1 + |ψ_k|)              <= 1e-12
///   reference_nonincreasing   (R_k - R_{k-1}) / (1 + |R_{k-1}|)       <= 1e-12
///   sufficient_decrease       R_{k+1} - R_k + p_min a ||Δx_k||²       <= 1e-10
///   xi_consistency            |Ξ_{k-1}² - (R_{k-1} - R_k)|            <= 1e-12
///   xi_bounds_step            sqrt(a p_min) ||Δx_{k-1}|| - Ξ_{k-1}     <= 1e-10
///   step_decay                tail mean ||Δx|| - head mean ||Δx||      <= 0
///
/// with a = (1 - α_max) / (2 γ_max). The two decrease checks are derived from
/// the mean rule and are reported as not applicable for the max rule.
AuditReport audit_trace(const Trace& trace, const SolverParams& params,
                        const AuditOptions& options = {});

/// Same as above with step_decay enabled iff the run stopped on the iteration cap.
AuditReport audit_run(const RunResult& run, const SolverParams& params);

// Rate estimation ---------------------------------------------------------------

/// Raised when a value in the fitting window is not strictly above ψ*.
class NonpositiveTail : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by xi_series when the reference values increase beyond float slack.
class NegativeGap : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RateMode { QLinear, SublinearPower };

struct RateReport {
  RateMode mode = RateMode::QLinear;
  double fitted = 0.0;
  /// Slope predicted from the KL exponent; unset for Q-linear fits, where no
  /// specific factor is predicted.
  std::optional<double> predicted;
  double tolerance = 0.0;
  /// Half-open index range [first, last) of the values used.
  std::size_t first = 0;
  std::size_t last = 0;
  double max_ratio = 0.0;  // Q-linear only
  bool pass = false;
};

const char* to_string(RateMode mode);

/// Number of leading values with values_i - psi_star > 10 eps |psi_star|.
/// Fits should use only this prefix; later values sit at float resolution.
std::size_t usable_prefix(std::span<const double> values, double psi_star);

/// [first, n) with first = n - max(ceil(fraction n), min(50, n)).
std::pair<std::size_t, std::size_t> tail_window(std::size_t n, double tail_fraction);

/// Geometric mean of (v_{k+1} - ψ*) / (v_k - ψ*) over the tail window. Passes
/// iff the mean is <= 0.999 and every ratio is <= 1 + 1e-10.
RateReport estimate_q_factor(std::span<const double> values, double psi_star,
                             double tail_fraction = 0.5);

/// Least-squares slope of log(v_k - ψ*) against log(k) over the tail window,
/// where values[i] belongs to k = first_index + i (k = 0 is skipped). If
/// `predicted` is given, pass iff |slope - predicted| <= tolerance.
RateReport fit_loglog_slope(std::span<const double> values, double psi_star,
                            double tail_fraction = 0.5, std::size_t first_index = 0,
                            std::optional<double> predicted = std::nullopt,
                            double tolerance = 0.15);

/// Predicted log-log slope of R_k - ψ* for KL exponent κ in (0, ½).
double predicted_value_slope(double kappa);
/// Predicted log-log slope of ||x^k - x*|| for KL exponent κ in (0, ½).
double predicted_iterate_slope(double kappa);

/// ||x^k - x*|| for each stored iterate.
std::vector<double> iterate_distance_series(std::span<const Vector> iterates, const Vector& x_star);

/// The reference column of a trace.
std::vector<double> reference_series(const Trace& trace);

struct XiSeries {
  /// Ξ_{k-1} = sqrt(R_{k-1} - R_k) for k = 1..n-1.
  std::vector<double> xi;
  double head_sum = 0.0;  // Σ Ξ over the first half
  double tail_sum = 0.0;  // Σ Ξ over the second half
  /// tail_sum <= head_sum: the partial sums level off, as for a convergent series.
  bool cauchy_tail = true;
};

/// Ξ values recomputed from the reference column. Throws NegativeGap when some
/// R_k exceeds R_{k-1} by more than 1e-12 (1 + |R_{k-1}|).
XiSeries xi_series(const Trace& trace);

// Brute-force oracles -------------------------------------------------------------

using ScalarTerm = std::function<ExtReal(double)>;

/// Minimizes t -> φ(t) + (t - v)² / (2γ) over [lo, hi] by grid search with
/// spacing `step`, followed by ternary refinement inside the neighbouring grid
/// cells. The points in `candidates` (clipped to [lo, hi]) together with v and
/// 0 are always evaluated as well, so kinks and jumps at those points are found
/// exactly.
double brute_force_prox_1d(const ScalarTerm& phi, double gamma, double v, double lo, double hi,
                           double step, std::span<const double> candidates = {});

/// Projection onto {||x||₀ <= s} by enumerating every support of size s; ties
/// are resolved toward the lexicographically smallest support.
Vector brute_force_sparsity_projection(const Vector& v, std::size_t s);

/// Central differences with h_i = max(1e-6, 1e-6 |x_i|).
Vector finite_diff_gradient(const SmoothModel& f, const Vector& x);

/// max_i |g_i - fd_i| / max(1, ||g||_inf).
double gradient_relative_error(const SmoothModel& f, const Vector& x);

}  // namespace nmpg
