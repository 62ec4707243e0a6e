#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "nmpg/ext_real.hpp"

namespace nmpg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when a smooth evaluation or a prox step produces a non-finite number.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalLipschitz {
  double constant;
};
struct LocalLipschitzOnly {};

/// How much is known about the Lipschitz behavior of f'.
using LipschitzClass = std::variant<GlobalLipschitz, LocalLipschitzOnly>;

/// The continuously differentiable part f of ψ = f + φ.
class SmoothModel {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;

  SmoothModel(std::size_t dim, ValueFn value, GradFn gradient, LipschitzClass lipschitz);

  std::size_t dim() const { return dim_; }
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  const LipschitzClass& lipschitz() const { return lipschitz_; }
  bool globally_lipschitz() const {
    return std::holds_alternative<GlobalLipschitz>(lipschitz_);
  }

 private:
  std::size_t dim_;
  ValueFn value_;
  GradFn gradient_;
  LipschitzClass lipschitz_;
};

/// The lower semicontinuous, possibly extended-valued part φ of ψ = f + φ.
///
/// prox(gamma, v) returns one element of argmin_z φ(z) + ||z - v||^2 / (2 gamma).
/// When that set has several elements, each concrete term documents which one
/// it selects; the selection is deterministic.
class NonsmoothTerm {
 public:
  virtual ~NonsmoothTerm() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
  virtual ExtReal value(const Vector& x) const = 0;
  virtual Vector prox(double gamma, const Vector& v) const = 0;
  /// Some point with value(x) < +inf.
  virtual Vector domain_witness() const = 0;
};

/// A term of the form φ(x) = Σ_i φ_i(x_i).
class SeparableTerm : public NonsmoothTerm {
 public:
  /// φ_i(t), the contribution of coordinate i taking the value t.
  virtual ExtReal component_value(std::size_t i, double t) const = 0;

  ExtReal value(const Vector& x) const override;
};

struct Optimum {
  double psi_star;
  std::optional<Vector> x_star;
};

/// Declared Kurdyka-Łojasiewicz exponent of ψ at the problem's limit point.
struct KlHypothesis {
  double kappa;
  std::string note;
};

/// min ψ(x) = f(x) + φ(x).
class CompositeProblem {
 public:
  CompositeProblem(SmoothModel f, std::shared_ptr<const NonsmoothTerm> phi, std::string name,
                   std::optional<Optimum> optimum = std::nullopt,
                   std::optional<KlHypothesis> kl = std::nullopt);

  std::size_t dim() const { return f_.dim(); }
  const SmoothModel& f() const { return f_; }
  const NonsmoothTerm& phi() const { return *phi_; }
  std::shared_ptr<const NonsmoothTerm> phi_ptr() const { return phi_; }
  const std::string& name() const { return name_; }
  const std::optional<Optimum>& optimum() const { return optimum_; }
  const std::optional<KlHypothesis>& kl_hypothesis() const { return kl_; }

  /// A copy carrying the given optimum (validated like the constructor).
  CompositeProblem with_optimum(Optimum optimum) const;

 private:
  SmoothModel f_;
  std::shared_ptr<const NonsmoothTerm> phi_;
  std::string name_;
  std::optional<Optimum> optimum_;
  std::optional<KlHypothesis> kl_;
};

/// ψ(x) = f(x) + φ(x). Throws std::invalid_argument on a dimension mismatch
/// and NumericalError if f(x) is not finite.
ExtReal psi_eval(const CompositeProblem& problem, const Vector& x);

// Solver configuration --------------------------------------------------------

struct ConstantGamma {
  double value;
  friend bool operator==(const ConstantGamma&, const ConstantGamma&) = default;
};
struct PreviousAcceptedGamma {
  friend bool operator==(const PreviousAcceptedGamma&, const PreviousAcceptedGamma&) = default;
};
/// <Δx, Δg> / ||Δg||^2 from the previous accepted step, clipped to [γ_min, γ_max].
struct BarzilaiBorweinGamma {
  friend bool operator==(const BarzilaiBorweinGamma&, const BarzilaiBorweinGamma&) = default;
};

using GammaInitPolicy = std::variant<ConstantGamma, PreviousAcceptedGamma, BarzilaiBorweinGamma>;

/// R_{k+1} = (1 - p) R_k + p ψ(x^{k+1}), p ≡ p_min.
struct MeanReference {
  friend bool operator==(const MeanReference&, const MeanReference&) = default;
};
/// R_k = max of the last `window` objective values.
struct MaxReference {
  std::size_t window;
  friend bool operator==(const MaxReference&, const MaxReference&) = default;
};

using ReferencePolicy = std::variant<MeanReference, MaxReference>;

struct SolverParams {
  double gamma_min = 1e-10;
  double gamma_max = 1.0;
  double alpha_min = 0.1;
  double alpha_max = 0.1;
  double beta_min = 0.5;
  double beta_max = 0.5;
  double p_min = 0.1;
  double epsilon = 1e-8;
  std::size_t max_outer_iters = 100000;
  /// Number of rejected trial steps tolerated per outer iteration. Zero means
  /// the first trial stepsize must be accepted.
  std::size_t max_backtracks = 100;
  GammaInitPolicy gamma_init = BarzilaiBorweinGamma{};
  ReferencePolicy reference = MeanReference{};

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;

  /// Midpoints of the α and β intervals, the values used for every iteration.
  double alpha() const { return 0.5 * (alpha_min + alpha_max); }
  double beta() const { return 0.5 * (beta_min + beta_max); }

  /// The descent constant a = (1 - α_max) / (2 γ_max).
  double descent_constant() const { return (1.0 - alpha_max) / (2.0 * gamma_max); }

  bool uses_max_reference() const { return std::holds_alternative<MaxReference>(reference); }

  friend bool operator==(const SolverParams&, const SolverParams&) = default;
};

/// Defaults with p ≡ 1, i.e. the monotone proximal gradient method.
SolverParams monotone(SolverParams params);

// Run records -----------------------------------------------------------------

/// One outer iteration k: the state at x^k and the accepted step to x^{k+1}.
struct IterationRecord {
  std::size_t k = 0;
  double psi = 0.0;        // ψ(x^k)
  double reference = 0.0;  // R_k
  double gamma = 0.0;      // accepted γ_k
  std::size_t backtracks = 0;
  double step_norm = 0.0;  // ||x^{k+1} - x^k||
  double residual = 0.0;
  double xi = 0.0;  // sqrt(R_{k-1} - R_k), zero for k = 0
};

using Trace = std::vector<IterationRecord>;

enum class RunStatus { ConvergedResidual, MaxIters, BacktrackCapExceeded, NumericalFailure };

const char* to_string(RunStatus status);

struct RunResult {
  RunStatus status = RunStatus::MaxIters;
  Vector x_final;
  Trace trace;
  /// x^0, x^1, ... when iterate recording was requested.
  std::vector<Vector> iterates;
  double wall_time = 0.0;
  std::string message;

  bool ok() const {
    return status == RunStatus::ConvergedResidual || status == RunStatus::MaxIters;
  }
};

}  // namespace nmpg
