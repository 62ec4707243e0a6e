#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "nmpg/types.hpp"

namespace nmpg {

enum class ProblemKind {
  LassoIdentity,
  LassoGeneral,
  QuarticScalar,
  QuarticRegressionL0,
  SparsityProjectedQuadratic,
  ExpFitL1,
};

std::string_view to_string(ProblemKind kind);
/// Inverse of to_string; std::nullopt for an unknown name.
std::optional<ProblemKind> parse_problem_kind(std::string_view name);

/// A seeded, reproducible description of a generated instance.
///
/// `dim` is the number of unknowns and `rows` the number of observations for
/// the regression kinds; zero selects the per-kind default. `lambda` and `s`
/// likewise default per kind when left at zero.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::LassoIdentity;
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  std::size_t s = 0;

  /// Spec with every zero field replaced by its per-kind default.
  ProblemSpec resolved() const;
  /// "<kind>_seed<seed>", used for trace file names and cache keys.
  std::string label() const;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

/// Instantiate the problem described by `spec` (after resolving defaults).
CompositeProblem make_problem(const ProblemSpec& spec);

/// f(x) = ½||x - b||², φ = λ||·||₁. Carries the closed-form optimum and κ = ½.
CompositeProblem make_lasso_identity(const Vector& b, double lambda);

/// f(x) = ½||Ax - b||², φ = λ||·||₁, κ = ½. No optimum attached; see
/// solve_reference() for a numerical one.
CompositeProblem make_lasso_general(const Matrix& A, const Vector& b, double lambda);

/// f(x) = ¼x⁴ on R, φ ≡ 0. ψ* = 0 at x* = 0, κ = ¼.
CompositeProblem make_quartic_scalar();

/// f(x) = ¼ Σ_i (<a_i, x> - b_i)⁴, φ = λ||·||₀.
CompositeProblem make_quartic_regression_l0(const Matrix& A, const Vector& b, double lambda);

/// f(x) = ½||Ax - b||² over {||x||₀ <= s}.
CompositeProblem make_sparsity_projected_quadratic(const Matrix& A, const Vector& b, std::size_t s);

/// f(x) = Σ_i (exp(<a_i, x>) - b_i)², φ = λ||·||₁. Rows of `A` are the a_i.
CompositeProblem make_exp_fit_l1(const Matrix& A, const Vector& b, double lambda);

}  // namespace nmpg
