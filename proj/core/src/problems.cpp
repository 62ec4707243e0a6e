#include "nmpg/problems.hpp"

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "nmpg/prox.hpp"

namespace nmpg {

namespace {

struct KindName {
  ProblemKind kind;
  std::string_view name;
};

constexpr std::array<KindName, 6> kKindNames{{
    {ProblemKind::LassoIdentity, "lasso_identity"},
    {ProblemKind::LassoGeneral, "lasso_general"},
    {ProblemKind::QuarticScalar, "quartic_scalar"},
    {ProblemKind::QuarticRegressionL0, "quartic_regression_l0"},
    {ProblemKind::SparsityProjectedQuadratic, "sparsity_projected_quadratic"},
    {ProblemKind::ExpFitL1, "exp_fit_l1"},
}};

std::size_t cols_of(const Matrix& A) { return static_cast<std::size_t>(A.cols()); }

void check_data(const Matrix& A, const Vector& b, const char* who) {
  if (A.rows() == 0 || A.cols() == 0) throw std::invalid_argument(std::string(who) + ": empty A");
  if (A.rows() != b.size()) throw std::invalid_argument(std::string(who) + ": rows(A) != size(b)");
}

Vector gaussian_vector(std::mt19937_64& rng, std::size_t n, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  return v;
}

Matrix gaussian_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = normal(rng);
  }
  return A;
}

/// Strictly diagonally dominant square matrix, hence nonsingular.
Matrix diag_dominant_matrix(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  const auto m = static_cast<Eigen::Index>(n);
  Matrix A(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) A(i, j) = i == j ? 0.0 : uniform(rng) / static_cast<double>(n);
  }
  for (Eigen::Index i = 0; i < m; ++i) A(i, i) = 1.0 + A.row(i).cwiseAbs().sum();
  return A;
}

/// Random vector with `nnz` nonzero entries of magnitude in [1, 2].
Vector sparse_vector(std::mt19937_64& rng, std::size_t n, std::size_t nnz) {
  Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
  std::uniform_real_distribution<double> mag(1.0, 2.0);
  std::bernoulli_distribution sign(0.5);
  for (std::size_t j = 0; j < nnz && j < n; ++j) {
    const auto idx = static_cast<Eigen::Index>((j * n) / nnz);
    x[idx] = (sign(rng) ? 1.0 : -1.0) * mag(rng);
  }
  return x;
}

SmoothModel least_squares(const Matrix& A, const Vector& b, LipschitzClass lipschitz) {
  return SmoothModel(
      cols_of(A),
      [A, b](const Vector& x) { return 0.5 * (A * x - b).squaredNorm(); },
      [A, b](const Vector& x) -> Vector { return A.transpose() * (A * x - b); }, lipschitz);
}

double spectral_norm_sq(const Matrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A.transpose() * A, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

}  // namespace

std::string_view to_string(ProblemKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ProblemKind> parse_problem_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

ProblemSpec ProblemSpec::resolved() const {
  ProblemSpec r = *this;
  auto def = [](auto& field, auto value) {
    if (field == 0) field = value;
  };
  switch (kind) {
    case ProblemKind::LassoIdentity:
      def(r.dim, std::size_t{10});
      def(r.lambda, 0.5);
      break;
    case ProblemKind::LassoGeneral:
      def(r.dim, std::size_t{50});
      def(r.lambda, 0.1);
      break;
    case ProblemKind::QuarticScalar:
      r.dim = 1;
      break;
    case ProblemKind::QuarticRegressionL0:
      def(r.dim, std::size_t{10});
      def(r.rows, 2 * r.dim);
      def(r.lambda, 0.01);
      break;
    case ProblemKind::SparsityProjectedQuadratic:
      def(r.dim, std::size_t{20});
      def(r.rows, 2 * r.dim);
      def(r.s, std::max<std::size_t>(1, r.dim / 5));
      break;
    case ProblemKind::ExpFitL1:
      def(r.dim, std::size_t{5});
      def(r.rows, 4 * r.dim);
      def(r.lambda, 0.05);
      break;
  }
  return r;
}

std::string ProblemSpec::label() const {
  return std::string(to_string(kind)) + "_seed" + std::to_string(seed);
}

CompositeProblem make_problem(const ProblemSpec& raw) {
  const ProblemSpec spec = raw.resolved();
  std::mt19937_64 rng(spec.seed);
  CompositeProblem problem = [&]() -> CompositeProblem {
    switch (spec.kind) {
      case ProblemKind::LassoIdentity:
        return make_lasso_identity(gaussian_vector(rng, spec.dim, 2.0), spec.lambda);
      case ProblemKind::LassoGeneral: {
        Matrix A = diag_dominant_matrix(rng, spec.dim);
        Vector b = gaussian_vector(rng, spec.dim, 1.0);
        return make_lasso_general(A, b, spec.lambda);
      }
      case ProblemKind::QuarticScalar:
        return make_quartic_scalar();
      case ProblemKind::QuarticRegressionL0: {
        const double scale = 1.0 / std::sqrt(static_cast<double>(spec.dim));
        Matrix A = gaussian_matrix(rng, spec.rows, spec.dim, scale);
        Vector x_true = sparse_vector(rng, spec.dim, std::max<std::size_t>(1, spec.dim / 3));
        Vector b = A * x_true + gaussian_vector(rng, spec.rows, 0.3);
        return make_quartic_regression_l0(A, b, spec.lambda);
      }
      case ProblemKind::SparsityProjectedQuadratic: {
        const double scale = 1.0 / std::sqrt(static_cast<double>(spec.rows));
        Matrix A = gaussian_matrix(rng, spec.rows, spec.dim, scale);
        Vector x_true = sparse_vector(rng, spec.dim, spec.s);
        Vector b = A * x_true + gaussian_vector(rng, spec.rows, 0.05);
        return make_sparsity_projected_quadratic(A, b, spec.s);
      }
      case ProblemKind::ExpFitL1: {
        const double scale = 0.5 / std::sqrt(static_cast<double>(spec.dim));
        Matrix A = gaussian_matrix(rng, spec.rows, spec.dim, scale);
        Vector x_true = sparse_vector(rng, spec.dim, std::max<std::size_t>(1, spec.dim / 2));
        Vector b = (A * x_true).array().exp().matrix() + gaussian_vector(rng, spec.rows, 0.05);
        return make_exp_fit_l1(A, b, spec.lambda);
      }
    }
    throw std::invalid_argument("make_problem: unknown kind");
  }();
  return problem;
}

CompositeProblem make_lasso_identity(const Vector& b, double lambda) {
  if (b.size() == 0) throw std::invalid_argument("make_lasso_identity: empty b");
  const auto n = static_cast<std::size_t>(b.size());
  SmoothModel f(
      n, [b](const Vector& x) { return 0.5 * (x - b).squaredNorm(); },
      [b](const Vector& x) -> Vector { return x - b; }, GlobalLipschitz{1.0});
  auto phi = std::make_shared<L1Term>(n, lambda);
  Vector x_star = prox_l1(b, lambda);
  const double psi_star = 0.5 * (x_star - b).squaredNorm() + lambda * x_star.lpNorm<1>();
  return CompositeProblem(std::move(f), std::move(phi), "lasso_identity",
                          Optimum{psi_star, std::move(x_star)},
                          KlHypothesis{0.5, "strongly convex lasso"});
}

CompositeProblem make_lasso_general(const Matrix& A, const Vector& b, double lambda) {
  check_data(A, b, "make_lasso_general");
  if (A.rows() == A.cols() && A.isIdentity(0.0)) return make_lasso_identity(b, lambda);
  std::optional<Optimum> optimum;
  if (b.isZero(0.0)) optimum = Optimum{0.0, Vector::Zero(A.cols())};
  auto phi = std::make_shared<L1Term>(cols_of(A), lambda);
  return CompositeProblem(least_squares(A, b, GlobalLipschitz{spectral_norm_sq(A)}), std::move(phi),
                          "lasso_general", std::move(optimum),
                          KlHypothesis{0.5, "lasso with full column rank A"});
}

CompositeProblem make_quartic_scalar() {
  SmoothModel f(
      1, [](const Vector& x) { return 0.25 * std::pow(x[0], 4); },
      [](const Vector& x) -> Vector { return Vector::Constant(1, x[0] * x[0] * x[0]); },
      LocalLipschitzOnly{});
  return CompositeProblem(std::move(f), std::make_shared<ZeroTerm>(1), "quartic_scalar",
                          Optimum{0.0, Vector::Zero(1)},
                          KlHypothesis{0.25, "x^4/4 at the origin"});
}

CompositeProblem make_quartic_regression_l0(const Matrix& A, const Vector& b, double lambda) {
  check_data(A, b, "make_quartic_regression_l0");
  SmoothModel f(
      cols_of(A),
      [A, b](const Vector& x) { return 0.25 * (A * x - b).array().pow(4).sum(); },
      [A, b](const Vector& x) -> Vector {
        const Vector r = A * x - b;
        return A.transpose() * r.array().cube().matrix();
      },
      LocalLipschitzOnly{});
  return CompositeProblem(std::move(f), std::make_shared<L0Term>(cols_of(A), lambda),
                          "quartic_regression_l0");
}

CompositeProblem make_sparsity_projected_quadratic(const Matrix& A, const Vector& b, std::size_t s) {
  check_data(A, b, "make_sparsity_projected_quadratic");
  auto phi = std::make_shared<SparsitySetIndicator>(cols_of(A), s);
  std::optional<Optimum> optimum;
  if (b.isZero(0.0)) optimum = Optimum{0.0, Vector::Zero(A.cols())};
  return CompositeProblem(least_squares(A, b, GlobalLipschitz{spectral_norm_sq(A)}), std::move(phi),
                          "sparsity_projected_quadratic", std::move(optimum));
}

CompositeProblem make_exp_fit_l1(const Matrix& A, const Vector& b, double lambda) {
  check_data(A, b, "make_exp_fit_l1");
  SmoothModel f(
      cols_of(A),
      [A, b](const Vector& x) {
        return ((A * x).array().exp() - b.array()).square().sum();
      },
      [A, b](const Vector& x) -> Vector {
        const Eigen::ArrayXd e = (A * x).array().exp();
        return A.transpose() * (2.0 * (e - b.array()) * e).matrix();
      },
      LocalLipschitzOnly{});
  return CompositeProblem(std::move(f), std::make_shared<L1Term>(cols_of(A), lambda), "exp_fit_l1");
}

}  // namespace nmpg
