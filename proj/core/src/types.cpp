#include "nmpg/types.hpp"

#include <cmath>
#include <sstream>

namespace nmpg {

SmoothModel::SmoothModel(std::size_t dim, ValueFn value, GradFn gradient, LipschitzClass lipschitz)
    : dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)), lipschitz_(lipschitz) {
  if (dim_ == 0) throw std::invalid_argument("SmoothModel: dim must be positive");
  if (!value_ || !gradient_) throw std::invalid_argument("SmoothModel: missing evaluator");
}

double SmoothModel::value(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_) {
    throw std::invalid_argument("SmoothModel::value: dimension mismatch");
  }
  return value_(x);
}

Vector SmoothModel::gradient(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_) {
    throw std::invalid_argument("SmoothModel::gradient: dimension mismatch");
  }
  return gradient_(x);
}

ExtReal SeparableTerm::value(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) {
    throw std::invalid_argument(name() + ": dimension mismatch");
  }
  ExtReal sum(0.0);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sum = sum + component_value(static_cast<std::size_t>(i), x[i]);
    if (sum.is_infinite()) break;
  }
  return sum;
}

namespace {

void check_optimum(const CompositeProblem& p) {
  if (!p.optimum() || !p.optimum()->x_star) return;
  const auto& opt = *p.optimum();
  if (static_cast<std::size_t>(opt.x_star->size()) != p.dim()) {
    throw std::invalid_argument(p.name() + ": x_star has wrong dimension");
  }
  const ExtReal psi = psi_eval(p, *opt.x_star);
  if (psi.is_infinite() ||
      std::abs(psi.value() - opt.psi_star) > 1e-10 * (1.0 + std::abs(opt.psi_star))) {
    std::ostringstream msg;
    msg << p.name() << ": psi(x_star) = " << psi << " disagrees with psi_star = " << opt.psi_star;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

CompositeProblem::CompositeProblem(SmoothModel f, std::shared_ptr<const NonsmoothTerm> phi,
                                   std::string name, std::optional<Optimum> optimum,
                                   std::optional<KlHypothesis> kl)
    : f_(std::move(f)),
      phi_(std::move(phi)),
      name_(std::move(name)),
      optimum_(std::move(optimum)),
      kl_(std::move(kl)) {
  if (!phi_) throw std::invalid_argument("CompositeProblem: null nonsmooth term");
  if (f_.dim() != phi_->dim()) {
    throw std::invalid_argument("CompositeProblem " + name_ + ": f.dim != phi.dim");
  }
  if (kl_ && !(kl_->kappa > 0.0 && kl_->kappa < 1.0)) {
    throw std::invalid_argument("CompositeProblem " + name_ + ": KL exponent must lie in (0,1)");
  }
  check_optimum(*this);
}

CompositeProblem CompositeProblem::with_optimum(Optimum optimum) const {
  return CompositeProblem(f_, phi_, name_, std::move(optimum), kl_);
}

ExtReal psi_eval(const CompositeProblem& problem, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != problem.dim()) {
    throw std::invalid_argument("psi_eval: dimension mismatch for " + problem.name());
  }
  const double fx = problem.f().value(x);
  if (!std::isfinite(fx)) throw NumericalError("f(x) is not finite for " + problem.name());
  const ExtReal phix = problem.phi().value(x);
  if (phix.is_infinite()) return phix;
  const double sum = fx + phix.value();
  if (!std::isfinite(sum)) throw NumericalError("psi(x) overflowed for " + problem.name());
  return ExtReal(sum);
}

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
}

}  // namespace

void SolverParams::validate() const {
  require(gamma_min > 0.0 && std::isfinite(gamma_min), "gamma_min", "must be positive and finite");
  require(gamma_max > 0.0 && std::isfinite(gamma_max), "gamma_max", "must be positive and finite");
  require(gamma_min <= gamma_max, "gamma_min", "must not exceed gamma_max");
  require(alpha_min > 0.0 && alpha_min < 1.0, "alpha_min", "must lie in (0,1)");
  require(alpha_max > 0.0 && alpha_max < 1.0, "alpha_max", "must lie in (0,1)");
  require(alpha_min <= alpha_max, "alpha_min", "must not exceed alpha_max");
  require(beta_min > 0.0 && beta_min < 1.0, "beta_min", "must lie in (0,1)");
  require(beta_max > 0.0 && beta_max < 1.0, "beta_max", "must lie in (0,1)");
  require(beta_min <= beta_max, "beta_min", "must not exceed beta_max");
  require(p_min > 0.0 && p_min <= 1.0, "p_min", "must lie in (0,1]");
  require(epsilon >= 0.0 && std::isfinite(epsilon), "epsilon", "must be nonnegative and finite");
  require(max_outer_iters > 0, "max_outer_iters", "must be positive");
  if (const auto* c = std::get_if<ConstantGamma>(&gamma_init)) {
    require(c->value > 0.0 && std::isfinite(c->value), "gamma_init.value", "must be positive");
  }
  if (const auto* m = std::get_if<MaxReference>(&reference)) {
    require(m->window > 0, "reference.window", "must be positive");
  }
}

SolverParams monotone(SolverParams params) {
  params.p_min = 1.0;
  params.reference = MeanReference{};
  return params;
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::ConvergedResidual: return "ConvergedResidual";
    case RunStatus::MaxIters: return "MaxIters";
    case RunStatus::BacktrackCapExceeded: return "BacktrackCapExceeded";
    case RunStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

}  // namespace nmpg
