#include "nmpg/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nmpg {

namespace {

void require_positive(double tau, const char* who) {
  if (!(tau > 0.0)) throw std::invalid_argument(std::string(who) + ": tau must be positive");
}

void require_gamma(double gamma, const std::string& who) {
  if (!(gamma > 0.0)) throw std::invalid_argument(who + ": gamma must be positive");
}

void require_dim(const Vector& v, std::size_t dim, const std::string& who) {
  if (static_cast<std::size_t>(v.size()) != dim) {
    throw std::invalid_argument(who + ": dimension mismatch");
  }
}

double lhalf_objective(double t, double v, double tau) {
  return tau * std::sqrt(std::abs(t)) + 0.5 * (t - v) * (t - v);
}

}  // namespace

Vector prox_l1(const Vector& v, double tau) {
  require_positive(tau, "prox_l1");
  Vector z(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - tau;
    z[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  return z;
}

Vector prox_l0(const Vector& v, double tau) {
  require_positive(tau, "prox_l0");
  const double threshold = std::sqrt(2.0 * tau);
  Vector z(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    z[i] = std::abs(v[i]) > threshold ? v[i] : 0.0;
  }
  return z;
}

double prox_lhalf_scalar(double v, double tau) {
  const double a = std::abs(v);
  if (a == 0.0) return 0.0;

  // On (0, a] the stationarity function h(t) = t - a + (tau/2) t^{-1/2} is
  // convex with its minimum at t_m = (tau/4)^{2/3}; h(a) > 0. A nonzero local
  // minimizer exists iff h(t_m) <= 0, and it is the root of h on [t_m, a].
  const double t_m = std::cbrt((tau / 4.0) * (tau / 4.0));
  if (t_m >= a) return 0.0;
  auto h = [&](double t) { return t - a + 0.5 * tau / std::sqrt(t); };
  if (h(t_m) > 0.0) return 0.0;

  double lo = t_m;  // h(lo) <= 0
  double hi = a;    // h(hi) > 0
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (h(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t = 0.5 * (lo + hi);
  const double at_zero = lhalf_objective(0.0, a, tau);
  const double at_t = lhalf_objective(t, a, tau);
  return at_t < at_zero ? std::copysign(t, v) : 0.0;
}

Vector prox_lhalf(const Vector& v, double tau) {
  require_positive(tau, "prox_lhalf");
  Vector z(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) z[i] = prox_lhalf_scalar(v[i], tau);
  return z;
}

Vector prox_box(const Vector& v, const Vector& lo, const Vector& hi) {
  if (v.size() != lo.size() || v.size() != hi.size()) {
    throw std::invalid_argument("prox_box: dimension mismatch");
  }
  if ((lo.array() > hi.array()).any()) throw std::invalid_argument("prox_box: lo > hi");
  return v.cwiseMax(lo).cwiseMin(hi);
}

Vector prox_sparsity(const Vector& v, std::size_t s) {
  const auto n = static_cast<std::size_t>(v.size());
  if (s < 1 || s > n) throw std::invalid_argument("prox_sparsity: need 1 <= s <= dim");
  if (s == n) return v;
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s - 1), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     const double ma = std::abs(v[a]);
                     const double mb = std::abs(v[b]);
                     return ma > mb || (ma == mb && a < b);
                   });
  Vector z = Vector::Zero(v.size());
  for (std::size_t j = 0; j < s; ++j) z[order[j]] = v[order[j]];
  return z;
}

// Terms ------------------------------------------------------------------------

ZeroTerm::ZeroTerm(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("ZeroTerm: dim must be positive");
}

ExtReal ZeroTerm::component_value(std::size_t, double) const { return ExtReal(0.0); }

Vector ZeroTerm::prox(double gamma, const Vector& v) const {
  require_gamma(gamma, name());
  require_dim(v, dim_, name());
  return v;
}

L1Term::L1Term(std::size_t dim, double lambda) : dim_(dim), lambda_(lambda) {
  if (dim == 0) throw std::invalid_argument("L1Term: dim must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("L1Term: lambda must be positive");
}

ExtReal L1Term::component_value(std::size_t, double t) const {
  return ExtReal(lambda_ * std::abs(t));
}

Vector L1Term::prox(double gamma, const Vector& v) const {
  require_gamma(gamma, name());
  require_dim(v, dim_, name());
  return prox_l1(v, gamma * lambda_);
}

L0Term::L0Term(std::size_t dim, double lambda) : dim_(dim), lambda_(lambda) {
  if (dim == 0) throw std::invalid_argument("L0Term: dim must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("L0Term: lambda must be positive");
}

ExtReal L0Term::component_value(std::size_t, double t) const {
  return ExtReal(t != 0.0 ? lambda_ : 0.0);
}

Vector L0Term::prox(double gamma, const Vector& v) const {
  require_gamma(gamma, name());
  require_dim(v, dim_, name());
  return prox_l0(v, gamma * lambda_);
}

LHalfTerm::LHalfTerm(std::size_t dim, double lambda) : dim_(dim), lambda_(lambda) {
  if (dim == 0) throw std::invalid_argument("LHalfTerm: dim must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("LHalfTerm: lambda must be positive");
}

ExtReal LHalfTerm::component_value(std::size_t, double t) const {
  return ExtReal(lambda_ * std::sqrt(std::abs(t)));
}

Vector LHalfTerm::prox(double gamma, const Vector& v) const {
  require_gamma(gamma, name());
  require_dim(v, dim_, name());
  return prox_lhalf(v, gamma * lambda_);
}

BoxIndicator::BoxIndicator(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() == 0 || lo_.size() != hi_.size()) {
    throw std::invalid_argument("BoxIndicator: lo and hi must be nonempty and equally sized");
  }
  if ((lo_.array() > hi_.array()).any()) throw std::invalid_argument("BoxIndicator: lo > hi");
}

ExtReal BoxIndicator::component_value(std::size_t i, double t) const {
  const auto j = static_cast<Eigen::Index>(i);
  return (t >= lo_[j] && t <= hi_[j]) ? ExtReal(0.0) : ExtReal::infinity();
}

Vector BoxIndicator::prox(double gamma, const Vector& v) const {
  require_gamma(gamma, name());
  return prox_box(v, lo_, hi_);
}

Vector BoxIndicator::domain_witness() const { return Vector::Zero(lo_.size()).cwiseMax(lo_).cwiseMin(hi_); }

SparsitySetIndicator::SparsitySetIndicator(std::size_t dim, std::size_t s) : dim_(dim), s_(s) {
  if (s < 1 || s > dim) throw std::invalid_argument("SparsitySetIndicator: need 1 <= s <= dim");
}

ExtReal SparsitySetIndicator::value(const Vector& x) const {
  require_dim(x, dim_, name());
  const auto nnz = static_cast<std::size_t>((x.array() != 0.0).count());
  return nnz <= s_ ? ExtReal(0.0) : ExtReal::infinity();
}

Vector SparsitySetIndicator::prox(double gamma, const Vector& v) const {
  require_gamma(gamma, name());
  require_dim(v, dim_, name());
  return prox_sparsity(v, s_);
}

}  // namespace nmpg
