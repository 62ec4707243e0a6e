#pragma once

#include <cstddef>
#include <string>

#include "nmpg/types.hpp"

namespace nmpg {

// Closed-form proximal maps. `tau` is the product γλ of stepsize and weight.

/// Soft thresholding: sign(v_i) max(|v_i| - tau, 0).
Vector prox_l1(const Vector& v, double tau);

/// Hard thresholding at sqrt(2 tau). |v_i| == sqrt(2 tau) maps to 0.
Vector prox_l0(const Vector& v, double tau);

/// Componentwise minimizer of tau |t|^{1/2} + (t - v_i)^2 / 2. Ties map to 0.
Vector prox_lhalf(const Vector& v, double tau);

/// Scalar kernel of prox_lhalf.
double prox_lhalf_scalar(double v, double tau);

/// Componentwise clamp to [lo, hi].
Vector prox_box(const Vector& v, const Vector& lo, const Vector& hi);

/// Keeps the s largest-magnitude entries of v; equal magnitudes prefer the
/// lower index.
Vector prox_sparsity(const Vector& v, std::size_t s);

// Terms ------------------------------------------------------------------------

/// φ ≡ 0.
class ZeroTerm final : public SeparableTerm {
 public:
  explicit ZeroTerm(std::size_t dim);
  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "zero"; }
  ExtReal component_value(std::size_t i, double t) const override;
  Vector prox(double gamma, const Vector& v) const override;
  Vector domain_witness() const override { return Vector::Zero(dim_); }

 private:
  std::size_t dim_;
};

/// φ(x) = λ ||x||_1.
class L1Term final : public SeparableTerm {
 public:
  L1Term(std::size_t dim, double lambda);
  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "l1"; }
  double lambda() const { return lambda_; }
  ExtReal component_value(std::size_t i, double t) const override;
  Vector prox(double gamma, const Vector& v) const override;
  Vector domain_witness() const override { return Vector::Zero(dim_); }

 private:
  std::size_t dim_;
  double lambda_;
};

/// φ(x) = λ ||x||_0.
class L0Term : public SeparableTerm {
 public:
  L0Term(std::size_t dim, double lambda);
  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "l0"; }
  double lambda() const { return lambda_; }
  ExtReal component_value(std::size_t i, double t) const override;
  Vector prox(double gamma, const Vector& v) const override;
  Vector domain_witness() const override { return Vector::Zero(dim_); }

 private:
  std::size_t dim_;
  double lambda_;
};

/// φ(x) = λ Σ_i |x_i|^{1/2}.
class LHalfTerm final : public SeparableTerm {
 public:
  LHalfTerm(std::size_t dim, double lambda);
  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "lhalf"; }
  double lambda() const { return lambda_; }
  ExtReal component_value(std::size_t i, double t) const override;
  Vector prox(double gamma, const Vector& v) const override;
  Vector domain_witness() const override { return Vector::Zero(dim_); }

 private:
  std::size_t dim_;
  double lambda_;
};

/// Indicator of {x : lo <= x <= hi}.
class BoxIndicator final : public SeparableTerm {
 public:
  BoxIndicator(Vector lo, Vector hi);
  std::size_t dim() const override { return static_cast<std::size_t>(lo_.size()); }
  std::string name() const override { return "box"; }
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }
  ExtReal component_value(std::size_t i, double t) const override;
  Vector prox(double gamma, const Vector& v) const override;
  Vector domain_witness() const override;

 private:
  Vector lo_;
  Vector hi_;
};

/// Indicator of {x : ||x||_0 <= s}. Not separable.
class SparsitySetIndicator final : public NonsmoothTerm {
 public:
  SparsitySetIndicator(std::size_t dim, std::size_t s);
  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "sparsity"; }
  std::size_t sparsity() const { return s_; }
  ExtReal value(const Vector& x) const override;
  Vector prox(double gamma, const Vector& v) const override;
  Vector domain_witness() const override { return Vector::Zero(dim_); }

 private:
  std::size_t dim_;
  std::size_t s_;
};

}  // namespace nmpg
